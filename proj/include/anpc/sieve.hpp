#pragma once

// Primes and prime powers near x, and the sum over them of
// (1/m) [chi_x(p^m) - phi(p^m)].

#include <cstdint>
#include <vector>

#include "anpc/interval.hpp"
#include "anpc/mellin.hpp"

namespace anpc {

using u128 = unsigned __int128;

// All primes <= limit in ascending order (Eratosthenes).
std::vector<std::uint64_t> small_primes(std::uint64_t limit);

// pi(n) by direct sieving.
std::uint64_t prime_count(std::uint64_t n);

// Primes used to sieve ranges up to limit^2.
struct SievingPrimes {
    std::uint64_t limit = 1;
    std::vector<std::uint64_t> primes;

    static SievingPrimes covering(std::uint64_t hi); // primes up to isqrt(hi)
};

// Moments over the primes p in [x0 - w, x0 + w]:
//   s0 = sum 1, s1 = sum (x0 - p), s2 = sum (x0 - p)^2.
struct SegmentSummary {
    std::int64_t x0 = 0;
    std::int64_t w = 0;
    std::int64_t s0 = 0;
    std::int64_t s1 = 0;
    u128 s2 = 0;

    std::int64_t lo() const { return x0 - w; }
    std::int64_t hi() const { return x0 + w; }
    friend bool operator==(const SegmentSummary&, const SegmentSummary&) = default;
};

// InsufficientSievingPrimes when primes do not reach sqrt(x0 + w);
// ParamViolation for w outside [0, 2^31) or x0 - w < 0.
SegmentSummary sieve_segment(std::int64_t x0, std::int64_t w, const SievingPrimes& primes);

// Summaries for a list of segments that lie inside [lo, hi], sieving the
// range once. The segments must be sorted and disjoint.
std::vector<SegmentSummary> sieve_segments(const std::vector<SegmentSummary>& shells, const SievingPrimes& primes);

// Best line a*t approximating a3*t^3 on [-w, w] and its worst error.
struct CubicLine {
    RealInterval a;
    RealInterval err;
};
CubicLine cubic_line_coeff(const RealInterval& a3, const RealInterval& w);

// phi^(k)(t) for k = 0 .. 4 at a point or over an interval of t.
RealInterval phi_derivative(int k, const RealInterval& t, const MellinContext& ctx);

// Encloses sum of phi(p) over the segment's primes from the three moments,
// the cubic-as-line correction and a fourth-derivative remainder.
// SegmentTooWide when the remainder exceeds `share`.
RealInterval segment_phi_sum(const SegmentSummary& seg, const MellinContext& ctx, double share = 1e300,
                             RealInterval* remainder = nullptr);

struct WindowSpec {
    std::int64_t x1 = 0;
    std::int64_t x2 = 0;
    std::int64_t segment_width = 1; // 2w + 1 for the Taylor segments
};

// x1 = floor(x e^{-k lambda}), x2 = ceil(x e^{k lambda}).
WindowSpec make_window(std::int64_t x, const MellinContext& ctx, double k, std::int64_t segment_width);

// Largest odd Taylor segment width whose remainder, charged as if every
// integer were prime, stays within `budget` over the whole window.
std::int64_t choose_segment_width(const WindowSpec& window, std::int64_t x, const MellinContext& ctx, double budget);

// Shells (x0, w) tiling [x1, x2]; x itself is always a one-point segment so
// no segment straddles x.
std::vector<SegmentSummary> tile_window(const WindowSpec& window, std::int64_t x);

struct PrimePowerTerm {
    std::uint64_t p = 0;
    int m = 0;
    std::uint64_t value = 0;
    int chi_twice = 0; // 2 chi_x(p^m) in {0, 1, 2}
};

// All p^m in [x1, x2] with m >= 2, ascending by value.
std::vector<PrimePowerTerm> prime_power_terms(const WindowSpec& window, std::int64_t x);

struct WindowSum {
    RealInterval value;
    RealInterval taylor_error; // total remainder charged over segments
    std::int64_t primes = 0;
};

// Sum over p^m in the window of (1/m)[chi_x(p^m) - phi(p^m)].
// TilingGap unless the segments tile [x1, x2] exactly.
WindowSum window_sum(const WindowSpec& window, const std::vector<SegmentSummary>& segments,
                     const std::vector<PrimePowerTerm>& powers, const MellinContext& ctx, std::int64_t x,
                     double budget = 1e300);

// [0, Tlow + Thigh] bounding the prime-power mass outside the window.
RealInterval window_tail_bound(const WindowSpec& window, const MellinContext& ctx);

// Integer k-th root, floor.
std::uint64_t iroot(std::uint64_t n, int k);

} // namespace anpc
