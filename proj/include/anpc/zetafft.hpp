#pragma once

// Gaussian-windowed evaluation of
//
//   f(t) = pi^(-i(t+t0)/2) Gamma((1/2 + i(t+t0))/2) exp(pi(t+t0)/4 - t^2/2h^2) zeta(1/2 + i(t+t0))
//
// on the grid t = n/A, n in [-N/2, N/2), through the Fourier transform of f
// assembled from the Dirichlet series of zeta. f is real and has the sign of
// Hardy's Z(t0 + t), so its sign changes bracket zeros on the critical line.
//
// Index conventions: arrays of length N are indexed by n mod N, so entry N-1
// holds n = -1. The sample spacing is 1/A = B/N and the transform spacing is
// 1/B.

#include <cstddef>
#include <vector>

#include "anpc/interval.hpp"

namespace anpc {

struct GridParams {
    double t0 = 0;
    double h = 4;
    double B = 64;     // period of the sampled window in t
    long N = 1024;     // transform length, a power of two; A = N / B
    int K = 6;         // Taylor order of the convolution
    long J = 0;        // Dirichlet terms kept; 0 means ceil(4 sqrt(t0))
    int sigma_g = 0;   // contour abscissa for the G bounds; 0 picks the best of 3, 5, 7, 9
    int sigma_f = 0;   // same for the F bounds

    // h = 4, N = 1024 with A = 16, B = 64, K = 6 and J = ceil(4 sqrt(t0)).
    // For t0 < 32 the period shrinks to 2 floor(t0) so that B/2 <= t0.
    static GridParams defaults(double t0);

    RealInterval A() const;    // N / B
    double A_double() const;
    long terms() const;        // J after resolving the default
    RealInterval xi() const;   // 1 / 2B
    RealInterval beta() const; // 1/6 + log log t0 / log t0

    // ParamViolation unless every precondition of the error bounds used here holds.
    void validate() const;
};

// Each bound is expressed as its effect on the final f values; rounding is
// the half-width left by the transforms themselves. Every f enclosure is the
// thin transform result widened by the other terms, so no radius exceeds
// total().
struct StageBudget {
    RealInterval g_alias;
    RealInterval G_alias;
    RealInterval series_tail; // Dirichlet tail plus the residue of the pole at s = 1
    RealInterval taylor;
    RealInterval F_alias;
    RealInterval f_alias;
    RealInterval rounding;

    RealInterval total() const;
};

struct GridEvaluation {
    GridParams params;
    std::vector<RealInterval> f_values; // entry i holds f((i - N/2)/A)
    StageBudget budget;

    // t0 + (i - N/2)/A.
    RealInterval ordinate(std::size_t i) const;
};

// g(n/A; k) = Gamma((1/2 + i(t+t0))/2) exp(pi(t+t0)/4 - t^2/2h^2) (-2 pi i t)^k.
ComplexInterval g_eval(long n, int k, const GridParams& p);

// Bound on |sum_{l != 0} g(n/A + lB; k)|.
RealInterval g_alias_bound(int k, const GridParams& p);

enum class DftDirection {
    Forward, // X(m) = sum_n x(n) e(-mn/N)
    Inverse, // x(n) = sum_m X(m) e(mn/N), so Inverse(Forward(v)) = N v
};

// In-place radix-2 transform with interval twiddles. SizeMismatch unless the
// length is a power of two.
void dft(std::vector<ComplexInterval>& values, DftDirection direction);

// Bound for the integral of |Gamma((sigma + i(t+t0))/2) exp(pi(t+t0)/4 -
// t^2/2h^2) (1/2 + sigma - it)^k| times (2 pi)^k, in the per-power form
// obtained by splitting at t = sigma + 1/2.
RealInterval c_bound(int sigma, int k, const GridParams& p);

// Envelope for |G^(k)(u)|, minimised over the admissible abscissae.
RealInterval gk_envelope(int k, const RealInterval& u, const GridParams& p);

// Bound on |sum_{l != 0} G^(k)(m/B + lA)| valid for m in [0, N/2].
RealInterval G_alias_bound(int k, const GridParams& p);

// Same aliasing sum for a single position u in [0, A), from the geometric
// series of the envelope on both sides.
RealInterval G_alias_bound_at(int k, const RealInterval& u, const GridParams& p);

// G~^(k)(m) = sum_l G^(k)(m/B + lA), computed from the samples g(n/A; k)
// alone. The samples stand for g~(n; k) only up to g_alias each, which moves
// every G~ value by at most B g_alias; that disc is carried separately.
struct GLayer {
    std::vector<ComplexInterval> values;
    RealInterval g_alias;
};

// Forward transform of the samples scaled by 1/A.
GLayer g_to_G(int k, const GridParams& p);

// Magnitude of the term separating F(x) from the full Dirichlet expansion.
RealInterval residue_bound(const RealInterval& x, const GridParams& p);

// Tail of the Dirichlet expansion beyond J at x >= 0; x = 0 gives the
// uniform bound.
RealInterval series_tail_bound(const RealInterval& x, const GridParams& p);

// Per-coefficient Taylor remainder with step xi: the uniform bound
// 2^((K+5)/2) pi^(K+1/2) h^(K+1) xi^K / Gamma((K+2)/2).
RealInterval taylor_bound(const GridParams& p, const RealInterval& xi);

// Bound on |F(x)| for real x with the given odd abscissa 1 < sigma < t0.
RealInterval f_hat_bound(const RealInterval& x, int sigma, const GridParams& p);

// Bound on |sum_{l != 0} F(n/B + lA)| for n in [0, N/2].
RealInterval F_alias_bound(const GridParams& p);

// 12 (t + t0)^beta exp(-t^2/2h^2) for t >= 0.
RealInterval f_bound(const RealInterval& t, const GridParams& p);

// Bound on |sum_{l != 0} f((n - N/2)/A + lB)|.
RealInterval f_alias_bound(const GridParams& p);

// Transform errors are discs, so they are kept as radii next to thin
// enclosures: a linear map moves an error vector by at most the sum of its
// radii, while widening rectangles before a transform would compound at every
// twiddle.
struct FStage {
    std::vector<ComplexInterval> values; // F(m/B) for m = 0..N/2 up to radius[m]
    std::vector<RealInterval> radius;
    RealInterval g_alias;                // effects on f, as in StageBudget
    RealInterval G_alias;
    RealInterval series_tail;
    RealInterval taylor;
};

// F(m/B) for m in [0, N/2] from the K layers.
FStage assemble_F(const std::vector<GLayer>& layers, const GridParams& p, unsigned threads = 1);

// Aliasing of F, the final transform and the aliasing of f. RealityCheckFailed
// if some imaginary part excludes 0.
GridEvaluation F_to_f(const FStage& stage, const GridParams& p);

// The whole pipeline; the K layers run on up to `threads` workers.
GridEvaluation evaluate_grid(const GridParams& p, unsigned threads = 1);

// zeta(s) by Euler-Maclaurin summation with the remainder bound
// |s + 2M + 1| / (Re s + 2M + 1) times the first omitted term. Requires
// Re s > 0.
ComplexInterval zeta_em(const ComplexInterval& s);

// f(t) at a single point from zeta_em and log_gamma.
RealInterval f_point(const RealInterval& t, const GridParams& p);

struct ZeroScan {
    std::vector<RealInterval> zeros;        // one ordinate interval per sign change
    std::vector<RealInterval> indeterminate; // runs of cells whose signs are not decided
};

// Sign changes between neighbouring samples, each refined by bisection with
// f_point until its width is at most target_width.
ZeroScan locate_zeros(const GridEvaluation& eval, double target_width = 1e-6);

} // namespace anpc
