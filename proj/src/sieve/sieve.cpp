#include "anpc/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anpc {

std::uint64_t iroot(std::uint64_t n, int k)
{
    if (k <= 1 || n <= 1) {
        return k <= 1 ? n : n;
    }
    auto pow_le = [&](std::uint64_t r) {
        // r^k <= n without overflow
        u128 acc = 1;
        for (int i = 0; i < k; ++i) {
            acc *= r;
            if (acc > n) {
                return false;
            }
        }
        return true;
    };
    auto r = static_cast<std::uint64_t>(std::pow(static_cast<double>(n), 1.0 / k));
    while (r > 0 && !pow_le(r)) {
        --r;
    }
    while (pow_le(r + 1)) {
        ++r;
    }
    return r;
}

std::vector<std::uint64_t> small_primes(std::uint64_t limit)
{
    std::vector<std::uint64_t> out;
    if (limit < 2) {
        return out;
    }
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t p = 2; p * p <= limit; ++p) {
        if (!composite[p]) {
            for (std::uint64_t q = p * p; q <= limit; q += p) {
                composite[q] = true;
            }
        }
    }
    for (std::uint64_t n = 2; n <= limit; ++n) {
        if (!composite[n]) {
            out.push_back(n);
        }
    }
    return out;
}

std::uint64_t prime_count(std::uint64_t n)
{
    return small_primes(n).size();
}

SievingPrimes SievingPrimes::covering(std::uint64_t hi)
{
    SievingPrimes sp;
    sp.limit = std::max<std::uint64_t>(iroot(hi, 2), 1);
    sp.primes = small_primes(sp.limit);
    return sp;
}

namespace {

constexpr std::int64_t kMaxHalfWidth = std::int64_t{1} << 31;

// Marks composites in [lo, hi]; flags[i] is true when lo + i is prime.
std::vector<bool> sieve_block(std::int64_t lo, std::int64_t hi, const SievingPrimes& sp)
{
    const auto len = static_cast<std::size_t>(hi - lo + 1);
    std::vector<bool> prime(len, true);
    for (std::int64_t n = lo; n <= std::min<std::int64_t>(hi, 1); ++n) {
        prime[static_cast<std::size_t>(n - lo)] = false;
    }
    for (const std::uint64_t up : sp.primes) {
        const auto p = static_cast<std::int64_t>(up);
        if (p * p > hi) {
            break;
        }
        std::int64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
        for (std::int64_t q = start; q <= hi; q += p) {
            prime[static_cast<std::size_t>(q - lo)] = false;
        }
    }
    return prime;
}

void check_coverage(std::int64_t hi, const SievingPrimes& sp)
{
    // every composite n <= hi has a prime factor <= floor(sqrt(hi))
    const u128 next = static_cast<u128>(sp.limit) + 1;
    if (next * next <= static_cast<u128>(std::max<std::int64_t>(hi, 0))) {
        raise(Errc::InsufficientSievingPrimes, "sieving primes stop at " + std::to_string(sp.limit) +
                                                   " but the range reaches " + std::to_string(hi));
    }
}

void check_shell(std::int64_t x0, std::int64_t w)
{
    if (w < 0 || w >= kMaxHalfWidth || x0 - w < 0) {
        raise(Errc::ParamViolation, "segment needs 0 <= w < 2^31 and x0 - w >= 0");
    }
}

} // namespace

SegmentSummary sieve_segment(std::int64_t x0, std::int64_t w, const SievingPrimes& sp)
{
    check_shell(x0, w);
    return sieve_segments({SegmentSummary{x0, w, 0, 0, 0}}, sp).front();
}

std::vector<SegmentSummary> sieve_segments(const std::vector<SegmentSummary>& shells, const SievingPrimes& sp)
{
    std::vector<SegmentSummary> out = shells;
    if (shells.empty()) {
        return out;
    }
    for (std::size_t i = 0; i < shells.size(); ++i) {
        check_shell(shells[i].x0, shells[i].w);
        if (i > 0 && shells[i].lo() <= shells[i - 1].hi()) {
            raise(Errc::ParamViolation, "segments must be sorted and disjoint");
        }
    }
    const std::int64_t lo = shells.front().lo();
    const std::int64_t hi = shells.back().hi();
    check_coverage(hi, sp);
    const std::vector<bool> prime = sieve_block(lo, hi, sp);
    for (auto& s : out) {
        s.s0 = 0;
        s.s1 = 0;
        s.s2 = 0;
        for (std::int64_t n = s.lo(); n <= s.hi(); ++n) {
            if (prime[static_cast<std::size_t>(n - lo)]) {
                const std::int64_t d = s.x0 - n;
                s.s0 += 1;
                s.s1 += d;
                s.s2 += static_cast<u128>(static_cast<std::uint64_t>(d < 0 ? -d : d)) *
                        static_cast<std::uint64_t>(d < 0 ? -d : d);
            }
        }
    }
    return out;
}

CubicLine cubic_line_coeff(const RealInterval& a3, const RealInterval& w)
{
    if (!w.is_nonnegative()) {
        raise(Errc::DomainError, "cubic approximation needs w >= 0");
    }
    const RealInterval w2 = sqr(w);
    CubicLine line;
    line.a = mul_2si(RealInterval(3) * a3 * w2, -2);
    line.err = mul_2si(abs(a3) * w2 * w, -2);
    return line;
}

namespace {

// Polynomial in y with interval coefficients.
using Poly = std::vector<RealInterval>;

RealInterval eval(const Poly& p, const RealInterval& y)
{
    RealInterval acc(0);
    for (std::size_t i = p.size(); i-- > 0;) {
        acc = acc * y + p[i];
    }
    return acc;
}

// P_0 = 1, P_{k+1} = P_k' + P_k (-(k+1) - y / lambda^2).
std::vector<Poly> derivative_polys(int kmax, const RealInterval& lambda)
{
    const RealInterval inv_l2 = RealInterval(1) / sqr(lambda);
    std::vector<Poly> ps;
    ps.push_back(Poly{RealInterval(1)});
    for (int k = 0; k < kmax; ++k) {
        const Poly& p = ps.back();
        Poly next(p.size() + 1, RealInterval(0));
        for (std::size_t i = 1; i < p.size(); ++i) {
            next[i - 1] += p[i] * RealInterval(static_cast<long>(i));
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            next[i] -= p[i] * RealInterval(k + 1);
            next[i + 1] -= p[i] * inv_l2;
        }
        ps.push_back(std::move(next));
    }
    return ps;
}

} // namespace

RealInterval phi_derivative(int k, const RealInterval& t, const MellinContext& ctx)
{
    if (k == 0) {
        return phi(t, ctx);
    }
    if (k < 0 || k > 8) {
        raise(Errc::ParamViolation, "derivative order out of range");
    }
    const RealInterval y = log(t / ctx.x);
    const auto ps = derivative_polys(k - 1, ctx.lambda);
    const RealInterval c = RealInterval(1) / (sqrt(mul_2si(RealInterval::pi(), 1)) * ctx.lambda);
    const RealInterval expo = -(RealInterval(k) * y) - sqr(y) / mul_2si(sqr(ctx.lambda), 1);
    return -(c / pow(ctx.x, k)) * eval(ps[static_cast<std::size_t>(k - 1)], y) * exp(expo);
}

RealInterval segment_phi_sum(const SegmentSummary& seg, const MellinContext& ctx, double share, RealInterval* remainder)
{
    const RealInterval x0(static_cast<long>(seg.x0));
    const RealInterval w(static_cast<long>(seg.w));
    const RealInterval s0(static_cast<long>(seg.s0));
    const RealInterval s1(static_cast<long>(seg.s1));
    const RealInterval s2 = RealInterval::from_int128(static_cast<__int128>(seg.s2));

    if (seg.w == 0) {
        if (remainder) {
            *remainder = RealInterval(0);
        }
        return seg.s0 == 0 ? RealInterval(0) : phi(x0, ctx) * s0;
    }
    const RealInterval f0 = phi(x0, ctx);
    const RealInterval f1 = phi_derivative(1, x0, ctx);
    const RealInterval f2 = phi_derivative(2, x0, ctx);
    const RealInterval a3 = phi_derivative(3, x0, ctx) / RealInterval(6);
    const CubicLine line = cubic_line_coeff(a3, w);
    const RealInterval range(RealInterval::hull(RealInterval(static_cast<long>(seg.lo())),
                                                RealInterval(static_cast<long>(seg.hi()))));
    const RealInterval m4 = abs(phi_derivative(4, range, ctx)).upper();
    const RealInterval rem = (s0 * (line.err + m4 * sqr(sqr(w)) / RealInterval(24))).upper();
    if (rem.hi_double() > share) {
        raise(Errc::SegmentTooWide, "segment at " + std::to_string(seg.x0) + " (w=" + std::to_string(seg.w) +
                                        ") has Taylor remainder " + rem.hi_decimal());
    }
    if (remainder) {
        *remainder = rem;
    }
    // phi(p) with d = p - x0 = -(x0 - p):
    //   phi(x0) - phi'(x0) u + phi''(x0) u^2 / 2 - a3 u^3 + O(u^4),  u = x0 - p
    const RealInterval value = f0 * s0 - (f1 + line.a) * s1 + mul_2si(f2 * s2, -1);
    return value.inflate(rem);
}

WindowSpec make_window(std::int64_t x, const MellinContext& ctx, double k, std::int64_t segment_width)
{
    if (k <= 0) {
        raise(Errc::ParamViolation, "window half-width k must be positive");
    }
    const RealInterval xi(static_cast<long>(x));
    const RealInterval kl = RealInterval(k) * ctx.lambda;
    const RealInterval lo = floor(xi * exp(-kl));
    const RealInterval hi = -floor(-(xi * exp(kl)));
    WindowSpec wsp;
    wsp.x1 = std::max<std::int64_t>(2, static_cast<std::int64_t>(lo.lo_double()));
    wsp.x2 = static_cast<std::int64_t>(hi.hi_double());
    wsp.x1 = std::min(wsp.x1, x - 1);
    wsp.x2 = std::max(wsp.x2, x + 1);
    wsp.segment_width = segment_width;
    return wsp;
}

std::int64_t choose_segment_width(const WindowSpec& window, std::int64_t x, const MellinContext& ctx, double budget)
{
    // sample the third and fourth derivatives across the window
    double a3max = 0.0, m4max = 0.0;
    const int samples = 256;
    for (int i = 0; i <= samples; ++i) {
        const double t = static_cast<double>(window.x1) +
                         (static_cast<double>(window.x2 - window.x1)) * i / samples;
        a3max = std::max(a3max, abs(phi_derivative(3, RealInterval(t), ctx)).hi_double() / 6.0);
        m4max = std::max(m4max, abs(phi_derivative(4, RealInterval(t), ctx)).hi_double());
    }
    (void)x;
    a3max *= 2.0;
    m4max *= 2.0;
    const double len = static_cast<double>(window.x2 - window.x1 + 1);
    const double per_point = budget / len;
    auto fits = [&](double w) { return a3max * w * w * w / 4.0 + m4max * w * w * w * w / 24.0 <= per_point; };
    std::int64_t w = 0;
    std::int64_t step = std::int64_t{1} << 30;
    while (step > 0) {
        if (w + step < kMaxHalfWidth && fits(static_cast<double>(w + step))) {
            w += step;
        }
        step >>= 1;
    }
    return 2 * w + 1;
}

std::vector<SegmentSummary> tile_window(const WindowSpec& window, std::int64_t x)
{
    if (!(window.x1 < x && x < window.x2)) {
        raise(Errc::ParamViolation, "window must satisfy x1 < x < x2");
    }
    if (window.segment_width < 1) {
        raise(Errc::ParamViolation, "segment width must be positive");
    }
    const std::int64_t width = window.segment_width % 2 == 1 ? window.segment_width : window.segment_width - 1;
    const std::int64_t w = (width - 1) / 2;
    if (w >= kMaxHalfWidth) {
        raise(Errc::ParamViolation, "segment width too large");
    }
    std::vector<SegmentSummary> out;
    auto cover = [&](std::int64_t lo, std::int64_t hi) {
        std::int64_t a = lo;
        while (a <= hi) {
            std::int64_t len = std::min(width, hi - a + 1);
            if (len % 2 == 0) {
                --len;
            }
            const std::int64_t half = (len - 1) / 2;
            out.push_back(SegmentSummary{a + half, half, 0, 0, 0});
            a += len;
        }
    };
    cover(window.x1, x - 1);
    out.push_back(SegmentSummary{x, 0, 0, 0, 0});
    cover(x + 1, window.x2);
    (void)w;
    return out;
}

std::vector<PrimePowerTerm> prime_power_terms(const WindowSpec& window, std::int64_t x)
{
    std::vector<PrimePowerTerm> out;
    const auto x1 = static_cast<std::uint64_t>(std::max<std::int64_t>(window.x1, 2));
    const auto x2 = static_cast<std::uint64_t>(window.x2);
    const auto primes = small_primes(iroot(x2, 2));
    for (int m = 2; (std::uint64_t{1} << m) <= x2 && m < 64; ++m) {
        const std::uint64_t plo = std::max<std::uint64_t>(2, iroot(x1 - 1, m) + 1);
        const std::uint64_t phi_ = iroot(x2, m);
        auto it = std::lower_bound(primes.begin(), primes.end(), plo);
        for (; it != primes.end() && *it <= phi_; ++it) {
            std::uint64_t v = 1;
            for (int i = 0; i < m; ++i) {
                v *= *it;
            }
            const auto sx = static_cast<std::uint64_t>(x);
            const int chi = v < sx ? 2 : (v == sx ? 1 : 0);
            out.push_back(PrimePowerTerm{*it, m, v, chi});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    return out;
}

WindowSum window_sum(const WindowSpec& window, const std::vector<SegmentSummary>& segments,
                     const std::vector<PrimePowerTerm>& powers, const MellinContext& ctx, std::int64_t x, double budget)
{
    // tiling check
    std::int64_t expect = window.x1;
    for (const auto& s : segments) {
        if (s.lo() != expect) {
            raise(Errc::TilingGap, "segments leave a gap or overlap at " + std::to_string(expect));
        }
        if (s.lo() < x && s.hi() > x) {
            raise(Errc::TilingGap, "segment straddles x");
        }
        expect = s.hi() + 1;
    }
    if (expect != window.x2 + 1) {
        raise(Errc::TilingGap, "segments stop at " + std::to_string(expect - 1) + " before x2");
    }
    const double len = static_cast<double>(window.x2 - window.x1 + 1);

    WindowSum out;
    out.value = RealInterval(0);
    out.taylor_error = RealInterval(0);
    std::int64_t below = 0;
    bool x_prime = false;
    for (const auto& s : segments) {
        const double share = budget * static_cast<double>(2 * s.w + 1) / len;
        RealInterval rem;
        out.value -= segment_phi_sum(s, ctx, share, &rem);
        out.taylor_error += rem;
        out.primes += s.s0;
        if (s.hi() < x) {
            below += s.s0;
        } else if (s.x0 == x && s.w == 0 && s.s0 == 1) {
            x_prime = true;
        }
    }
    // chi over primes: 1 below x, 1/2 at x
    out.value += RealInterval(static_cast<long>(below));
    if (x_prime) {
        out.value += RealInterval(0.5);
    }
    for (const auto& t : powers) {
        if (static_cast<std::int64_t>(t.value) < window.x1 || static_cast<std::int64_t>(t.value) > window.x2) {
            continue;
        }
        const RealInterval chi = mul_2si(RealInterval(t.chi_twice), -1);
        const RealInterval v(static_cast<unsigned long>(t.value));
        out.value += (chi - phi(v, ctx)) / RealInterval(t.m);
    }
    return out;
}

RealInterval window_tail_bound(const WindowSpec& window, const MellinContext& ctx)
{
    const RealInterval& lam = ctx.lambda;
    const RealInterval l2 = sqr(lam);
    const RealInterval s2l = sqrt(RealInterval(2)) * lam;
    const RealInterval half_x = mul_2si(ctx.x, -1);
    const RealInterval e_half = exp(mul_2si(l2, -1));

    // above: n > x2, integral of phi from x2 to infinity
    const RealInterval a = log(RealInterval(static_cast<long>(window.x2)) / ctx.x);
    const RealInterval high = half_x * (e_half * erfc((a - l2) / s2l) - exp(a) * erfc(a / s2l));
    // below: n < x1, integral of 1 - phi from 0 to x1
    const RealInterval c = log(ctx.x / RealInterval(static_cast<long>(window.x1)));
    const RealInterval low = half_x * (exp(-c) * erfc(c / s2l) - e_half * erfc((c + l2) / s2l));
    const RealInterval total = max(high, RealInterval(0)) + max(low, RealInterval(0));
    return RealInterval::hull(RealInterval(0), total.upper());
}

} // namespace anpc
