// Gamma, log-gamma and the upper incomplete gamma function on intervals.
#include "anpc/interval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace anpc {

namespace {

// |B_2k| / (2k (2k-1)) for k = 1, 2, ... at the current precision. The
// Bernoulli numbers come from |B_2k| = 2 (2k)! zeta(2k) / (2 pi)^(2k), with
// zeta(2k) correctly rounded by MPFR.
const RealInterval& stirling_coefficient(int k)
{
    thread_local std::map<mpfr_prec_t, std::vector<RealInterval>> cache;
    auto& table = cache[working_precision()];
    while (static_cast<int>(table.size()) < k) {
        const long kk = static_cast<long>(table.size()) + 1;
        const long n = 2 * kk;
        mpfr_t zl, zh;
        mpfr_init2(zl, working_precision());
        mpfr_init2(zh, working_precision());
        mpfr_zeta_ui(zl, static_cast<unsigned long>(n), MPFR_RNDD);
        mpfr_zeta_ui(zh, static_cast<unsigned long>(n), MPFR_RNDU);
        const RealInterval zeta = RealInterval::from_endpoints(zl, zh);
        mpfr_clear(zl);
        mpfr_clear(zh);
        mpz_class fact;
        mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(n));
        const RealInterval two_pi = mul_2si(RealInterval::pi(), 1);
        const RealInterval b = mul_2si(RealInterval::from_integer(fact) * zeta, 1) / pow(two_pi, n);
        table.push_back(b / RealInterval(n * (n - 1)));
    }
    return table[static_cast<std::size_t>(k - 1)];
}

int shift_for(double re_lo, double im_abs_lo)
{
    const double p = static_cast<double>(working_precision());
    const double want = std::max(8.0, p / 4.0);
    double m = 0.0;
    if (re_lo < 8.0) {
        m = std::ceil(8.0 - re_lo);
    }
    if (im_abs_lo < want && re_lo + m < want) {
        m = std::ceil(want - re_lo);
    }
    if (!(m < 1e6)) {
        raise(Errc::DomainError, "gamma argument out of range");
    }
    return static_cast<int>(m);
}

// Remainder bound after k Stirling terms, for Re w > 0 and |w| >= wabs.
RealInterval stirling_remainder(int k, const RealInterval& wabs_lo)
{
    return stirling_coefficient(k + 1) / pow(wabs_lo, 2 * k + 1) * mul_2si(RealInterval(1), k + 1);
}

// log Gamma(w) for Re w > 0 with |w| moderately large.
ComplexInterval stirling(const ComplexInterval& w)
{
    if (!w.re().is_positive()) {
        raise(Errc::DomainError, "Stirling series needs Re w > 0");
    }
    const mpfr_prec_t p = working_precision();
    const RealInterval wabs_lo = abs(w).lower();
    const ComplexInterval winv = ComplexInterval(1) / w;
    const ComplexInterval winv2 = sqr(winv);
    const RealInterval half_log_2pi = mul_2si(log(mul_2si(RealInterval::pi(), 1)), -1);

    ComplexInterval acc = (w - RealInterval(0.5)) * log(w) - w + half_log_2pi;
    ComplexInterval power = winv;
    const RealInterval target = mul_2si(RealInterval(1), -static_cast<long>(p) - 8);
    RealInterval rem;
    double prev = INFINITY;
    for (int k = 1;; ++k) {
        const RealInterval& c = stirling_coefficient(k);
        // B_2k alternates in sign starting positive at k = 1
        if (k % 2 == 1) {
            acc += power * c;
        } else {
            acc -= power * c;
        }
        rem = stirling_remainder(k, wabs_lo);
        const double r = rem.hi_double();
        if (rem.certainly_less(target) || r >= prev || k >= 400) {
            break;
        }
        prev = r;
        power *= winv2;
    }
    return acc.inflate(rem);
}

RealInterval stirling_real(const RealInterval& w)
{
    const ComplexInterval z = stirling(ComplexInterval(w, RealInterval(0)));
    return z.re();
}

} // namespace

ComplexInterval log_gamma(const ComplexInterval& z)
{
    const RealInterval im_abs = abs(z.im());
    const int m = shift_for(z.re().lo_double(), im_abs.lo_double());
    ComplexInterval correction(0);
    for (int j = 0; j < m; ++j) {
        const ComplexInterval zj = z + RealInterval(j);
        if (zj.contains_zero()) {
            raise(Errc::PoleProximity, "log-gamma argument meets a pole");
        }
        correction += log(zj);
    }
    return stirling(z + RealInterval(m)) - correction;
}

ComplexInterval gamma(const ComplexInterval& z)
{
    const RealInterval im_abs = abs(z.im());
    const int m = shift_for(z.re().lo_double(), im_abs.lo_double());
    ComplexInterval prod(1);
    for (int j = 0; j < m; ++j) {
        const ComplexInterval zj = z + RealInterval(j);
        if (zj.contains_zero()) {
            raise(Errc::PoleProximity, "gamma argument meets a pole");
        }
        prod *= zj;
    }
    return exp(stirling(z + RealInterval(m))) / prod;
}

RealInterval gamma(const RealInterval& s)
{
    const int m = shift_for(s.lo_double(), 0.0);
    RealInterval prod(1);
    for (int j = 0; j < m; ++j) {
        const RealInterval sj = s + RealInterval(j);
        if (sj.contains_zero()) {
            raise(Errc::PoleProximity, "gamma argument meets a pole");
        }
        prod *= sj;
    }
    return exp(stirling_real(s + RealInterval(m))) / prod;
}

namespace {

// Gamma(s, x) at a single x >= 0 (s may be an interval).
RealInterval incomplete_gamma_at(const RealInterval& s, const RealInterval& x)
{
    const mpfr_prec_t p = working_precision();
    if (x.is_point() && mpfr_zero_p(x.lo())) {
        return gamma(s);
    }
    const double xd = x.hi_double();
    const double sd = s.hi_double();
    if (xd >= 0.7 * static_cast<double>(p) + sd + 10.0) {
        // asymptotic expansion; once s - n <= 1 the remainder is bounded by
        // the first omitted term
        const RealInterval lead = pow(x, s - RealInterval(1)) * exp(-x);
        const RealInterval target = mul_2si(RealInterval(1), -static_cast<long>(p) - 8);
        RealInterval sum(1);
        RealInterval term(1);
        RealInterval prev_abs(INFINITY);
        for (long n = 1;; ++n) {
            const RealInterval next = term * (s - RealInterval(n)) / x;
            const RealInterval next_abs = abs(next);
            const bool remainder_valid = (s - RealInterval(n)).hi_double() <= 1.0;
            if (remainder_valid && (next_abs.certainly_less(target) || !next_abs.certainly_less(prev_abs))) {
                return lead * sum.inflate(next_abs);
            }
            if (n > 100000) {
                raise(Errc::DomainError, "incomplete gamma expansion did not settle");
            }
            prev_abs = abs(term);
            term = next;
            sum += term;
        }
    }

    // Series for the lower function, subtracted from Gamma(s). The
    // subtraction cancels about x / ln 2 bits, so work above that.
    const long extra = static_cast<long>(1.45 * std::max(0.0, xd)) + 32;
    PrecisionScope scope(p + extra);
    RealInterval sw = s;
    RealInterval xw = x;
    const RealInterval g_s = gamma(sw);
    const RealInterval target = mul_2si(RealInterval(1), -static_cast<long>(p + extra) - 8);
    RealInterval term = RealInterval(1) / sw;
    RealInterval sum = term;
    for (long k = 1;; ++k) {
        term = term * xw / (sw + RealInterval(k));
        sum += term;
        // later ratios are at most x / (s + k + 1)
        const RealInterval ratio = xw / (sw + RealInterval(k + 1));
        if (ratio.hi_double() < 0.5) {
            const RealInterval tail = term * ratio / (RealInterval(1) - ratio);
            if (tail.certainly_less(target * sum) || k > 100000) {
                sum = sum.inflate(tail);
                break;
            }
        }
    }
    const RealInterval lower = pow(xw, sw) * exp(-xw) * sum;
    const RealInterval result = RealInterval(g_s) - lower;
    PrecisionScope back(p);
    return RealInterval(result) + RealInterval(0);
}

} // namespace

RealInterval incomplete_gamma(const RealInterval& s, const RealInterval& x)
{
    if (!s.is_positive()) {
        raise(Errc::DomainError, "incomplete gamma needs s > 0");
    }
    if (!x.is_nonnegative()) {
        raise(Errc::DomainError, "incomplete gamma needs x >= 0");
    }
    if (x.is_point()) {
        return max(incomplete_gamma_at(s, x), RealInterval(0));
    }
    // decreasing in x
    const RealInterval at_hi = incomplete_gamma_at(s, x.upper());
    const RealInterval at_lo = incomplete_gamma_at(s, x.lower());
    return max(RealInterval::hull(at_hi.lower(), at_lo.upper()), RealInterval(0));
}

} // namespace anpc
