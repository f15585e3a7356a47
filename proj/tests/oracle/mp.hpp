#pragma once

// Plain round-to-nearest MPFR numbers for test oracles. These never touch
// the interval code; they evaluate the same quantities at a much higher
// precision so that enclosures can be checked against them.

#include <mpfr.h>

#include <cmath>

#include <string>
#include <utility>

namespace oracle {

inline mpfr_prec_t& prec()
{
    static thread_local mpfr_prec_t p = 384;
    return p;
}

class Mp {
public:
    Mp() { mpfr_init2(v_, prec()); mpfr_set_zero(v_, 1); }
    Mp(double d) { mpfr_init2(v_, prec()); mpfr_set_d(v_, d, MPFR_RNDN); }         // NOLINT
    Mp(long n) { mpfr_init2(v_, prec()); mpfr_set_si(v_, n, MPFR_RNDN); }          // NOLINT
    Mp(int n) : Mp(static_cast<long>(n)) {}                                       // NOLINT
    explicit Mp(const char* s) { mpfr_init2(v_, prec()); mpfr_set_str(v_, s, 10, MPFR_RNDN); }
    Mp(const Mp& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Mp(Mp&& o) noexcept { mpfr_init2(v_, MPFR_PREC_MIN); mpfr_swap(v_, o.v_); }
    Mp& operator=(Mp o) { mpfr_swap(v_, o.v_); return *this; }
    ~Mp() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    double d() const { return mpfr_get_d(v_, MPFR_RNDN); }

    template <class F>
    static Mp apply(F f, const Mp& a)
    {
        Mp r;
        f(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

    friend Mp operator+(const Mp& a, const Mp& b) { Mp r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
    friend Mp operator-(const Mp& a, const Mp& b) { Mp r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
    friend Mp operator*(const Mp& a, const Mp& b) { Mp r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
    friend Mp operator/(const Mp& a, const Mp& b) { Mp r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
    Mp operator-() const { Mp r; mpfr_neg(r.v_, v_, MPFR_RNDN); return r; }
    Mp& operator+=(const Mp& b) { mpfr_add(v_, v_, b.v_, MPFR_RNDN); return *this; }
    Mp& operator*=(const Mp& b) { mpfr_mul(v_, v_, b.v_, MPFR_RNDN); return *this; }
    friend bool operator<(const Mp& a, const Mp& b) { return mpfr_less_p(a.v_, b.v_); }

private:
    mpfr_t v_;
};

inline Mp exp(const Mp& a) { return Mp::apply(mpfr_exp, a); }
inline Mp log(const Mp& a) { return Mp::apply(mpfr_log, a); }
inline Mp sqrt(const Mp& a) { return Mp::apply(mpfr_sqrt, a); }
inline Mp cos(const Mp& a) { return Mp::apply(mpfr_cos, a); }
inline Mp sin(const Mp& a) { return Mp::apply(mpfr_sin, a); }
inline Mp abs(const Mp& a) { return Mp::apply(mpfr_abs, a); }
inline Mp pi() { Mp r; mpfr_const_pi(r.get(), MPFR_RNDN); return r; }

// erfc from the Maclaurin series of erf for |x| <= 4 and from the
// Laplace continued fraction (evaluated bottom-up with many levels) beyond.
inline Mp erfc(const Mp& x)
{
    const double xd = x.d();
    if (xd < -4.0) {
        return Mp(2) - erfc(-x);
    }
    if (xd <= 4.0) {
        // erf x = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
        Mp sum = x;
        Mp term = x;
        const Mp x2 = x * x;
        for (long n = 1; n < 4000; ++n) {
            term = -(term * x2) / Mp(n);
            const Mp contrib = term / Mp(2 * n + 1);
            sum += contrib;
            // |erf| <= 1, so an absolute cut-off suffices once terms shrink
            if (n > 2 * x2.d() + 2 && (mpfr_zero_p(contrib.get()) ||
                                       mpfr_get_exp(contrib.get()) < -static_cast<long>(prec()) - 4)) {
                break;
            }
        }
        return Mp(1) - Mp(2) / sqrt(pi()) * sum;
    }
    // erfc x = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    Mp f = x;
    for (long k = 2000; k >= 1; --k) {
        f = x + Mp(k) / Mp(2) / f;
    }
    return exp(-(x * x)) / sqrt(pi()) / f;
}

// erf from its Maclaurin series near the origin, where 1 - erfc(x) would
// cancel; from erfc elsewhere.
inline Mp erf(const Mp& x)
{
    if (std::fabs(x.d()) > 1.0) {
        return Mp(1) - erfc(x);
    }
    Mp sum = x;
    Mp term = x;
    const Mp x2 = x * x;
    for (long n = 1; n < 4000; ++n) {
        term = -(term * x2) / Mp(n);
        const Mp contrib = term / Mp(2 * n + 1);
        sum += contrib;
        if (mpfr_zero_p(contrib.get()) ||
            mpfr_get_exp(contrib.get()) < mpfr_get_exp(sum.get()) - static_cast<long>(prec()) - 4) {
            break;
        }
    }
    return Mp(2) / sqrt(pi()) * sum;
}

struct MpComplex {
    Mp re, im;
};

inline MpComplex operator*(const MpComplex& a, const MpComplex& b)
{
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

// x^s for real x > 0.
inline MpComplex cpow(const Mp& x, const MpComplex& s)
{
    const Mp l = log(x);
    const Mp m = exp(s.re * l);
    const Mp th = s.im * l;
    return {m * cos(th), m * sin(th)};
}

} // namespace oracle
