#pragma once

// Real and complex interval arithmetic over MPFR endpoints.
//
// Every operation returns an enclosure: the lower endpoint is rounded toward
// -inf and the upper toward +inf. Results are produced at the calling
// thread's working precision (see PrecisionScope).

#include <mpfr.h>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "anpc/error.hpp"

namespace anpc {

struct Precision {
    mpfr_prec_t bits = 128;
};

inline constexpr mpfr_prec_t kDefaultPrecisionBits = 128;

mpfr_prec_t working_precision() noexcept;

// Sets the thread's working precision for its lifetime.
class PrecisionScope {
public:
    explicit PrecisionScope(Precision p);
    explicit PrecisionScope(mpfr_prec_t bits) : PrecisionScope(Precision{bits}) {}
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    mpfr_prec_t saved_;
};

class RealInterval {
public:
    RealInterval();
    RealInterval(int v);       // NOLINT(google-explicit-constructor)
    RealInterval(long v);      // NOLINT(google-explicit-constructor)
    RealInterval(long long v); // NOLINT(google-explicit-constructor)
    RealInterval(unsigned long v);      // NOLINT(google-explicit-constructor)
    RealInterval(unsigned long long v); // NOLINT(google-explicit-constructor)
    RealInterval(double v);    // NOLINT(google-explicit-constructor)
    RealInterval(double lo, double hi);

    RealInterval(const RealInterval& other);
    RealInterval(RealInterval&& other) noexcept;
    RealInterval& operator=(const RealInterval& other);
    RealInterval& operator=(RealInterval&& other) noexcept;
    ~RealInterval();

    // Tightest enclosure of a decimal literal such as "14.134725141734693790".
    static RealInterval from_decimal(std::string_view text);
    static RealInterval from_rational(const mpq_class& q);
    static RealInterval from_integer(const mpz_class& z);
    static RealInterval from_int128(__int128 v);
    static RealInterval from_endpoints(mpfr_srcptr lo, mpfr_srcptr hi);
    // [-r, r] for r = hi(|radius|).
    static RealInterval symmetric(const RealInterval& radius);
    static RealInterval hull(const RealInterval& a, const RealInterval& b);
    static RealInterval pi();
    static RealInterval ln2();
    static RealInterval euler_e();

    mpfr_srcptr lo() const noexcept { return lo_; }
    mpfr_srcptr hi() const noexcept { return hi_; }
    double lo_double() const noexcept;
    double hi_double() const noexcept;
    double mid_double() const noexcept;
    mpfr_prec_t precision() const noexcept { return mpfr_get_prec(lo_); }

    RealInterval lower() const; // [lo, lo]
    RealInterval upper() const; // [hi, hi]
    RealInterval mid() const;   // a point near the centre, contained in *this
    RealInterval width() const; // enclosure of hi - lo
    double width_double() const noexcept;
    double rad_double() const noexcept;

    bool is_point() const noexcept;
    bool contains_zero() const noexcept;
    bool is_positive() const noexcept;    // lo > 0
    bool is_negative() const noexcept;    // hi < 0
    bool is_nonnegative() const noexcept; // lo >= 0
    bool contains(const RealInterval& other) const noexcept;
    bool contains(double v) const noexcept;
    bool overlaps(const RealInterval& other) const noexcept;
    bool certainly_less(const RealInterval& other) const noexcept; // hi < other.lo

    // Adds [-r, r] with r = hi(|radius|).
    RealInterval inflate(const RealInterval& radius) const;
    RealInterval intersect(const RealInterval& other) const;
    // Clamps both endpoints into [a, b].
    RealInterval clamp(double a, double b) const;

    RealInterval operator-() const;
    RealInterval& operator+=(const RealInterval& b);
    RealInterval& operator-=(const RealInterval& b);
    RealInterval& operator*=(const RealInterval& b);
    RealInterval& operator/=(const RealInterval& b);

    // Round-trip decimal text of each endpoint (re-reading with the same
    // precision under round-to-nearest recovers the exact endpoint).
    std::string lo_decimal() const;
    std::string hi_decimal() const;
    std::string to_string(int digits = 20) const;

private:
    struct Uninit {};
    explicit RealInterval(Uninit, mpfr_prec_t prec);

    mpfr_t lo_;
    mpfr_t hi_;

    friend RealInterval operator+(const RealInterval&, const RealInterval&);
    friend RealInterval operator-(const RealInterval&, const RealInterval&);
    friend RealInterval operator*(const RealInterval&, const RealInterval&);
    friend RealInterval operator/(const RealInterval&, const RealInterval&);
    friend RealInterval sqr(const RealInterval&);
    friend RealInterval abs(const RealInterval&);
    friend RealInterval exp(const RealInterval&);
    friend RealInterval log(const RealInterval&);
    friend RealInterval log1p(const RealInterval&);
    friend RealInterval sqrt(const RealInterval&);
    friend RealInterval erf(const RealInterval&);
    friend RealInterval erfc(const RealInterval&);
    friend RealInterval atan(const RealInterval&);
    friend RealInterval cos(const RealInterval&);
    friend RealInterval sin(const RealInterval&);
    friend RealInterval max(const RealInterval&, const RealInterval&);
    friend RealInterval min(const RealInterval&, const RealInterval&);
    friend RealInterval floor(const RealInterval&);
    friend RealInterval mul_2si(const RealInterval&, long);
    friend RealInterval pow(const RealInterval&, long);
    friend class RealIntervalAccess;
};

RealInterval operator+(const RealInterval& a, const RealInterval& b);
RealInterval operator-(const RealInterval& a, const RealInterval& b);
RealInterval operator*(const RealInterval& a, const RealInterval& b);
// Throws DivisorContainsZero when 0 is in b.
RealInterval operator/(const RealInterval& a, const RealInterval& b);

RealInterval sqr(const RealInterval& a);
RealInterval abs(const RealInterval& a);
RealInterval pow(const RealInterval& a, long n);
// a^b = exp(b log a), a > 0.
RealInterval pow(const RealInterval& a, const RealInterval& b);
RealInterval mul_2si(const RealInterval& a, long e); // a * 2^e, exact
RealInterval max(const RealInterval& a, const RealInterval& b);
RealInterval min(const RealInterval& a, const RealInterval& b);
RealInterval floor(const RealInterval& a);

// Elementary functions. DomainError outside the domain.
RealInterval exp(const RealInterval& a);
RealInterval log(const RealInterval& a);
RealInterval log1p(const RealInterval& a);
RealInterval sqrt(const RealInterval& a);
RealInterval erf(const RealInterval& a);
RealInterval erfc(const RealInterval& a);
RealInterval atan(const RealInterval& a);
RealInterval cos(const RealInterval& a);
RealInterval sin(const RealInterval& a);

std::ostream& operator<<(std::ostream& os, const RealInterval& a);

class ComplexInterval {
public:
    ComplexInterval() = default;
    ComplexInterval(RealInterval re) : re_(std::move(re)) {} // NOLINT(google-explicit-constructor)
    ComplexInterval(RealInterval re, RealInterval im) : re_(std::move(re)), im_(std::move(im)) {}
    ComplexInterval(int re) : re_(re) {}    // NOLINT(google-explicit-constructor)
    ComplexInterval(double re) : re_(re) {} // NOLINT(google-explicit-constructor)

    const RealInterval& re() const noexcept { return re_; }
    const RealInterval& im() const noexcept { return im_; }
    RealInterval& re() noexcept { return re_; }
    RealInterval& im() noexcept { return im_; }

    ComplexInterval conj() const { return {re_, -im_}; }
    ComplexInterval mul_i() const { return {-im_, re_}; }
    bool contains_zero() const noexcept { return re_.contains_zero() && im_.contains_zero(); }
    bool contains(const ComplexInterval& z) const noexcept
    {
        return re_.contains(z.re_) && im_.contains(z.im_);
    }
    bool overlaps(const ComplexInterval& z) const noexcept
    {
        return re_.overlaps(z.re_) && im_.overlaps(z.im_);
    }
    // Adds the square [-r, r] x [-r, r], which covers the disc of radius r.
    ComplexInterval inflate(const RealInterval& radius) const
    {
        return {re_.inflate(radius), im_.inflate(radius)};
    }

    ComplexInterval operator-() const { return {-re_, -im_}; }
    ComplexInterval& operator+=(const ComplexInterval& b);
    ComplexInterval& operator-=(const ComplexInterval& b);
    ComplexInterval& operator*=(const ComplexInterval& b);

private:
    RealInterval re_;
    RealInterval im_;
};

ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator*(const ComplexInterval& a, const RealInterval& b);
ComplexInterval operator*(const RealInterval& a, const ComplexInterval& b);
ComplexInterval operator/(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator/(const ComplexInterval& a, const RealInterval& b);

RealInterval norm(const ComplexInterval& z); // |z|^2
RealInterval abs(const ComplexInterval& z);
// Principal argument; DomainError when the rectangle meets the cut (-inf, 0].
RealInterval arg(const ComplexInterval& z);
ComplexInterval exp(const ComplexInterval& z);
ComplexInterval log(const ComplexInterval& z);
ComplexInterval sqr(const ComplexInterval& z);
ComplexInterval pow(const ComplexInterval& z, long n);
// exp(i * theta) for real theta.
ComplexInterval expi(const RealInterval& theta);
// x^s = exp(s log x) for x > 0. DomainError when x may be <= 0.
ComplexInterval cpow(const RealInterval& x, const ComplexInterval& s);

std::ostream& operator<<(std::ostream& os, const ComplexInterval& z);

// Gamma function and its principal logarithm (the branch continuous on
// C \ (-inf, 0]). PoleProximity when the rectangle meets a pole.
ComplexInterval gamma(const ComplexInterval& z);
ComplexInterval log_gamma(const ComplexInterval& z);
RealInterval gamma(const RealInterval& s);
// Upper incomplete gamma: integral from x to infinity of t^(s-1) e^-t dt,
// for s > 0 and x >= 0.
RealInterval incomplete_gamma(const RealInterval& s, const RealInterval& x);

// The unique integer inside a, or NoInteger / Ambiguous.
long long unique_integer(const RealInterval& a);

} // namespace anpc
