#include "anpc/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace anpc {

namespace {

thread_local mpfr_prec_t t_precision = kDefaultPrecisionBits;

// Scratch register for case analysis; sized on demand.
struct Scratch {
    mpfr_t v[4];
    mpfr_prec_t prec = 0;
    Scratch()
    {
        for (auto& x : v) {
            mpfr_init2(x, 64);
        }
    }
    ~Scratch()
    {
        for (auto& x : v) {
            mpfr_clear(x);
        }
    }
    void ensure(mpfr_prec_t p)
    {
        if (p != prec) {
            for (auto& x : v) {
                mpfr_set_prec(x, p);
            }
            prec = p;
        }
    }
};

Scratch& scratch()
{
    thread_local Scratch s;
    s.ensure(t_precision);
    return s;
}

std::string mpfr_round_trip(mpfr_srcptr x)
{
    if (mpfr_zero_p(x)) {
        return "0";
    }
    if (mpfr_inf_p(x)) {
        return mpfr_sgn(x) > 0 ? "inf" : "-inf";
    }
    if (mpfr_nan_p(x)) {
        return "nan";
    }
    mpfr_exp_t e = 0;
    char* raw = mpfr_get_str(nullptr, &e, 10, 0, x, MPFR_RNDN);
    std::string digits(raw);
    mpfr_free_str(raw);
    std::string sign;
    if (!digits.empty() && digits[0] == '-') {
        sign = "-";
        digits.erase(0, 1);
    }
    while (digits.size() > 1 && digits.back() == '0') {
        digits.pop_back();
    }
    std::ostringstream os;
    os << sign << digits[0];
    if (digits.size() > 1) {
        os << '.' << digits.substr(1);
    }
    if (e - 1 != 0) {
        os << 'e' << (e - 1);
    }
    return os.str();
}

} // namespace

std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::DivisorContainsZero: return "DivisorContainsZero";
    case Errc::DomainError: return "DomainError";
    case Errc::PoleProximity: return "PoleProximity";
    case Errc::NoInteger: return "NoInteger";
    case Errc::Ambiguous: return "Ambiguous";
    case Errc::RadiusTooLarge: return "RadiusTooLarge";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::InsufficientSievingPrimes: return "InsufficientSievingPrimes";
    case Errc::SegmentTooWide: return "SegmentTooWide";
    case Errc::TilingGap: return "TilingGap";
    case Errc::FormatError: return "FormatError";
    case Errc::MonotonicityViolation: return "MonotonicityViolation";
    case Errc::AccuracyViolation: return "AccuracyViolation";
    case Errc::InconsistentCount: return "InconsistentCount";
    case Errc::CoverageGap: return "CoverageGap";
    case Errc::ParamViolation: return "ParamViolation";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::RealityCheckFailed: return "RealityCheckFailed";
    case Errc::Infeasible: return "Infeasible";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

mpfr_prec_t working_precision() noexcept
{
    return t_precision;
}

PrecisionScope::PrecisionScope(Precision p) : saved_(t_precision)
{
    if (p.bits < MPFR_PREC_MIN || p.bits > 1 << 20) {
        raise(Errc::DomainError, "precision out of range");
    }
    t_precision = p.bits;
}

PrecisionScope::~PrecisionScope()
{
    t_precision = saved_;
}

// ---------------------------------------------------------------------------
// construction

RealInterval::RealInterval(Uninit, mpfr_prec_t prec)
{
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
}

RealInterval::RealInterval() : RealInterval(Uninit{}, t_precision)
{
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

RealInterval::RealInterval(int v) : RealInterval(static_cast<long>(v)) {}

RealInterval::RealInterval(long v) : RealInterval(Uninit{}, t_precision)
{
    mpfr_set_si(lo_, v, MPFR_RNDD);
    mpfr_set_si(hi_, v, MPFR_RNDU);
}

RealInterval::RealInterval(long long v) : RealInterval(static_cast<long>(v)) {}

RealInterval::RealInterval(unsigned long v) : RealInterval(Uninit{}, t_precision)
{
    mpfr_set_ui(lo_, v, MPFR_RNDD);
    mpfr_set_ui(hi_, v, MPFR_RNDU);
}

RealInterval::RealInterval(unsigned long long v) : RealInterval(static_cast<unsigned long>(v)) {}

RealInterval::RealInterval(double v) : RealInterval(Uninit{}, t_precision)
{
    if (std::isnan(v)) {
        raise(Errc::DomainError, "NaN cannot be enclosed");
    }
    mpfr_set_d(lo_, v, MPFR_RNDD);
    mpfr_set_d(hi_, v, MPFR_RNDU);
}

RealInterval::RealInterval(double lo, double hi) : RealInterval(Uninit{}, t_precision)
{
    if (!(lo <= hi)) {
        raise(Errc::DomainError, "interval with lo > hi");
    }
    mpfr_set_d(lo_, lo, MPFR_RNDD);
    mpfr_set_d(hi_, hi, MPFR_RNDU);
}

RealInterval::RealInterval(const RealInterval& other) : RealInterval(Uninit{}, mpfr_get_prec(other.lo_))
{
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

RealInterval::RealInterval(RealInterval&& other) noexcept : RealInterval(Uninit{}, MPFR_PREC_MIN)
{
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
}

RealInterval& RealInterval::operator=(const RealInterval& other)
{
    if (this != &other) {
        mpfr_set_prec(lo_, mpfr_get_prec(other.lo_));
        mpfr_set_prec(hi_, mpfr_get_prec(other.hi_));
        mpfr_set(lo_, other.lo_, MPFR_RNDD);
        mpfr_set(hi_, other.hi_, MPFR_RNDU);
    }
    return *this;
}

RealInterval& RealInterval::operator=(RealInterval&& other) noexcept
{
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
    return *this;
}

RealInterval::~RealInterval()
{
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

RealInterval RealInterval::from_decimal(std::string_view text)
{
    std::string s(text);
    RealInterval r(Uninit{}, t_precision);
    char* end = nullptr;
    mpfr_strtofr(r.lo_, s.c_str(), &end, 10, MPFR_RNDD);
    if (s.empty() || end != s.c_str() + s.size() || mpfr_nan_p(r.lo_)) {
        raise(Errc::FormatError, "not a decimal number: '" + s + "'");
    }
    mpfr_strtofr(r.hi_, s.c_str(), &end, 10, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::from_rational(const mpq_class& q)
{
    RealInterval r(Uninit{}, t_precision);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
}

RealInterval RealInterval::from_integer(const mpz_class& z)
{
    RealInterval r(Uninit{}, t_precision);
    mpfr_set_z(r.lo_, z.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_, z.get_mpz_t(), MPFR_RNDU);
    return r;
}

RealInterval RealInterval::from_int128(__int128 v)
{
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    mpz_class z = static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64));
    z <<= 64;
    z += static_cast<unsigned long>(static_cast<std::uint64_t>(u));
    if (neg) {
        z = -z;
    }
    return from_integer(z);
}

RealInterval RealInterval::from_endpoints(mpfr_srcptr lo, mpfr_srcptr hi)
{
    if (mpfr_cmp(lo, hi) > 0) {
        raise(Errc::DomainError, "interval with lo > hi");
    }
    RealInterval r(Uninit{}, t_precision);
    mpfr_set(r.lo_, lo, MPFR_RNDD);
    mpfr_set(r.hi_, hi, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::symmetric(const RealInterval& radius)
{
    RealInterval r(Uninit{}, t_precision);
    if (mpfr_sgn(radius.lo_) >= 0) {
        mpfr_set(r.hi_, radius.hi_, MPFR_RNDU);
    } else if (mpfr_sgn(radius.hi_) <= 0) {
        mpfr_neg(r.hi_, radius.lo_, MPFR_RNDU);
    } else {
        mpfr_neg(r.hi_, radius.lo_, MPFR_RNDU);
        if (mpfr_cmp(radius.hi_, r.hi_) > 0) {
            mpfr_set(r.hi_, radius.hi_, MPFR_RNDU);
        }
    }
    mpfr_neg(r.lo_, r.hi_, MPFR_RNDD);
    return r;
}

RealInterval RealInterval::hull(const RealInterval& a, const RealInterval& b)
{
    RealInterval r(Uninit{}, t_precision);
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::pi()
{
    RealInterval r(Uninit{}, t_precision);
    mpfr_const_pi(r.lo_, MPFR_RNDD);
    mpfr_const_pi(r.hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::ln2()
{
    RealInterval r(Uninit{}, t_precision);
    mpfr_const_log2(r.lo_, MPFR_RNDD);
    mpfr_const_log2(r.hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::euler_e()
{
    return exp(RealInterval(1));
}

// ---------------------------------------------------------------------------
// queries

double RealInterval::lo_double() const noexcept
{
    return mpfr_get_d(lo_, MPFR_RNDD);
}

double RealInterval::hi_double() const noexcept
{
    return mpfr_get_d(hi_, MPFR_RNDU);
}

double RealInterval::mid_double() const noexcept
{
    return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN));
}

RealInterval RealInterval::lower() const
{
    RealInterval r(Uninit{}, mpfr_get_prec(lo_));
    mpfr_set(r.lo_, lo_, MPFR_RNDD);
    mpfr_set(r.hi_, lo_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::upper() const
{
    RealInterval r(Uninit{}, mpfr_get_prec(hi_));
    mpfr_set(r.lo_, hi_, MPFR_RNDD);
    mpfr_set(r.hi_, hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::mid() const
{
    RealInterval r(Uninit{}, mpfr_get_prec(lo_) + 1);
    mpfr_add(r.lo_, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(r.lo_, r.lo_, 1, MPFR_RNDN);
    if (mpfr_cmp(r.lo_, lo_) < 0) {
        mpfr_set(r.lo_, lo_, MPFR_RNDN);
    }
    if (mpfr_cmp(r.lo_, hi_) > 0) {
        mpfr_set(r.lo_, hi_, MPFR_RNDN);
    }
    mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
    return r;
}

RealInterval RealInterval::width() const
{
    RealInterval r(Uninit{}, t_precision);
    mpfr_sub(r.lo_, hi_, lo_, MPFR_RNDD);
    mpfr_sub(r.hi_, hi_, lo_, MPFR_RNDU);
    return r;
}

double RealInterval::width_double() const noexcept
{
    mpfr_t w;
    mpfr_init2(w, 64);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double d = mpfr_get_d(w, MPFR_RNDU);
    mpfr_clear(w);
    return d;
}

double RealInterval::rad_double() const noexcept
{
    return 0.5 * width_double();
}

bool RealInterval::is_point() const noexcept
{
    return mpfr_equal_p(lo_, hi_) != 0;
}

bool RealInterval::contains_zero() const noexcept
{
    return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0;
}

bool RealInterval::is_positive() const noexcept
{
    return mpfr_sgn(lo_) > 0;
}

bool RealInterval::is_negative() const noexcept
{
    return mpfr_sgn(hi_) < 0;
}

bool RealInterval::is_nonnegative() const noexcept
{
    return mpfr_sgn(lo_) >= 0;
}

bool RealInterval::contains(const RealInterval& other) const noexcept
{
    return mpfr_lessequal_p(lo_, other.lo_) && mpfr_lessequal_p(other.hi_, hi_);
}

bool RealInterval::contains(double v) const noexcept
{
    return mpfr_cmp_d(lo_, v) <= 0 && mpfr_cmp_d(hi_, v) >= 0;
}

bool RealInterval::overlaps(const RealInterval& other) const noexcept
{
    return mpfr_lessequal_p(lo_, other.hi_) && mpfr_lessequal_p(other.lo_, hi_);
}

bool RealInterval::certainly_less(const RealInterval& other) const noexcept
{
    return mpfr_less_p(hi_, other.lo_) != 0;
}

RealInterval RealInterval::inflate(const RealInterval& radius) const
{
    const RealInterval r = symmetric(radius);
    return *this + r;
}

RealInterval RealInterval::intersect(const RealInterval& other) const
{
    RealInterval r(Uninit{}, t_precision);
    mpfr_max(r.lo_, lo_, other.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, hi_, other.hi_, MPFR_RNDU);
    if (mpfr_cmp(r.lo_, r.hi_) > 0) {
        raise(Errc::DomainError, "empty intersection");
    }
    return r;
}

RealInterval RealInterval::clamp(double a, double b) const
{
    RealInterval r(*this);
    if (mpfr_cmp_d(r.lo_, a) < 0) {
        mpfr_set_d(r.lo_, a, MPFR_RNDD);
    }
    if (mpfr_cmp_d(r.hi_, b) > 0) {
        mpfr_set_d(r.hi_, b, MPFR_RNDU);
    }
    if (mpfr_cmp_d(r.lo_, b) > 0) {
        mpfr_set_d(r.lo_, b, MPFR_RNDD);
    }
    if (mpfr_cmp_d(r.hi_, a) < 0) {
        mpfr_set_d(r.hi_, a, MPFR_RNDU);
    }
    return r;
}

std::string RealInterval::lo_decimal() const
{
    return mpfr_round_trip(lo_);
}

std::string RealInterval::hi_decimal() const
{
    return mpfr_round_trip(hi_);
}

std::string RealInterval::to_string(int digits) const
{
    char buf[256];
    std::string out = "[";
    mpfr_snprintf(buf, sizeof buf, "%.*RDe", digits, lo_);
    out += buf;
    out += ", ";
    mpfr_snprintf(buf, sizeof buf, "%.*RUe", digits, hi_);
    out += buf;
    out += "]";
    return out;
}

std::ostream& operator<<(std::ostream& os, const RealInterval& a)
{
    return os << a.to_string(17);
}

// ---------------------------------------------------------------------------
// arithmetic

RealInterval RealInterval::operator-() const
{
    RealInterval r(Uninit{}, mpfr_get_prec(lo_));
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

RealInterval operator+(const RealInterval& a, const RealInterval& b)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

RealInterval operator-(const RealInterval& a, const RealInterval& b)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
}

RealInterval operator*(const RealInterval& a, const RealInterval& b)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    const int al = mpfr_sgn(a.lo_), ah = mpfr_sgn(a.hi_);
    const int bl = mpfr_sgn(b.lo_), bh = mpfr_sgn(b.hi_);
    if (al >= 0 && bl >= 0) {
        mpfr_mul(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_mul(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    } else if (ah <= 0 && bh <= 0) {
        mpfr_mul(r.lo_, a.hi_, b.hi_, MPFR_RNDD);
        mpfr_mul(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
    } else if (al >= 0 && bh <= 0) {
        mpfr_mul(r.lo_, a.hi_, b.lo_, MPFR_RNDD);
        mpfr_mul(r.hi_, a.lo_, b.hi_, MPFR_RNDU);
    } else if (ah <= 0 && bl >= 0) {
        mpfr_mul(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
        mpfr_mul(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    } else if (al >= 0) { // b straddles
        mpfr_mul(r.lo_, a.hi_, b.lo_, MPFR_RNDD);
        mpfr_mul(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    } else if (ah <= 0) {
        mpfr_mul(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
        mpfr_mul(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
    } else if (bl >= 0) { // a straddles
        mpfr_mul(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
        mpfr_mul(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    } else if (bh <= 0) {
        mpfr_mul(r.lo_, a.hi_, b.lo_, MPFR_RNDD);
        mpfr_mul(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
    } else { // both straddle
        auto& s = scratch();
        mpfr_mul(s.v[0], a.lo_, b.hi_, MPFR_RNDD);
        mpfr_mul(s.v[1], a.hi_, b.lo_, MPFR_RNDD);
        mpfr_min(r.lo_, s.v[0], s.v[1], MPFR_RNDD);
        mpfr_mul(s.v[0], a.lo_, b.lo_, MPFR_RNDU);
        mpfr_mul(s.v[1], a.hi_, b.hi_, MPFR_RNDU);
        mpfr_max(r.hi_, s.v[0], s.v[1], MPFR_RNDU);
    }
    return r;
}

RealInterval operator/(const RealInterval& a, const RealInterval& b)
{
    if (b.contains_zero()) {
        raise(Errc::DivisorContainsZero, "divisor interval contains 0");
    }
    RealInterval r(RealInterval::Uninit{}, t_precision);
    const int al = mpfr_sgn(a.lo_), ah = mpfr_sgn(a.hi_);
    if (mpfr_sgn(b.lo_) > 0) {
        if (al >= 0) {
            mpfr_div(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
            mpfr_div(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
        } else if (ah <= 0) {
            mpfr_div(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
            mpfr_div(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
        } else {
            mpfr_div(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
            mpfr_div(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
        }
    } else {
        if (al >= 0) {
            mpfr_div(r.lo_, a.hi_, b.hi_, MPFR_RNDD);
            mpfr_div(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
        } else if (ah <= 0) {
            mpfr_div(r.lo_, a.hi_, b.lo_, MPFR_RNDD);
            mpfr_div(r.hi_, a.lo_, b.hi_, MPFR_RNDU);
        } else {
            mpfr_div(r.lo_, a.hi_, b.hi_, MPFR_RNDD);
            mpfr_div(r.hi_, a.lo_, b.hi_, MPFR_RNDU);
        }
    }
    return r;
}

RealInterval& RealInterval::operator+=(const RealInterval& b)
{
    return *this = *this + b;
}

RealInterval& RealInterval::operator-=(const RealInterval& b)
{
    return *this = *this - b;
}

RealInterval& RealInterval::operator*=(const RealInterval& b)
{
    return *this = *this * b;
}

RealInterval& RealInterval::operator/=(const RealInterval& b)
{
    return *this = *this / b;
}

RealInterval sqr(const RealInterval& a)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    if (mpfr_sgn(a.lo_) >= 0) {
        mpfr_sqr(r.lo_, a.lo_, MPFR_RNDD);
        mpfr_sqr(r.hi_, a.hi_, MPFR_RNDU);
    } else if (mpfr_sgn(a.hi_) <= 0) {
        mpfr_sqr(r.lo_, a.hi_, MPFR_RNDD);
        mpfr_sqr(r.hi_, a.lo_, MPFR_RNDU);
    } else {
        mpfr_set_zero(r.lo_, 1);
        auto& s = scratch();
        mpfr_sqr(s.v[0], a.lo_, MPFR_RNDU);
        mpfr_sqr(s.v[1], a.hi_, MPFR_RNDU);
        mpfr_max(r.hi_, s.v[0], s.v[1], MPFR_RNDU);
    }
    return r;
}

RealInterval abs(const RealInterval& a)
{
    if (mpfr_sgn(a.lo_) >= 0) {
        return a;
    }
    if (mpfr_sgn(a.hi_) <= 0) {
        return -a;
    }
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_set_zero(r.lo_, 1);
    mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
    if (mpfr_cmp(a.hi_, r.hi_) > 0) {
        mpfr_set(r.hi_, a.hi_, MPFR_RNDU);
    }
    return r;
}

RealInterval pow(const RealInterval& a, long n)
{
    if (n < 0) {
        return RealInterval(1) / pow(a, -n);
    }
    if (n == 0) {
        return RealInterval(1);
    }
    const RealInterval base = (n % 2 == 0) ? abs(a) : a;
    // x^n is nondecreasing on the range of base
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_pow_ui(r.lo_, base.lo_, static_cast<unsigned long>(n), MPFR_RNDD);
    mpfr_pow_ui(r.hi_, base.hi_, static_cast<unsigned long>(n), MPFR_RNDU);
    return r;
}

RealInterval pow(const RealInterval& a, const RealInterval& b)
{
    if (!a.is_positive()) {
        raise(Errc::DomainError, "real power of a base that may be <= 0");
    }
    return exp(b * log(a));
}

RealInterval mul_2si(const RealInterval& a, long e)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_mul_2si(r.lo_, a.lo_, e, MPFR_RNDD);
    mpfr_mul_2si(r.hi_, a.hi_, e, MPFR_RNDU);
    return r;
}

RealInterval max(const RealInterval& a, const RealInterval& b)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

RealInterval min(const RealInterval& a, const RealInterval& b)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

RealInterval floor(const RealInterval& a)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_floor(r.lo_, a.lo_);
    mpfr_floor(r.hi_, a.hi_);
    return r;
}

// ---------------------------------------------------------------------------
// elementary functions (MPFR gives correctly rounded values; monotone
// functions map endpoints to endpoints)

RealInterval exp(const RealInterval& a)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_exp(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

RealInterval log(const RealInterval& a)
{
    if (!a.is_positive()) {
        raise(Errc::DomainError, "log of an interval not strictly positive");
    }
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_log(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_log(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

RealInterval log1p(const RealInterval& a)
{
    if (mpfr_cmp_si(a.lo_, -1) <= 0) {
        raise(Errc::DomainError, "log1p of an interval reaching -1");
    }
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_log1p(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_log1p(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

RealInterval sqrt(const RealInterval& a)
{
    if (mpfr_sgn(a.lo_) < 0) {
        raise(Errc::DomainError, "sqrt of an interval with negative part");
    }
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_sqrt(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

RealInterval erf(const RealInterval& a)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_erf(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_erf(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

RealInterval erfc(const RealInterval& a)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_erfc(r.lo_, a.hi_, MPFR_RNDD);
    mpfr_erfc(r.hi_, a.lo_, MPFR_RNDU);
    return r;
}

RealInterval atan(const RealInterval& a)
{
    RealInterval r(RealInterval::Uninit{}, t_precision);
    mpfr_atan(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_atan(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

namespace {

// Integers k with k in q (conservatively). Returns false when the interval
// is too wide to enumerate parities.
struct IntegerHits {
    bool even = false;
    bool odd = false;
};

IntegerHits integer_hits(const RealInterval& q)
{
    IntegerHits hits;
    mpz_class klo, khi;
    mpfr_t t;
    mpfr_init2(t, mpfr_get_prec(q.lo()));
    mpfr_ceil(t, q.lo());
    mpfr_get_z(klo.get_mpz_t(), t, MPFR_RNDN);
    mpfr_floor(t, q.hi());
    mpfr_get_z(khi.get_mpz_t(), t, MPFR_RNDN);
    mpfr_clear(t);
    if (klo > khi) {
        return hits;
    }
    if (khi - klo >= 1) {
        hits.even = hits.odd = true;
        return hits;
    }
    const bool is_even = mpz_even_p(klo.get_mpz_t()) != 0;
    hits.even = is_even;
    hits.odd = !is_even;
    return hits;
}

} // namespace

RealInterval cos(const RealInterval& a)
{
    const RealInterval pi = RealInterval::pi();
    RealInterval r(RealInterval::Uninit{}, t_precision);
    if (mpfr_inf_p(a.lo_) || mpfr_inf_p(a.hi_) || (a.width() / pi).hi_double() >= 2.0) {
        mpfr_set_si(r.lo_, -1, MPFR_RNDD);
        mpfr_set_si(r.hi_, 1, MPFR_RNDU);
        return r;
    }
    auto& s = scratch();
    mpfr_cos(s.v[0], a.lo_, MPFR_RNDD);
    mpfr_cos(s.v[1], a.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, s.v[0], s.v[1], MPFR_RNDD);
    mpfr_cos(s.v[0], a.lo_, MPFR_RNDU);
    mpfr_cos(s.v[1], a.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, s.v[0], s.v[1], MPFR_RNDU);
    // extrema at k*pi: +1 for even k, -1 for odd k
    const IntegerHits hits = integer_hits(a / pi);
    if (hits.even) {
        mpfr_set_si(r.hi_, 1, MPFR_RNDU);
    }
    if (hits.odd) {
        mpfr_set_si(r.lo_, -1, MPFR_RNDD);
    }
    return r;
}

RealInterval sin(const RealInterval& a)
{
    const RealInterval pi = RealInterval::pi();
    RealInterval r(RealInterval::Uninit{}, t_precision);
    if (mpfr_inf_p(a.lo_) || mpfr_inf_p(a.hi_) || (a.width() / pi).hi_double() >= 2.0) {
        mpfr_set_si(r.lo_, -1, MPFR_RNDD);
        mpfr_set_si(r.hi_, 1, MPFR_RNDU);
        return r;
    }
    auto& s = scratch();
    mpfr_sin(s.v[0], a.lo_, MPFR_RNDD);
    mpfr_sin(s.v[1], a.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, s.v[0], s.v[1], MPFR_RNDD);
    mpfr_sin(s.v[0], a.lo_, MPFR_RNDU);
    mpfr_sin(s.v[1], a.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, s.v[0], s.v[1], MPFR_RNDU);
    // extrema at (k + 1/2)*pi: +1 for even k, -1 for odd k
    const IntegerHits hits = integer_hits(a / pi - RealInterval(0.5));
    if (hits.even) {
        mpfr_set_si(r.hi_, 1, MPFR_RNDU);
    }
    if (hits.odd) {
        mpfr_set_si(r.lo_, -1, MPFR_RNDD);
    }
    return r;
}

long long unique_integer(const RealInterval& a)
{
    mpfr_t c, f;
    mpfr_init2(c, a.precision());
    mpfr_init2(f, a.precision());
    mpfr_ceil(c, a.lo());
    mpfr_floor(f, a.hi());
    const int cmp = mpfr_cmp(c, f);
    const long long n = mpfr_get_si(c, MPFR_RNDN);
    mpfr_clear(c);
    mpfr_clear(f);
    if (cmp > 0) {
        raise(Errc::NoInteger, "no integer in " + a.to_string(12));
    }
    if (cmp < 0) {
        raise(Errc::Ambiguous, "several integers in " + a.to_string(12));
    }
    return n;
}

} // namespace anpc
