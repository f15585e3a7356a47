#include "anpc/interval.hpp"

#include <ostream>

namespace anpc {

ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b)
{
    return {a.re() + b.re(), a.im() + b.im()};
}

ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b)
{
    return {a.re() - b.re(), a.im() - b.im()};
}

ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b)
{
    return {a.re() * b.re() - a.im() * b.im(), a.re() * b.im() + a.im() * b.re()};
}

ComplexInterval operator*(const ComplexInterval& a, const RealInterval& b)
{
    return {a.re() * b, a.im() * b};
}

ComplexInterval operator*(const RealInterval& a, const ComplexInterval& b)
{
    return {a * b.re(), a * b.im()};
}

ComplexInterval operator/(const ComplexInterval& a, const ComplexInterval& b)
{
    const RealInterval d = norm(b);
    if (d.contains_zero()) {
        raise(Errc::DivisorContainsZero, "complex divisor rectangle contains 0");
    }
    return (a * b.conj()) / d;
}

ComplexInterval operator/(const ComplexInterval& a, const RealInterval& b)
{
    return {a.re() / b, a.im() / b};
}

ComplexInterval& ComplexInterval::operator+=(const ComplexInterval& b)
{
    re_ += b.re_;
    im_ += b.im_;
    return *this;
}

ComplexInterval& ComplexInterval::operator-=(const ComplexInterval& b)
{
    re_ -= b.re_;
    im_ -= b.im_;
    return *this;
}

ComplexInterval& ComplexInterval::operator*=(const ComplexInterval& b)
{
    return *this = *this * b;
}

RealInterval norm(const ComplexInterval& z)
{
    return sqr(z.re()) + sqr(z.im());
}

RealInterval abs(const ComplexInterval& z)
{
    return sqrt(norm(z));
}

RealInterval arg(const ComplexInterval& z)
{
    if (z.re().is_positive()) {
        return atan(z.im() / z.re());
    }
    const RealInterval half_pi = mul_2si(RealInterval::pi(), -1);
    if (z.im().is_positive()) {
        return half_pi - atan(z.re() / z.im());
    }
    if (z.im().is_negative()) {
        return -half_pi - atan(z.re() / z.im());
    }
    raise(Errc::DomainError, "argument undefined on a rectangle meeting (-inf, 0]");
}

ComplexInterval exp(const ComplexInterval& z)
{
    const RealInterval m = exp(z.re());
    return {m * cos(z.im()), m * sin(z.im())};
}

ComplexInterval log(const ComplexInterval& z)
{
    return {mul_2si(log(norm(z)), -1), arg(z)};
}

ComplexInterval sqr(const ComplexInterval& z)
{
    return {sqr(z.re()) - sqr(z.im()), mul_2si(z.re() * z.im(), 1)};
}

ComplexInterval pow(const ComplexInterval& z, long n)
{
    if (n < 0) {
        return ComplexInterval(1) / pow(z, -n);
    }
    ComplexInterval result(1);
    ComplexInterval base = z;
    while (n > 0) {
        if (n & 1) {
            result *= base;
        }
        n >>= 1;
        if (n > 0) {
            base = sqr(base);
        }
    }
    return result;
}

ComplexInterval expi(const RealInterval& theta)
{
    return {cos(theta), sin(theta)};
}

ComplexInterval cpow(const RealInterval& x, const ComplexInterval& s)
{
    if (!x.is_positive()) {
        raise(Errc::DomainError, "complex power of a base that may be <= 0");
    }
    return exp(s * log(x));
}

std::ostream& operator<<(std::ostream& os, const ComplexInterval& z)
{
    return os << '(' << z.re() << " + i" << z.im() << ')';
}

} // namespace anpc
