#include "anpc/zetafft.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "anpc/detail/parallel.hpp"

namespace anpc {

namespace {

const RealInterval& pi_iv()
{
    thread_local std::map<mpfr_prec_t, RealInterval> cache;
    auto it = cache.find(working_precision());
    if (it == cache.end()) {
        it = cache.emplace(working_precision(), RealInterval::pi()).first;
    }
    return it->second;
}

RealInterval two_pow(const RealInterval& e) { return exp(e * RealInterval::ln2()); }

RealInterval half(const RealInterval& a) { return mul_2si(a, -1); }

RealInterval zeta_at(long n)
{
    mpfr_t lo, hi;
    mpfr_init2(lo, working_precision());
    mpfr_init2(hi, working_precision());
    mpfr_zeta_ui(lo, static_cast<unsigned long>(n), MPFR_RNDD);
    mpfr_zeta_ui(hi, static_cast<unsigned long>(n), MPFR_RNDU);
    RealInterval z = RealInterval::from_endpoints(lo, hi);
    mpfr_clear(lo);
    mpfr_clear(hi);
    return z;
}

RealInterval factorial(long n)
{
    RealInterval r(1);
    for (long i = 2; i <= n; ++i) {
        r *= RealInterval(i);
    }
    return r;
}

long binomial(long n, long k)
{
    long r = 1;
    for (long i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// Pick the candidate whose upper endpoint is smallest.
RealInterval smallest(const std::vector<RealInterval>& xs)
{
    if (xs.empty()) {
        raise(Errc::ParamViolation, "no admissible contour abscissa");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (mpfr_less_p(xs[i].hi(), xs[best].hi())) {
            best = i;
        }
    }
    return xs[best];
}

std::vector<int> abscissae(int fixed, double t0)
{
    if (fixed != 0) {
        return {fixed};
    }
    std::vector<int> out;
    for (int s : {3, 5, 7, 9}) {
        if (t0 > s + 0.5) {
            out.push_back(s);
        }
    }
    return out;
}

// Shifting G left to Re s = -sigma replaces |Gamma((sigma + iT)/2)| by
// |Gamma((-sigma + iT)/2)|. For sigma = 2a with a half-integral the ratio is
// 1 / (|a + iy| prod_{j<a-1/2} ((j+1/2)^2 + y^2)), largest at y = 0: 8/3 for
// sigma = 3 and below 1 from sigma = 5 on.
RealInterval left_shift_ratio(int sigma)
{
    RealInterval r = RealInterval(sigma) / RealInterval(2);
    for (int j = 0; j < (sigma - 1) / 2; ++j) {
        r *= sqr(RealInterval(2 * j + 1) / RealInterval(2));
    }
    return max(RealInterval(1) / r, RealInterval(1));
}

RealInterval h_iv(const GridParams& p) { return RealInterval(p.h); }

RealInterval inv_8h2(const GridParams& p) { return RealInterval(1) / mul_2si(sqr(h_iv(p)), 3); }

RealInterval gauss_t0(const GridParams& p)
{
    return exp(-sqr(RealInterval(p.t0)) / mul_2si(sqr(h_iv(p)), 1));
}

// One exponential term coef * exp(-rate |u|) of the G^(k) envelope.
struct ExpTerm {
    RealInterval coef;
    RealInterval rate;
    bool shifted_left_only = false; // carries the left-shift ratio
};

std::vector<ExpTerm> gk_terms(int sigma, int k, const GridParams& p)
{
    const RealInterval& pi = pi_iv();
    std::vector<ExpTerm> terms;
    const RealInterval c = c_bound(sigma, k, p);
    terms.push_back({c * exp(sqr(RealInterval(2 * sigma + 1)) * inv_8h2(p)), RealInterval(2 * sigma - 1) * pi, true});
    const RealInterval pre = two_pow(RealInterval(k + 2)) * pow(pi, k + 1) * gauss_t0(p);
    const RealInterval t02 = sqr(RealInterval(p.t0));
    for (int l = 0; l <= (sigma - 1) / 2; ++l) {
        const RealInterval a = sqr(RealInterval(4 * l + 1) / RealInterval(2)) + t02;
        const RealInterval mag = pow(sqrt(a), k);
        const RealInterval coef = pre * mag / factorial(l) * exp(sqr(RealInterval(4 * l + 1)) * inv_8h2(p));
        terms.push_back({coef, RealInterval(4 * l + 1) * pi, false});
    }
    return terms;
}

RealInterval envelope(const std::vector<ExpTerm>& terms, const RealInterval& u, const RealInterval& ratio)
{
    const RealInterval au = abs(u);
    const bool left = !u.is_nonnegative();
    RealInterval sum(0);
    for (const auto& t : terms) {
        RealInterval v = t.coef * exp(-t.rate * au);
        if (left && t.shifted_left_only) {
            v *= ratio;
        }
        sum += v;
    }
    return sum;
}

// The envelope terms of G^(k) for every admissible abscissa, so that
// repeated evaluations only pay for the exponentials.
struct SigmaTerms {
    int sigma = 0;
    RealInterval ratio;
    std::vector<ExpTerm> terms;
};

std::vector<SigmaTerms> envelope_terms(int k, const GridParams& p)
{
    std::vector<SigmaTerms> out;
    for (int s : abscissae(p.sigma_g, p.t0)) {
        out.push_back({s, left_shift_ratio(s), gk_terms(s, k, p)});
    }
    return out;
}

RealInterval min_envelope(const std::vector<SigmaTerms>& all, const RealInterval& u)
{
    std::vector<RealInterval> cands;
    for (const auto& st : all) {
        cands.push_back(envelope(st.terms, u, st.ratio));
    }
    return smallest(cands);
}

RealInterval min_alias_at(const std::vector<SigmaTerms>& all, const RealInterval& u, const RealInterval& A)
{
    if (!u.is_nonnegative() || !u.certainly_less(A)) {
        raise(Errc::ParamViolation, "alias position must lie in [0, A)");
    }
    std::vector<RealInterval> cands;
    for (const auto& st : all) {
        RealInterval sum(0);
        for (const auto& t : st.terms) {
            // positions u + lA (l >= 1) on the right and u - lA on the left
            const RealInterval right = exp(-t.rate * (A + u));
            const RealInterval left = exp(-t.rate * (A - u)) * (t.shifted_left_only ? st.ratio : RealInterval(1));
            sum += t.coef * (right + left) / (RealInterval(1) - exp(-t.rate * A));
        }
        cands.push_back(sum);
    }
    return smallest(cands);
}

RealInterval ell(long j)
{
    const RealInterval& pi = pi_iv();
    return (log(RealInterval(j)) + half(log(pi))) / mul_2si(pi, 1);
}

// The trivial integral 8 int_0^inf (2 pi t)^K exp(-t^2/2h^2) dt bounding sup |G^(K)|.
RealInterval trivial_gk(int K, const GridParams& p)
{
    const RealInterval h = h_iv(p);
    return RealInterval(8) * pow(mul_2si(pi_iv(), 1), K) * two_pow(RealInterval(K - 1) / RealInterval(2)) *
           pow(h, K + 1) * gamma(RealInterval(K + 1) / RealInterval(2));
}

// Taylor remainder per Dirichlet coefficient for F(x), x >= 0, with the
// expansion points at distance at most xi from log(j sqrt pi)/2pi: the
// remainder needs sup |G^(K)| beyond x + ell(1) - xi, where the envelope
// decays, capped by the trivial bound.
RealInterval taylor_at(const RealInterval& x, const GridParams& p, const RealInterval& xi,
                       const std::vector<SigmaTerms>& terms_K)
{
    const RealInterval scale = pow(xi, p.K) / factorial(p.K);
    const RealInterval u = max(x + ell(1) - xi, RealInterval(0));
    const RealInterval env = min_envelope(terms_K, u);
    const RealInterval triv = trivial_gk(p.K, p);
    return scale * (env.certainly_less(triv) ? env : triv);
}

RealInterval sqrt_weight(long J) { return mul_2si(sqrt(RealInterval(J)), 1) - RealInterval(1); }

// Twiddles e(-j/N), j < N/2, per length and precision.
const std::vector<ComplexInterval>& twiddles(std::size_t n)
{
    thread_local std::map<std::pair<std::size_t, mpfr_prec_t>, std::vector<ComplexInterval>> cache;
    auto key = std::make_pair(n, working_precision());
    auto it = cache.find(key);
    if (it != cache.end()) {
        return it->second;
    }
    std::vector<ComplexInterval> w;
    w.reserve(n / 2);
    const RealInterval two_pi = mul_2si(pi_iv(), 1);
    for (std::size_t j = 0; j < n / 2; ++j) {
        const RealInterval theta = two_pi * RealInterval(static_cast<unsigned long>(j)) /
                                   RealInterval(static_cast<unsigned long>(n));
        w.emplace_back(cos(theta), -sin(theta));
    }
    return cache.emplace(key, std::move(w)).first->second;
}

// Gamma((1/2 + i(t+t0))/2) exp(pi(t+t0)/4 - t^2/2h^2) at t = n/A, indexed by n mod N.
std::vector<ComplexInterval> g_base(const GridParams& p)
{
    std::vector<ComplexInterval> base(static_cast<std::size_t>(p.N));
    for (long idx = 0; idx < p.N; ++idx) {
        const long n = idx < p.N / 2 ? idx : idx - p.N;
        base[static_cast<std::size_t>(idx)] = g_eval(n, 0, p);
    }
    return base;
}

RealInterval t_at(long n, const GridParams& p)
{
    return RealInterval(p.B) * RealInterval(n) / RealInterval(p.N);
}

ComplexInterval minus_i_pow(int k)
{
    switch (k % 4) {
    case 0:
        return {RealInterval(1), RealInterval(0)};
    case 1:
        return {RealInterval(0), RealInterval(-1)};
    case 2:
        return {RealInterval(-1), RealInterval(0)};
    default:
        return {RealInterval(0), RealInterval(1)};
    }
}

GLayer layer_from_base(const std::vector<ComplexInterval>& base, int k, const GridParams& p)
{
    GLayer layer;
    layer.g_alias = g_alias_bound(k, p).upper();
    layer.values.resize(base.size());
    const RealInterval two_pi = mul_2si(pi_iv(), 1);
    const ComplexInterval unit = minus_i_pow(k);
    for (long idx = 0; idx < p.N; ++idx) {
        const long n = idx < p.N / 2 ? idx : idx - p.N;
        const auto i = static_cast<std::size_t>(idx);
        layer.values[i] = k > 0 ? base[i] * pow(two_pi * t_at(n, p), k) * unit : base[i];
    }
    dft(layer.values, DftDirection::Forward);
    const RealInterval inv_a = RealInterval(p.B) / RealInterval(p.N);
    for (auto& v : layer.values) {
        v = v * inv_a;
    }
    return layer;
}

ComplexInterval term_coefficient(long j, const GridParams& p)
{
    // j^(-1/2) (j sqrt pi)^(-i t0), the phase being t0 * 2pi * ell(j)
    const RealInterval phase = RealInterval(p.t0) * mul_2si(pi_iv(), 1) * ell(j);
    return expi(-phase) / sqrt(RealInterval(j));
}

} // namespace

GridParams GridParams::defaults(double t0)
{
    GridParams p;
    p.t0 = t0;
    if (t0 < 32) {
        p.B = 2 * std::floor(t0);
    }
    return p;
}

RealInterval GridParams::A() const { return RealInterval(N) / RealInterval(B); }

double GridParams::A_double() const { return static_cast<double>(N) / B; }

long GridParams::terms() const
{
    if (J > 0) {
        return J;
    }
    return static_cast<long>(std::ceil(4 * std::sqrt(t0)));
}

RealInterval GridParams::xi() const { return RealInterval(1) / RealInterval(2 * B); }

RealInterval GridParams::beta() const
{
    const RealInterval lt = log(RealInterval(t0));
    return RealInterval(1) / RealInterval(6) + log(lt) / lt;
}

void GridParams::validate() const
{
    auto fail = [](const std::string& what) { raise(Errc::ParamViolation, what); };
    if (!(std::isfinite(t0) && t0 > std::exp(std::exp(1.0)))) {
        fail("t0 must exceed e^e");
    }
    if (!(h > 0 && std::isfinite(h))) {
        fail("h must be positive");
    }
    if (!(B > 0 && std::isfinite(B))) {
        fail("B must be positive");
    }
    if (!is_power_of_two(static_cast<std::size_t>(std::max(N, 0L))) || N < 4) {
        fail("N must be a power of two, at least 4");
    }
    if (K < 1 || K > 40) {
        fail("K must lie in [1, 40]");
    }
    if (terms() < 1) {
        fail("J must be positive");
    }
    // The g bound 4 (2 pi t)^k exp(-t^2/2h^2) decreases from t = B/2 only when B/2 >= h sqrt(k).
    if (!(B >= 2 * h * std::sqrt(static_cast<double>(K)))) {
        fail("B must be at least 2 h sqrt(K)");
    }
    const RealInterval half_b = RealInterval(B) / RealInterval(2);
    if (!(beta() * sqr(RealInterval(h)) / RealInterval(t0)).certainly_less(half_b) || half_b.hi_double() > t0) {
        fail("need beta h^2 / t0 <= B/2 <= t0");
    }
    // Shifted positions x + log(J sqrt pi)/2pi stay below A/2 + A/2.
    const RealInterval top = ell(terms()) + xi();
    if (!top.certainly_less(A() / RealInterval(2) - RealInterval(1) / RealInterval(B))) {
        fail("J too large for A: log(J sqrt pi)/2pi must stay below A/2");
    }
    for (int s : {sigma_g, sigma_f}) {
        if (s != 0 && (s < 3 || s % 2 == 0 || !(t0 > s + 0.5))) {
            fail("sigma must be odd, at least 3 and below t0 - 1/2");
        }
    }
    if (abscissae(sigma_g, t0).empty()) {
        fail("no admissible sigma");
    }
}

RealInterval StageBudget::total() const
{
    return g_alias + G_alias + series_tail + taylor + F_alias + f_alias + rounding;
}

RealInterval GridEvaluation::ordinate(std::size_t i) const
{
    const long n = static_cast<long>(i) - params.N / 2;
    return RealInterval(params.t0) + t_at(n, params);
}

ComplexInterval g_eval(long n, int k, const GridParams& p)
{
    if (std::labs(n) > p.N / 2 || k < 0) {
        raise(Errc::ParamViolation, "g_eval needs |n| <= N/2 and k >= 0");
    }
    const RealInterval& pi = pi_iv();
    const RealInterval t = t_at(n, p);
    const RealInterval T = RealInterval(p.t0) + t;
    const ComplexInterval z(RealInterval(1) / RealInterval(4), half(T));
    const RealInterval real_exp = pi * T / RealInterval(4) - sqr(t) / mul_2si(sqr(h_iv(p)), 1);
    ComplexInterval v = exp(log_gamma(z) + ComplexInterval(real_exp));
    if (k > 0) {
        v = v * pow(mul_2si(pi, 1) * t, k) * minus_i_pow(k);
    }
    return v;
}

RealInterval g_alias_bound(int k, const GridParams& p)
{
    if (!(p.B >= 2 * p.h * std::sqrt(static_cast<double>(k)))) {
        raise(Errc::ParamViolation, "g aliasing bound needs B >= 2 h sqrt(k)");
    }
    const RealInterval B(p.B);
    const RealInterval h = h_iv(p);
    const RealInterval q = sqr(B) * inv_8h2(p);
    const RealInterval kk(k);
    const RealInterval a = exp(-q);
    const RealInterval b = two_pow((RealInterval(3) * kk - RealInterval(1)) / RealInterval(2)) * pow(h / B, k + 1) *
                           incomplete_gamma((kk + RealInterval(1)) / RealInterval(2), q);
    return RealInterval(8) * pow(pi_iv() * B, k) * (a + b);
}

void dft(std::vector<ComplexInterval>& a, DftDirection direction)
{
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) {
        raise(Errc::SizeMismatch, "transform length must be a power of two");
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    const auto& w = twiddles(n);
    const bool inverse = direction == DftDirection::Inverse;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t halflen = len / 2;
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < halflen; ++j) {
                const ComplexInterval& tw = w[j * step];
                ComplexInterval v = a[i + j + halflen] * (inverse ? tw.conj() : tw);
                a[i + j + halflen] = a[i + j] - v;
                a[i + j] += v;
            }
        }
    }
}

RealInterval c_bound(int sigma, int k, const GridParams& p)
{
    if (sigma < 3 || sigma % 2 == 0 || !(p.t0 > sigma + 0.5)) {
        raise(Errc::ParamViolation, "C needs odd sigma >= 3 with t0 > sigma + 1/2");
    }
    const RealInterval& pi = pi_iv();
    const RealInterval h = h_iv(p);
    const RealInterval s(sigma);
    const RealInterval q = sqr(RealInterval(2 * sigma + 1)) * inv_8h2(p);
    const RealInterval c = s + RealInterval(1) / RealInterval(2);
    const RealInterval pre = two_pow(RealInterval(6 * k + 7 - sigma) / RealInterval(4)) * pow(pi, k) * sqrt(pi) *
                             exp(RealInterval(1) / RealInterval(2 * sigma));
    const long m = (sigma - 1) / 2;
    RealInterval sum(0);
    for (long l = 0; l <= m; ++l) {
        const RealInterval a = RealInterval(l + 1) / RealInterval(2);
        const RealInterval lower_gamma = max(gamma(a) - incomplete_gamma(a, q), RealInterval(0));
        const RealInterval x = pow(h, l + 1) * two_pow(RealInterval(l - 1) / RealInterval(2)) * pow(c, k) * lower_gamma;
        const RealInterval y = pow(h, l + k + 1) * two_pow(RealInterval(l + k - 1) / RealInterval(2)) *
                               incomplete_gamma(RealInterval(l + k + 1) / RealInterval(2), q);
        sum += RealInterval(binomial(m, l)) * pow(RealInterval(p.t0), m - l) * (x + y);
    }
    return pre * sum;
}

RealInterval gk_envelope(int k, const RealInterval& u, const GridParams& p)
{
    return min_envelope(envelope_terms(k, p), u);
}

RealInterval G_alias_bound(int k, const GridParams& p)
{
    const RealInterval& pi = pi_iv();
    const RealInterval A = p.A();
    std::vector<RealInterval> cands;
    for (int sigma : abscissae(p.sigma_g, p.t0)) {
        RealInterval S(0);
        const RealInterval t02 = sqr(RealInterval(p.t0));
        for (int l = 0; l <= (sigma - 1) / 2; ++l) {
            const RealInterval r = RealInterval(4 * l + 1);
            const RealInterval mag = pow(sqrt(sqr(r / RealInterval(2)) + t02), k);
            S += mag / factorial(l) * exp(sqr(r) * inv_8h2(p) - r * pi * A / RealInterval(2)) *
                 (RealInterval(1) + RealInterval(1) / (A * pi * r));
        }
        const RealInterval poles = two_pow(RealInterval(k + 3)) * pow(pi, k + 1) * gauss_t0(p) * S;
        const RealInterval rate = RealInterval(2 * sigma - 1) * pi;
        const RealInterval cterm = RealInterval(2) * (RealInterval(1) + RealInterval(1) / (A * rate)) *
                                   left_shift_ratio(sigma) * c_bound(sigma, k, p) *
                                   exp(sqr(RealInterval(2 * sigma + 1)) * inv_8h2(p) - rate * A / RealInterval(2));
        cands.push_back(poles + cterm);
    }
    return smallest(cands);
}

RealInterval G_alias_bound_at(int k, const RealInterval& u, const GridParams& p)
{
    return min_alias_at(envelope_terms(k, p), u, p.A());
}

GLayer g_to_G(int k, const GridParams& p)
{
    p.validate();
    return layer_from_base(g_base(p), k, p);
}

RealInterval residue_bound(const RealInterval& x, const GridParams& p)
{
    const RealInterval& pi = pi_iv();
    return RealInterval(2) * pow(pi, 1) * sqrt(sqrt(pi)) * exp(inv_8h2(p) - pi * x) * gauss_t0(p);
}

namespace {

// C(sigma,t0,h,0) exp((2 sigma - 1)^2/8h^2) pi^((1 - 2 sigma)/4) J^(1 - sigma) / (sigma - 1)
// paired with the decay rate (2 sigma - 1) pi in x.
std::vector<std::pair<RealInterval, RealInterval>> tail_terms(const GridParams& p)
{
    const RealInterval& pi = pi_iv();
    const RealInterval J(p.terms());
    std::vector<std::pair<RealInterval, RealInterval>> out;
    for (int sigma : abscissae(p.sigma_g, p.t0)) {
        const RealInterval r(2 * sigma - 1);
        out.emplace_back(c_bound(sigma, 0, p) * exp(sqr(r) * inv_8h2(p)) * pow(pi, -r / RealInterval(4)) *
                             pow(J, RealInterval(1 - sigma)) / RealInterval(sigma - 1),
                         pi * r);
    }
    return out;
}

RealInterval min_tail(const std::vector<std::pair<RealInterval, RealInterval>>& terms, const RealInterval& x)
{
    std::vector<RealInterval> cands;
    for (const auto& [coef, rate] : terms) {
        cands.push_back(coef * exp(-rate * x));
    }
    return smallest(cands);
}

} // namespace

RealInterval series_tail_bound(const RealInterval& x, const GridParams& p)
{
    return min_tail(tail_terms(p), x);
}

RealInterval taylor_bound(const GridParams& p, const RealInterval& xi)
{
    const RealInterval& pi = pi_iv();
    const int K = p.K;
    return two_pow(RealInterval(K + 5) / RealInterval(2)) * pow(pi, K) * sqrt(pi) * pow(h_iv(p), K + 1) *
           pow(xi, K) / gamma(RealInterval(K + 2) / RealInterval(2));
}

RealInterval f_hat_bound(const RealInterval& x, int sigma, const GridParams& p)
{
    if (sigma < 3 || sigma % 2 == 0 || !(sigma < p.t0)) {
        raise(Errc::ParamViolation, "F bound needs odd 1 < sigma < t0");
    }
    const RealInterval& pi = pi_iv();
    const RealInterval r(2 * sigma - 1);
    const RealInterval ax = abs(x);
    return zeta_at(sigma) * pow(pi, -r / RealInterval(4)) * c_bound(sigma, 0, p) *
               exp(sqr(r) * inv_8h2(p) - pi * ax * r) +
           residue_bound(ax, p);
}

RealInterval F_alias_bound(const GridParams& p)
{
    const RealInterval& pi = pi_iv();
    const RealInterval A = p.A();
    const RealInterval res = RealInterval(4) * pi * sqrt(sqrt(pi)) *
                             exp(inv_8h2(p) - pi * A / RealInterval(2)) * gauss_t0(p) *
                             (RealInterval(1) + RealInterval(1) / (A * pi));
    std::vector<RealInterval> cands;
    for (int sigma : abscissae(p.sigma_f, p.t0)) {
        const RealInterval r(2 * sigma - 1);
        cands.push_back(RealInterval(2) * zeta_at(sigma) * pow(pi, -r / RealInterval(4)) * c_bound(sigma, 0, p) *
                            exp(sqr(r) * inv_8h2(p) - A * pi * r / RealInterval(2)) *
                            (RealInterval(1) + RealInterval(1) / (A * pi * r)) +
                        res);
    }
    return smallest(cands);
}

RealInterval f_bound(const RealInterval& t, const GridParams& p)
{
    if (!t.is_nonnegative()) {
        raise(Errc::ParamViolation, "f bound needs t >= 0");
    }
    return RealInterval(12) * pow(t + RealInterval(p.t0), p.beta()) * exp(-sqr(t) / mul_2si(sqr(h_iv(p)), 1));
}

RealInterval f_alias_bound(const GridParams& p)
{
    const RealInterval& pi = pi_iv();
    const RealInterval beta = p.beta();
    const RealInterval h = h_iv(p);
    const RealInterval B(p.B);
    const RealInterval t0(p.t0);
    const RealInterval q = sqr(B) * inv_8h2(p);
    const RealInterval rt2 = sqrt(RealInterval(2));
    const RealInterval X = pow(half(B) + t0, beta) * exp(-q);
    const RealInterval Y = max(pow(t0, beta) * sqrt(half(pi)) * (erf(t0 / (h * rt2)) - erf(B / (mul_2si(h, 1) * rt2))),
                               RealInterval(0));
    const RealInterval Z = two_pow((beta - RealInterval(1)) / RealInterval(2)) * pow(h, beta) *
                           incomplete_gamma((beta + RealInterval(1)) / RealInterval(2), q);
    return RealInterval(24) * (X + two_pow(beta) * h / B * (Y + Z));
}

FStage assemble_F(const std::vector<GLayer>& layers, const GridParams& p, unsigned threads)
{
    p.validate();
    if (static_cast<int>(layers.size()) != p.K) {
        raise(Errc::SizeMismatch, "need one G layer per Taylor order");
    }
    const std::size_t n = static_cast<std::size_t>(p.N);
    const long half_n = p.N / 2;
    const long J = p.terms();
    const RealInterval B(p.B);
    const RealInterval A = p.A();

    // Bin the Dirichlet terms on the lattice m/B.
    std::vector<long> bin(static_cast<std::size_t>(J));
    std::vector<RealInterval> w(static_cast<std::size_t>(J));
    std::vector<ComplexInterval> coef(static_cast<std::size_t>(J));
    RealInterval xi_eff(0);
    long m_max = 0;
    for (long j = 1; j <= J; ++j) {
        const auto i = static_cast<std::size_t>(j - 1);
        const RealInterval l = ell(j);
        bin[i] = std::lround(l.mid_double() * p.B);
        w[i] = l - RealInterval(bin[i]) / B;
        xi_eff = max(xi_eff, abs(w[i]).upper());
        coef[i] = term_coefficient(j, p);
        m_max = std::max(m_max, bin[i]);
    }
    if (!(xi_eff.hi_double() <= p.xi().hi_double() * (1 + 1e-9))) {
        raise(Errc::ParamViolation, "Dirichlet term binned too far from its lattice point");
    }

    // Each layer yields F_k(x) = sum_m G^(k)(x + m/B) S_k(m) on x = 0..A/2. The
    // transform runs on the enclosures of G~; the distance to G^(k) (g and G
    // aliasing) is a disc radius rho_k at every position read, so the layer
    // error is at most rho_k sum_m |S_k(m)|.
    std::vector<std::vector<ComplexInterval>> partial(static_cast<std::size_t>(p.K));
    std::vector<RealInterval> weight(static_cast<std::size_t>(p.K));
    std::vector<RealInterval> G_worst(static_cast<std::size_t>(p.K));
    detail::parallel_for(static_cast<std::size_t>(p.K), threads, [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        std::vector<ComplexInterval> S(n, ComplexInterval(0));
        const RealInterval inv_fact = RealInterval(1) / factorial(k);
        for (long j = 1; j <= J; ++j) {
            const auto i = static_cast<std::size_t>(j - 1);
            S[static_cast<std::size_t>(bin[i])] += coef[i] * (pow(w[i], k) * inv_fact);
        }
        RealInterval wsum(0);
        for (const auto& v : S) {
            wsum += abs(v).upper();
        }
        weight[kk] = wsum;

        // Closed form up to N/2, the positional geometric series beyond.
        RealInterval worst = G_alias_bound(k, p).upper();
        const std::vector<SigmaTerms> terms = envelope_terms(k, p);
        for (long idx = half_n + 1; idx <= half_n + m_max; ++idx) {
            worst = max(worst, min_alias_at(terms, RealInterval(idx) / B, A).upper());
        }
        G_worst[kk] = worst;

        // Correlation: its transform is Forward(G) times Inverse(S).
        std::vector<ComplexInterval> G = layers[kk].values;
        dft(G, DftDirection::Forward);
        dft(S, DftDirection::Inverse);
        for (std::size_t i = 0; i < n; ++i) {
            G[i] = G[i] * S[i];
        }
        dft(G, DftDirection::Inverse);
        const RealInterval inv_n = RealInterval(1) / RealInterval(p.N);
        std::vector<ComplexInterval> out(static_cast<std::size_t>(half_n + 1));
        for (long i = 0; i <= half_n; ++i) {
            out[static_cast<std::size_t>(i)] = G[static_cast<std::size_t>(i)] * inv_n;
        }
        partial[kk] = std::move(out);
    });

    FStage stage;
    stage.values.assign(static_cast<std::size_t>(half_n + 1), ComplexInterval(0));
    RealInterval layer_radius(0);
    RealInterval g_total(0);
    RealInterval G_total(0);
    for (int k = 0; k < p.K; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        for (long i = 0; i <= half_n; ++i) {
            stage.values[static_cast<std::size_t>(i)] += partial[kk][static_cast<std::size_t>(i)];
        }
        g_total += weight[kk] * B * layers[kk].g_alias;
        G_total += weight[kk] * G_worst[kk];
    }
    layer_radius = (g_total + G_total).upper();

    const RealInterval sw = sqrt_weight(J);
    RealInterval tail_sum(0);
    RealInterval taylor_sum(0);
    const auto tails = tail_terms(p);
    const std::vector<SigmaTerms> terms_K = envelope_terms(p.K, p);
    stage.radius.resize(static_cast<std::size_t>(half_n + 1));
    for (long i = 0; i <= half_n; ++i) {
        const RealInterval x = RealInterval(i) / B;
        const RealInterval tail = (residue_bound(x, p) + min_tail(tails, x)).upper();
        const RealInterval tay = (taylor_at(x, p, xi_eff, terms_K) * sw).upper();
        stage.radius[static_cast<std::size_t>(i)] = (layer_radius + tail + tay).upper();
        // F at -x carries the same charge; x = 0 and x = A/2 occur once
        const RealInterval mult = (i == 0 || i == half_n) ? RealInterval(1) : RealInterval(2);
        tail_sum += mult * tail;
        taylor_sum += mult * tay;
    }
    // A charge r on every transform sample moves f by at most (N/B) r = A r.
    stage.series_tail = (tail_sum / B).upper();
    stage.taylor = (taylor_sum / B).upper();
    stage.g_alias = (A * g_total).upper();
    stage.G_alias = (A * G_total).upper();
    return stage;
}

GridEvaluation F_to_f(const FStage& stage, const GridParams& p)
{
    p.validate();
    const long half_n = p.N / 2;
    if (static_cast<long>(stage.values.size()) != half_n + 1 || stage.radius.size() != stage.values.size()) {
        raise(Errc::SizeMismatch, "need F(m/B) and its radius for m = 0..N/2");
    }
    const std::size_t n = static_cast<std::size_t>(p.N);
    const RealInterval F_alias = F_alias_bound(p).upper();
    std::vector<ComplexInterval> Ft(n);
    RealInterval radius_sum(0);
    for (long m = 0; m < p.N; ++m) {
        // f is real, so F(-x) is the conjugate of F(x)
        const long src = m <= half_n ? m : p.N - m;
        const ComplexInterval& v = stage.values[static_cast<std::size_t>(src)];
        Ft[static_cast<std::size_t>(m)] = m <= half_n ? v : v.conj();
        radius_sum += stage.radius[static_cast<std::size_t>(src)] + F_alias;
    }
    dft(Ft, DftDirection::Inverse);

    GridEvaluation out;
    out.params = p;
    out.f_values.resize(n);
    const RealInterval inv_b = RealInterval(1) / RealInterval(p.B);
    const RealInterval f_alias = f_alias_bound(p).upper();
    const RealInterval radius = (radius_sum * inv_b + f_alias).upper();
    RealInterval rounding(0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = (i + n - n / 2) % n;
        const ComplexInterval thin = Ft[idx] * inv_b;
        rounding = max(rounding, mul_2si(thin.re().width(), -1).upper());
        const ComplexInterval v = thin.inflate(radius);
        if (!v.im().contains_zero()) {
            raise(Errc::RealityCheckFailed, "imaginary part of f excludes 0 at sample " + std::to_string(i));
        }
        out.f_values[i] = v.re();
    }
    StageBudget& b = out.budget;
    b.g_alias = stage.g_alias;
    b.G_alias = stage.G_alias;
    b.series_tail = stage.series_tail;
    b.taylor = stage.taylor;
    b.F_alias = (p.A() * F_alias).upper();
    b.f_alias = f_alias;
    b.rounding = rounding;
    return out;
}

GridEvaluation evaluate_grid(const GridParams& p, unsigned threads)
{
    p.validate();
    const std::vector<ComplexInterval> base = g_base(p);
    std::vector<GLayer> layers(static_cast<std::size_t>(p.K));
    detail::parallel_for(layers.size(), threads,
                         [&](std::size_t k) { layers[k] = layer_from_base(base, static_cast<int>(k), p); });
    return F_to_f(assemble_F(layers, p, threads), p);
}

ComplexInterval zeta_em(const ComplexInterval& s)
{
    if (!s.re().is_positive()) {
        raise(Errc::DomainError, "Euler-Maclaurin zeta needs Re s > 0");
    }
    const RealInterval& pi = pi_iv();
    const double t = std::max(std::fabs(s.im().lo_double()), std::fabs(s.im().hi_double()));
    const long N = static_cast<long>(std::ceil(t)) + 16;
    const ComplexInterval minus_s = -s;
    ComplexInterval acc(0);
    for (long n = 1; n < N; ++n) {
        acc += cpow(RealInterval(n), minus_s);
    }
    const RealInterval Nr(N);
    const ComplexInterval n_minus_s = cpow(Nr, minus_s);
    const ComplexInterval n_one_minus_s = n_minus_s * Nr;
    acc += n_one_minus_s / (s - ComplexInterval(1));
    acc += n_minus_s * RealInterval(0.5);

    const RealInterval inv_n2 = RealInterval(1) / sqr(Nr);
    const RealInterval two_pi2 = sqr(mul_2si(pi, 1));
    const RealInterval target = mul_2si(RealInterval(1), -static_cast<long>(working_precision()) - 4);
    // T_k = B_2k/(2k)! N^(1-s-2k) s (s+1) ... (s+2k-2); |B_2k|/(2k)! = 2 zeta(2k) / (2 pi)^2k
    ComplexInterval poly = s;
    ComplexInterval npow = n_one_minus_s * inv_n2;
    RealInterval scale = RealInterval(1) / two_pi2;
    auto term = [&](int k) {
        const RealInterval b = mul_2si(zeta_at(2 * k), 1) * scale;
        ComplexInterval v = poly * npow * b;
        return (k % 2 == 1) ? v : -v;
    };
    ComplexInterval current = term(1);
    RealInterval rem;
    double prev = INFINITY;
    for (int k = 1; k < 500; ++k) {
        poly = poly * (s + RealInterval(2 * k - 1)) * (s + RealInterval(2 * k));
        npow = npow * inv_n2;
        scale = scale / two_pi2;
        const ComplexInterval next = term(k + 1);
        const RealInterval lead = RealInterval(2 * k + 1);
        rem = abs(s + lead) / (s.re() + lead) * abs(next);
        acc += current;
        const double r = rem.hi_double();
        if (rem.certainly_less(target) || r >= prev) {
            break;
        }
        prev = r;
        current = next;
    }
    return acc.inflate(rem.upper());
}

RealInterval f_point(const RealInterval& t, const GridParams& p)
{
    const RealInterval& pi = pi_iv();
    const RealInterval T = RealInterval(p.t0) + t;
    const ComplexInterval z(RealInterval(1) / RealInterval(4), half(T));
    const RealInterval re = pi * T / RealInterval(4) - sqr(t) / mul_2si(sqr(h_iv(p)), 1);
    const RealInterval im = -half(T) * log(pi);
    const ComplexInterval v = exp(log_gamma(z) + ComplexInterval(re, im)) *
                              zeta_em(ComplexInterval(RealInterval(1) / RealInterval(2), T));
    if (!v.im().contains_zero()) {
        raise(Errc::RealityCheckFailed, "imaginary part of f excludes 0");
    }
    return v.re();
}

namespace {

int sign_of(const RealInterval& v)
{
    if (v.is_positive()) {
        return 1;
    }
    if (v.is_negative()) {
        return -1;
    }
    return 0;
}

// Sign of f at t, retrying once at doubled precision.
int point_sign(double t, const GridParams& p)
{
    int s = sign_of(f_point(RealInterval(t), p));
    if (s == 0) {
        PrecisionScope scope(2 * working_precision());
        s = sign_of(f_point(RealInterval(t), p));
    }
    return s;
}

} // namespace

ZeroScan locate_zeros(const GridEvaluation& eval, double target_width)
{
    const GridParams& p = eval.params;
    ZeroScan out;
    const std::size_t n = eval.f_values.size();
    auto t_of = [&](std::size_t i) { return (static_cast<double>(i) - static_cast<double>(n / 2)) * p.B / p.N; };
    bool open_run = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const int a = sign_of(eval.f_values[i]);
        const int b = sign_of(eval.f_values[i + 1]);
        if (a == 0 || b == 0) {
            const RealInterval cell = RealInterval::hull(eval.ordinate(i), eval.ordinate(i + 1));
            if (open_run) {
                out.indeterminate.back() = RealInterval::hull(out.indeterminate.back(), cell);
            } else {
                out.indeterminate.push_back(cell);
            }
            open_run = true;
            continue;
        }
        open_run = false;
        if (a == b) {
            continue;
        }
        double lo = t_of(i);
        double hi = t_of(i + 1);
        while (hi - lo > target_width) {
            const double mid = lo + (hi - lo) / 2;
            if (!(mid > lo && mid < hi)) {
                break;
            }
            const int s = point_sign(mid, p);
            if (s == 0) {
                break;
            }
            (s == a ? lo : hi) = mid;
        }
        const RealInterval t0(p.t0);
        out.zeros.push_back(RealInterval::hull(t0 + RealInterval(lo), t0 + RealInterval(hi)));
    }
    return out;
}

} // namespace anpc
