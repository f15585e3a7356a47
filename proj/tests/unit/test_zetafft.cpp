#include <doctest.h>

#include <cmath>
#include <random>

#include "anpc/error.hpp"
#include "anpc/zeros.hpp"
#include "anpc/zetafft.hpp"
#include "oracle/check.hpp"
#include "oracle/quadrature.hpp"
#include "oracle/zeta.hpp"

using namespace anpc;
using oracle::Cx;
using oracle::Mp;

namespace {

template <class F>
Errc code_of(F&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::IoError; // nothing thrown
}

struct PrecGuard {
    mpfr_prec_t saved;
    explicit PrecGuard(mpfr_prec_t bits) : saved(oracle::prec()) { oracle::prec() = bits; }
    ~PrecGuard() { oracle::prec() = saved; }
};

Mp mp_ld(long double v)
{
    Mp r;
    mpfr_set_ld(r.get(), v, MPFR_RNDN);
    return r;
}

// Gauss-Legendre nodes covering [-L, L] in panels of the given width.
struct Node {
    Mp t;
    Mp w;
};

std::vector<Node> nodes_on(double L, double panel, int order)
{
    const oracle::GaussRule rule = oracle::gauss_legendre(order);
    std::vector<Node> out;
    for (double a = -L; a < L - 1e-12; a += panel) {
        const Mp half = Mp(panel / 2);
        const Mp c = Mp(a) + half;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            out.push_back({c + half * mp_ld(rule.nodes[i]), half * mp_ld(rule.weights[i])});
        }
    }
    return out;
}

// integral of v(t) e(-tu) dt from samples at the nodes.
Cx transform_at(const std::vector<Node>& nodes, const std::vector<Cx>& v, const Mp& u)
{
    Cx acc = oracle::cx(0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Mp ang = -(Mp(2) * oracle::pi() * nodes[i].t * u);
        acc = acc + v[i] * Cx{oracle::cos(ang) * nodes[i].w, oracle::sin(ang) * nodes[i].w};
    }
    return acc;
}

bool near(const ComplexInterval& z, const Cx& v, const RealInterval& radius)
{
    return oracle::inside(z.inflate(radius), v);
}

double abs_diff(const ComplexInterval& a, const ComplexInterval& b)
{
    return std::hypot(a.re().mid_double() - b.re().mid_double(), a.im().mid_double() - b.im().mid_double());
}

const ZeroFile& table()
{
    static const ZeroFile f = load_zeros_file(std::string(ANPC_DATA_DIR) + "/zeros.txt");
    return f;
}

} // namespace

TEST_CASE("the oracle zeta agrees with independent values")
{
    PrecGuard guard(256);
    const Cx z100 = oracle::zeta({Mp(0.5), Mp(100)});
    CHECK(std::fabs(z100.re.d() - 2.692619885681324090476096470521590577063) < 1e-30);
    CHECK(std::fabs(z100.im.d() + 0.02038602960259816177072685329832152099173) < 1e-30);
    {
        const Mp re("2.692619885681324090476096470521590577063");
        CHECK(oracle::abs(z100.re - re).d() < 1e-38);
    }
    const Cx z500 = oracle::zeta({Mp(0.5), Mp(500.25)});
    CHECK(oracle::abs(z500.re - Mp("-0.1901687777963965347714654683791833471243")).d() < 1e-38);
    CHECK(oracle::abs(z500.im - Mp("-0.17758751287882584832657935750607471391")).d() < 1e-36);

    // Borwein's series needs far more bits at this height; compare at 40 digits.
    Cx zb;
    {
        PrecGuard high(1024);
        zb = oracle::zeta_borwein({Mp(0.5), Mp(100)});
    }
    CHECK(oracle::abs(zb.re - z100.re).d() < 1e-40);
    CHECK(oracle::abs(zb.im - z100.im).d() < 1e-40);
}

TEST_CASE("samples of the windowed gamma factor")
{
    // n = 0 puts Gamma at 1/4 + 50i with the factor e^(25 pi)
    const GridParams p = GridParams::defaults(100);
    const ComplexInterval g0 = g_eval(0, 0, p);
    CHECK(g0.re().contains(RealInterval::from_decimal("0.7237630326106693782772325899748975160767").mid()));
    CHECK(g0.im().contains(RealInterval::from_decimal("0.6039447112328090713049101528092124396623").mid()));
    CHECK(g0.re().rad_double() < 1e-25);

    const ComplexInterval g1 = g_eval(0, 1, p);
    CHECK(g1.re().is_point());
    CHECK(g1.re().contains(0.0));
    CHECK(g1.im().contains(0.0));

    std::mt19937 rng(7);
    std::uniform_int_distribution<long> pick(-p.N / 2, p.N / 2 - 1);
    PrecGuard guard(192);
    for (int trial = 0; trial < 100; ++trial) {
        const long n = pick(rng);
        const double t = static_cast<double>(n) / p.A_double();
        const ComplexInterval g = g_eval(n, 0, p);
        const double bound = 4 * std::exp(-t * t / (2 * p.h * p.h));
        CHECK(std::hypot(g.re().mid_double(), g.im().mid_double()) <= bound);
        if (trial % 10 == 0) {
            const Cx want = oracle::g_value(Mp(t), 2, Mp(p.t0), Mp(p.h));
            CHECK(near(g_eval(n, 2, p), want, RealInterval(1e-30)));
        }
    }
}

TEST_CASE("aliasing of the sampled window")
{
    GridParams p = GridParams::defaults(100);
    p.B = 8 * p.h;
    p.N = 512;
    // 8 (e^(-q) + 2^(-1/2) (h/B) Gamma(1/2, q)) with q = B^2/8h^2 = 8
    PrecGuard guard(256);
    const Mp expected = Mp(8) * (oracle::exp(Mp(-8)) + Mp(1) / oracle::sqrt(Mp(2)) / Mp(8) * oracle::sqrt(oracle::pi())
                                                            * oracle::erfc(oracle::sqrt(Mp(8))));
    const RealInterval a0 = g_alias_bound(0, p);
    INFO("g alias bound " << a0.to_string() << " vs " << expected.d());
    CHECK(oracle::inside(a0, expected));
    CHECK(a0.rad_double() < 1e-25);

    GridParams wider = p;
    wider.B = 64;
    wider.N = 1024;
    CHECK(g_alias_bound(0, wider).hi_double() < a0.lo_double());
    CHECK(g_alias_bound(3, wider).hi_double() < g_alias_bound(3, p).lo_double());

    // brute force over three periods on each side
    GridParams small = GridParams::defaults(100);
    small.B = 20;
    small.N = 256;
    small.K = 2;
    for (int k = 0; k < 2; ++k) {
        const double bound = g_alias_bound(k, small).hi_double();
        double worst = 0;
        for (long n = -small.N / 2; n < small.N / 2; n += 16) {
            const double t = static_cast<double>(n) / small.A_double();
            Cx sum = oracle::cx(0);
            for (int l = -3; l <= 3; ++l) {
                if (l != 0) {
                    sum = sum + oracle::g_value(Mp(t + l * small.B), k, Mp(small.t0), Mp(small.h));
                }
            }
            worst = std::max(worst, oracle::norm(sum).d());
        }
        INFO("k = " << k << " worst " << worst << " bound " << bound);
        CHECK(worst <= bound);
        CHECK(worst > 0);
    }
}

TEST_CASE("discrete Fourier transform")
{
    std::vector<ComplexInterval> v(16, ComplexInterval(0));
    v[0] = ComplexInterval(1);
    dft(v, DftDirection::Forward);
    for (const auto& x : v) {
        CHECK(x.re().contains(1.0));
        CHECK(x.im().contains(0.0));
    }

    std::vector<ComplexInterval> bad(6, ComplexInterval(1));
    CHECK(code_of([&] { dft(bad, DftDirection::Forward); }) == Errc::SizeMismatch);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    const std::size_t n = 64;
    std::vector<ComplexInterval> x(n);
    std::vector<std::pair<double, double>> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = {u(rng), u(rng)};
        x[i] = ComplexInterval(RealInterval(raw[i].first), RealInterval(raw[i].second));
    }
    std::vector<ComplexInterval> X = x;
    dft(X, DftDirection::Forward);

    // direct sum in plain multiprecision
    PrecGuard guard(256);
    double energy_x = 0, energy_X = 0;
    for (std::size_t m = 0; m < n; ++m) {
        Cx acc = oracle::cx(0);
        for (std::size_t k = 0; k < n; ++k) {
            const Mp ang = -(Mp(2) * oracle::pi() * Mp(static_cast<long>(m * k % n)) / Mp(static_cast<long>(n)));
            const Cx e{oracle::cos(ang), oracle::sin(ang)};
            acc = acc + Cx{Mp(raw[k].first), Mp(raw[k].second)} * e;
        }
        CHECK(near(X[m], acc, RealInterval(1e-60)));
        energy_X += std::norm(std::complex<double>(X[m].re().mid_double(), X[m].im().mid_double()));
        energy_x += raw[m].first * raw[m].first + raw[m].second * raw[m].second;
    }
    CHECK(energy_X == doctest::Approx(energy_x * static_cast<double>(n)).epsilon(1e-12));

    dft(X, DftDirection::Inverse);
    for (std::size_t i = 0; i < n; ++i) {
        const Cx want{Mp(raw[i].first) * Mp(static_cast<long>(n)), Mp(raw[i].second) * Mp(static_cast<long>(n))};
        CHECK(oracle::inside(X[i], want));
    }
}

TEST_CASE("window transforms against quadrature")
{
    PrecGuard guard(192);
    GridParams p = GridParams::defaults(100);
    // shared by the subcases, which doctest runs as separate passes
    static const std::vector<Node> nodes = nodes_on(40, 1.0, 24);
    static const std::vector<Cx> g = [&] {
        std::vector<Cx> v;
        for (const Node& nd : nodes) {
            v.push_back(oracle::g_value(nd.t, 0, Mp(p.t0), Mp(p.h)));
        }
        return v;
    }();
    static const std::vector<Cx> f = [&] {
        std::vector<Cx> v;
        for (const Node& nd : nodes) {
            v.push_back(oracle::f_value(nd.t, Mp(p.t0), Mp(p.h)));
        }
        return v;
    }();

    SUBCASE("G from the samples at a coarse period")
    {
        GridParams q = p;
        q.B = 32;
        q.N = 512;
        const GLayer layer = g_to_G(0, q);
        const RealInterval rad = layer.g_alias * RealInterval(q.B) + G_alias_bound(0, q);
        for (long m : {0L, 1L, 7L}) {
            const Cx want = transform_at(nodes, g, Mp(static_cast<double>(m) / q.B));
            INFO("m = " << m << " radius " << rad.hi_double());
            CHECK(near(layer.values[static_cast<std::size_t>(m)], want, rad));
        }
    }

    SUBCASE("G at the default period")
    {
        const GLayer layer = g_to_G(0, p);
        const RealInterval rad = layer.g_alias * RealInterval(p.B) + G_alias_bound(0, p);
        CHECK(rad.hi_double() < 1e-8);
        for (long m : {0L, 3L, 10L}) {
            const Cx want = transform_at(nodes, g, Mp(static_cast<double>(m) / p.B));
            CHECK(near(layer.values[static_cast<std::size_t>(m)], want, rad + RealInterval(1e-15)));
        }
        // the sampled layer agrees with a direct multiprecision DFT of the samples
        const std::size_t N = static_cast<std::size_t>(p.N);
        std::vector<Cx> samples(N);
        for (std::size_t i = 0; i < N; ++i) {
            const long n = i < N / 2 ? static_cast<long>(i) : static_cast<long>(i) - p.N;
            samples[i] = oracle::g_value(Mp(static_cast<double>(n)) / Mp(p.A_double()), 0, Mp(p.t0), Mp(p.h));
        }
        for (std::size_t m : {std::size_t{0}, std::size_t{5}, std::size_t{300}}) {
            Cx acc = oracle::cx(0);
            for (std::size_t i = 0; i < N; ++i) {
                const Mp ang = -(Mp(2) * oracle::pi() * Mp(static_cast<long>(m * i % N)) / Mp(static_cast<long>(N)));
                acc = acc + samples[i] * Cx{oracle::cos(ang), oracle::sin(ang)};
            }
            acc = acc * (Mp(1) / Mp(p.A_double()));
            CHECK(near(layer.values[m], acc, RealInterval(1e-25)));
        }
    }

    SUBCASE("one Dirichlet term is a shifted G")
    {
        GridParams q = p;
        q.J = 1;
        std::vector<GLayer> layers;
        for (int k = 0; k < q.K; ++k) {
            layers.push_back(g_to_G(k, q));
        }
        const FStage stage = assemble_F(layers, q);
        // F(x) = pi^(-i t0 / 2) G(x + log(pi) / 4 pi) plus the residue term
        const Mp shift = oracle::log(oracle::pi()) / (Mp(4) * oracle::pi());
        const Mp ph = -(Mp(q.t0) * oracle::log(oracle::pi()) / Mp(2));
        const Cx phase{oracle::cos(ph), oracle::sin(ph)};
        for (long m : {0L, 5L, 20L}) {
            const Mp x = Mp(static_cast<double>(m) / q.B);
            const Cx want = phase * transform_at(nodes, g, x + shift);
            const RealInterval xi(static_cast<double>(m) / q.B);
            const RealInterval extra = residue_bound(xi, q) + series_tail_bound(xi, q);
            INFO("m = " << m << " radius " << stage.radius[static_cast<std::size_t>(m)].hi_double());
            CHECK(near(stage.values[static_cast<std::size_t>(m)], want, stage.radius[static_cast<std::size_t>(m)]));
            CHECK(stage.radius[static_cast<std::size_t>(m)].hi_double() > extra.hi_double());
        }
    }

    SUBCASE("F at the origin")
    {
        GridParams q = p;
        q.K = 4;
        q.J = 32;
        std::vector<GLayer> layers;
        for (int k = 0; k < q.K; ++k) {
            layers.push_back(g_to_G(k, q));
        }
        const FStage stage = assemble_F(layers, q);
        for (long m : {0L, 2L}) {
            const Cx want = transform_at(nodes, f, Mp(static_cast<double>(m) / q.B));
            CHECK(near(stage.values[static_cast<std::size_t>(m)], want, stage.radius[static_cast<std::size_t>(m)]));
        }
    }
}

TEST_CASE("contour constants")
{
    PrecGuard guard(256);
    const GridParams p = GridParams::defaults(100);
    // per-power form at sigma = 3, k = 0 and 2, in plain arithmetic
    for (int k : {0, 2}) {
        const int sigma = 3;
        const int m = (sigma - 1) / 2;
        const Mp h(p.h), t0(p.t0);
        const Mp q = Mp(sigma + 0.5) * Mp(sigma + 0.5) / (Mp(2) * h * h);
        Mp sum(0);
        for (int l = 0; l <= m; ++l) {
            Mp binom(1);
            for (int i = 0; i < l; ++i) {
                binom = binom * Mp(m - i) / Mp(i + 1);
            }
            const Mp a((l + 1) / 2.0);
            const Mp b((l + k + 1) / 2.0);
            Mp ga, gq, gb;
            mpfr_gamma(ga.get(), a.get(), MPFR_RNDN);
            mpfr_gamma_inc(gq.get(), a.get(), q.get(), MPFR_RNDN);
            mpfr_gamma_inc(gb.get(), b.get(), q.get(), MPFR_RNDN);
            const Mp X = oracle::exp(Mp(l + 1) * oracle::log(h)) * oracle::exp(Mp((l - 1) / 2.0) * oracle::log(Mp(2)))
                         * oracle::exp(Mp(k) * oracle::log(Mp(sigma + 0.5))) * (ga - gq);
            const Mp Y = oracle::exp(Mp(l + k + 1) * oracle::log(h))
                         * oracle::exp(Mp((l + k - 1) / 2.0) * oracle::log(Mp(2))) * gb;
            sum = sum + binom * oracle::exp(Mp(m - l) * oracle::log(t0)) * (X + Y);
        }
        const Mp pre = oracle::exp(Mp((6.0 * k + 7 - sigma) / 4) * oracle::log(Mp(2)))
                       * oracle::exp(Mp(k + 0.5) * oracle::log(oracle::pi())) * oracle::exp(Mp(1) / Mp(2 * sigma));
        const Mp want = pre * sum;
        const RealInterval c = c_bound(sigma, k, p);
        INFO("k = " << k << " C = " << c.to_string() << " formula " << want.d());
        CHECK(std::fabs(c.mid_double() / want.d() - 1) < 1e-30);

        // and it dominates the integral it bounds, by quadrature
        const std::vector<Node> nodes = nodes_on(40, 1.0, 20);
        Mp integral(0);
        for (const Node& nd : nodes) {
            const Mp T = t0 + nd.t;
            const Cx L = oracle::lgamma({Mp(sigma / 2.0), T * Mp(0.5)});
            const Mp mag = oracle::exp(L.re + oracle::pi() * T / Mp(4) - nd.t * nd.t / (Mp(2) * h * h));
            const Mp lin = oracle::sqrt(Mp(0.5 + sigma) * Mp(0.5 + sigma) + nd.t * nd.t);
            integral = integral + nd.w * mag * oracle::exp(Mp(k) * oracle::log(Mp(2) * oracle::pi() * lin));
        }
        INFO("integral " << integral.d());
        CHECK(integral.d() <= c.lo_double());
    }

    CHECK(gk_envelope(1, RealInterval(1), p).hi_double() > gk_envelope(1, RealInterval(2), p).hi_double());
    CHECK(G_alias_bound(0, p).hi_double() < 1e-30);

    // the Taylor remainder at K = 4, h = 4, xi = 1/64:
    // 2^(9/2) pi^(9/2) 4^5 (1/64)^4 / Gamma(3)
    GridParams q = p;
    q.K = 4;
    const Mp tay = oracle::exp(Mp(4.5) * oracle::log(Mp(2) * oracle::pi())) * Mp(1024) / oracle::exp(Mp(4) * oracle::log(Mp(64))) / Mp(2);
    const RealInterval tb = taylor_bound(q, RealInterval(1) / RealInterval(64));
    CHECK(oracle::inside(tb, tay));
    CHECK(tb.rad_double() < 1e-20 * tay.d());
}

TEST_CASE("tails dominate the differences they replace")
{
    GridParams base = GridParams::defaults(100);
    auto stage_for = [](const GridParams& q) {
        std::vector<GLayer> layers;
        for (int k = 0; k < q.K; ++k) {
            layers.push_back(g_to_G(k, q));
        }
        return assemble_F(layers, q);
    };

    SUBCASE("Dirichlet tail")
    {
        GridParams a = base, b = base;
        a.J = 3;
        b.J = 12;
        const FStage sa = stage_for(a);
        const FStage sb = stage_for(b);
        CHECK(series_tail_bound(RealInterval(0), a).lo_double() > 10 * sb.radius[0].hi_double());
        for (std::size_t m = 0; m < sa.values.size(); m += 37) {
            const double d = abs_diff(sa.values[m], sb.values[m]);
            CHECK(d <= sa.radius[m].hi_double() + sb.radius[m].hi_double());
        }
    }

    SUBCASE("Taylor order")
    {
        GridParams a = base, b = base;
        a.K = 2;
        b.K = 6;
        const FStage sa = stage_for(a);
        const FStage sb = stage_for(b);
        double worst = 0;
        for (std::size_t m = 0; m < sa.values.size(); m += 13) {
            const double d = abs_diff(sa.values[m], sb.values[m]);
            worst = std::max(worst, d);
            CHECK(d <= sa.radius[m].hi_double() + sb.radius[m].hi_double());
        }
        CHECK(worst > sb.radius[0].hi_double()); // the comparison is not vacuous
        // the uniform remainder covers the per-position charge
        const double uniform = taylor_bound(a, a.xi()).hi_double() * (2 * std::sqrt(static_cast<double>(a.terms())) - 1);
        CHECK(sa.taylor.hi_double() <= uniform);
    }

    SUBCASE("aliasing of f")
    {
        PrecGuard guard(160);
        GridParams q = base;
        q.B = 32;
        q.N = 512;
        const double bound = f_alias_bound(q).hi_double();
        for (long n : {0L, 1L, 64L, 256L, 511L}) {
            const double t = static_cast<double>(n - q.N / 2) / q.A_double();
            double sum = 0;
            for (int l : {-2, -1, 1, 2}) {
                sum += oracle::norm(oracle::f_value(Mp(t + l * q.B), Mp(q.t0), Mp(q.h))).d();
            }
            INFO("t = " << t << " sum " << sum << " bound " << bound);
            CHECK(sum <= bound);
        }
    }
}

TEST_CASE("parameter preconditions")
{
    CHECK(code_of([] { GridParams::defaults(10).validate(); }) == Errc::ParamViolation);
    GridParams p = GridParams::defaults(100);
    p.N = 1000;
    CHECK(code_of([&] { p.validate(); }) == Errc::ParamViolation);
    p = GridParams::defaults(100);
    p.B = 256;
    CHECK(code_of([&] { p.validate(); }) == Errc::ParamViolation);
    p = GridParams::defaults(100);
    p.B = 8;
    CHECK(code_of([&] { p.validate(); }) == Errc::ParamViolation);
    p = GridParams::defaults(100);
    p.sigma_f = 4;
    CHECK(code_of([&] { p.validate(); }) == Errc::ParamViolation);
    CHECK(GridParams::defaults(30).B == 60);
    CHECK(GridParams::defaults(100).terms() == 40);
}

TEST_CASE("point evaluation of zeta and f")
{
    const ComplexInterval s(RealInterval(0.5), RealInterval(100));
    const ComplexInterval z = zeta_em(s);
    CHECK(z.re().contains(RealInterval::from_decimal("2.692619885681324090476096470521590577063").mid()));
    CHECK(z.im().contains(RealInterval::from_decimal("-0.02038602960259816177072685329832152099173").mid()));
    CHECK(z.re().rad_double() < 1e-20);

    const ComplexInterval z2 = zeta_em(ComplexInterval(RealInterval(0.5), RealInterval(500.25)));
    CHECK(z2.re().contains(RealInterval::from_decimal("-0.1901687777963965347714654683791833471243").mid()));
    CHECK(z2.im().contains(RealInterval::from_decimal("-0.17758751287882584832657935750607471391").mid()));

    const GridParams p = GridParams::defaults(100);
    const RealInterval f0 = f_point(RealInterval(0), p);
    CHECK(f0.contains(RealInterval::from_decimal("2.5382610527368694553181447021388431356").mid()));
    CHECK(f0.rad_double() < 1e-20);

    PrecGuard guard(256);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> height(10, 600);
    for (int trial = 0; trial < 6; ++trial) {
        const double T = height(rng);
        const ComplexInterval e = zeta_em(ComplexInterval(RealInterval(0.5), RealInterval(T)));
        CHECK(oracle::inside(e, oracle::zeta({Mp(0.5), Mp(T)})));
    }
}

TEST_CASE("grid evaluation end to end")
{
    PrecGuard guard(160);
    for (double t0 : {30.0, 100.0, 500.0}) {
        const GridParams p = GridParams::defaults(t0);
        const GridEvaluation ev = evaluate_grid(p);
        const double total = ev.budget.total().hi_double();
        INFO("t0 = " << t0 << " total " << total);
        CHECK(total < 1e-2);
        CHECK(ev.f_values.size() == static_cast<std::size_t>(p.N));
        const std::size_t stride = t0 > 200 ? 8 : 2;
        int sign_checks = 0;
        for (std::size_t i = 0; i < ev.f_values.size(); i += stride) {
            CHECK(ev.f_values[i].rad_double() <= total * (1 + 1e-9));
            const Mp t = Mp(static_cast<double>(static_cast<long>(i) - p.N / 2)) / Mp(p.A_double());
            const Cx want = oracle::f_value(t, Mp(t0), Mp(p.h));
            CHECK(std::fabs(want.im.d()) < 1e-30);
            if (!oracle::inside(ev.f_values[i], want.re)) {
                FAIL_CHECK("f at index " << i << " misses " << want.re.d() << ": " << ev.f_values[i].to_string());
            }
            if (ev.f_values[i].is_positive() || ev.f_values[i].is_negative()) {
                CHECK((want.re.d() > 0) == ev.f_values[i].is_positive());
                ++sign_checks;
            }
        }
        CHECK(sign_checks > 0);
    }
}

TEST_CASE("zeros located from the grid")
{
    SUBCASE("window around 50")
    {
        const GridParams p = GridParams::defaults(50);
        const GridEvaluation ev = evaluate_grid(p);
        const ZeroScan scan = locate_zeros(ev, 1e-6);
        for (const char* text : {"48.00515088116715972794247274942751604168684400114442",
                                 "49.77383247767230218191678467856372405772317829967666"}) {
            const RealInterval g = RealInterval::from_decimal(text);
            bool hit = false;
            for (const RealInterval& z : scan.zeros) {
                if (z.contains(g)) {
                    hit = true;
                    CHECK(z.width_double() <= 1e-6);
                }
            }
            INFO("ordinate " << text);
            CHECK(hit);
        }

        // count in the decided stretch of the window against the table
        double lo = ev.ordinate(0).hi_double();
        double hi = ev.ordinate(ev.f_values.size() - 1).lo_double();
        for (const RealInterval& r : scan.indeterminate) {
            if (r.mid_double() < p.t0) {
                lo = std::max(lo, r.hi_double());
            } else {
                hi = std::min(hi, r.lo_double());
            }
        }
        std::size_t in_table = 0;
        for (const ZeroRecord& r : table().records) {
            if (r.ordinate.lo_double() > lo && r.ordinate.hi_double() < hi) {
                ++in_table;
            }
        }
        std::size_t found = 0;
        for (const RealInterval& z : scan.zeros) {
            if (z.lo_double() > lo && z.hi_double() < hi) {
                ++found;
            }
        }
        INFO("decided window [" << lo << ", " << hi << "]");
        CHECK(found == in_table);
        CHECK(found >= 5);
        const CountEnvelope a = nt_bound(RealInterval(lo));
        const CountEnvelope b = nt_bound(RealInterval(hi));
        CHECK(static_cast<double>(found) >= std::floor((b.lower - a.upper).lo_double()));
        CHECK(static_cast<double>(found) <= std::ceil((b.upper - a.lower).hi_double()));
    }

    SUBCASE("no sign change, no zeros")
    {
        GridEvaluation ev;
        ev.params = GridParams::defaults(50);
        ev.f_values.assign(static_cast<std::size_t>(ev.params.N), RealInterval(1, 2));
        const ZeroScan scan = locate_zeros(ev);
        CHECK(scan.zeros.empty());
        CHECK(scan.indeterminate.empty());
    }
}
