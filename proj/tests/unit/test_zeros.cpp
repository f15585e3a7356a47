#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "anpc/zeros.hpp"
#include "oracle/check.hpp"
#include "oracle/quadrature.hpp"

using namespace anpc;
using oracle::Mp;

namespace {

const ZeroFile& table()
{
    static const ZeroFile f = load_zeros_file(std::string(ANPC_DATA_DIR) + "/zeros.txt");
    return f;
}

MellinContext ctx_of(double x, double lambda)
{
    return MellinContext::make(RealInterval(x), RealInterval(lambda));
}

// B(sigma, T) in plain multiprecision arithmetic
Mp b_oracle(double sigma, double T, double x, double lambda)
{
    const Mp l2 = Mp(lambda) * Mp(lambda);
    const Mp g = oracle::exp(l2 * (Mp(1) - Mp(T) * Mp(T)) / Mp(2));
    const Mp xs = oracle::exp(Mp(sigma) * oracle::log(Mp(x)));
    return g * (xs / (Mp(T) * oracle::log(Mp(x))) + Mp(1) / (l2 * Mp(T) * Mp(T) * Mp(x)));
}

Mp e1_oracle(double T, double alpha, long n, double x, double lambda)
{
    const Mp l2 = Mp(lambda) * Mp(lambda);
    const Mp tpow = oracle::exp(Mp(2 - alpha) * oracle::log(Mp(T)));
    return Mp(2) * b_oracle(0.5, T, x, lambda) * ((l2 * Mp(T) * Mp(T) + Mp(2)) / (l2 * tpow) - Mp(n));
}

} // namespace

TEST_CASE("loading and storing zero files")
{
    std::istringstream three("# zeta-zeros v1 abs_err=1e-9 rh_height=100\n14.134725142\n21.022039639\n25.010857580\n");
    const ZeroFile f = load_zeros(three);
    CHECK(f.records.size() == 3);
    CHECK(f.records[1].index == 2);
    CHECK(f.records[0].ordinate.contains(14.134725141734693));
    CHECK(f.max_height() == doctest::Approx(25.01085758));
    CHECK(f.records[0].ordinate.width_double() <= 2.000001e-9);

    std::ostringstream out;
    store_zeros(out, f);
    std::istringstream back(out.str());
    const ZeroFile g = load_zeros(back);
    std::ostringstream out2;
    store_zeros(out2, g);
    CHECK(out.str() == out2.str());
    CHECK(out.str() == "# zeta-zeros v1 abs_err=1e-9 rh_height=100\n14.134725142\n21.022039639\n25.010857580\n");

    std::istringstream empty("# zeta-zeros v1 abs_err=1e-9 rh_height=0\n");
    const ZeroFile e = load_zeros(empty);
    CHECK(e.records.empty());
    CHECK(e.max_height() == 0.0);

    auto code_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            load_zeros(in);
        } catch (const Error& err) {
            return err.code();
        }
        return Errc::IoError;
    };
    CHECK(code_of("# zeta-zeros v1 abs_err=1e-9 rh_height=100\n21.022039639\n14.134725142\n") ==
          Errc::MonotonicityViolation);
    CHECK(code_of("# zeta-zeros v1 abs_err=1e-9 rh_height=100\n14.134725142\n14.134725142\n") ==
          Errc::MonotonicityViolation);
    CHECK(code_of("# zeta-zeros v1 abs_err=1e-9 rh_height=100\n14.13\n") == Errc::AccuracyViolation);
    CHECK(code_of("# zeta-zeros v2 abs_err=1e-9 rh_height=100\n14.134725142\n") == Errc::FormatError);
    CHECK(code_of("") == Errc::FormatError);
    CHECK(code_of("# zeta-zeros v1 abs_err=1e-9 rh_height=100\n14.1x\n") == Errc::FormatError);
    CHECK(code_of("# zeta-zeros v1 abs_err=-1 rh_height=100\n") == Errc::FormatError);
    CHECK_THROWS_AS(load_zeros_file("/nonexistent/zeros.txt"), Error);
}

TEST_CASE("the reference table")
{
    const ZeroFile& f = table();
    REQUIRE(f.records.size() >= 1000);
    CHECK(f.records[0].text.rfind("14.1347251417346937904", 0) == 0);
    CHECK(f.count_below(RealInterval(100)) == 29);
    CHECK(f.count_below(RealInterval(1000)) == 649);
}

TEST_CASE("counting envelope")
{
    const auto e100 = nt_bound(RealInterval(100));
    CHECK(e100.lower.hi_double() < 29);
    CHECK(e100.upper.lo_double() > 29);
    const auto e1000 = nt_bound(RealInterval(1000));
    CHECK(e1000.lower.hi_double() < 649);
    CHECK(e1000.upper.lo_double() > 649);
    CHECK((e1000.upper - e1000.lower).lo_double() > (e100.upper - e100.lower).hi_double());
    CHECK_THROWS_AS(nt_bound(RealInterval(1.5)), Error);

    // 1000 random heights against the table
    const ZeroFile& f = table();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(2.0, f.max_height() - 1);
    for (int i = 0; i < 1000; ++i) {
        double t = u(rng);
        std::size_t n = 0;
        while (n < f.records.size() && f.records[n].ordinate.hi_double() < t) {
            ++n;
        }
        if (n < f.records.size() && f.records[n].ordinate.lo_double() <= t) {
            continue; // t hits an ordinate
        }
        const auto env = nt_bound(RealInterval(t));
        CAPTURE(t);
        CHECK(env.lower.lo_double() < static_cast<double>(n));
        CHECK(env.upper.hi_double() > static_cast<double>(n));
    }
}

TEST_CASE("exponent for the count envelope")
{
    const double a3 = alpha_for(1e3);
    const double a4 = alpha_for(1e4);
    const double a6 = alpha_for(1e6);
    CHECK(a3 > 1.0);
    CHECK(a3 <= 2.0);
    CHECK(a4 <= a3);
    CHECK(a6 <= a4);
    // dominance at 1000 sample heights above T, spread logarithmically
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(std::log(1e3), std::log(1e30));
    for (int i = 0; i < 1000; ++i) {
        const double t = std::exp(u(rng));
        const Mp tt(t);
        const Mp lt = oracle::log(tt);
        const Mp two_pi = Mp(2) * oracle::pi();
        const Mp upper = tt / two_pi * oracle::log(tt / (two_pi * oracle::exp(Mp(1)))) + Mp(0.875) +
                         Mp(0.137) * lt + Mp(0.443) * oracle::log(lt) + Mp(1.588);
        const Mp lhs = oracle::exp(Mp(a3) * lt);
        CAPTURE(t);
        CHECK(upper < lhs);
    }
    // one grid step lower fails somewhere above T: the envelope exceeds t^(a - 1/1024)
    const double below = a3 - 1.0 / 1024;
    bool violated = false;
    for (double lt = std::log(1e3); lt < 2000 && !violated; lt += 0.01) {
        const Mp t = oracle::exp(Mp(lt));
        const Mp two_pi = Mp(2) * oracle::pi();
        const Mp upper = t / two_pi * oracle::log(t / (two_pi * oracle::exp(Mp(1)))) + Mp(0.875) +
                         Mp(0.137) * Mp(lt) + Mp(0.443) * oracle::log(Mp(lt)) + Mp(1.588);
        violated = oracle::exp(Mp(below) * Mp(lt)) < upper;
    }
    CHECK(violated);
}

TEST_CASE("B(sigma, T)")
{
    const auto ctx = ctx_of(1e6, 1e-2);
    const RealInterval b = b_bound(RealInterval(0.5), RealInterval(100), ctx);
    CHECK(oracle::inside(b, b_oracle(0.5, 100, 1e6, 1e-2)));
    for (double T = 120; T < 400; T += 20) {
        CHECK(b_bound(RealInterval(0.5), RealInterval(T), ctx).hi_double() <
              b_bound(RealInterval(0.5), RealInterval(T - 20), ctx).lo_double());
    }
    // dominance against quadrature of Re Phihat at random heights
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(20, 300);
    std::vector<long double> hs;
    for (int i = 0; i < 20; ++i) {
        hs.push_back(u(rng));
    }
    std::sort(hs.begin(), hs.end());
    const auto q = oracle::re_phihat_quadrature(0.5L, hs, std::log(1e6L), 1e-2L, 0.05L);
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double bound = b_bound(RealInterval(0.5), RealInterval(static_cast<double>(hs[i])), ctx).lo_double();
        CAPTURE(hs[i]);
        CHECK(static_cast<double>(std::fabs(q[i].value) + q[i].error) <= bound);
    }
}

TEST_CASE("truncation bounds E1 and E2")
{
    const double x = 1e6, lambda = 2e-3;
    const auto ctx = ctx_of(x, lambda);
    const ZeroFile& f = table();
    const double top = f.max_height();
    CHECK_THROWS_AS(TruncationBudget::make(100, 50), Error);

    // formula value
    {
        const TruncationBudget b = TruncationBudget::make(1000, 3e12);
        const RealInterval e1 = e1_bound(b, 649, ctx);
        const Mp want = e1_oracle(1000, b.alpha_T1, 649, x, lambda);
        CHECK(e1.hi_double() >= want.d() * (1 - 1e-12));
        CHECK(e1.hi_double() <= want.d() * (1 + 1e-12));
        CHECK(e1.is_point());
        try {
            e1_bound(b, 600, ctx);
            FAIL("expected InconsistentCount");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::InconsistentCount);
        }
    }

    // brute force over the table above T1
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(300, top * 0.6);
    for (int i = 0; i < 20; ++i) {
        const double T1 = u(rng);
        const std::size_t n = f.count_below(RealInterval(T1));
        const TruncationBudget b = TruncationBudget::make(T1, 3e12);
        const RealInterval e1 = e1_bound(b, n, ctx);
        Mp brute(0);
        for (std::size_t k = n; k < f.records.size(); ++k) {
            brute = brute + Mp(2) * b_oracle(0.5, f.records[k].ordinate.mid_double(), x, lambda);
        }
        CAPTURE(T1);
        CHECK(brute.d() <= e1.hi_double());
    }

    // decay and the x+1 structure of E2
    const TruncationBudget lo = TruncationBudget::make(1000, 1000);
    const TruncationBudget hi = TruncationBudget::make(2000, 2000);
    const std::size_t n1 = f.count_below(RealInterval(1000));
    const std::size_t n2 = f.count_below(RealInterval(2000));
    CHECK(e1_bound(hi, n2, ctx).hi_double() < e1_bound(lo, n1, ctx).hi_double());
    CHECK(e2_bound(hi, n2, ctx).hi_double() < e2_bound(lo, n1, ctx).hi_double());
    const double ratio = e2_bound(lo, n1, ctx).hi_double() / e1_bound(lo, n1, ctx).hi_double();
    CHECK(ratio > 0.4 * std::sqrt(x));
    CHECK(ratio < 0.6 * std::sqrt(x) * 1.01);
    // at the verified height E2 vanishes for practical purposes
    const TruncationBudget far = TruncationBudget::make(1000, 3e12);
    const std::size_t n_far = static_cast<std::size_t>(std::llround(nt_bound(RealInterval(3e12)).lower.mid_double() +
                                                                    (nt_bound(RealInterval(3e12)).upper.mid_double() -
                                                                     nt_bound(RealInterval(3e12)).lower.mid_double()) /
                                                                        2));
    CHECK(e2_bound(far, n_far, ctx).hi_double() < 1e-100);
}

TEST_CASE("sum over zeros")
{
    const auto ctx0 = ctx_of(1e6, 5e-3);
    const ZeroSum none = sum_re_phihat({}, 0, ctx0, 1e-6);
    CHECK(none.value.contains(0.0));
    CHECK(none.zeros == 0);
    CHECK_THROWS_AS(sum_re_phihat(table().records, 1e9, ctx0, 1e-6), Error);

    // the 101st zero shows that nothing else lies below T1
    const std::vector<ZeroRecord> first(table().records.begin(), table().records.begin() + 101);
    const double T1 = 0.5 * (first[99].ordinate.mid_double() + table().records[100].ordinate.mid_double());
    const ZeroSum s = sum_re_phihat(first, T1, ctx0, 1e-6);
    CHECK(s.zeros == 100);
    CHECK(s.anchor_charge.hi_double() <= 1e-6);

    std::vector<long double> hs;
    for (std::size_t i = 0; i < 100; ++i) {
        const auto& z = first[i];
        hs.push_back(std::stold(z.text));
    }
    const auto q = oracle::re_phihat_quadrature(0.5L, hs, std::log(1e6L), 5e-3L, 0.05L);
    long double total = 0, err = 0;
    for (const auto& e : q) {
        total += 2 * e.value;
        err += 2 * e.error;
    }
    CHECK(s.value.overlaps(RealInterval(static_cast<double>(total - err), static_cast<double>(total + err))));
    CHECK(s.value.width_double() < 3e-6);

    // a different block partition and thread count encloses the same number
    LineOptions opt;
    opt.block_size = 7;
    opt.threads = 3;
    const ZeroSum split = sum_re_phihat(first, T1, ctx0, 1e-6, opt);
    CHECK(split.value.overlaps(s.value));
}
