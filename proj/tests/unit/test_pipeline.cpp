#include <doctest.h>

#include <gmpxx.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "anpc/error.hpp"
#include "anpc/pipeline.hpp"

using namespace anpc;
namespace fs = std::filesystem;

namespace {

template <class F>
Errc code_of(F&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::IoError;
}

const std::string kZeros = std::string(ANPC_DATA_DIR) + "/zeros.txt";

// Plain Eratosthenes, independent of the library sieve.
std::vector<std::uint32_t> primes_upto(std::uint32_t n)
{
    std::vector<bool> composite(n + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i <= n; ++i) {
        if (!composite[i]) {
            out.push_back(i);
            for (std::uint64_t j = std::uint64_t{i} * i; j <= n; j += i) {
                composite[j] = true;
            }
        }
    }
    return out;
}

// pi*(x) by enumerating every prime power, half weight at x.
mpq_class pi_star_oracle(std::uint32_t x)
{
    mpq_class s = 0;
    for (std::uint32_t p : primes_upto(x)) {
        std::uint64_t v = p;
        for (int m = 1; v <= x; ++m, v *= p) {
            s += mpq_class(v == x ? 1 : 2, 2 * m);
        }
    }
    s.canonicalize();
    return s;
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("anpc-test-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

bool has_null(const nlohmann::ordered_json& j)
{
    if (j.is_null()) {
        return true;
    }
    if (j.is_structured()) {
        for (const auto& v : j) {
            if (has_null(v)) {
                return true;
            }
        }
    }
    return false;
}

} // namespace

TEST_CASE("binary rational lambda")
{
    const Lambda l = Lambda::parse("6273445730170391x2^-84");
    CHECK(l.mantissa == 6273445730170391);
    CHECK(l.exponent == -84);
    CHECK(l.value().is_point());
    CHECK(l.approx() == std::ldexp(6273445730170391.0, -84));
    CHECK(Lambda::parse(l.to_string()) == l);
    CHECK(Lambda::parse(" 3 x 2^(-5) ").approx() == 3.0 / 32);
    CHECK(code_of([] { Lambda::parse("0.001"); }) == Errc::FormatError);
    CHECK(code_of([] { Lambda::parse("0x2^-3"); }) == Errc::FormatError);
    CHECK(code_of([] { Lambda::parse("-3x2^-3"); }) == Errc::FormatError);

    for (double v : {1e-3, 0.1, 0.3333333333333333, 1e-7}) {
        const Lambda r = Lambda::round_up(v);
        CHECK(r.approx() >= v);
        CHECK(r.approx() == v); // every double is already a 53-bit binary rational
        CHECK(r.mantissa % 2 == 1);
    }
}

TEST_CASE("configuration files")
{
    std::istringstream in("# run\n x = 1000000\nlambda = 5x2^-10  # trailing comment\n\nzeros=/tmp/z.txt\n"
                          "window_k = 4.5\nthreads = 3\nshare-e1 = 0.1\ntiming = true\n");
    RunConfig cfg;
    read_config(in, cfg);
    CHECK(cfg.x == 1000000);
    CHECK(cfg.lambda->approx() == 5.0 / 1024);
    CHECK(cfg.zeros_path == "/tmp/z.txt");
    CHECK(cfg.window_k == 4.5);
    CHECK(cfg.threads == 3);
    CHECK(cfg.shares.e1 == 0.1);
    CHECK(cfg.timing);
    set_config_value(cfg, "x", "1e7");
    CHECK(cfg.x == 10000000);

    RunConfig c2;
    std::istringstream bad_key("colour = blue\n");
    CHECK(code_of([&] { read_config(bad_key, c2); }) == Errc::FormatError);
    std::istringstream bad_value("t1 = twelve\n");
    CHECK(code_of([&] { read_config(bad_value, c2); }) == Errc::FormatError);
    std::istringstream no_eq("x 100\n");
    CHECK(code_of([&] { read_config(no_eq, c2); }) == Errc::FormatError);
    CHECK(code_of([&] { set_config_value(c2, "x", "1.5"); }) == Errc::FormatError);

    RunConfig c3;
    c3.x = 1000;
    c3.zeros_path = kZeros;
    c3.shares.e1 = 0.4;
    CHECK(code_of([&] { c3.validate(); }) == Errc::ParamViolation);
    c3.shares.e1 = 0.1;
    c3.validate();
    c3.segment_width = 10;
    CHECK(code_of([&] { c3.validate(); }) == Errc::ParamViolation);
}

TEST_CASE("choosing lambda")
{
    // N(10^4) = 10142
    const LambdaChoice c = choose_lambda(100000000, 1e4, 10142, 0.25);
    const MellinContext ctx = MellinContext::make(RealInterval(100000000L), c.lambda.value());
    const RealInterval e1 = e1_bound(TruncationBudget::make(1e4, 1e4), 10142, ctx);
    const RealInterval line = minus_one_line_bound(ctx);
    const RealInterval tail = window_tail_bound(make_window(100000000, ctx, c.window_k, 1), ctx);
    CHECK(e1.hi_double() <= 0.125);
    CHECK(line.hi_double() <= 0.25 / 6);
    CHECK(tail.hi_double() <= 0.25 / 3);
    CHECK(e1.hi_double() + tail.hi_double() < 0.25);
    CHECK(c.e1.hi_double() == e1.hi_double());
    // a slightly smaller lambda breaks one of the two conditions
    const MellinContext smaller = MellinContext::make(RealInterval(100000000L), RealInterval(c.lambda.approx() * 0.999));
    CHECK((e1_bound(TruncationBudget::make(1e4, 1e4), 10142, smaller).hi_double() > 0.125 ||
           minus_one_line_bound(smaller).hi_double() > 0.25 / 6));

    // more zeros never force a larger lambda; any count inside the envelope will do
    const CountEnvelope env = nt_bound(RealInterval(2e4));
    const auto n2 = static_cast<std::size_t>(std::ceil(env.lower.hi_double()));
    const LambdaChoice c2 = choose_lambda(100000000, 2e4, n2, 0.25);
    CHECK(c2.lambda.approx() <= c.lambda.approx());

    CHECK(code_of([] { choose_lambda(1000000, 50, 10, 0.25); }) == Errc::ParamViolation);
    CHECK(code_of([] { choose_lambda(1000000, 1e4, 10142, 0.1, 0.1, 1e-12, 0.5); }) == Errc::Infeasible);
}

TEST_CASE("recovering pi from pi*")
{
    // pi*(100) = 25 + 4/2 + 2/3 + 2/4 + 1/5 + 1/6
    const mpq_class star100 = pi_star_oracle(100);
    CHECK(star100 == mpq_class(25) + mpq_class(4, 2) + mpq_class(2, 3) + mpq_class(2, 4) + mpq_class(1, 5) +
                         mpq_class(1, 6));
    CHECK(recover_pi(RealInterval::from_rational(star100) + RealInterval(-0.3, 0.3), 100) == 25);
    CHECK(recover_pi(RealInterval(0.5), 2) == 1);

    for (std::uint32_t x : {2u, 3u, 4u, 8u, 9u, 25u, 27u, 32u, 97u, 121u, 1000u, 1024u, 4096u, 65536u, 99991u}) {
        const mpq_class star = pi_star_oracle(x);
        const long long want = static_cast<long long>(primes_upto(x).size());
        CAPTURE(x);
        CHECK(star - prime_power_correction(x) == mpq_class(static_cast<long>(want)));
        CHECK(recover_pi(RealInterval::from_rational(star) + RealInterval(-0.45, 0.45), x) == want);
    }
    CHECK(code_of([] { recover_pi(RealInterval(25.5, 27.5), 100); }) == Errc::Ambiguous);
    CHECK(code_of([] { recover_pi(RealInterval(3.6, 3.7), 100); }) == Errc::NoInteger);
}

TEST_CASE("sieve checkpoints")
{
    SegmentSummary a{1000003, 5, 2, -3, 29};
    SegmentSummary b{2000001, 0, 0, 0, 0};
    b.s2 = (static_cast<u128>(1) << 100) + 7;
    std::ostringstream out;
    store_sieve_record(out, a);
    store_sieve_record(out, b);
    CHECK(out.str().substr(0, 20) == "1000003 5 2 -3 29\n20");
    std::istringstream in(out.str() + "3000001 2 1 0");
    const auto back = load_sieve_checkpoint(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == a);
    CHECK(back[1] == b);
    std::istringstream bad("1 2 3\n4 5 6 7 8\n");
    CHECK(code_of([&] { load_sieve_checkpoint(bad); }) == Errc::FormatError);

    const fs::path dir = scratch_dir("sieve");
    const MellinContext ctx = MellinContext::make(RealInterval(1000000L), RealInterval(0.01));
    WindowSpec w = make_window(1000000, ctx, 3, 101);
    const auto shells = tile_window(w, 1000000);
    const auto direct = sieve_segments(shells, SievingPrimes::covering(static_cast<std::uint64_t>(w.x2)));
    const auto first = sieve_with_checkpoint(shells, dir.string(), 2);
    CHECK(first == direct);
    const auto size1 = fs::file_size(dir / "sieve.txt");
    const auto second = sieve_with_checkpoint(shells, dir.string(), 1);
    CHECK(second == direct);
    CHECK(fs::file_size(dir / "sieve.txt") == size1);

    // a damaged record is refused instead of silently trusted
    {
        std::ofstream o(dir / "sieve.txt", std::ios::app);
        o << "12 x 3 4 5\n";
    }
    CHECK(code_of([&] { sieve_with_checkpoint(shells, dir.string(), 1); }) == Errc::FormatError);
    fs::remove_all(dir);
}

TEST_CASE("pi of a million")
{
    const fs::path dir = scratch_dir("million");
    RunConfig cfg;
    cfg.x = 1000000;
    cfg.zeros_path = kZeros;
    cfg.checkpoint_dir = dir.string();
    const PiResult r = run_pi(cfg);

    // pi*(10^6) = 78627.549...
    const mpq_class star = pi_star_oracle(1000000);
    CHECK(r.star.pi_star.contains(RealInterval::from_rational(star)));
    CHECK(r.pi == 78498);
    CHECK(r.star.ledger.total().hi_double() < 0.5);
    const ErrorLedger& L = r.star.ledger;
    for (const auto& [name, v] : L.entries()) {
        CAPTURE(name);
        CHECK(v.is_nonnegative());
    }
    // every charged bound shows up in the width
    const RealInterval charged = L.e1 + L.e2 + L.window_tail + L.minus_one_line;
    CHECK(r.star.pi_star.width_double() >= 2 * charged.lo_double());
    CHECK(r.star.pi_star.width_double() <= 2 * L.total().hi_double() * (1 + 1e-9));

    const std::string doc = report_json(r, cfg);
    const auto j = nlohmann::ordered_json::parse(doc);
    CHECK_FALSE(has_null(j));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) {
        keys.push_back(it.key());
    }
    CHECK(keys == std::vector<std::string>{"x", "pi", "pi_star_lo", "pi_star_hi", "ledger", "terms", "zeros",
                                           "config", "work"});
    CHECK(j["pi"] == 78498);
    {
        PrecisionScope scope(static_cast<mpfr_prec_t>(cfg.precision_bits));
        mpfr_t lo;
        mpfr_init2(lo, cfg.precision_bits);
        mpfr_set_str(lo, j["pi_star_lo"].get<std::string>().c_str(), 10, MPFR_RNDN);
        CHECK(mpfr_equal_p(lo, r.star.pi_star.lo()) != 0);
        mpfr_clear(lo);
    }

    SUBCASE("resuming from checkpoints gives the same report")
    {
        CHECK(fs::exists(dir / "sieve.txt"));
        CHECK(fs::exists(dir / "zero-block-0.txt"));
        const PiResult again = run_pi(cfg);
        CHECK(report_json(again, cfg) == doc);
    }

    SUBCASE("more precision never widens")
    {
        RunConfig hi = cfg;
        hi.checkpoint_dir.clear();
        hi.precision_bits = 192;
        const PiResult r2 = run_pi(hi);
        CHECK(r2.pi == 78498);
        CHECK(r2.star.pi_star.width_double() <= r.star.pi_star.width_double() * (1 + 1e-12));
    }

    SUBCASE("bounds without running")
    {
        PrecisionScope scope(128);
        const RunPlan plan = plan_run(cfg);
        CHECK(plan.lambda == r.star.plan.lambda);
        CHECK(plan.window.x1 == r.star.plan.window.x1);
        const auto b = nlohmann::ordered_json::parse(bounds_json(plan, cfg));
        CHECK(b["bounds"]["e1"] == L.e1.hi_decimal());
        CHECK_FALSE(has_null(b));
    }
    fs::remove_all(dir);
}

TEST_CASE("configurations that cannot succeed")
{
    RunConfig cfg;
    cfg.x = 1000000;
    cfg.zeros_path = kZeros;
    cfg.t1 = 5000; // beyond the table
    CHECK(code_of([&] { plan_run(cfg); }) == Errc::CoverageGap);
    cfg.t1 = 150;
    cfg.lambda = Lambda::parse("1x2^-12"); // far too narrow for 38 zeros
    CHECK(code_of([&] { plan_run(cfg); }) == Errc::Infeasible);
    cfg.zeros_path = "/nonexistent/zeros.txt";
    CHECK(code_of([&] { plan_run(cfg); }) == Errc::IoError);
}

TEST_CASE("zero file verification")
{
    const ZeroFileCheck ok = verify_zero_file(kZeros);
    CHECK(ok.problems.empty());
    CHECK(ok.count == 2920);
    CHECK(ok.heights_checked == 2919);

    // drop twelve zeros near height 1000
    const ZeroFile f = load_zeros_file(kZeros);
    std::vector<std::string> kept;
    for (const auto& r : f.records) {
        if (r.index < 650 || r.index >= 662) {
            kept.push_back(r.text);
        }
    }
    const fs::path dir = scratch_dir("verify");
    {
        std::ofstream o(dir / "holes.txt");
        store_zeros(o, make_zero_file(kept, f.abs_err_text, "0"));
    }
    const ZeroFileCheck holes = verify_zero_file((dir / "holes.txt").string());
    CHECK_FALSE(holes.problems.empty());
    fs::remove_all(dir);
}

TEST_CASE("scanning for zeros")
{
    const ScanResult scan = scan_zeros(40, 70);
    CHECK(scan.indeterminate.empty());
    const ZeroFile table = load_zeros_file(kZeros);
    std::vector<RealInterval> want;
    for (const auto& r : table.records) {
        if (r.ordinate.mid_double() > 40 && r.ordinate.mid_double() < 70) {
            want.push_back(r.ordinate);
        }
    }
    REQUIRE(scan.zeros.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(scan.zeros[i].contains(want[i]));
        CHECK(scan.zeros[i].width_double() <= 1e-6);
    }
    const ZeroFile out = scan_to_zero_file(scan);
    CHECK(out.rh_height_text == "0");
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(out.records[i].ordinate.contains(want[i]));
    }
    std::ostringstream text;
    store_zeros(text, out);
    std::istringstream back(text.str());
    CHECK(load_zeros(back).records.size() == want.size());
    const auto j = nlohmann::ordered_json::parse(scan_json(scan));
    CHECK(j["zeros"] == want.size());
    CHECK(j["windows"].size() == scan.windows.size());
    CHECK(code_of([] { scan_zeros(70, 40); }) == Errc::ParamViolation);
}
