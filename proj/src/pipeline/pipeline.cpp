#include "anpc/pipeline.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "anpc/detail/parallel.hpp"
#include "anpc/error.hpp"

namespace anpc {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view text)
{
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v)) {
        raise(Errc::FormatError, std::string(key) + ": not a number: '" + t + "'");
    }
    return v;
}

std::int64_t parse_int(std::string_view key, std::string_view text)
{
    const std::string t = trim(text);
    // accept 1e6-style integers as well as plain digits
    if (std::regex_match(t, std::regex("[0-9]+"))) {
        try {
            return std::stoll(t);
        } catch (const std::exception&) {
            raise(Errc::FormatError, std::string(key) + ": integer out of range: '" + t + "'");
        }
    }
    const double d = parse_double(key, t);
    if (d != std::floor(d) || std::fabs(d) > 9.2e18) {
        raise(Errc::FormatError, std::string(key) + ": not an integer: '" + t + "'");
    }
    return static_cast<std::int64_t>(d);
}

bool parse_bool(std::string_view key, std::string_view text)
{
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no") {
        return false;
    }
    raise(Errc::FormatError, std::string(key) + ": expected true or false, got '" + t + "'");
}

// Endpoints as hexadecimal floats, which are exact at any precision.
std::string hex_pair(const RealInterval& v)
{
    char* a = nullptr;
    char* b = nullptr;
    mpfr_asprintf(&a, "%Ra", v.lo());
    mpfr_asprintf(&b, "%Ra", v.hi());
    std::string out = std::string(a) + ' ' + b;
    mpfr_free_str(a);
    mpfr_free_str(b);
    return out;
}

// Reads hex_pair output exactly: four bits per written digit always suffice,
// whatever precision the endpoints were computed at.
RealInterval from_hex_texts(const std::string& lo, const std::string& hi)
{
    const auto bits = static_cast<mpfr_prec_t>(4 * std::max(lo.size(), hi.size()) + 8);
    PrecisionScope scope(bits);
    mpfr_t l, h;
    mpfr_inits2(bits, l, h, static_cast<mpfr_ptr>(nullptr));
    char* end_l = nullptr;
    char* end_h = nullptr;
    mpfr_strtofr(l, lo.c_str(), &end_l, 16, MPFR_RNDD);
    mpfr_strtofr(h, hi.c_str(), &end_h, 16, MPFR_RNDU);
    const bool ok = *end_l == '\0' && *end_h == '\0' && !mpfr_nan_p(l) && !mpfr_nan_p(h) && mpfr_lessequal_p(l, h);
    RealInterval r;
    if (ok) {
        r = RealInterval::from_endpoints(l, h);
    }
    mpfr_clears(l, h, static_cast<mpfr_ptr>(nullptr));
    if (!ok) {
        raise(Errc::FormatError, "bad interval '" + lo + " " + hi + "'");
    }
    return r;
}

// Shortest text that reads back as the same double.
std::string fmt_double(double v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

bool is_probable_prime(std::uint64_t n)
{
    const mpz_class z(static_cast<unsigned long>(n));
    return mpz_probab_prime_p(z.get_mpz_t(), 40) != 0;
}

RealInterval e1_at(double T1, std::size_t n_T1, const MellinContext& ctx)
{
    return e1_bound(TruncationBudget::make(T1, T1), n_T1, ctx);
}

} // namespace

// ---------------------------------------------------------------- lambda

Lambda Lambda::parse(std::string_view text)
{
    static const std::regex form(R"(\s*([0-9]+)\s*[xX*]\s*2\s*\^\s*\(?\s*([+-]?[0-9]+)\s*\)?\s*)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(text.begin(), text.end(), m, form)) {
        raise(Errc::FormatError, "lambda must look like <mantissa>x2^<exponent>, got '" + std::string(text) + "'");
    }
    Lambda l;
    try {
        l.mantissa = std::stoll(m[1].str());
        l.exponent = std::stoi(m[2].str());
    } catch (const std::exception&) {
        raise(Errc::FormatError, "lambda mantissa or exponent out of range: '" + std::string(text) + "'");
    }
    if (l.mantissa <= 0) {
        raise(Errc::FormatError, "lambda mantissa must be positive");
    }
    if (l.exponent < -1000 || l.exponent > 1000) {
        raise(Errc::FormatError, "lambda exponent out of range");
    }
    return l;
}

Lambda Lambda::round_up(double v)
{
    if (!(v > 0) || !std::isfinite(v)) {
        raise(Errc::DomainError, "lambda must be positive");
    }
    int e = 0;
    const double f = std::frexp(v, &e); // v = f 2^e, f in [1/2, 1)
    Lambda l;
    l.mantissa = static_cast<std::int64_t>(std::ceil(std::ldexp(f, 53)));
    l.exponent = e - 53;
    while (l.mantissa % 2 == 0) {
        l.mantissa /= 2;
        ++l.exponent;
    }
    return l;
}

RealInterval Lambda::value() const
{
    return mul_2si(RealInterval(static_cast<long long>(mantissa)), exponent);
}

double Lambda::approx() const
{
    return std::ldexp(static_cast<double>(mantissa), exponent);
}

std::string Lambda::to_string() const
{
    return std::to_string(mantissa) + "x2^" + std::to_string(exponent);
}

// ---------------------------------------------------------------- config

double BudgetShares::total() const
{
    return e1 + e2 + minus_one_line + window_tail + sieve_taylor + phihat_anchor;
}

void RunConfig::validate() const
{
    if (x < 10) {
        raise(Errc::ParamViolation, "x must be at least 10");
    }
    if (x > (std::int64_t{1} << 62)) {
        raise(Errc::ParamViolation, "x is beyond the 63-bit sieve");
    }
    if (zeros_path.empty()) {
        raise(Errc::ParamViolation, "a zero file is required");
    }
    if (t1 < 0 || t2 < 0 || (t2 > 0 && t1 > t2)) {
        raise(Errc::ParamViolation, "need 0 <= t1 <= t2");
    }
    if (window_k < 0) {
        raise(Errc::ParamViolation, "window-k must be positive");
    }
    if (segment_width < 0 || (segment_width > 0 && segment_width % 2 == 0)) {
        raise(Errc::ParamViolation, "segment-width must be odd");
    }
    if (precision_bits < 53 || precision_bits > 100000) {
        raise(Errc::ParamViolation, "precision-bits must lie in [53, 100000]");
    }
    if (threads == 0) {
        raise(Errc::ParamViolation, "threads must be positive");
    }
    for (double s : {shares.e1, shares.e2, shares.minus_one_line, shares.window_tail, shares.sieve_taylor,
                     shares.phihat_anchor}) {
        if (!(s > 0)) {
            raise(Errc::ParamViolation, "every budget share must be positive");
        }
    }
    if (!(shares.total() < 0.5)) {
        raise(Errc::ParamViolation, "budget shares add up to " + fmt_double(shares.total()) + ", not below 1/2");
    }
}

void set_config_value(RunConfig& cfg, std::string_view key_in, std::string_view value)
{
    std::string key = trim(key_in);
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string v = trim(value);
    if (key == "x") {
        cfg.x = parse_int(key, v);
    } else if (key == "lambda") {
        cfg.lambda = Lambda::parse(v);
    } else if (key == "zeros") {
        cfg.zeros_path = v;
    } else if (key == "t1") {
        cfg.t1 = parse_double(key, v);
    } else if (key == "t2") {
        cfg.t2 = parse_double(key, v);
    } else if (key == "window-k") {
        cfg.window_k = parse_double(key, v);
    } else if (key == "segment-width") {
        cfg.segment_width = parse_int(key, v);
    } else if (key == "precision-bits") {
        cfg.precision_bits = static_cast<int>(parse_int(key, v));
    } else if (key == "threads") {
        const std::int64_t t = parse_int(key, v);
        if (t < 1 || t > 4096) {
            raise(Errc::FormatError, "threads out of range");
        }
        cfg.threads = static_cast<unsigned>(t);
    } else if (key == "checkpoint-dir") {
        cfg.checkpoint_dir = v;
    } else if (key == "report") {
        cfg.report_path = v;
    } else if (key == "timing") {
        cfg.timing = parse_bool(key, v);
    } else if (key == "share-e1") {
        cfg.shares.e1 = parse_double(key, v);
    } else if (key == "share-e2") {
        cfg.shares.e2 = parse_double(key, v);
    } else if (key == "share-minus-one-line") {
        cfg.shares.minus_one_line = parse_double(key, v);
    } else if (key == "share-window-tail") {
        cfg.shares.window_tail = parse_double(key, v);
    } else if (key == "share-sieve-taylor") {
        cfg.shares.sieve_taylor = parse_double(key, v);
    } else if (key == "share-phihat-anchor") {
        cfg.shares.phihat_anchor = parse_double(key, v);
    } else {
        raise(Errc::FormatError, "unknown configuration key '" + key + "'");
    }
}

void read_config(std::istream& in, RunConfig& cfg)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            raise(Errc::FormatError, "config line " + std::to_string(lineno) + ": expected key = value");
        }
        set_config_value(cfg, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    }
}

void read_config_file(const std::string& path, RunConfig& cfg)
{
    std::ifstream in(path);
    if (!in) {
        raise(Errc::IoError, "cannot open config file " + path);
    }
    read_config(in, cfg);
}

// ---------------------------------------------------------------- ledger

ErrorLedger::ErrorLedger()
    : e1(0), e2(0), window_tail(0), minus_one_line(0), phihat_anchor(0), sieve_taylor(0), line_integration(0),
      rounding_slack(0)
{
}

std::vector<std::pair<std::string, RealInterval>> ErrorLedger::entries() const
{
    return {{"e1", e1},
            {"e2", e2},
            {"window_tail", window_tail},
            {"minus_one_line", minus_one_line},
            {"phihat_anchor", phihat_anchor},
            {"sieve_taylor", sieve_taylor},
            {"line_integration", line_integration},
            {"rounding_slack", rounding_slack}};
}

RealInterval ErrorLedger::total() const
{
    RealInterval t(0);
    for (const auto& [name, v] : entries()) {
        t += v;
    }
    return t;
}

// ---------------------------------------------------------------- lambda choice

double choose_window_k(std::int64_t x, const MellinContext& ctx, double share)
{
    auto tail = [&](double k) { return window_tail_bound(make_window(x, ctx, k, 1), ctx).hi_double(); };
    double hi = 1;
    while (tail(hi) > share) {
        hi *= 2;
        if (hi > 256) {
            raise(Errc::Infeasible, "no window meets the tail share " + fmt_double(share));
        }
    }
    double lo = hi / 2;
    if (tail(lo) <= share) {
        return lo;
    }
    for (int i = 0; i < 30 && hi - lo > 1e-3; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) <= share ? hi : lo) = mid;
    }
    // a coarse k keeps the window (and the report) stable under tiny changes
    const double k = std::ceil(hi * 64) / 64;
    return tail(k) <= share ? k : hi;
}

LambdaChoice choose_lambda(std::int64_t x, double T1, std::size_t n_T1, double e1_share, double line_share,
                           double tail_share, double window_k)
{
    if (!(T1 >= 100)) {
        raise(Errc::ParamViolation, "choosing lambda needs T1 >= 100");
    }
    const RealInterval xi(static_cast<long long>(x));
    auto fits = [&](double lam) {
        const MellinContext ctx = MellinContext::make(xi, RealInterval(lam));
        return e1_at(T1, n_T1, ctx).hi_double() <= e1_share && minus_one_line_bound(ctx).hi_double() <= line_share;
    };
    double hi = 0.5;
    if (!fits(hi)) {
        raise(Errc::Infeasible, "no lambda <= 1/2 brings E1 below " + fmt_double(e1_share) +
                                    " and the -1 line bound below " + fmt_double(line_share) + " at T1 = " +
                                    fmt_double(T1) + "; use more zeros");
    }
    double lo = 1e-12;
    if (fits(lo)) {
        hi = lo;
    } else {
        for (int i = 0; i < 80 && hi / lo > 1 + 1e-9; ++i) {
            const double mid = std::sqrt(lo * hi);
            (fits(mid) ? hi : lo) = mid;
        }
    }
    LambdaChoice out;
    out.lambda = Lambda::round_up(hi);
    const MellinContext ctx = MellinContext::make(xi, out.lambda.value());
    out.e1 = e1_at(T1, n_T1, ctx);
    out.minus_one_line = minus_one_line_bound(ctx).upper();
    if (out.e1.hi_double() > e1_share || out.minus_one_line.hi_double() > line_share) {
        raise(Errc::Infeasible, "the bounds are not monotone near the chosen lambda");
    }
    out.window_k = window_k > 0 ? window_k : choose_window_k(x, ctx, tail_share);
    out.window_tail = window_tail_bound(make_window(x, ctx, out.window_k, 1), ctx);
    if (window_k > 0 && out.window_tail.hi_double() > tail_share) {
        raise(Errc::Infeasible, "window-k " + fmt_double(window_k) + " leaves a tail of " +
                                    out.window_tail.hi_decimal() + " above its share");
    }
    return out;
}

LambdaChoice choose_lambda(std::int64_t x, double T1, std::size_t n_T1, double budget)
{
    return choose_lambda(x, T1, n_T1, budget / 2, budget / 6, budget / 3);
}

// ---------------------------------------------------------------- plan

RunPlan plan_run(const RunConfig& cfg)
{
    cfg.validate();
    RunPlan plan;
    plan.x = cfg.x;
    plan.zeros = load_zeros_file(cfg.zeros_path);
    const auto& recs = plan.zeros.records;

    if (cfg.t1 > 0) {
        plan.T1 = cfg.t1;
    } else {
        if (recs.size() < 2) {
            raise(Errc::CoverageGap, "the zero file needs at least two ordinates to place T1");
        }
        const double a = recs[recs.size() - 2].ordinate.hi_double();
        const double b = recs.back().ordinate.lo_double();
        if (!(a < b)) {
            raise(Errc::CoverageGap, "the last two ordinates overlap; give t1 explicitly");
        }
        plan.T1 = 0.5 * (a + b);
    }
    if (recs.empty() || recs.back().ordinate.hi_double() < plan.T1) {
        raise(Errc::CoverageGap, "the zero file stops below T1 = " + fmt_double(plan.T1));
    }
    plan.n_T1 = plan.zeros.count_below(RealInterval(plan.T1));

    const double rh = plan.zeros.rh_height.lo_double();
    plan.T2 = cfg.t2 > 0 ? cfg.t2 : std::max(rh, plan.T1);
    if (plan.T2 < plan.T1) {
        raise(Errc::ParamViolation, "T2 lies below T1");
    }
    if (plan.T2 > std::max(rh, plan.T1)) {
        raise(Errc::ParamViolation, "T2 = " + fmt_double(plan.T2) +
                                        " is above the height to which the zeros are known to lie on the line");
    }
    if (plan.T2 <= recs.back().ordinate.lo_double()) {
        plan.n_T2 = plan.zeros.count_below(RealInterval(plan.T2));
    } else {
        // N(T2) only enters with a minus sign, so its smallest admissible value is safe
        const CountEnvelope env = nt_bound(RealInterval(plan.T2));
        const double low = std::max(0.0, std::floor(env.lower.lo_double()));
        plan.n_T2 = std::max<std::size_t>(recs.size(), static_cast<std::size_t>(low));
    }

    const RealInterval xi(static_cast<long long>(cfg.x));
    if (cfg.lambda) {
        plan.lambda = *cfg.lambda;
    } else {
        plan.lambda = choose_lambda(cfg.x, plan.T1, plan.n_T1, cfg.shares.e1, cfg.shares.minus_one_line,
                                    cfg.shares.window_tail, cfg.window_k)
                          .lambda;
    }
    const MellinContext ctx = MellinContext::make(xi, plan.lambda.value());
    plan.window_k = cfg.window_k > 0 ? cfg.window_k : choose_window_k(cfg.x, ctx, cfg.shares.window_tail);
    plan.window = make_window(cfg.x, ctx, plan.window_k, 1);
    plan.window.segment_width = cfg.segment_width > 0
                                    ? cfg.segment_width
                                    : choose_segment_width(plan.window, cfg.x, ctx, cfg.shares.sieve_taylor);

    const TruncationBudget tb = TruncationBudget::make(plan.T1, plan.T2);
    plan.predicted.e1 = e1_bound(tb, plan.n_T1, ctx);
    plan.predicted.e2 = e2_bound(tb, plan.n_T2, ctx);
    plan.predicted.window_tail = window_tail_bound(plan.window, ctx).upper();
    plan.predicted.minus_one_line = minus_one_line_bound(ctx).upper();
    plan.predicted.phihat_anchor = RealInterval(cfg.shares.phihat_anchor);
    plan.predicted.sieve_taylor = RealInterval(cfg.shares.sieve_taylor);
    if (!(plan.predicted.total().hi_double() < 0.5)) {
        raise(Errc::Infeasible, "the predicted error total " + plan.predicted.total().hi_decimal() +
                                    " does not stay below 1/2 (E1 " + plan.predicted.e1.hi_decimal() + ", E2 " +
                                    plan.predicted.e2.hi_decimal() + ")");
    }
    return plan;
}

// ---------------------------------------------------------------- sieve checkpoints

void store_sieve_record(std::ostream& out, const SegmentSummary& s)
{
    std::string s2;
    u128 v = s.s2;
    do {
        s2.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    } while (v != 0);
    std::reverse(s2.begin(), s2.end());
    out << s.x0 << ' ' << s.w << ' ' << s.s0 << ' ' << s.s1 << ' ' << s2 << '\n';
}

std::vector<SegmentSummary> load_sieve_checkpoint(std::istream& in)
{
    std::vector<SegmentSummary> out;
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!content.empty() && content.back() != '\n') {
        content.erase(content.find_last_of('\n') == std::string::npos ? 0 : content.find_last_of('\n') + 1);
    }
    static const std::regex rec(R"(\s*(-?[0-9]+) ([0-9]+) ([0-9]+) (-?[0-9]+) ([0-9]+)\s*)");
    std::istringstream lines(content);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        std::smatch m;
        if (!std::regex_match(line, m, rec)) {
            raise(Errc::FormatError, "sieve checkpoint line " + std::to_string(lineno) + " is malformed");
        }
        SegmentSummary s;
        try {
            s.x0 = std::stoll(m[1].str());
            s.w = std::stoll(m[2].str());
            s.s0 = std::stoll(m[3].str());
            s.s1 = std::stoll(m[4].str());
        } catch (const std::exception&) {
            raise(Errc::FormatError, "sieve checkpoint line " + std::to_string(lineno) + " is out of range");
        }
        const std::string d = m[5].str();
        if (d.size() > 38) {
            raise(Errc::FormatError, "sieve checkpoint line " + std::to_string(lineno) + ": S2 out of range");
        }
        u128 v = 0;
        for (char c : d) {
            v = v * 10 + static_cast<unsigned>(c - '0');
        }
        s.s2 = v;
        if (s.s0 > 2 * s.w + 1) {
            raise(Errc::FormatError, "sieve checkpoint line " + std::to_string(lineno) + " counts too many primes");
        }
        out.push_back(s);
    }
    return out;
}

std::vector<SegmentSummary> sieve_with_checkpoint(const std::vector<SegmentSummary>& shells, const std::string& dir,
                                                  unsigned threads)
{
    if (shells.empty()) {
        return {};
    }
    std::map<std::pair<std::int64_t, std::int64_t>, SegmentSummary> known;
    fs::path file;
    if (!dir.empty()) {
        fs::create_directories(dir);
        file = fs::path(dir) / "sieve.txt";
        std::ifstream in(file);
        if (in) {
            for (const auto& s : load_sieve_checkpoint(in)) {
                known[{s.x0, s.w}] = s;
            }
        }
    }
    std::vector<SegmentSummary> todo;
    for (const auto& s : shells) {
        if (!known.count({s.x0, s.w})) {
            todo.push_back(s);
        }
    }
    // contiguous chunks of about a million integers, each sieved on its own
    std::vector<std::pair<std::size_t, std::size_t>> chunks;
    for (std::size_t i = 0; i < todo.size();) {
        std::size_t j = i;
        const std::int64_t start = todo[i].lo();
        while (j < todo.size() && (j == i || todo[j].hi() - start < (std::int64_t{1} << 20))) {
            ++j;
        }
        chunks.emplace_back(i, j);
        i = j;
    }
    std::int64_t top = 0;
    for (const auto& s : shells) {
        top = std::max(top, s.hi());
    }
    const SievingPrimes primes = SievingPrimes::covering(static_cast<std::uint64_t>(top));
    std::vector<std::vector<SegmentSummary>> done(chunks.size());
    std::mutex io;
    std::ofstream out;
    if (!file.empty()) {
        out.open(file, std::ios::app);
        if (!out) {
            raise(Errc::IoError, "cannot write " + file.string());
        }
    }
    detail::parallel_for(chunks.size(), threads, [&](std::size_t c) {
        const std::vector<SegmentSummary> part(todo.begin() + static_cast<std::ptrdiff_t>(chunks[c].first),
                                               todo.begin() + static_cast<std::ptrdiff_t>(chunks[c].second));
        done[c] = sieve_segments(part, primes);
        if (out.is_open()) {
            std::lock_guard<std::mutex> lock(io);
            for (const auto& s : done[c]) {
                store_sieve_record(out, s);
            }
            out.flush();
        }
    });
    for (const auto& part : done) {
        for (const auto& s : part) {
            known[{s.x0, s.w}] = s;
        }
    }
    std::vector<SegmentSummary> result;
    result.reserve(shells.size());
    for (const auto& s : shells) {
        result.push_back(known.at({s.x0, s.w}));
    }
    return result;
}

// ---------------------------------------------------------------- zero-sum checkpoints

namespace {

struct BlockStore {
    fs::path dir;
    std::string key_prefix;
    const std::vector<RealInterval>* heights = nullptr;
    const MellinContext* ctx = nullptr;
    LineOptions opt;

    std::string key(const LinePlan::Block& b) const
    {
        return key_prefix + " bottom=" + fmt_double(b.t_bottom) + " top=" + fmt_double(b.t_top) +
               " first=" + std::to_string(b.first) + " count=" + std::to_string(b.count);
    }

    bool load(const fs::path& file, const LinePlan::Block& b, LineBlock& out) const
    {
        std::ifstream in(file);
        std::string line;
        if (!in || !std::getline(in, line) || line != key(b)) {
            return false;
        }
        auto pair_line = [&](RealInterval& v) {
            std::string lo, hi;
            if (!(in >> lo >> hi)) {
                return false;
            }
            v = from_hex_texts(lo, hi);
            return true;
        };
        LineBlock blk;
        blk.t_bottom = b.t_bottom;
        blk.t_top = b.t_top;
        if (!pair_line(blk.delta) || !pair_line(blk.integration_error) || !(in >> blk.steps)) {
            return false;
        }
        blk.values.resize(b.count);
        for (auto& v : blk.values) {
            if (!pair_line(v)) {
                return false;
            }
        }
        std::string end;
        if (!(in >> end) || end != "end") {
            return false;
        }
        out = std::move(blk);
        return true;
    }

    void save(const fs::path& file, const LinePlan::Block& b, const LineBlock& blk) const
    {
        const fs::path tmp = file.string() + ".tmp";
        {
            std::ofstream o(tmp);
            o << key(b) << '\n';
            o << hex_pair(blk.delta) << '\n';
            o << hex_pair(blk.integration_error) << '\n';
            o << blk.steps << '\n';
            for (const auto& v : blk.values) {
                o << hex_pair(v) << '\n';
            }
            o << "end\n";
            if (!o) {
                raise(Errc::IoError, "cannot write " + tmp.string());
            }
        }
        fs::rename(tmp, file);
    }

    LineBlock run(std::size_t index, const LinePlan::Block& b) const
    {
        const fs::path file = dir / ("zero-block-" + std::to_string(index) + ".txt");
        LineBlock blk;
        if (load(file, b, blk)) {
            return blk;
        }
        const std::vector<RealInterval> sub(heights->begin() + static_cast<std::ptrdiff_t>(b.first),
                                            heights->begin() + static_cast<std::ptrdiff_t>(b.first + b.count));
        blk = re_phihat_block(0.5, sub, b.t_bottom, b.t_top, *ctx, opt);
        save(file, b, blk);
        return blk;
    }
};

} // namespace

// ---------------------------------------------------------------- pi*

PiStarResult compute_pi_star(const RunConfig& cfg)
{
    PrecisionScope scope(static_cast<mpfr_prec_t>(cfg.precision_bits));
    PiStarResult res;
    res.plan = plan_run(cfg);
    const RunPlan& plan = res.plan;
    const MellinContext ctx = MellinContext::make(RealInterval(static_cast<long long>(cfg.x)), plan.lambda.value());

    // sieve window
    const std::vector<SegmentSummary> shells = tile_window(plan.window, cfg.x);
    const std::vector<SegmentSummary> segs = sieve_with_checkpoint(shells, cfg.checkpoint_dir, cfg.threads);
    const std::vector<PrimePowerTerm> powers = prime_power_terms(plan.window, cfg.x);
    const WindowSum ws = window_sum(plan.window, segs, powers, ctx, cfg.x, cfg.shares.sieve_taylor);
    res.window_sum = ws.value;
    res.window_primes = ws.primes;
    res.segments = segs.size();

    // zeros below T1
    LineOptions opt;
    opt.threads = cfg.threads;
    std::vector<RealInterval> heights;
    for (const auto& z : plan.zeros.records) {
        if (z.ordinate.certainly_less(RealInterval(plan.T1))) {
            heights.push_back(z.ordinate);
        }
    }
    BlockRunner runner;
    BlockStore store;
    if (!cfg.checkpoint_dir.empty()) {
        fs::create_directories(cfg.checkpoint_dir);
        store.dir = cfg.checkpoint_dir;
        store.key_prefix = "x=" + std::to_string(cfg.x) + " lambda=" + plan.lambda.to_string() +
                           " prec=" + std::to_string(cfg.precision_bits) + " T1=" + fmt_double(plan.T1);
        store.heights = &heights;
        store.ctx = &ctx;
        store.opt = opt;
        runner = [&store](std::size_t i, const LinePlan::Block& b) { return store.run(i, b); };
    }
    const double zero_anchor_share = cfg.shares.phihat_anchor / 2;
    const ZeroSum zs = sum_re_phihat(plan.zeros.records, plan.T1, ctx, zero_anchor_share, opt, runner);
    res.zero_sum = zs.value;
    res.zeros_used = zs.zeros;
    res.anchor_T = zs.anchor_T;

    // Phihat(1) from the line Re s = 1
    const double one_share = cfg.shares.phihat_anchor / 2;
    const double one_T = anchor_height(1.0, 1.0, one_share, ctx);
    LineOptions o1 = opt;
    o1.anchor_share = one_share;
    const LineResult one = re_phihat_line(1.0, {RealInterval(0)}, one_T, ctx, o1);
    res.phihat_one = one.values.front();
    res.line_steps = zs.steps + one.steps;

    const RealInterval core = res.phihat_one - zs.value - RealInterval::ln2() + ws.value;

    ErrorLedger& L = res.ledger;
    L.e1 = plan.predicted.e1;
    L.e2 = plan.predicted.e2;
    L.window_tail = plan.predicted.window_tail;
    L.minus_one_line = plan.predicted.minus_one_line;
    L.phihat_anchor = (zs.anchor_charge + one.anchor_bound).upper();
    L.sieve_taylor = ws.taylor_error.upper();
    L.line_integration = (zs.integration_error + one.integration_error).upper();
    const RealInterval explained = L.phihat_anchor + L.sieve_taylor + L.line_integration;
    L.rounding_slack = max(mul_2si(core.width(), -1) - explained, RealInterval(0)).upper();

    const RealInterval outer = L.e1 + L.e2 + L.window_tail + L.minus_one_line;
    res.pi_star = core + RealInterval::symmetric(outer);
    if (!(L.total().hi_double() < 0.5)) {
        raise(Errc::BudgetExceeded, "the error total " + L.total().hi_decimal() + " is not below 1/2");
    }
    return res;
}

// ---------------------------------------------------------------- recovery

mpq_class prime_power_correction(std::int64_t x)
{
    if (x < 2) {
        raise(Errc::DomainError, "pi* recovery needs x >= 2");
    }
    const auto ux = static_cast<std::uint64_t>(x);
    mpq_class c = 0;
    for (int m = 2; (std::uint64_t{1} << m) <= ux; ++m) {
        c += mpq_class(static_cast<unsigned long>(prime_count(iroot(ux, m))), static_cast<unsigned long>(m));
    }
    for (int m = 1; (std::uint64_t{1} << m) <= ux; ++m) {
        const std::uint64_t r = iroot(ux, m);
        std::uint64_t p = 1;
        for (int i = 0; i < m; ++i) {
            p *= r;
        }
        if (p == ux && is_probable_prime(r)) {
            c -= mpq_class(1, 2 * static_cast<unsigned long>(m));
            break;
        }
    }
    c.canonicalize();
    return c;
}

long long recover_pi(const RealInterval& pi_star, std::int64_t x)
{
    const RealInterval corrected = pi_star - RealInterval::from_rational(prime_power_correction(x));
    return unique_integer(corrected);
}

PiResult run_pi(const RunConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    PiResult r;
    r.star = compute_pi_star(cfg);
    {
        PrecisionScope scope(static_cast<mpfr_prec_t>(cfg.precision_bits));
        r.pi = recover_pi(r.star.pi_star, cfg.x);
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

// ---------------------------------------------------------------- reports

namespace {

ojson ledger_json(const ErrorLedger& l)
{
    ojson j = ojson::object();
    for (const auto& [name, v] : l.entries()) {
        j[name] = v.hi_decimal();
    }
    j["total"] = l.total().hi_decimal();
    return j;
}

ojson zeros_json(const RunConfig& cfg, const ZeroFile& f)
{
    ojson j = ojson::object();
    j["path"] = cfg.zeros_path;
    j["count"] = f.records.size();
    j["abs_err"] = f.abs_err_text;
    j["rh_height"] = f.rh_height_text;
    if (!f.records.empty()) {
        j["last_ordinate"] = f.records.back().text;
    }
    return j;
}

ojson config_json(const RunConfig& cfg, const RunPlan& plan)
{
    ojson j = ojson::object();
    j["lambda"] = plan.lambda.to_string();
    j["lambda_chosen"] = !cfg.lambda.has_value();
    j["t1"] = fmt_double(plan.T1);
    j["t2"] = fmt_double(plan.T2);
    j["n_t1"] = plan.n_T1;
    j["n_t2"] = plan.n_T2;
    j["window_k"] = fmt_double(plan.window_k);
    j["x1"] = plan.window.x1;
    j["x2"] = plan.window.x2;
    j["segment_width"] = plan.window.segment_width;
    j["precision_bits"] = cfg.precision_bits;
    j["threads"] = cfg.threads;
    ojson shares = ojson::object();
    shares["e1"] = fmt_double(cfg.shares.e1);
    shares["e2"] = fmt_double(cfg.shares.e2);
    shares["minus_one_line"] = fmt_double(cfg.shares.minus_one_line);
    shares["window_tail"] = fmt_double(cfg.shares.window_tail);
    shares["sieve_taylor"] = fmt_double(cfg.shares.sieve_taylor);
    shares["phihat_anchor"] = fmt_double(cfg.shares.phihat_anchor);
    j["shares"] = shares;
    if (!cfg.checkpoint_dir.empty()) {
        j["checkpoint_dir"] = cfg.checkpoint_dir;
    }
    return j;
}

} // namespace

std::string report_json(const PiResult& r, const RunConfig& cfg)
{
    const PiStarResult& s = r.star;
    ojson j = ojson::object();
    j["x"] = cfg.x;
    j["pi"] = r.pi;
    j["pi_star_lo"] = s.pi_star.lo_decimal();
    j["pi_star_hi"] = s.pi_star.hi_decimal();
    j["ledger"] = ledger_json(s.ledger);
    ojson parts = ojson::object();
    parts["phihat_one_lo"] = s.phihat_one.lo_decimal();
    parts["phihat_one_hi"] = s.phihat_one.hi_decimal();
    parts["zero_sum_lo"] = s.zero_sum.lo_decimal();
    parts["zero_sum_hi"] = s.zero_sum.hi_decimal();
    parts["window_sum_lo"] = s.window_sum.lo_decimal();
    parts["window_sum_hi"] = s.window_sum.hi_decimal();
    j["terms"] = parts;
    j["zeros"] = zeros_json(cfg, s.plan.zeros);
    j["config"] = config_json(cfg, s.plan);
    ojson work = ojson::object();
    work["zeros_used"] = s.zeros_used;
    work["anchor_height"] = fmt_double(s.anchor_T);
    work["line_steps"] = s.line_steps;
    work["segments"] = s.segments;
    work["window_primes"] = s.window_primes;
    j["work"] = work;
    if (cfg.timing) {
        j["wall_time_s"] = r.wall_seconds;
    }
    return j.dump(2) + "\n";
}

std::string bounds_json(const RunPlan& plan, const RunConfig& cfg)
{
    ojson j = ojson::object();
    j["x"] = cfg.x;
    ojson l = ojson::object();
    l["e1"] = plan.predicted.e1.hi_decimal();
    l["e2"] = plan.predicted.e2.hi_decimal();
    l["window_tail"] = plan.predicted.window_tail.hi_decimal();
    l["minus_one_line"] = plan.predicted.minus_one_line.hi_decimal();
    l["phihat_anchor_share"] = fmt_double(cfg.shares.phihat_anchor);
    l["sieve_taylor_share"] = fmt_double(cfg.shares.sieve_taylor);
    l["total"] = plan.predicted.total().hi_decimal();
    j["bounds"] = l;
    j["zeros"] = zeros_json(cfg, plan.zeros);
    j["config"] = config_json(cfg, plan);
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- zero files

ZeroFileCheck verify_zero_file(const std::string& path)
{
    const ZeroFile f = load_zeros_file(path);
    ZeroFileCheck out;
    out.count = f.records.size();
    out.max_height = f.max_height();
    auto check = [&](double h, std::size_t n) {
        if (h < 2) {
            return;
        }
        const CountEnvelope env = nt_bound(RealInterval(h));
        const double nd = static_cast<double>(n);
        ++out.heights_checked;
        if (nd < std::floor(env.lower.lo_double()) || nd > std::ceil(env.upper.hi_double())) {
            std::ostringstream o;
            o << "N(" << fmt_double(h) << ") = " << n << " outside [" << env.lower.to_string(10) << ", "
              << env.upper.to_string(10) << "]";
            out.problems.push_back(o.str());
        }
    };
    for (std::size_t i = 0; i + 1 < f.records.size(); ++i) {
        const double a = f.records[i].ordinate.hi_double();
        const double b = f.records[i + 1].ordinate.lo_double();
        if (a < b) {
            check(0.5 * (a + b), i + 1);
        }
    }
    return out;
}

// ---------------------------------------------------------------- scanning

ScanResult scan_zeros(double t1, double t2, unsigned threads, double target_width)
{
    if (!(t1 < t2)) {
        raise(Errc::ParamViolation, "zeros-scan needs t1 < t2");
    }
    if (t1 < 8) {
        raise(Errc::ParamViolation, "zeros-scan needs t1 >= 8");
    }
    const double half = 12;
    ScanResult out;
    out.t1 = t1;
    out.t2 = t2;
    double from = t1;
    while (from < t2) {
        // a short remainder is centred, where the window is largest
        const double t0 = std::max(from + std::min(half, (t2 - from) / 2), 20.0);
        const GridParams p = GridParams::defaults(t0);
        const GridEvaluation ev = evaluate_grid(p, threads);
        const ZeroScan scan = locate_zeros(ev, target_width);
        ScanWindow w;
        w.t0 = t0;
        w.from = from;
        w.to = std::min(t0 + half, t2);
        w.budget = ev.budget;
        for (const auto& z : scan.zeros) {
            if (z.hi_double() < w.from || z.lo_double() > w.to) {
                continue;
            }
            const bool seen = std::any_of(out.zeros.begin(), out.zeros.end(),
                                          [&](const RealInterval& y) { return y.overlaps(z); });
            if (!seen) {
                out.zeros.push_back(z);
                ++w.zeros;
            }
        }
        for (const auto& r : scan.indeterminate) {
            if (r.hi_double() >= w.from && r.lo_double() <= w.to) {
                out.indeterminate.push_back(r.intersect(RealInterval(w.from, w.to)));
            }
        }
        out.windows.push_back(w);
        from = w.to;
    }

    // One more look at each undecided run from a window centred on it.
    std::vector<RealInterval> undecided;
    undecided.swap(out.indeterminate);
    for (const RealInterval& r : undecided) {
        const double t0 = std::max(r.mid_double(), 20.0);
        const GridEvaluation ev = evaluate_grid(GridParams::defaults(t0), threads);
        const ZeroScan scan = locate_zeros(ev, target_width);
        ScanWindow w;
        w.t0 = t0;
        w.from = r.lo_double();
        w.to = r.hi_double();
        w.budget = ev.budget;
        for (const auto& z : scan.zeros) {
            if (!z.overlaps(r)) {
                continue;
            }
            const bool seen = std::any_of(out.zeros.begin(), out.zeros.end(),
                                          [&](const RealInterval& y) { return y.overlaps(z); });
            if (!seen) {
                out.zeros.push_back(z);
                ++w.zeros;
            }
        }
        for (const auto& q : scan.indeterminate) {
            if (q.overlaps(r)) {
                out.indeterminate.push_back(q.intersect(r));
            }
        }
        out.windows.push_back(w);
    }
    std::sort(out.zeros.begin(), out.zeros.end(),
              [](const RealInterval& a, const RealInterval& b) { return a.mid_double() < b.mid_double(); });
    return out;
}

ZeroFile scan_to_zero_file(const ScanResult& scan, double target_width)
{
    // the midpoint of a bracket of width <= target, printed with enough
    // decimals that the rounding stays far below the declared error
    const int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(target_width))) + 3);
    std::vector<std::string> ords;
    for (const auto& z : scan.zeros) {
        if (z.width_double() > target_width) {
            raise(Errc::AccuracyViolation, "a zero bracket is wider than the declared accuracy");
        }
        std::ostringstream o;
        o << std::fixed << std::setprecision(decimals) << z.mid_double();
        ords.push_back(o.str());
    }
    std::ostringstream err;
    err << target_width;
    return make_zero_file(ords, err.str(), "0");
}

std::string scan_json(const ScanResult& scan)
{
    ojson j = ojson::object();
    j["t1"] = fmt_double(scan.t1);
    j["t2"] = fmt_double(scan.t2);
    j["zeros"] = scan.zeros.size();
    ojson ws = ojson::array();
    for (const auto& w : scan.windows) {
        ojson o = ojson::object();
        o["t0"] = fmt_double(w.t0);
        o["from"] = fmt_double(w.from);
        o["to"] = fmt_double(w.to);
        o["zeros"] = w.zeros;
        ojson b = ojson::object();
        b["g_alias"] = w.budget.g_alias.hi_decimal();
        b["G_alias"] = w.budget.G_alias.hi_decimal();
        b["series_tail"] = w.budget.series_tail.hi_decimal();
        b["taylor"] = w.budget.taylor.hi_decimal();
        b["F_alias"] = w.budget.F_alias.hi_decimal();
        b["f_alias"] = w.budget.f_alias.hi_decimal();
        b["rounding"] = w.budget.rounding.hi_decimal();
        b["total"] = w.budget.total().hi_decimal();
        o["budget"] = b;
        ws.push_back(o);
    }
    j["windows"] = ws;
    ojson ind = ojson::array();
    for (const auto& r : scan.indeterminate) {
        ind.push_back(ojson::array({r.lo_decimal(), r.hi_decimal()}));
    }
    j["indeterminate"] = ind;
    return j.dump(2) + "\n";
}

} // namespace anpc
