#include "anpc/zeros.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <regex>
#include <sstream>

namespace anpc {

namespace {

const std::regex& header_pattern()
{
    static const std::regex re(R"(^# zeta-zeros v1 abs_err=(\S+) rh_height=(\S+)\s*$)");
    return re;
}

const std::regex& decimal_pattern()
{
    static const std::regex re(R"(^[0-9]+(\.[0-9]+)?([eE][-+]?[0-9]+)?$)");
    return re;
}

const std::regex& ordinate_pattern()
{
    static const std::regex re(R"(^[0-9]+(\.([0-9]+))?$)");
    return re;
}

RealInterval parse_decimal(const std::string& text, const char* what)
{
    if (!std::regex_match(text, decimal_pattern())) {
        raise(Errc::FormatError, std::string("bad ") + what + ": '" + text + "'");
    }
    return RealInterval::from_decimal(text);
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Appends one ordinate, checking format, stated accuracy and ordering.
void append_ordinate(ZeroFile& f, const std::string& text, std::size_t line_no)
{
    std::smatch m;
    if (!std::regex_match(text, m, ordinate_pattern())) {
        raise(Errc::FormatError, "line " + std::to_string(line_no) + ": bad ordinate '" + text + "'");
    }
    // A value written with d decimals cannot claim accuracy below half a unit in the last place.
    const long digits = m[2].matched ? static_cast<long>(m[2].length()) : 0;
    const RealInterval last_place = RealInterval(1) / pow(RealInterval(10), digits);
    if (f.abs_err.certainly_less(mul_2si(last_place, -1))) {
        raise(Errc::AccuracyViolation, "line " + std::to_string(line_no) + ": '" + text +
                                           "' has too few digits for abs_err=" + f.abs_err_text);
    }
    ZeroRecord r;
    r.text = text;
    r.index = f.records.size() + 1;
    r.ordinate = RealInterval::from_decimal(text).inflate(f.abs_err);
    if (!r.ordinate.is_positive()) {
        raise(Errc::FormatError, "line " + std::to_string(line_no) + ": ordinate must be positive");
    }
    if (!f.records.empty() && !f.records.back().ordinate.certainly_less(r.ordinate)) {
        raise(Errc::MonotonicityViolation, "line " + std::to_string(line_no) + ": '" + text +
                                               "' does not exceed the previous ordinate by more than 2 abs_err");
    }
    f.records.push_back(std::move(r));
}

void set_header(ZeroFile& f, const std::string& abs_err, const std::string& rh_height)
{
    f.abs_err_text = abs_err;
    f.rh_height_text = rh_height;
    f.abs_err = parse_decimal(abs_err, "abs_err").upper();
    f.rh_height = parse_decimal(rh_height, "rh_height").lower();
}

} // namespace

double ZeroFile::max_height() const
{
    return records.empty() ? 0.0 : records.back().ordinate.hi_double();
}

std::size_t ZeroFile::count_below(const RealInterval& t) const
{
    std::size_t n = 0;
    for (const auto& r : records) {
        if (r.ordinate.certainly_less(t)) {
            ++n;
        } else if (t.certainly_less(r.ordinate)) {
            break;
        } else {
            raise(Errc::FormatError, "ordinate " + r.text + " straddles the height " + t.to_string(12));
        }
    }
    return n;
}

ZeroFile load_zeros(std::istream& in)
{
    ZeroFile f;
    std::string line;
    if (!std::getline(in, line)) {
        raise(Errc::FormatError, "zero file is empty; a header line is required");
    }
    std::smatch m;
    if (!std::regex_match(line, m, header_pattern())) {
        raise(Errc::FormatError, "bad zero file header: '" + line + "'");
    }
    set_header(f, m[1].str(), m[2].str());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        append_ordinate(f, t, line_no);
    }
    return f;
}

ZeroFile load_zeros_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        raise(Errc::IoError, "cannot open zero file " + path);
    }
    return load_zeros(in);
}

void store_zeros(std::ostream& out, const ZeroFile& file)
{
    out << "# zeta-zeros v1 abs_err=" << file.abs_err_text << " rh_height=" << file.rh_height_text << '\n';
    for (const auto& r : file.records) {
        out << r.text << '\n';
    }
}

ZeroFile make_zero_file(const std::vector<std::string>& ordinates, const std::string& abs_err,
                        const std::string& rh_height)
{
    ZeroFile f;
    set_header(f, abs_err, rh_height);
    for (std::size_t i = 0; i < ordinates.size(); ++i) {
        append_ordinate(f, ordinates[i], i + 1);
    }
    return f;
}

namespace {

RealInterval rosser_q(const RealInterval& t)
{
    const RealInterval lt = log(t);
    return RealInterval::from_decimal("0.137") * lt + RealInterval::from_decimal("0.443") * log(lt) +
           RealInterval::from_decimal("1.588");
}

RealInterval rosser_main(const RealInterval& t)
{
    const RealInterval two_pi = mul_2si(RealInterval::pi(), 1);
    return t / two_pi * log(t / (two_pi * RealInterval::euler_e())) + RealInterval(0.875);
}

// alpha u - log(main + Q) over t = e^u, u in [ua, ub]; true when certainly >= 0.
bool alpha_holds(const RealInterval& alpha, double ua, double ub)
{
    const RealInterval u = RealInterval::hull(RealInterval(ua), RealInterval(ub));
    const RealInterval t = exp(u);
    const RealInterval g = alpha * u - log(rosser_main(t) + rosser_q(t));
    return g.is_nonnegative();
}

// (alpha - 1) log(t / 2 pi) - alpha >= 2 pi (0.137 + 0.443 / log t) / t at a point t: from here on
// t^alpha grows at least as fast as the envelope.
bool propagates_from(const RealInterval& alpha, double u)
{
    const RealInterval t = exp(RealInterval(u));
    const RealInterval two_pi = mul_2si(RealInterval::pi(), 1);
    const RealInterval lhs = (alpha - RealInterval(1)) * log(t / two_pi) - alpha;
    const RealInterval rhs =
        two_pi * (RealInterval::from_decimal("0.137") + RealInterval::from_decimal("0.443") / log(t)) / t;
    return rhs.certainly_less(lhs);
}

bool alpha_certified(double a, double T)
{
    PrecisionScope scope(Precision{128});
    const RealInterval alpha(a);
    const double u0 = std::log(T);
    double ustar = std::log(2 * M_PI) + (a + 1) / (a - 1);
    ustar = std::max(ustar, u0);
    for (int i = 0; !propagates_from(alpha, ustar); ++i) {
        if (i > 60) {
            return false;
        }
        ustar = ustar * 1.5 + 1;
    }
    // u0 itself is rounded; start slightly below it so the true log T is covered
    double u = u0 * (1 - 1e-15) - 1e-300;
    double step = 1.0;
    int pieces = 0;
    while (u < ustar) {
        const double ub = std::min(u + step, ustar);
        if (alpha_holds(alpha, u, ub)) {
            u = ub;
            step *= 2;
        } else {
            step /= 2;
            if (step < 1e-6) {
                return false;
            }
        }
        if (++pieces > 100000) {
            return false;
        }
    }
    return alpha_holds(alpha, ustar, ustar);
}

} // namespace

CountEnvelope nt_bound(const RealInterval& t)
{
    if (!(t.lo_double() >= 2.0)) {
        raise(Errc::DomainError, "nt_bound needs t >= 2");
    }
    const RealInterval main = rosser_main(t);
    const RealInterval q = rosser_q(t);
    return CountEnvelope{main - q, main + q};
}

double alpha_for(double T)
{
    if (!(T >= 2.0)) {
        raise(Errc::DomainError, "alpha_for needs T >= 2");
    }
    static std::mutex mu;
    static std::map<double, int> cache; // T -> k with alpha = 1 + k/1024
    // a certificate for T' <= T also holds for T, so the best known T' caps the search
    int lo = 0, hi = 2048;
    bool capped = false;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.upper_bound(T);
        if (it != cache.begin()) {
            --it;
            if (it->first == T) {
                return 1.0 + it->second / 1024.0;
            }
            hi = it->second;
            capped = true;
        }
    }
    if (!capped && !alpha_certified(1.0 + hi / 1024.0, T)) {
        raise(Errc::DomainError, "no exponent up to 3 dominates the zero-count envelope");
    }
    // the exponent is nearly constant in T, so try one step below the cap first
    if (capped && hi > 1 && !alpha_certified(1.0 + (hi - 1) / 1024.0, T)) {
        lo = hi - 1;
    }
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (alpha_certified(1.0 + mid / 1024.0, T)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    cache[T] = hi;
    return 1.0 + hi / 1024.0;
}

RealInterval b_bound(const RealInterval& sigma, const RealInterval& T, const MellinContext& ctx)
{
    const RealInterval l2 = sqr(ctx.lambda);
    const RealInterval gauss = exp(mul_2si(l2 * (RealInterval(1) - sqr(T)), -1));
    return gauss * (exp(sigma * ctx.log_x) / (T * ctx.log_x) + RealInterval(1) / (l2 * sqr(T) * ctx.x));
}

TruncationBudget TruncationBudget::make(double T1, double T2)
{
    if (!(T1 >= 2.0 && T1 <= T2)) {
        raise(Errc::ParamViolation, "need 2 <= T1 <= T2");
    }
    TruncationBudget b;
    b.T1 = T1;
    b.T2 = T2;
    b.alpha_T1 = alpha_for(T1);
    b.alpha_T2 = alpha_for(T2);
    return b;
}

namespace {

void check_count(double T, std::size_t n)
{
    const CountEnvelope env = nt_bound(RealInterval(T));
    const double nd = static_cast<double>(n);
    if (nd < std::floor(env.lower.lo_double()) || nd > std::ceil(env.upper.hi_double())) {
        raise(Errc::InconsistentCount, "zero count " + std::to_string(n) + " below height " + std::to_string(T) +
                                           " is outside the envelope [" + env.lower.to_string(8) + ", " +
                                           env.upper.to_string(8) + "]");
    }
}

// [(lambda^2 T^2 + 2) / (lambda^2 T^(2 - alpha)) - N(T)], the Stieltjes factor.
RealInterval count_factor(const RealInterval& T, double alpha, std::size_t n, const MellinContext& ctx)
{
    if (alpha > 2.0) {
        raise(Errc::ParamViolation, "the zero-sum bound needs alpha <= 2");
    }
    const RealInterval l2 = sqr(ctx.lambda);
    const RealInterval tpow = exp(RealInterval(2.0 - alpha) * log(T));
    const RealInterval f = (l2 * sqr(T) + RealInterval(2)) / (l2 * tpow) - RealInterval(static_cast<unsigned long>(n));
    return max(f, RealInterval(0));
}

} // namespace

RealInterval e1_bound(const TruncationBudget& budget, std::size_t n_T1, const MellinContext& ctx)
{
    check_count(budget.T1, n_T1);
    const RealInterval T(budget.T1);
    const RealInterval b = b_bound(RealInterval(0.5), T, ctx);
    return (mul_2si(b, 1) * count_factor(T, budget.alpha_T1, n_T1, ctx)).upper();
}

RealInterval e2_bound(const TruncationBudget& budget, std::size_t n_T2, const MellinContext& ctx)
{
    check_count(budget.T2, n_T2);
    const RealInterval T(budget.T2);
    const RealInterval l2 = sqr(ctx.lambda);
    const RealInterval k = exp(mul_2si(l2 * (RealInterval(1) - sqr(T)), -1)) *
                           ((ctx.x + RealInterval(1)) / (T * ctx.log_x) +
                            RealInterval(2) / (l2 * sqr(T) * ctx.x));
    return (k * count_factor(T, budget.alpha_T2, n_T2, ctx)).upper();
}

double anchor_height(double sigma, double floor_T, double share, const MellinContext& ctx)
{
    const RealInterval s(sigma);
    auto ok = [&](double T) { return tail_anchor_bound(s, RealInterval(T), ctx).hi_double() <= share; };
    double lo = std::max(floor_T, 1.0);
    if (ok(lo)) {
        return lo;
    }
    double hi = lo * 2;
    while (!ok(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > 1e300) {
            raise(Errc::BudgetExceeded, "no anchor height reaches the requested share");
        }
    }
    for (int i = 0; i < 60 && hi - lo > 1e-6 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return std::ceil(hi);
}

ZeroSum sum_re_phihat(const std::vector<ZeroRecord>& zeros, double T1, const MellinContext& ctx,
                      double anchor_share, const LineOptions& opt, const BlockRunner& runner)
{
    ZeroSum out;
    out.value = RealInterval(0);
    out.anchor_charge = RealInterval(0);
    out.integration_error = RealInterval(0);
    if (T1 <= 0) {
        return out;
    }
    if (zeros.empty() || zeros.back().ordinate.hi_double() < T1) {
        raise(Errc::CoverageGap, "zeros reach " + std::to_string(zeros.empty() ? 0.0 : zeros.back().ordinate.hi_double()) +
                                     " but T1 = " + std::to_string(T1));
    }
    std::vector<RealInterval> heights;
    for (const auto& z : zeros) {
        if (z.ordinate.certainly_less(RealInterval(T1))) {
            heights.push_back(z.ordinate);
        } else if (RealInterval(T1).certainly_less(z.ordinate)) {
            break;
        } else {
            raise(Errc::ParamViolation, "zero " + z.text + " straddles T1");
        }
    }
    out.zeros = heights.size();
    if (heights.empty()) {
        return out;
    }
    const double per_zero = anchor_share / (2.0 * static_cast<double>(heights.size()));
    out.anchor_T = anchor_height(0.5, std::max(T1, heights.back().hi_double()), per_zero, ctx);
    LineOptions o = opt;
    o.anchor_share = per_zero;
    const LineResult line = re_phihat_line(0.5, heights, out.anchor_T, ctx, o, runner);
    // pairwise summation keeps the reduction order fixed and the rounding growth small
    std::vector<RealInterval> acc = line.values;
    while (acc.size() > 1) {
        std::vector<RealInterval> next;
        for (std::size_t i = 0; i + 1 < acc.size(); i += 2) {
            next.push_back(acc[i] + acc[i + 1]);
        }
        if (acc.size() % 2 == 1) {
            next.push_back(acc.back());
        }
        acc.swap(next);
    }
    out.value = mul_2si(acc.front(), 1);
    out.anchor_charge = (RealInterval(2 * static_cast<long>(heights.size())) * line.anchor_bound).upper();
    out.integration_error = line.integration_error;
    out.steps = line.steps;
    return out;
}

} // namespace anpc
