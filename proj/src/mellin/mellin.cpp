#include "anpc/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anpc/detail/parallel.hpp"

namespace anpc {

MellinContext MellinContext::make(const RealInterval& x, const RealInterval& lambda)
{
    if (!(x - RealInterval(1)).is_positive()) {
        raise(Errc::DomainError, "x must exceed 1");
    }
    if (!lambda.is_positive()) {
        raise(Errc::DomainError, "lambda must be positive");
    }
    return MellinContext{x, lambda, log(x)};
}

RealInterval phi(const RealInterval& t, const MellinContext& ctx)
{
    if (!t.is_positive()) {
        raise(Errc::DomainError, "phi needs t > 0");
    }
    const RealInterval y = log(t / ctx.x) / (sqrt(RealInterval(2)) * ctx.lambda);
    return mul_2si(erfc(y), -1).clamp(0.0, 1.0);
}

ComplexInterval phihat(const ComplexInterval& s, const MellinContext& ctx)
{
    if (s.contains_zero()) {
        raise(Errc::PoleProximity, "phihat has a pole at s = 0");
    }
    const RealInterval half_l2 = mul_2si(sqr(ctx.lambda), -1);
    return exp(s * ctx.log_x + half_l2 * sqr(s)) / s;
}

namespace {

ComplexInterval omega_of(const ComplexInterval& s0, const MellinContext& ctx)
{
    return s0 * sqr(ctx.lambda) + ComplexInterval(ctx.log_x);
}

const ComplexInterval& unit_i()
{
    thread_local ComplexInterval i(RealInterval(0), RealInterval(1));
    return i;
}

} // namespace

ComplexInterval shift_factorization(const ComplexInterval& s0, const RealInterval& h, const MellinContext& ctx)
{
    if (s0.re().contains_zero()) {
        raise(Errc::DomainError, "shift needs Re s0 != 0");
    }
    const ComplexInterval ih(RealInterval(0), h);
    const ComplexInterval osc = exp(ih * omega_of(s0, ctx));
    const RealInterval gauss = exp(-mul_2si(sqr(ctx.lambda * h), -1));
    return phihat(s0, ctx) * osc * gauss / (ComplexInterval(1) + ih / s0);
}

RealInterval exp_series_bound(int order, const RealInterval& lambda_h)
{
    const long half = order / 2;
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(half));
    return (pow(mul_2si(sqr(lambda_h), -1), half) / RealInterval::from_integer(fact)).upper();
}

RealInterval geometric_series_bound(int order, const RealInterval& ratio)
{
    if (!(RealInterval(1) - ratio).is_positive()) {
        raise(Errc::RadiusTooLarge, "geometric series ratio must be below 1");
    }
    return (pow(ratio, order) / (RealInterval(1) - ratio)).upper();
}

StepPolynomial build_step_polynomial(const ComplexInterval& s0, const RealInterval& radius, int order,
                                     const MellinContext& ctx)
{
    if (order < 2 || order % 2 != 0) {
        raise(Errc::ParamViolation, "series order must be a positive even integer");
    }
    const RealInterval r = abs(radius).upper();
    const RealInterval lambda_r = (ctx.lambda * r).upper();
    if (!lambda_r.certainly_less(RealInterval(1))) {
        raise(Errc::RadiusTooLarge, "lambda * radius must be below 1");
    }
    const RealInterval ratio = (r / abs(s0).lower()).upper();
    if (!ratio.certainly_less(RealInterval(1))) {
        raise(Errc::RadiusTooLarge, "radius must be below |s0|");
    }

    StepPolynomial p;
    p.order = order;
    p.s0 = s0;
    p.phihat_s0 = phihat(s0, ctx);
    p.omega = omega_of(s0, ctx);
    p.radius = r;
    p.ea = exp_series_bound(order, lambda_r);
    p.eb = geometric_series_bound(order, ratio);
    p.remainder = (p.eb + p.ea / (RealInterval(1) - ratio) + p.ea * p.eb).upper();

    // exp(-a h^2), a = lambda^2 / 2, through h^N
    std::vector<RealInterval> a_coeffs(static_cast<std::size_t>(order) + 1, RealInterval(0));
    const RealInterval a = mul_2si(sqr(ctx.lambda), -1);
    RealInterval term(1);
    for (int m = 0; 2 * m <= order; ++m) {
        if (m > 0) {
            term = -(term * a) / RealInterval(m);
        }
        a_coeffs[static_cast<std::size_t>(2 * m)] = term;
    }
    // 1 / (1 + ih/s0) = sum (-i/s0)^n h^n, through h^N
    const ComplexInterval q = -(unit_i() / s0);
    std::vector<ComplexInterval> b_coeffs(static_cast<std::size_t>(order) + 1);
    b_coeffs[0] = ComplexInterval(1);
    for (int n = 1; n <= order; ++n) {
        b_coeffs[static_cast<std::size_t>(n)] = b_coeffs[static_cast<std::size_t>(n - 1)] * q;
    }
    p.coeffs.assign(static_cast<std::size_t>(2 * order) + 1, ComplexInterval(0));
    for (int m = 0; m <= order; m += 2) {
        for (int n = 0; n <= order; ++n) {
            p.coeffs[static_cast<std::size_t>(m + n)] +=
                b_coeffs[static_cast<std::size_t>(n)] * a_coeffs[static_cast<std::size_t>(m)];
        }
    }
    return p;
}

namespace {

// Sum over n of c_n * integral_{h0}^{h1} h^n e^{i omega h} dh by the
// recurrence I_n = [h^n e^{i omega h} / (i omega)] - n / (i omega) I_{n-1}.
// Stable when |omega| * max|h| dominates the degree.
ComplexInterval oscillatory_upward(const std::vector<ComplexInterval>& c, const ComplexInterval& omega,
                                   const RealInterval& h0, const RealInterval& h1)
{
    const ComplexInterval iw = omega.mul_i();
    const ComplexInterval inv = ComplexInterval(1) / iw;
    const ComplexInterval e0 = exp(ComplexInterval(RealInterval(0), h0) * omega);
    const ComplexInterval e1 = exp(ComplexInterval(RealInterval(0), h1) * omega);
    RealInterval p0(1), p1(1);
    ComplexInterval in = (e1 - e0) * inv;
    ComplexInterval sum = c[0] * in;
    for (std::size_t n = 1; n < c.size(); ++n) {
        p0 *= h0;
        p1 *= h1;
        in = (e1 * p1 - e0 * p0 - in * RealInterval(static_cast<long>(n))) * inv;
        sum += c[n] * in;
    }
    return sum;
}

// Same sum with e^{i omega h} replaced by its Taylor polynomial, for small
// |omega| max|h|. `trunc` receives the bound on |e^{i omega h} - Taylor|.
ComplexInterval oscillatory_series(const std::vector<ComplexInterval>& c, const ComplexInterval& omega,
                                   const RealInterval& h0, const RealInterval& h1, const RealInterval& m,
                                   RealInterval& trunc)
{
    const mpfr_prec_t p = working_precision();
    const RealInterval z = (abs(omega) * m).upper();
    const double zd = z.hi_double();
    const RealInterval target = mul_2si(RealInterval(1), -static_cast<long>(p) - 20);

    // choose J with z^(J+1)/(J+1)! / (1 - z/(J+2)) below target
    long jmax = static_cast<long>(std::ceil(zd)) + 2;
    RealInterval tail;
    {
        RealInterval term(1);
        for (long j = 1; j <= jmax; ++j) {
            term = term * z / RealInterval(j);
        }
        for (;;) {
            const RealInterval next = term * z / RealInterval(jmax + 1);
            const RealInterval q = z / RealInterval(jmax + 2);
            tail = (next / (RealInterval(1) - q)).upper();
            if (tail.certainly_less(target) || jmax > 100000) {
                break;
            }
            term = next;
            ++jmax;
        }
    }
    trunc = tail;

    ComplexInterval sum(0);
    {
        PrecisionScope scope(p + 64);
        const ComplexInterval iw = omega.mul_i();
        std::vector<ComplexInterval> e(static_cast<std::size_t>(jmax) + 1);
        e[0] = ComplexInterval(1);
        for (long j = 1; j <= jmax; ++j) {
            e[static_cast<std::size_t>(j)] = e[static_cast<std::size_t>(j - 1)] * iw / RealInterval(j);
        }
        const std::size_t degree = c.size() - 1 + static_cast<std::size_t>(jmax);
        // D_k = (h1^k - h0^k) / k for k = 1 .. degree + 1
        std::vector<RealInterval> d(degree + 2);
        RealInterval p0(1), p1(1);
        for (std::size_t k = 1; k <= degree + 1; ++k) {
            p0 *= h0;
            p1 *= h1;
            d[k] = (p1 - p0) / RealInterval(static_cast<unsigned long>(k));
        }
        ComplexInterval acc(0);
        for (std::size_t n = 0; n < c.size(); ++n) {
            ComplexInterval inner(0);
            for (std::size_t j = 0; j < e.size(); ++j) {
                inner += e[j] * d[n + j + 1];
            }
            acc += c[n] * inner;
        }
        sum = acc;
    }
    return sum + ComplexInterval(0);
}

} // namespace

ComplexInterval integrate_step(const StepPolynomial& poly, const RealInterval& h0, const RealInterval& h1,
                               RealInterval* error)
{
    const RealInterval m = max(abs(h0), abs(h1)).upper();
    if (mpfr_cmp(m.hi(), poly.radius.hi()) > 0) {
        raise(Errc::RadiusTooLarge, "integration range exceeds the polynomial's radius");
    }
    const RealInterval len = abs(h1 - h0).upper();
    if (len.is_point() && mpfr_zero_p(len.hi())) {
        if (error) {
            *error = RealInterval(0);
        }
        return ComplexInterval(0);
    }
    const RealInterval damp = exp(m * abs(poly.omega.im())).upper();
    const RealInterval ratio = (poly.radius / abs(poly.s0).lower()).upper();
    const RealInterval poly_max = (RealInterval(1) / (RealInterval(1) - ratio)).upper();

    const double zd = abs(poly.omega).lo_double() * m.lo_double();
    ComplexInterval sum;
    RealInterval trunc(0);
    if (zd >= 2.0 * poly.order + 8.0) {
        sum = oscillatory_upward(poly.coeffs, poly.omega, h0, h1);
    } else {
        sum = oscillatory_series(poly.coeffs, poly.omega, h0, h1, m, trunc);
    }
    const RealInterval err = (abs(poly.phihat_s0) * len * (damp * poly.remainder + trunc * poly_max)).upper();
    if (error) {
        *error = err;
    }
    return (poly.phihat_s0 * sum).mul_i().inflate(err);
}

RealInterval tail_anchor_bound(const RealInterval& sigma, const RealInterval& T, const MellinContext& ctx)
{
    const RealInterval l2 = sqr(ctx.lambda);
    const RealInterval pre = exp(mul_2si(l2 * (RealInterval(1) - sqr(T)), -1));
    const RealInterval first = exp(sigma * ctx.log_x) / (T * ctx.log_x);
    const RealInterval second = RealInterval(1) / (l2 * sqr(T) * ctx.x);
    return (pre * (first + second)).upper();
}

RealInterval minus_one_line_bound(const MellinContext& ctx)
{
    const RealInterval two_pi = mul_2si(RealInterval::pi(), 1);
    const RealInterval pre = exp(mul_2si(sqr(ctx.lambda), -1)) / (two_pi * ctx.x * ctx.lambda);
    const RealInterval b = pre * (RealInterval(5) * sqrt(two_pi) + RealInterval(2) / ctx.lambda);
    return RealInterval::hull(RealInterval(0), b.upper());
}

namespace {

struct StepChooser {
    double sigma;
    double log_x;
    double lambda;
    int order;
    double error_density;
    double rel_floor;
    double half_fact; // (N/2)!

    double next_radius(double t) const
    {
        const double s_abs = std::hypot(sigma, t);
        const double log_mag = sigma * log_x + 0.5 * lambda * lambda * (sigma * sigma - t * t) - std::log(s_abs);
        double rho = rel_floor;
        if (error_density > 0.0) {
            rho = std::max(rho, error_density * std::exp(-log_mag));
        }
        rho = std::min(rho, 1e-3);
        const double n = static_cast<double>(order);
        const double r_a = std::sqrt(2.0 * std::pow(rho / 3.0 * half_fact, 2.0 / n)) / lambda;
        const double c_b = std::min(0.5, std::pow(rho / 6.0, 1.0 / n));
        const double r_b = c_b * s_abs / (1.0 + c_b);
        const double r_d = 1.0 / (std::max(t, 1.0) * lambda * lambda);
        return std::max(1e-12, std::min({r_a, r_b, r_d, 0.5 / lambda}));
    }
};

StepChooser make_chooser(double sigma, const MellinContext& ctx, const LineOptions& opt)
{
    double fact = 1.0;
    for (int k = 2; k <= opt.order / 2; ++k) {
        fact *= k;
    }
    const double floor = std::ldexp(1.0, -static_cast<int>(working_precision()) + 24);
    return StepChooser{sigma, ctx.log_x.mid_double(), ctx.lambda.lo_double(), opt.order, opt.error_density, floor,
                       fact};
}

} // namespace

LineBlock re_phihat_block(double sigma, const std::vector<RealInterval>& heights, double t_bottom, double t_top,
                          const MellinContext& ctx, const LineOptions& opt)
{
    if (!(t_bottom <= t_top)) {
        raise(Errc::ParamViolation, "block bottom above its top");
    }
    const StepChooser chooser = make_chooser(sigma, ctx, opt);
    const RealInterval sig(sigma);

    LineBlock out;
    out.t_bottom = t_bottom;
    out.t_top = t_top;
    out.values.assign(heights.size(), RealInterval(0));
    out.integration_error = RealInterval(0);

    // Integrating straight to an interval height lets the series path blow
    // the height's own width up by roughly e^{|omega| h}. Integrate to a point
    // inside it instead and pay width * sup |phihat| over the interval.
    auto piece_to = [&](const StepPolynomial& poly, double base, const RealInterval& height) {
        const RealInterval mid = height.mid();
        const RealInterval re = integrate_step(poly, RealInterval(0), mid - RealInterval(base)).re();
        if (height.is_point()) {
            return re;
        }
        const RealInterval slope = abs(phihat(ComplexInterval(sig, height), ctx)).upper();
        return re.inflate((height.width() * slope).upper());
    };

    RealInterval value(0); // Re Phihat(sigma + it) - Re Phihat(top)
    double t = t_top;
    std::size_t pending = heights.size(); // heights [0, pending) not yet assigned

    // Attach heights whose midpoint is at least `base` to the step at base.
    auto attach = [&](double base, const RealInterval& base_value, const StepPolynomial* poly_in, double r_step) {
        std::size_t first = pending;
        while (first > 0 && heights[first - 1].mid_double() >= base) {
            --first;
        }
        if (first == pending && poly_in != nullptr) {
            return;
        }
        double reach = r_step;
        for (std::size_t j = first; j < pending; ++j) {
            const RealInterval off = abs(heights[j] - RealInterval(base));
            reach = std::max(reach, off.hi_double());
        }
        StepPolynomial local;
        const StepPolynomial* poly = poly_in;
        const ComplexInterval s0(sig, RealInterval(base));
        if (poly == nullptr || reach > poly->radius.hi_double()) {
            local = build_step_polynomial(s0, RealInterval(reach), opt.order, ctx);
            poly = &local;
        }
        for (std::size_t j = first; j < pending; ++j) {
            out.values[j] = base_value + piece_to(*poly, base, heights[j]);
        }
        pending = first;
    };

    while (t > t_bottom) {
        const double r = chooser.next_radius(t);
        double t_next = t - r;
        if (t_next < t_bottom || t - t_bottom < 1e-9 * std::max(1.0, t)) {
            t_next = t_bottom;
        }
        const double r_eff = t - t_next;
        // the radius must also cover heights hanging off this step
        double reach = r_eff;
        for (std::size_t j = pending; j > 0 && heights[j - 1].mid_double() >= t_next; --j) {
            reach = std::max(reach, abs(heights[j - 1] - RealInterval(t_next)).hi_double());
        }
        const ComplexInterval s0(sig, RealInterval(t_next));
        const StepPolynomial poly = build_step_polynomial(s0, RealInterval(reach), opt.order, ctx);
        RealInterval err;
        const ComplexInterval step = integrate_step(poly, RealInterval(0), RealInterval(t) - RealInterval(t_next), &err);
        value -= step.re();
        out.integration_error += err;
        ++out.steps;
        attach(t_next, value, &poly, reach);
        t = t_next;
    }
    if (pending > 0) {
        // heights at or below the bottom of the block
        std::size_t first = pending;
        double reach = 0.0;
        for (std::size_t j = 0; j < pending; ++j) {
            reach = std::max(reach, abs(heights[j] - RealInterval(t_bottom)).hi_double());
        }
        const ComplexInterval s0(sig, RealInterval(t_bottom));
        const StepPolynomial poly = build_step_polynomial(s0, RealInterval(std::max(reach, 1e-300)), opt.order, ctx);
        for (std::size_t j = 0; j < first; ++j) {
            out.values[j] = value + piece_to(poly, t_bottom, heights[j]);
        }
        pending = 0;
    }
    out.delta = value;
    return out;
}

LinePlan plan_line(const std::vector<RealInterval>& heights, double anchor_T, std::size_t block_size,
                   double floor_height)
{
    if (block_size == 0) {
        block_size = 1;
    }
    LinePlan plan;
    double bottom = floor_height;
    if (!heights.empty()) {
        bottom = std::min(bottom, heights.front().lo_double());
    }
    if (!std::isfinite(bottom)) {
        raise(Errc::ParamViolation, "line needs a finite bottom");
    }
    bottom = std::max(bottom, 0.0);
    const std::size_t n = heights.size();
    std::size_t end = n;
    double top = anchor_T;
    while (end > 0) {
        const std::size_t first = end > block_size ? end - block_size : 0;
        double b = bottom;
        if (first > 0) {
            const double below = heights[first - 1].hi_double();
            const double above = heights[first].lo_double();
            b = below < above ? 0.5 * (below + above) : heights[first].mid_double();
        }
        plan.blocks.push_back({b, top, first, end - first});
        top = b;
        end = first;
    }
    if (plan.blocks.empty() || top > bottom) {
        plan.blocks.push_back({bottom, top, 0, 0});
    }
    return plan;
}

LineResult re_phihat_line(double sigma, const std::vector<RealInterval>& heights, double anchor_T,
                          const MellinContext& ctx, const LineOptions& opt, const BlockRunner& runner)
{
    for (std::size_t j = 0; j < heights.size(); ++j) {
        if (heights[j].lo_double() < 0.0 || heights[j].hi_double() > anchor_T) {
            raise(Errc::ParamViolation, "heights must lie in [0, anchor_T]");
        }
        if (j > 0 && heights[j].mid_double() < heights[j - 1].mid_double()) {
            raise(Errc::ParamViolation, "heights must be ascending");
        }
    }
    LineResult res;
    res.anchor_bound = tail_anchor_bound(RealInterval(sigma), RealInterval(anchor_T), ctx);
    if (res.anchor_bound.hi_double() > opt.anchor_share) {
        raise(Errc::BudgetExceeded, "B(sigma, anchor_T) = " + res.anchor_bound.hi_decimal() +
                                        " exceeds the anchor share; raise anchor_T");
    }
    const LinePlan plan = plan_line(heights, anchor_T, opt.block_size, std::numeric_limits<double>::infinity());
    std::vector<LineBlock> blocks(plan.blocks.size());
    detail::parallel_for(plan.blocks.size(), opt.threads, [&](std::size_t i) {
        const auto& b = plan.blocks[i];
        if (runner) {
            blocks[i] = runner(i, b);
        } else {
            const std::vector<RealInterval> sub(heights.begin() + static_cast<std::ptrdiff_t>(b.first),
                                                heights.begin() + static_cast<std::ptrdiff_t>(b.first + b.count));
            blocks[i] = re_phihat_block(sigma, sub, b.t_bottom, b.t_top, ctx, opt);
        }
    });

    res.values.assign(heights.size(), RealInterval(0));
    res.integration_error = RealInterval(0);
    RealInterval base = RealInterval::symmetric(res.anchor_bound);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = plan.blocks[i];
        for (std::size_t j = 0; j < b.count; ++j) {
            res.values[b.first + j] = base + blocks[i].values[j];
        }
        base += blocks[i].delta;
        res.integration_error += blocks[i].integration_error;
        res.steps += blocks[i].steps;
    }
    return res;
}

RealInterval phihat_at_one(const MellinContext& ctx, double anchor_T, const LineOptions& opt)
{
    const LineResult r = re_phihat_line(1.0, {RealInterval(0)}, anchor_T, ctx, opt);
    return r.values.front();
}

} // namespace anpc
