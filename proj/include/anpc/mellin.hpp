#pragma once

// The smoothing pair
//   phi(t)    = erfc(log(t/x) / (sqrt(2) lambda)) / 2
//   phihat(s) = x^s exp(lambda^2 s^2 / 2) / s
// and the antiderivative Phihat of phihat, normalised so that
// Phihat(sigma + it) + Phihat(sigma - it) -> 0 as t -> infinity. Only the
// real part of Phihat is ever needed; it is obtained by integrating phihat
// downward along a vertical line from a height where it is negligible.

#include <cstddef>
#include <functional>
#include <vector>

#include "anpc/interval.hpp"

namespace anpc {

struct MellinContext {
    RealInterval x;
    RealInterval lambda;
    RealInterval log_x;

    // x > 1 and lambda > 0, else DomainError.
    static MellinContext make(const RealInterval& x, const RealInterval& lambda);
};

RealInterval phi(const RealInterval& t, const MellinContext& ctx);
ComplexInterval phihat(const ComplexInterval& s, const MellinContext& ctx);

// phihat(s0 + ih) from phihat(s0) and the shift identity.
ComplexInterval shift_factorization(const ComplexInterval& s0, const RealInterval& h, const MellinContext& ctx);

// Polynomial in h approximating exp(-lambda^2 h^2 / 2) / (1 + ih/s0) on
// |h| <= radius: the product of the truncated exponential series (through
// h^N) and the truncated geometric series (through h^N).
struct StepPolynomial {
    std::vector<ComplexInterval> coeffs; // coefficient of h^n, n = 0 .. 2N
    ComplexInterval s0;
    ComplexInterval phihat_s0;
    ComplexInterval omega; // s0 lambda^2 + log x
    RealInterval radius;
    RealInterval ea;        // bound for the exponential truncation
    RealInterval eb;        // bound for the geometric truncation
    RealInterval remainder; // bound for |exact - polynomial| on the disc
    int order = 0;          // N
};

RealInterval exp_series_bound(int order, const RealInterval& lambda_h);   // E_A
RealInterval geometric_series_bound(int order, const RealInterval& ratio); // E_B

// RadiusTooLarge unless lambda * radius < 1 and radius < |s0|.
StepPolynomial build_step_polynomial(const ComplexInterval& s0, const RealInterval& radius, int order,
                                     const MellinContext& ctx);

// Encloses the integral of i * phihat(s0 + ih) dh from h0 to h1. The
// endpoints may be intervals; both must lie in [-radius, radius].
// When `error` is given it receives the truncation error that was added.
ComplexInterval integrate_step(const StepPolynomial& poly, const RealInterval& h0, const RealInterval& h1,
                               RealInterval* error = nullptr);

// B(sigma, T): bound for |Re Phihat(sigma + iT)|.
RealInterval tail_anchor_bound(const RealInterval& sigma, const RealInterval& T, const MellinContext& ctx);

struct LineOptions {
    int order = 16;
    // Target absolute integration error per unit height. Zero asks for
    // errors near the working precision.
    double error_density = 0.0;
    // BudgetExceeded when B(sigma, anchor_T) exceeds this.
    double anchor_share = 1e300;
    unsigned threads = 1;
    // Heights per independently processed block.
    std::size_t block_size = 256;
};

// One block of the line: stepping from t_top down to t_bottom. Values are
// relative to Re Phihat(sigma + i t_top).
struct LineBlock {
    double t_bottom = 0.0;
    double t_top = 0.0;
    RealInterval delta;               // Re Phihat(bottom) - Re Phihat(top)
    std::vector<RealInterval> values; // Re Phihat(height) - Re Phihat(top)
    RealInterval integration_error;   // total remainder charged
    std::size_t steps = 0;
};

LineBlock re_phihat_block(double sigma, const std::vector<RealInterval>& heights, double t_bottom, double t_top,
                          const MellinContext& ctx, const LineOptions& opt);

struct LinePlan {
    struct Block {
        double t_bottom;
        double t_top;
        std::size_t first; // index of the first height in the block
        std::size_t count;
    };
    std::vector<Block> blocks; // from the top of the line downward
};

// Deterministic partition of [lowest height, anchor_T] into blocks; depends
// only on the heights and the block size.
LinePlan plan_line(const std::vector<RealInterval>& heights, double anchor_T, std::size_t block_size,
                   double floor_height);

struct LineResult {
    std::vector<RealInterval> values; // Re Phihat(sigma + i height)
    RealInterval anchor_bound;
    RealInterval integration_error;
    std::size_t steps = 0;
};

// Runs a block; used to plug in checkpointing. Returns the block result.
using BlockRunner = std::function<LineBlock(std::size_t index, const LinePlan::Block& block)>;

// heights: ascending, within [0, anchor_T].
LineResult re_phihat_line(double sigma, const std::vector<RealInterval>& heights, double anchor_T,
                          const MellinContext& ctx, const LineOptions& opt = {}, const BlockRunner& runner = {});

// Phihat(1), which is real.
RealInterval phihat_at_one(const MellinContext& ctx, double anchor_T, const LineOptions& opt = {});

// [0, exp(lambda^2/2) / (2 pi x lambda) * (5 sqrt(2 pi) + 2 / lambda)].
RealInterval minus_one_line_bound(const MellinContext& ctx);

} // namespace anpc
