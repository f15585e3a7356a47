#pragma once

// Zero ordinates of zeta on the critical line, the counting envelope for
// N(t) and the bounds for the zeros left out of the sum.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "anpc/interval.hpp"
#include "anpc/mellin.hpp"

namespace anpc {

struct ZeroRecord {
    RealInterval ordinate; // decimal value inflated by the file accuracy
    std::size_t index = 0; // 1-based position in the file
    std::string text;      // the decimal as written, for exact re-emission
};

struct ZeroFile {
    std::string abs_err_text = "0";
    std::string rh_height_text = "0";
    RealInterval abs_err;
    RealInterval rh_height;
    std::vector<ZeroRecord> records;

    double max_height() const;
    // Number of records whose ordinate lies certainly below t. FormatError
    // if some ordinate straddles t.
    std::size_t count_below(const RealInterval& t) const;
};

// FormatError, MonotonicityViolation, AccuracyViolation.
ZeroFile load_zeros(std::istream& in);
ZeroFile load_zeros_file(const std::string& path);
void store_zeros(std::ostream& out, const ZeroFile& file);

// Builds a file object from decimal strings (validated as if loaded).
ZeroFile make_zero_file(const std::vector<std::string>& ordinates, const std::string& abs_err,
                        const std::string& rh_height);

struct CountEnvelope {
    RealInterval lower; // main - Q
    RealInterval upper; // main + Q
};

// N(t) lies within (main - Q, main + Q); DomainError for t < 2.
CountEnvelope nt_bound(const RealInterval& t);

// Smallest alpha on the grid 1 + k/1024 with t^alpha >= main(t) + Q(t) for
// every t >= T, certified piecewise up to a crossover beyond which the
// inequality propagates.
double alpha_for(double T);

// B(sigma, T).
RealInterval b_bound(const RealInterval& sigma, const RealInterval& T, const MellinContext& ctx);

struct TruncationBudget {
    double T1 = 0;
    double T2 = 0;
    double alpha_T1 = 2;
    double alpha_T2 = 2;

    // alphas from alpha_for; ParamViolation unless 2 <= T1 <= T2.
    static TruncationBudget make(double T1, double T2);
};

// Bounds for the zeros with |gamma| in [T1, T2] and above T2. The counts
// are checked against the envelope (InconsistentCount).
RealInterval e1_bound(const TruncationBudget& budget, std::size_t n_T1, const MellinContext& ctx);
RealInterval e2_bound(const TruncationBudget& budget, std::size_t n_T2, const MellinContext& ctx);

// Smallest height T >= floor_T (searched in doubles, verified in intervals)
// with B(sigma, T) <= share.
double anchor_height(double sigma, double floor_T, double share, const MellinContext& ctx);

struct ZeroSum {
    RealInterval value; // sum over 0 < gamma <= T1 of 2 Re Phihat(1/2 + i gamma)
    RealInterval anchor_charge;
    RealInterval integration_error;
    std::size_t zeros = 0;
    std::size_t steps = 0;
    double anchor_T = 0;
};

// CoverageGap when the zeros do not reach T1. `anchor_share` bounds the
// total charge 2 n B(1/2, anchor_T).
ZeroSum sum_re_phihat(const std::vector<ZeroRecord>& zeros, double T1, const MellinContext& ctx,
                      double anchor_share, const LineOptions& opt = {}, const BlockRunner& runner = {});

} // namespace anpc
