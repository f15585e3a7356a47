#pragma once

// The full pi(x) computation: parameter choice, assembly of pi*(x) from the
// zero sum, the smoothed pole term and the sieve window, the error ledger,
// recovery of pi(x), checkpoints and reports.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anpc/interval.hpp"
#include "anpc/mellin.hpp"
#include "anpc/sieve.hpp"
#include "anpc/zeros.hpp"
#include "anpc/zetafft.hpp"

namespace anpc {

// lambda = mantissa * 2^exponent, exactly.
struct Lambda {
    std::int64_t mantissa = 0;
    int exponent = 0;

    // "<mantissa>x2^<exponent>", e.g. "6273445730170391x2^-84". FormatError
    // unless the mantissa is positive.
    static Lambda parse(std::string_view text);
    // Smallest value >= v with a 53-bit mantissa.
    static Lambda round_up(double v);

    RealInterval value() const; // a point interval
    double approx() const;
    std::string to_string() const;
    friend bool operator==(const Lambda&, const Lambda&) = default;
};

// Error allowances; the absolute amounts must add up to less than 1/2.
struct BudgetShares {
    double e1 = 0.12;
    double e2 = 0.01;
    double minus_one_line = 0.02;
    double window_tail = 0.06;
    double sieve_taylor = 0.04;
    double phihat_anchor = 0.01;

    double total() const;
};

struct RunConfig {
    std::int64_t x = 0;
    std::optional<Lambda> lambda;     // chosen automatically when absent
    std::string zeros_path;
    double t1 = 0;                    // 0: halfway between the last two ordinates in the file
    double t2 = 0;                    // 0: the file's rh_height (T1 if that is 0)
    double window_k = 0;              // 0: smallest k meeting the window-tail share
    std::int64_t segment_width = 0;   // 0: widest segments meeting the Taylor share
    int precision_bits = 128;
    unsigned threads = 1;
    std::string checkpoint_dir;       // empty: no checkpoints
    std::string report_path;          // empty: no report file
    bool timing = false;              // add wall_time_s to the report
    BudgetShares shares;

    // ParamViolation for out-of-range values.
    void validate() const;
};

// Reads `key = value` lines (# starts a comment) into cfg. Keys mirror the
// command-line flags without the dashes: x, lambda, zeros, t1, t2, window-k,
// segment-width, precision-bits, threads, checkpoint-dir, report, timing,
// and share-e1, share-e2, share-minus-one-line, share-window-tail,
// share-sieve-taylor, share-phihat-anchor. FormatError for unknown keys or unparsable values.
void read_config(std::istream& in, RunConfig& cfg);
void read_config_file(const std::string& path, RunConfig& cfg);
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

struct ErrorLedger {
    RealInterval e1;             // zeros between T1 and T2
    RealInterval e2;             // zeros above T2
    RealInterval window_tail;    // prime powers outside the sieve window
    RealInterval minus_one_line; // the integral along Re s = -1
    RealInterval phihat_anchor;  // starting values of the line integrations
    RealInterval sieve_taylor;   // Taylor remainders over the sieve segments
    RealInterval line_integration;
    RealInterval rounding_slack; // width of the core enclosure not explained above

    ErrorLedger();
    RealInterval total() const;
    std::vector<std::pair<std::string, RealInterval>> entries() const;
};

struct LambdaChoice {
    Lambda lambda;
    double window_k = 0;
    RealInterval e1;
    RealInterval minus_one_line;
    RealInterval window_tail;
};

// Smallest window half-width k (in units of lambda) whose tail bound is at
// most `share`.
double choose_window_k(std::int64_t x, const MellinContext& ctx, double share);

// Smallest lambda (bisection on log lambda, then rounded up to a 53-bit
// mantissa) with E1 <= e1_share and the -1 line bound <= line_share; both
// fall as lambda grows. The window is then the narrowest with tail <=
// tail_share, or the given window_k. Infeasible when no lambda up to 1/2
// works. n_T1 is the number of zeros below T1.
LambdaChoice choose_lambda(std::int64_t x, double T1, std::size_t n_T1, double e1_share, double line_share,
                           double tail_share, double window_k = 0);
// Budget split 3 : 1 : 2 between E1, the -1 line and the window tail.
LambdaChoice choose_lambda(std::int64_t x, double T1, std::size_t n_T1, double budget);

// Everything fixed before any heavy work.
struct RunPlan {
    std::int64_t x = 0;
    Lambda lambda;
    double T1 = 0;
    double T2 = 0;
    std::size_t n_T1 = 0;
    std::size_t n_T2 = 0; // from the file, or the envelope's lower end above it
    double window_k = 0;
    WindowSpec window;
    ZeroFile zeros;
    ErrorLedger predicted; // e1, e2, window_tail, minus_one_line
};

RunPlan plan_run(const RunConfig& cfg);

struct PiStarResult {
    RealInterval pi_star;
    ErrorLedger ledger;
    RunPlan plan;
    RealInterval phihat_one;
    RealInterval zero_sum;
    RealInterval window_sum;
    std::int64_t window_primes = 0;
    std::size_t segments = 0;
    std::size_t zeros_used = 0;
    double anchor_T = 0;
    std::size_t line_steps = 0;
};

// pi*(x) = Phihat(1) - sum over zeros of 2 Re Phihat(rho) - log 2 + window
// sum, widened by the ledger's e1, e2, window tail and the -1 line bound.
PiStarResult compute_pi_star(const RunConfig& cfg);

// pi*(x) - pi(x), exactly: the sum over m >= 2 of pi(x^(1/m)) / m, less
// 1/2m when x = p^m (x counts with half weight in pi*).
mpq_class prime_power_correction(std::int64_t x);

// pi(x) from an enclosure of pi*(x); NoInteger or Ambiguous when the
// corrected interval does not isolate one integer.
long long recover_pi(const RealInterval& pi_star, std::int64_t x);

struct PiResult {
    PiStarResult star;
    long long pi = 0;
    double wall_seconds = 0;
};

PiResult run_pi(const RunConfig& cfg);

// JSON documents with a fixed field order and no null values.
std::string report_json(const PiResult& result, const RunConfig& cfg);
std::string bounds_json(const RunPlan& plan, const RunConfig& cfg);

// Sieve checkpoint: one "x0 w S0 S1 S2" record per line. Loading skips a
// final line without a newline (a write cut short); any other malformed
// line is a FormatError.
std::vector<SegmentSummary> load_sieve_checkpoint(std::istream& in);
void store_sieve_record(std::ostream& out, const SegmentSummary& s);

// Summaries for the shells, reusing and extending the checkpoint file in
// `dir` when it is not empty.
std::vector<SegmentSummary> sieve_with_checkpoint(const std::vector<SegmentSummary>& shells,
                                                  const std::string& dir, unsigned threads);

struct ZeroFileCheck {
    std::size_t count = 0;
    double max_height = 0;
    std::size_t heights_checked = 0;
    std::vector<std::string> problems; // heights where the count leaves the envelope
};

// Loads the file (format and accuracy checks) and compares its counts with
// the counting envelope between consecutive ordinates.
ZeroFileCheck verify_zero_file(const std::string& path);

struct ScanWindow {
    double t0 = 0;
    double from = 0; // this window reports the zeros in [from, to]
    double to = 0;
    StageBudget budget;
    std::size_t zeros = 0;
};

struct ScanResult {
    double t1 = 0;
    double t2 = 0;
    std::vector<ScanWindow> windows;
    std::vector<RealInterval> zeros;
    std::vector<RealInterval> indeterminate;
};

// Zeros of zeta on the critical line with ordinates in [t1, t2] from a
// chain of grid evaluations centred 24 apart, each reporting the stretch
// within 12 of its centre (a shorter remainder gets its own centred window).
// Runs of cells whose sign stays undecided get one more window centred on
// them; what is still undecided is listed, so a zero may hide only inside an
// indeterminate run.
ScanResult scan_zeros(double t1, double t2, unsigned threads = 1, double target_width = 1e-6);
ZeroFile scan_to_zero_file(const ScanResult& scan, double target_width = 1e-6);
std::string scan_json(const ScanResult& scan);

} // namespace anpc
