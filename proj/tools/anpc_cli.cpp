// Command-line front end: pi, bounds, verify-zeros, zeros-scan.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "anpc/error.hpp"
#include "anpc/pipeline.hpp"

namespace {

using namespace anpc;

// 0 ok, 2 the interval does not isolate one integer, 3 the error budget
// cannot be met, 4 bad input, 1 anything else.
int exit_code(Errc c)
{
    switch (c) {
    case Errc::Ambiguous:
    case Errc::NoInteger:
        return 2;
    case Errc::Infeasible:
    case Errc::BudgetExceeded:
        return 3;
    case Errc::FormatError:
    case Errc::IoError:
    case Errc::ParamViolation:
    case Errc::MonotonicityViolation:
    case Errc::AccuracyViolation:
    case Errc::InconsistentCount:
    case Errc::CoverageGap:
        return 4;
    default:
        return 1;
    }
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
    if (!out) {
        raise(Errc::IoError, "cannot write " + path);
    }
}

// Flags shared by pi and bounds. Values are kept as text and fed through the
// same parser as the config file, after it, so flags win.
struct RunFlags {
    std::string config;
    std::map<std::string, std::string> given;
    bool timing = false;

    void attach(CLI::App* app)
    {
        app->add_option("--config", config, "key = value file read before the flags");
        for (const char* name : {"x", "lambda", "zeros", "t1", "t2", "window-k", "segment-width", "precision-bits",
                                 "threads", "checkpoint-dir", "report"}) {
            const std::string key = name;
            app->add_option_function<std::string>(
                "--" + key, [this, key](const std::string& v) { given[key] = v; }, help_for(key));
        }
        app->add_flag("--timing", timing, "add the wall time to the report");
    }

    static std::string help_for(const std::string& key)
    {
        static const std::map<std::string, std::string> help = {
            {"x", "target integer"},
            {"lambda", "smoothing width as <mantissa>x2^<exponent>; chosen automatically if absent"},
            {"zeros", "zero file (zeta-zeros v1)"},
            {"t1", "height below which zeros are summed; default between the last two ordinates"},
            {"t2", "height up to which the zeros are on the line; default the file's rh_height"},
            {"window-k", "sieve window half-width in units of lambda"},
            {"segment-width", "odd Taylor segment width for the sieve"},
            {"precision-bits", "working precision"},
            {"threads", "worker threads"},
            {"checkpoint-dir", "directory for sieve and zero-sum checkpoints"},
            {"report", "write the JSON report here"},
        };
        return help.at(key);
    }

    RunConfig build() const
    {
        RunConfig cfg;
        if (!config.empty()) {
            read_config_file(config, cfg);
        }
        for (const auto& [k, v] : given) {
            set_config_value(cfg, k, v);
        }
        if (timing) {
            cfg.timing = true;
        }
        return cfg;
    }
};

int run_pi_command(const RunFlags& flags)
{
    const RunConfig cfg = flags.build();
    const PiResult r = run_pi(cfg);
    const std::string doc = report_json(r, cfg);
    if (!cfg.report_path.empty()) {
        write_text(cfg.report_path, doc);
    }
    std::cout << doc;
    return 0;
}

int run_bounds_command(const RunFlags& flags)
{
    const RunConfig cfg = flags.build();
    PrecisionScope scope(static_cast<mpfr_prec_t>(cfg.precision_bits));
    const RunPlan plan = plan_run(cfg);
    const std::string doc = bounds_json(plan, cfg);
    if (!cfg.report_path.empty()) {
        write_text(cfg.report_path, doc);
    }
    std::cout << doc;
    return 0;
}

int run_verify_command(const std::string& path, const std::string& report)
{
    const ZeroFileCheck check = verify_zero_file(path);
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["path"] = path;
    j["count"] = check.count;
    j["max_height"] = check.max_height;
    j["heights_checked"] = check.heights_checked;
    j["problems"] = check.problems;
    j["ok"] = check.problems.empty();
    const std::string doc = j.dump(2) + "\n";
    if (!report.empty()) {
        write_text(report, doc);
    }
    std::cout << doc;
    return check.problems.empty() ? 0 : 4;
}

int run_scan_command(double t1, double t2, unsigned threads, int bits, const std::string& zeros_out,
                     const std::string& report)
{
    PrecisionScope scope(static_cast<mpfr_prec_t>(bits));
    const ScanResult scan = scan_zeros(t1, t2, threads);
    const ZeroFile file = scan_to_zero_file(scan);
    std::ostringstream zs;
    store_zeros(zs, file);
    if (zeros_out.empty()) {
        std::cout << zs.str();
    } else {
        write_text(zeros_out, zs.str());
    }
    const std::string doc = scan_json(scan);
    if (!report.empty()) {
        write_text(report, doc);
    } else if (!zeros_out.empty()) {
        std::cout << doc;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rigorous prime counting from zeta zeros"};
    app.require_subcommand(1);

    RunFlags pi_flags;
    CLI::App* pi = app.add_subcommand("pi", "compute pi(x) with a full error ledger");
    pi_flags.attach(pi);

    RunFlags bounds_flags;
    CLI::App* bounds = app.add_subcommand("bounds", "print the truncation bounds for a configuration");
    bounds_flags.attach(bounds);

    std::string verify_path, verify_report;
    CLI::App* verify = app.add_subcommand("verify-zeros", "check a zero file against the counting envelope");
    verify->add_option("--zeros", verify_path, "zero file")->required();
    verify->add_option("--report", verify_report, "write the JSON summary here");

    double scan_t1 = 0, scan_t2 = 0;
    unsigned scan_threads = 1;
    int scan_bits = 128;
    std::string scan_out, scan_report;
    CLI::App* scan = app.add_subcommand("zeros-scan", "locate zeros on the critical line between t1 and t2");
    scan->add_option("--t1", scan_t1, "lower ordinate")->required();
    scan->add_option("--t2", scan_t2, "upper ordinate")->required();
    scan->add_option("--threads", scan_threads, "worker threads");
    scan->add_option("--precision-bits", scan_bits, "working precision");
    scan->add_option("--zeros", scan_out, "write the zero file here (default: standard output)");
    scan->add_option("--report", scan_report, "write the JSON budget report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 4;
    }

    try {
        if (*pi) {
            return run_pi_command(pi_flags);
        }
        if (*bounds) {
            return run_bounds_command(bounds_flags);
        }
        if (*verify) {
            return run_verify_command(verify_path, verify_report);
        }
        if (*scan) {
            return run_scan_command(scan_t1, scan_t2, scan_threads, scan_bits, scan_out, scan_report);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == Errc::Ambiguous || e.code() == Errc::NoInteger) {
            std::cerr << "the enclosure does not isolate one integer; raise t1 (more zeros) or precision-bits\n";
        }
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
