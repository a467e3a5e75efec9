// bandbench: time the band kernels over bandwidth grids, verify them against
// the oracle, and recover dispatch thresholds empirically.
//
// Exit codes: 0 success, 1 usage error, 2 correctness failure, 3 I/O failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bandblas/bench.hpp"

using namespace bandblas;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitCorrectness = 2;
constexpr int kExitIo = 3;

bool parse_routine(const std::string& name, Routine& out) {
    if (name == "gbmv") out = Routine::gbmv;
    else if (name == "sbmv") out = Routine::sbmv;
    else if (name == "tbmv") out = Routine::tbmv;
    else if (name == "tbsv") out = Routine::tbsv;
    else return false;
    return true;
}

bool parse_precision(const std::string& name, Precision& out) {
    if (name == "f32") out = Precision::f32;
    else if (name == "f64") out = Precision::f64;
    else return false;
    return true;
}

// Comma-separated tokens, each a single bandwidth or an inclusive a:b range.
bool parse_bandwidths(const std::string& text, std::vector<index_t>& out) {
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) return false;
        const auto colon = token.find(':');
        try {
            if (colon == std::string::npos) {
                out.push_back(std::stoll(token));
            } else {
                const index_t lo = std::stoll(token.substr(0, colon));
                const index_t hi = std::stoll(token.substr(colon + 1));
                if (lo > hi) return false;
                for (index_t b = lo; b <= hi; ++b) out.push_back(b);
            }
        } catch (const std::exception&) {
            return false;
        }
    }
    return !out.empty();
}

std::string default_variant(Routine r) {
    switch (r) {
        case Routine::gbmv: return "N";
        case Routine::sbmv: return "lower";
        default: return "LN";
    }
}

// Loads the dispatch config named by --config, the BANDBLAS_DISPATCH_CONFIG
// environment variable, or neither (defaults).  Throws bench::io_error when
// the file cannot be read and config_error on malformed content.
DispatchConfig resolve_config(const std::string& flag_path) {
    std::string path = flag_path;
    if (path.empty()) {
        if (const char* env = std::getenv("BANDBLAS_DISPATCH_CONFIG")) path = env;
    }
    if (path.empty()) return default_config();
    std::ifstream file(path);
    if (!file) throw bench::io_error("cannot read dispatch config '" + path + "'");
    std::stringstream buffer;
    buffer << file.rdbuf();
    if (file.bad()) throw bench::io_error("error reading dispatch config '" + path + "'");
    return load_config(buffer.str());
}

struct BenchFlags {
    std::string routine;
    std::string variant;
    std::string precision = "f64";
    index_t rows = 100000;
    index_t cols = 0;
    std::string bandwidths;
    int reps = 10;
    int warmup = 2;
    std::string impl = "dispatch";
    std::uint64_t seed = 1;
    std::string config_path;
    std::string out_path;
    double stub_clock = 0.0;
};

int do_bench(const BenchFlags& flags) {
    bench::BenchSpec spec;
    if (!parse_routine(flags.routine, spec.routine)) {
        std::cerr << "bandbench: unknown routine '" << flags.routine << "'\n";
        return kExitUsage;
    }
    spec.variant = flags.variant.empty() ? default_variant(spec.routine) : flags.variant;
    if (!parse_precision(flags.precision, spec.precision)) {
        std::cerr << "bandbench: unknown precision '" << flags.precision << "'\n";
        return kExitUsage;
    }
    if (!bench::parse_impl(flags.impl, spec.impl)) {
        std::cerr << "bandbench: unknown impl '" << flags.impl << "'\n";
        return kExitUsage;
    }
    spec.rows = flags.rows;
    spec.cols = flags.cols;
    spec.repetitions = flags.reps;
    spec.warmup = flags.warmup;
    spec.seed = flags.seed;

    std::string bw_text = flags.bandwidths;
    if (bw_text.empty()) bw_text = spec.routine == Routine::tbsv ? "1:51" : "1:32";
    if (!parse_bandwidths(bw_text, spec.bandwidths)) {
        std::cerr << "bandbench: cannot parse bandwidth list '" << bw_text << "'\n";
        return kExitUsage;
    }

    try {
        const DispatchConfig config = resolve_config(flags.config_path);
        spec.lanes = spec.routine == Routine::tbsv ? config.tbsv_lanes : config.mv_lanes;
        bench::ClockFn clock;
        if (flags.stub_clock > 0.0) {
            clock = [t = 0.0, step = flags.stub_clock]() mutable { return t += step; };
        }
        const auto records = bench::run_bench(spec, config, clock);
        if (flags.out_path.empty())
            bench::emit_csv(records, std::cout);
        else
            bench::emit_csv(records, flags.out_path);
        return 0;
    } catch (const argument_error& e) {
        std::cerr << "bandbench: " << e.what() << '\n';
        return kExitUsage;
    } catch (const config_error& e) {
        std::cerr << "bandbench: " << e.what() << '\n';
        return kExitUsage;
    } catch (const bench::correctness_error& e) {
        std::cerr << "bandbench: correctness failure: " << e.what() << '\n';
        return kExitCorrectness;
    } catch (const bench::io_error& e) {
        std::cerr << "bandbench: " << e.what() << '\n';
        return kExitIo;
    }
}

struct TuneFlags {
    std::string routine;  // empty: all
    index_t rows = 50000;
    std::string bandwidths;
    int reps = 3;
    int warmup = 1;
    std::uint64_t seed = 1;
    std::string out_path;
    index_t stub_crossover = -1;
};

int do_autotune(const TuneFlags& flags) {
    std::vector<Routine> routines;
    if (flags.routine.empty()) {
        routines = {Routine::gbmv, Routine::sbmv, Routine::tbmv, Routine::tbsv};
    } else {
        Routine r;
        if (!parse_routine(flags.routine, r)) {
            std::cerr << "bandbench: unknown routine '" << flags.routine << "'\n";
            return kExitUsage;
        }
        routines = {r};
    }
    bench::AutotuneGrid grid;
    grid.rows = flags.rows;
    grid.repetitions = flags.reps;
    grid.warmup = flags.warmup;
    grid.seed = flags.seed;
    if (!flags.bandwidths.empty() && !parse_bandwidths(flags.bandwidths, grid.bandwidths)) {
        std::cerr << "bandbench: cannot parse bandwidth list '" << flags.bandwidths << "'\n";
        return kExitUsage;
    }
    bench::MeasureFn measure;
    if (flags.stub_crossover >= 0) {
        measure = [cross = flags.stub_crossover](const bench::TunePoint& p) {
            if (p.impl == Impl::baseline) return 1.0;
            return p.bandwidth <= cross ? 0.5 : 2.0;
        };
    }
    try {
        const auto result = bench::autotune(routines, grid, measure);
        for (const auto& w : result.warnings) std::cerr << "bandbench: warning: " << w << '\n';
        const std::string text = serialize_config(result.config);
        if (flags.out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream file(flags.out_path);
            if (!(file << text) || !(file.flush())) {
                std::cerr << "bandbench: cannot write '" << flags.out_path << "'\n";
                return kExitIo;
            }
        }
        return 0;
    } catch (const argument_error& e) {
        std::cerr << "bandbench: " << e.what() << '\n';
        return kExitUsage;
    } catch (const bench::correctness_error& e) {
        std::cerr << "bandbench: correctness failure: " << e.what() << '\n';
        return kExitCorrectness;
    } catch (const bench::io_error& e) {
        std::cerr << "bandbench: " << e.what() << '\n';
        return kExitIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"band kernel benchmark, verification, and tuning harness"};
    app.require_subcommand(1);

    BenchFlags bf;
    auto* bench_cmd =
        app.add_subcommand("bench", "time kernels over a bandwidth grid and emit CSV");
    bench_cmd->add_option("--routine", bf.routine, "gbmv, sbmv, tbmv, or tbsv")->required();
    bench_cmd->add_option("--variant", bf.variant,
                          "N/T, lower/upper, or LN/LT/UN/UT (default per routine)");
    bench_cmd->add_option("--precision", bf.precision, "f32 or f64 (default f64)");
    bench_cmd->add_option("--rows", bf.rows, "matrix rows (default 100000)");
    bench_cmd->add_option("--cols", bf.cols, "matrix columns (gbmv only; default rows)");
    bench_cmd->add_option("--bandwidths", bf.bandwidths,
                          "comma list or a:b range (default 1:32, tbsv 1:51)");
    bench_cmd->add_option("--reps", bf.reps, "timed repetitions per cell, >= 3 (default 10)");
    bench_cmd->add_option("--warmup", bf.warmup, "discarded warmup runs per cell (default 2)");
    bench_cmd->add_option("--impl", bf.impl, "baseline, optimized, or dispatch (default)");
    bench_cmd->add_option("--seed", bf.seed, "input generator seed (default 1)");
    bench_cmd->add_option("--config", bf.config_path,
                          "dispatch config file (default $BANDBLAS_DISPATCH_CONFIG)");
    bench_cmd->add_option("--out", bf.out_path, "CSV destination (default stdout)");
    bench_cmd->add_option("--stub-clock", bf.stub_clock)->group("");

    TuneFlags tf;
    auto* tune_cmd = app.add_subcommand(
        "autotune", "measure baseline/optimized crossovers and print a dispatch config");
    tune_cmd->add_option("--routine", tf.routine, "restrict to one routine (default all)");
    tune_cmd->add_option("--rows", tf.rows, "matrix rows per measurement (default 50000)");
    tune_cmd->add_option("--bandwidths", tf.bandwidths,
                         "comma list or a:b range (default 1:32, tbsv 1:51)");
    tune_cmd->add_option("--reps", tf.reps, "timed repetitions per point (default 3)");
    tune_cmd->add_option("--warmup", tf.warmup, "warmup runs per point (default 1)");
    tune_cmd->add_option("--seed", tf.seed, "input generator seed (default 1)");
    tune_cmd->add_option("--out", tf.out_path, "config destination (default stdout)");
    tune_cmd->add_option("--stub-crossover", tf.stub_crossover)->group("");

    std::uint64_t verify_seed = 1;
    bool inject_fault = false;
    auto* verify_cmd =
        app.add_subcommand("verify", "sweep every kernel against the oracle; exit 2 on mismatch");
    verify_cmd->add_option("--seed", verify_seed, "input generator seed (default 1)");
    verify_cmd->add_flag("--inject-fault", inject_fault)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (bench_cmd->parsed()) return do_bench(bf);
    if (tune_cmd->parsed()) return do_autotune(tf);
    return bench::run_verify(verify_seed, inject_fault, std::cout);
}
