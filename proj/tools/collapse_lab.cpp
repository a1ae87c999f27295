#include "collapse/error.hpp"
#include "collapse/harness/config.hpp"
#include "collapse/harness/plot.hpp"
#include "collapse/harness/results.hpp"
#include "collapse/harness/sweep.hpp"
#include "collapse/validation.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace collapse;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::IoError: return kIoError;
        case ErrorCode::ParseError:
        case ErrorCode::UnknownKey:
        case ErrorCode::EmptyGrid:
        case ErrorCode::InvalidArgument:
        case ErrorCode::UnknownDataset:
        case ErrorCode::PoolExhausted: return kConfigError;
        default: return kValidationFailure;
    }
}

std::size_t threads_from_env(std::size_t fallback) {
    const char* env = std::getenv("COLLAPSE_LAB_THREADS");
    if (!env || !*env) return fallback;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw Error(ErrorCode::InvalidArgument, "COLLAPSE_LAB_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
}

fs::path find_series(const fs::path& dir) {
    if (fs::is_regular_file(dir)) return dir;
    for (const char* name : {"series.csv", "series.json"})
        if (fs::exists(dir / name)) return dir / name;
    throw Error(ErrorCode::IoError, "no series.csv or series.json in " + dir.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-consuming training loop simulations"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format = "csv";
    std::size_t parallelism = 1;
    bool resume = false;
    auto* run = app.add_subcommand("run", "Execute a parameter sweep");
    run->add_option("--config", config_path, "Sweep file")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--format", format, "Merged series format")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--parallelism", parallelism, "Worker threads (COLLAPSE_LAB_THREADS overrides)")
        ->check(CLI::PositiveNumber);
    run->add_flag("--resume", resume, "Skip cells whose output already exists");

    std::string agg_in, agg_out;
    auto* agg = app.add_subcommand("aggregate", "Summarize per-seed series across seeds");
    agg->add_option("--in", agg_in, "Run directory or series file")->required();
    agg->add_option("--out", agg_out, "Aggregate file (.csv or .json)")->required();

    std::string plot_in, plot_metric, plot_out, plot_cell;
    bool plot_mean = false;
    auto* plot = app.add_subcommand("plot", "Draw one metric as an SVG line chart");
    plot->add_option("--in", plot_in, "Aggregate file")->required();
    plot->add_option("--metric", plot_metric, "Metric name")->required();
    plot->add_option("--out", plot_out, "SVG file")->required();
    plot->add_option("--cell", plot_cell, "cell_params value to draw");
    plot->add_flag("--mean", plot_mean, "Plot the mean instead of the median");

    std::string check;
    auto* oracle = app.add_subcommand("oracle", "Run a closed-form validation suite");
    oracle->add_option("--check", check, "Suite name")->required()->check(CLI::IsMember(oracle_suite_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) {
            const SweepConfig config = load_config(config_path);
            SweepOptions options;
            options.out = out_dir;
            options.format = format;
            options.parallelism = threads_from_env(parallelism);
            options.resume = resume;
            options.log = [](std::string_view line) { std::cerr << line << '\n'; };
            const SweepSummary s = execute_sweep(config, options);
            std::cout << s.series_path.string() << '\n';
            return s.failed == 0 ? kOk : kValidationFailure;
        }
        if (*agg) {
            const auto rows = aggregate(read_series(find_series(agg_in)));
            write_aggregate(rows, agg_out);
            std::cout << rows.size() << " rows -> " << agg_out << '\n';
            return kOk;
        }
        if (*plot) {
            PlotOptions options;
            options.metric = plot_metric;
            if (!plot_cell.empty()) options.cell_params = plot_cell;
            options.use_mean = plot_mean;
            write_file_atomic(plot_out, render_svg(read_aggregate(plot_in), options));
            return kOk;
        }
        if (*oracle) {
            bool ok = true;
            for (const auto& c : run_oracle_suite(check)) {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
                ok = ok && c.passed;
            }
            return ok ? kOk : kValidationFailure;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
    return kOk;
}
