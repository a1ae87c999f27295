#include "collapse/harness/sweep.hpp"

#include "collapse/error.hpp"
#include "collapse/gaussian.hpp"
#include "collapse/harness/results.hpp"
#include "collapse/kde.hpp"
#include "collapse/linreg.hpp"
#include "collapse/mixture.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

namespace collapse {

namespace fs = std::filesystem;

namespace {

LoopConfig loop_config(const Cell& cell) {
    const auto n = static_cast<std::size_t>(cell.get_int("num_samples_per_iteration", 0));
    const WorkflowKind kind = parse_workflow_kind(cell.get_string("setting", ""));
    Workflow workflow{kind, std::nullopt};
    if (kind == WorkflowKind::AccumulateSubsample)
        workflow.subsample_size = static_cast<std::size_t>(cell.get_int("subsample_size", static_cast<std::int64_t>(n)));
    return {workflow, n, static_cast<std::size_t>(cell.get_int("num_iterations", 0)), cell.seed()};
}

MetricSeries run_kde_cell(const Cell& cell, const RngStream& rng) {
    const LoopConfig cfg = loop_config(cell);
    ToyDatasetSpec spec = ToyDatasetSpec::defaults(parse_toy_dataset(cell.get_string("data_config.dataset_name", "")),
                                                   cfg.n_per_iteration);
    spec.noise = cell.get_real("data_config.dataset_kwargs.noise", spec.noise);
    if (auto* blobs = std::get_if<BlobsOptions>(&spec.extra)) {
        blobs->n_features = static_cast<std::size_t>(
            cell.get_int("data_config.dataset_kwargs.n_features", static_cast<std::int64_t>(blobs->n_features)));
        blobs->centers = static_cast<std::size_t>(
            cell.get_int("data_config.dataset_kwargs.centers", static_cast<std::int64_t>(blobs->centers)));
    } else if (cell.has("data_config.dataset_kwargs.n_features") || cell.has("data_config.dataset_kwargs.centers")) {
        throw Error(ErrorCode::InvalidArgument, "n_features/centers apply to blobs only");
    }
    if (auto* circles = std::get_if<CirclesOptions>(&spec.extra)) {
        circles->factor = cell.get_real("data_config.dataset_kwargs.factor", circles->factor);
    } else if (cell.has("data_config.dataset_kwargs.factor")) {
        throw Error(ErrorCode::InvalidArgument, "factor applies to circles only");
    }
    const double h = cell.get_real("kernel_bandwidth", 0.0);
    const BandwidthSchedule schedule = cell.get_string("bandwidth_schedule", "fixed") == "shrinking"
                                           ? BandwidthSchedule::shrinking(h)
                                           : BandwidthSchedule::fixed(h);
    KdeRunOptions options;
    options.test_size = static_cast<std::size_t>(cell.get_int("test_size", 1000));
    if (cell.has("nll_stride")) {
        const auto stride = static_cast<std::size_t>(cell.get_int("nll_stride", 1));
        std::set<std::size_t> its{1, cfg.num_iterations};
        for (std::size_t t = stride; t <= cfg.num_iterations; t += stride) its.insert(t);
        options.nll_iterations = std::move(its);
    }
    return run_kde_setting(cfg, schedule, spec, rng, options);
}

MetricSeries run_mixture_cell(const Cell& cell, const RngStream& rng) {
    MixtureTruth truth;
    truth.setting = parse_mixture_setting(cell.get_string("mixture_setting", "gaussian"));
    truth.data_dim = static_cast<std::size_t>(cell.get_int("data_dim", 1));
    truth.sigma_sq = cell.get_real("sigma_squared", 1.0);
    truth.source_size = static_cast<std::size_t>(cell.get_int("source_size", 100));
    truth.test_size = static_cast<std::size_t>(cell.get_int("test_size", 10000));
    const auto n_real = static_cast<std::size_t>(cell.get_int("n_real", 0));
    const auto n_syn = static_cast<std::size_t>(cell.get_int("n_syn", 0));
    const MixtureSeed pools(truth, n_real, n_syn, rng);
    MetricSeries series("mixture", std::string(to_string(truth.setting)), cell.seed());
    series.add(0, "test_loss", pools.loss(n_real, n_syn));
    return series;
}

}  // namespace

RngStream cell_stream(const Cell& cell) {
    std::string key;
    if (cell.task == SweepTask::Mixture) {
        Cell shared = cell;
        shared.params.erase("n_real");
        shared.params.erase("n_syn");
        key = shared.canonical();
    } else {
        key = cell.canonical();
    }
    return RngStream(static_cast<std::uint64_t>(cell.seed()), stable_hash(key));
}

MetricSeries run_cell(const Cell& cell) {
    const RngStream rng = cell_stream(cell);
    switch (cell.task) {
        case SweepTask::Gaussians: {
            const auto norm = cell.get_string("covariance_normalization", "unbiased") == "maximum_likelihood"
                                  ? CovarianceNormalization::MaximumLikelihood
                                  : CovarianceNormalization::Unbiased;
            return run_gaussian_setting(loop_config(cell), static_cast<std::size_t>(cell.get_int("data_dim", 1)),
                                        cell.get_real("sigma_squared", 1.0), rng, norm);
        }
        case SweepTask::Kdes:
            return run_kde_cell(cell, rng);
        case SweepTask::LinearRegressions:
            return run_linreg_setting(loop_config(cell),
                                      LinRegTask::isotropic(static_cast<std::size_t>(cell.get_int("data_dim", 1)),
                                                            cell.get_real("sigma_squared", 1.0)),
                                      rng);
        case SweepTask::Mixture:
            return run_mixture_cell(cell, rng);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown task");
}

std::string cell_file_stem(const Cell& cell) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stable_hash(cell.canonical())));
    return buf;
}

SweepSummary execute_sweep(const SweepConfig& config, const SweepOptions& options) {
    if (options.format != "csv" && options.format != "json")
        throw Error(ErrorCode::InvalidArgument, "format must be csv or json");
    const fs::path cells_dir = options.out / "cells";
    std::error_code ec;
    fs::create_directories(cells_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + cells_dir.string() + ": " + ec.message());

    SweepSummary summary;
    summary.total = config.cells.size();
    std::vector<const Cell*> pending;
    for (const auto& cell : config.cells) {
        const fs::path done = cells_dir / (cell_file_stem(cell) + ".csv");
        fs::remove(cells_dir / (cell_file_stem(cell) + ".error"), ec);
        if (options.resume && fs::exists(done)) {
            ++summary.skipped;
            continue;
        }
        fs::remove(done, ec);
        pending.push_back(&cell);
    }

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failed{0};
    std::mutex log_mutex;
    auto log = [&](const std::string& line) {
        if (!options.log) return;
        std::lock_guard lock(log_mutex);
        options.log(line);
    };
    std::exception_ptr io_failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < pending.size(); i = next++) {
            const Cell& cell = *pending[i];
            const std::string stem = cell_file_stem(cell);
            try {
                std::vector<SeriesRow> rows = flatten(run_cell(cell), cell.cell_params());
                std::sort(rows.begin(), rows.end(), series_row_less);
                write_series(rows, cells_dir / (stem + ".csv"));
            } catch (const Error& e) {
                if (e.code() == ErrorCode::IoError) {
                    std::lock_guard lock(log_mutex);
                    if (!io_failure) io_failure = std::current_exception();
                    next = pending.size();
                    return;
                }
                ++failed;
                log("cell " + cell.canonical() + " failed: " + e.what());
                try {
                    write_file_atomic(cells_dir / (stem + ".error"), cell.canonical() + "\n" + e.what() + "\n");
                } catch (...) {
                }
            } catch (const std::exception& e) {
                ++failed;
                log("cell " + cell.canonical() + " failed: " + e.what());
                try {
                    write_file_atomic(cells_dir / (stem + ".error"), cell.canonical() + "\n" + e.what() + "\n");
                } catch (...) {
                }
            }
        }
    };
    {
        const std::size_t threads = std::max<std::size_t>(1, std::min(options.parallelism, pending.size()));
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    if (io_failure) std::rethrow_exception(io_failure);
    summary.failed = failed;
    summary.computed = pending.size() - summary.failed;

    // Merge in a fixed order, independent of thread timing.
    std::vector<SeriesRow> merged;
    std::vector<std::string> errors;
    for (const auto& cell : config.cells) {
        const fs::path done = cells_dir / (cell_file_stem(cell) + ".csv");
        if (fs::exists(done)) {
            auto rows = read_series(done);
            merged.insert(merged.end(), rows.begin(), rows.end());
        } else {
            errors.push_back(cell.canonical());
        }
    }
    std::sort(merged.begin(), merged.end(), series_row_less);
    summary.series_path = options.out / ("series." + options.format);
    write_series(merged, summary.series_path);
    std::sort(errors.begin(), errors.end());
    std::string error_text;
    for (const auto& e : errors) error_text += e + "\n";
    if (errors.empty())
        fs::remove(options.out / "errors.txt", ec);
    else
        write_file_atomic(options.out / "errors.txt", error_text);
    log("cells: " + std::to_string(summary.total) + " total, " + std::to_string(summary.computed) + " computed, " +
        std::to_string(summary.skipped) + " skipped, " + std::to_string(summary.failed) + " failed");
    return summary;
}

}  // namespace collapse
