#pragma once

#include "collapse/harness/config.hpp"
#include "collapse/metric_series.hpp"
#include "collapse/rng.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace collapse {

/// Stream for a cell: key = seed, stream id = stable_hash(cell.canonical()).
/// Mixture cells hash the canonical string without n_real and n_syn so every
/// cell of one seed draws from the same nested pools.
RngStream cell_stream(const Cell& cell);

/// Runs one grid cell. Throws whatever the task throws.
MetricSeries run_cell(const Cell& cell);

struct SweepOptions {
    std::filesystem::path out;
    /// "csv" or "json": format of the merged series file.
    std::string format = "csv";
    std::size_t parallelism = 1;
    /// Keep finished per-cell files and skip those cells.
    bool resume = false;
    std::function<void(std::string_view)> log;
};

struct SweepSummary {
    std::size_t total = 0;
    std::size_t computed = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
    std::filesystem::path series_path;
};

/// Runs every cell on a fixed pool of `parallelism` threads. Each cell's
/// records go to out/cells/<hash>.csv (write-then-rename); failures go to
/// out/cells/<hash>.error and out/errors.txt. Afterwards the finished cells are
/// merged, sorted, into out/series.<format>. Throws IoError.
SweepSummary execute_sweep(const SweepConfig& config, const SweepOptions& options);

/// Per-cell file stem: 16 hex digits of stable_hash(cell.canonical()).
std::string cell_file_stem(const Cell& cell);

}  // namespace collapse
