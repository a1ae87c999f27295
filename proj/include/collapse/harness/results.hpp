#pragma once

#include "collapse/metric_series.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace collapse {

/// One metric value of one seed of one grid cell.
struct SeriesRow {
    std::string task;
    std::string setting;
    std::int64_t seed = 0;
    std::string cell_params;
    std::size_t iteration = 0;
    std::string metric;
    double value = 0.0;

    friend bool operator==(const SeriesRow&, const SeriesRow&) = default;
};

/// Orders by task, setting, cell_params, seed, iteration, metric.
bool series_row_less(const SeriesRow& a, const SeriesRow& b);

std::vector<SeriesRow> flatten(const MetricSeries& series, const std::string& cell_params);

struct AggregateRow {
    std::string task;
    std::string setting;
    std::size_t seed_count = 0;
    std::string cell_params;
    std::size_t iteration = 0;
    std::string metric;
    double mean = 0.0;
    double median = 0.0;
    double q10 = 0.0;
    double q90 = 0.0;
    double stderr_ = 0.0;

    friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

/// Quantile with linear interpolation between order statistics at
/// position q·(n − 1) of the sorted values.
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Groups by (task, setting, cell_params, iteration, metric) across seeds.
/// stderr is the sample standard deviation over √seed_count (0 for one seed).
/// A group containing +inf gets mean and stderr +inf.
std::vector<AggregateRow> aggregate(const std::vector<SeriesRow>& rows);

/// Shortest round-trip text; +inf is written as "inf".
std::string format_real(double value);
/// Inverse of format_real. Throws ParseError.
double parse_real(const std::string& text);

extern const char* const kSeriesHeader;
extern const char* const kAggregateHeader;

// File I/O. Throws IoError when a file cannot be opened, ParseError for
// malformed content. JSON is chosen by a ".json" extension, CSV otherwise.
void write_series(const std::vector<SeriesRow>& rows, const std::filesystem::path& path);
std::vector<SeriesRow> read_series(const std::filesystem::path& path);
/// Throws InvalidArgument for empty rows.
void write_aggregate(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);
std::vector<AggregateRow> read_aggregate(const std::filesystem::path& path);

/// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace collapse
