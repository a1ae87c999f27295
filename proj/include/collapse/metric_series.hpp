#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace collapse {

struct Metric {
    std::string name;
    double value = 0.0;
};

struct MetricRecord {
    std::size_t iteration = 0;
    std::string metric;
    double value = 0.0;

    friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

/// Per-(setting, seed) trajectory of named scalar metrics.
///
/// NaN is rejected. +inf is accepted only for metrics that may diverge (see
/// `allows_infinity`). Iterations within one metric must strictly increase.
class MetricSeries {
public:
    MetricSeries() = default;
    MetricSeries(std::string task, std::string setting, std::int64_t seed)
        : task_(std::move(task)), setting_(std::move(setting)), seed_(seed) {}

    const std::string& task() const noexcept { return task_; }
    const std::string& setting() const noexcept { return setting_; }
    std::int64_t seed() const noexcept { return seed_; }
    const std::vector<MetricRecord>& records() const noexcept { return records_; }

    void add(std::size_t iteration, const std::string& metric, double value);

    /// Value of `metric` at `iteration`, if recorded.
    std::optional<double> value(const std::string& metric, std::size_t iteration) const;
    /// (iteration, value) pairs for `metric` in insertion order.
    std::vector<std::pair<std::size_t, double>> trajectory(const std::string& metric) const;

    static bool allows_infinity(const std::string& metric);

    friend bool operator==(const MetricSeries&, const MetricSeries&) = default;

private:
    std::string task_;
    std::string setting_;
    std::int64_t seed_ = 0;
    std::vector<MetricRecord> records_;
};

}  // namespace collapse
