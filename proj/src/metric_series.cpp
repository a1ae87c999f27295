#include "collapse/metric_series.hpp"

#include "collapse/error.hpp"

#include <cmath>

namespace collapse {

bool MetricSeries::allows_infinity(const std::string& metric) {
    return metric == "nll" || metric == "test_loss" || metric == "squared_error_mean" ||
           metric == "test_error" || metric == "w2_sq";
}

void MetricSeries::add(std::size_t iteration, const std::string& metric, double value) {
    if (std::isnan(value))
        throw Error(ErrorCode::InvalidArgument, "NaN recorded for metric " + metric);
    if (std::isinf(value) && !(value > 0 && allows_infinity(metric)))
        throw Error(ErrorCode::InvalidArgument, "non-finite value recorded for metric " + metric);
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
        if (it->metric == metric) {
            if (it->iteration >= iteration)
                throw Error(ErrorCode::InvalidArgument,
                            "iterations for metric " + metric + " must strictly increase");
            break;
        }
    }
    records_.push_back({iteration, metric, value});
}

std::optional<double> MetricSeries::value(const std::string& metric, std::size_t iteration) const {
    for (const auto& r : records_)
        if (r.iteration == iteration && r.metric == metric) return r.value;
    return std::nullopt;
}

std::vector<std::pair<std::size_t, double>> MetricSeries::trajectory(const std::string& metric) const {
    std::vector<std::pair<std::size_t, double>> out;
    for (const auto& r : records_)
        if (r.metric == metric) out.emplace_back(r.iteration, r.value);
    return out;
}

}  // namespace collapse
