#pragma once

#include "collapse/harness/results.hpp"

#include <optional>
#include <string>
#include <vector>

namespace collapse {

struct PlotOptions {
    std::string metric;
    /// Restrict to one cell_params value; otherwise the first one in sort order is drawn.
    std::optional<std::string> cell_params;
    /// Plot the median (default) or the mean.
    bool use_mean = false;
};

/// SVG line chart: one polyline per setting, iteration on the x-axis.
/// Non-finite points are dropped. Throws InvalidArgument if nothing matches.
std::string render_svg(const std::vector<AggregateRow>& rows, const PlotOptions& options);

}  // namespace collapse
