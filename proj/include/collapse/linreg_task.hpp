#pragma once

#include "collapse/dataset.hpp"

namespace collapse {

/// Ground truth for the regression setting: y = xᵀ·w_star + N(0, sigma_sq).
struct LinRegTask {
    Vector w_star;
    double sigma_sq = 1.0;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(w_star.size()); }

    /// w_star = 1/√d in every coordinate, so ‖w_star‖ = 1.
    static LinRegTask isotropic(std::size_t dim, double sigma_sq);
};

}  // namespace collapse
