#pragma once

#include "collapse/datagen.hpp"
#include "collapse/dataset.hpp"
#include "collapse/engine.hpp"
#include "collapse/linreg_task.hpp"
#include "collapse/metric_series.hpp"
#include "collapse/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace collapse {

struct LinRegModel {
    Vector w_hat;
};

/// Minimum-norm least-squares solution of X·w ≈ y.
/// Throws DimensionMismatch if |y| differs from the row count.
LinRegModel fit_ols(const Dataset& x, const Vector& y);

/// X·w_hat + N(0, sigma_sq) per row.
Vector synth_labels(const LinRegModel& model, const Dataset& x, double sigma_sq, RngStream& rng);

/// ‖w_hat − w*‖²: excess risk under isotropic standard-normal covariates.
double linreg_test_error(const LinRegModel& model, const LinRegTask& task);

// Inside the loop a labelled example is one Dataset row of length d + 1 with
// the label in the last column.
Dataset pack_regression(const Dataset& covariates, const Vector& labels);
RegressionData unpack_regression(const Dataset& rows);

class LinRegAdapter {
public:
    using Model = LinRegModel;

    explicit LinRegAdapter(LinRegTask task);

    std::string task_name() const { return "linear_regressions"; }
    Model fit(const Dataset& rows, std::size_t iteration);
    /// Accumulate fast path: running XᵀX and Xᵀy, solved by pseudo-inverse.
    Model fit_appended(const Dataset& pool, std::size_t first_new, std::size_t iteration);
    /// Fresh N(0, I) covariates labelled by the model.
    Dataset sample(const Model& model, std::size_t count, RngStream& rng);
    /// test_error.
    std::vector<Metric> evaluate(const Model& model, const Dataset& test, std::size_t iteration);

private:
    LinRegTask task_;
    std::optional<Matrix> gram_;
    std::optional<Vector> moment_;
};

/// n real labelled examples, then the loop. The test metric is closed-form.
MetricSeries run_linreg_setting(const LoopConfig& config, const LinRegTask& task, const RngStream& rng);

}  // namespace collapse
