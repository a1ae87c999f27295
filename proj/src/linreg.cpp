#include "collapse/linreg.hpp"

#include "collapse/error.hpp"
#include "collapse/linalg.hpp"

#include <cmath>

namespace collapse {

namespace {

Vector pinv_solve(const Matrix& gram, const Vector& rhs) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const Vector& lambda = eig.eigenvalues();
    const double cutoff = std::max(lambda.cwiseAbs().maxCoeff(), 1.0) * static_cast<double>(gram.rows()) *
                          std::numeric_limits<double>::epsilon();
    Vector proj = eig.eigenvectors().transpose() * rhs;
    for (Eigen::Index i = 0; i < proj.size(); ++i) proj[i] = lambda[i] > cutoff ? proj[i] / lambda[i] : 0.0;
    return eig.eigenvectors() * proj;
}

}  // namespace

LinRegModel fit_ols(const Dataset& x, const Vector& y) {
    if (static_cast<std::size_t>(y.size()) != x.size())
        throw Error(ErrorCode::DimensionMismatch, std::to_string(y.size()) + " labels for " +
                                                      std::to_string(x.size()) + " rows");
    if (x.empty()) throw Error(ErrorCode::InvalidArgument, "no rows to fit");
    const Matrix design = x.matrix();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
    return {cod.solve(y)};
}

Vector synth_labels(const LinRegModel& model, const Dataset& x, double sigma_sq, RngStream& rng) {
    if (static_cast<std::size_t>(model.w_hat.size()) != x.dim())
        throw Error(ErrorCode::DimensionMismatch, "weights and covariates differ in dimension");
    Vector y = x.matrix() * model.w_hat;
    if (sigma_sq > 0.0) {
        const double sd = std::sqrt(sigma_sq);
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sd * rng.normal();
    }
    return y;
}

double linreg_test_error(const LinRegModel& model, const LinRegTask& task) {
    if (model.w_hat.size() != task.w_star.size())
        throw Error(ErrorCode::DimensionMismatch, "weights and task differ in dimension");
    return (model.w_hat - task.w_star).squaredNorm();
}

Dataset pack_regression(const Dataset& covariates, const Vector& labels) {
    if (static_cast<std::size_t>(labels.size()) != covariates.size())
        throw Error(ErrorCode::DimensionMismatch, "label count differs from row count");
    const auto d = static_cast<Eigen::Index>(covariates.dim());
    RowMatrix rows(static_cast<Eigen::Index>(covariates.size()), d + 1);
    rows.leftCols(d) = covariates.matrix();
    rows.col(d) = labels;
    std::vector<double> values(rows.data(), rows.data() + rows.size());
    return Dataset(static_cast<std::size_t>(d + 1), std::move(values),
                   std::vector<Origin>(covariates.origins().begin(), covariates.origins().end()));
}

RegressionData unpack_regression(const Dataset& rows) {
    if (rows.dim() < 2) throw Error(ErrorCode::DimensionMismatch, "labelled rows need d + 1 >= 2 columns");
    const auto d = static_cast<Eigen::Index>(rows.dim() - 1);
    const auto m = rows.matrix();
    RowMatrix x = m.leftCols(d);
    std::vector<double> values(x.data(), x.data() + x.size());
    return {Dataset(static_cast<std::size_t>(d), std::move(values),
                    std::vector<Origin>(rows.origins().begin(), rows.origins().end())),
            m.col(d)};
}

LinRegAdapter::LinRegAdapter(LinRegTask task) : task_(std::move(task)) {}

LinRegAdapter::Model LinRegAdapter::fit(const Dataset& rows, std::size_t) {
    const RegressionData data = unpack_regression(rows);
    return fit_ols(data.covariates, data.labels);
}

LinRegAdapter::Model LinRegAdapter::fit_appended(const Dataset& pool, std::size_t first_new, std::size_t) {
    const auto d = static_cast<Eigen::Index>(task_.dim());
    if (pool.dim() != task_.dim() + 1) throw Error(ErrorCode::DimensionMismatch, "pool does not match task");
    if (first_new == 0 || !gram_) {
        gram_ = Matrix::Zero(d, d);
        moment_ = Vector::Zero(d);
        first_new = 0;
    }
    const auto block = pool.matrix().bottomRows(static_cast<Eigen::Index>(pool.size() - first_new));
    const Matrix x = block.leftCols(d);
    gram_->selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    *moment_ += x.transpose() * block.col(d);
    const Matrix full = gram_->selfadjointView<Eigen::Lower>();
    return {pinv_solve(full, *moment_)};
}

Dataset LinRegAdapter::sample(const Model& model, std::size_t count, RngStream& rng) {
    const Dataset x = sample_standard_normal(rng, count, task_.dim());
    return pack_regression(x, synth_labels(model, x, task_.sigma_sq, rng));
}

std::vector<Metric> LinRegAdapter::evaluate(const Model& model, const Dataset&, std::size_t) {
    return {{"test_error", linreg_test_error(model, task_)}};
}

MetricSeries run_linreg_setting(const LoopConfig& config, const LinRegTask& task, const RngStream& rng) {
    RngStream real_rng = rng.split("real");
    const RegressionData real = generate_linreg_data(task, config.n_per_iteration, real_rng);
    // Test error is closed-form; the engine still wants a non-empty, disjoint test set.
    RngStream test_rng = rng.split("test");
    const RegressionData test = generate_linreg_data(task, 1, test_rng);
    LinRegAdapter adapter(task);
    return run_loop(config, adapter, pack_regression(real.covariates, real.labels), pack_regression(test.covariates, test.labels), rng.split("loop"));
}

}  // namespace collapse
