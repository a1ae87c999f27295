#include "collapse/gaussian.hpp"

#include "collapse/datagen.hpp"
#include "collapse/error.hpp"

#include <cmath>
#include <numbers>

namespace collapse {

GaussianParams::GaussianParams(Vector mu, const Matrix& sigma) : mu_(std::move(mu)) {
    if (sigma.rows() != mu_.size() || sigma.cols() != mu_.size())
        throw Error(ErrorCode::DimensionMismatch, "covariance shape does not match mean");
    if (mu_.size() == 0) throw Error(ErrorCode::InvalidArgument, "Gaussian dimension must be positive");
    if (!is_symmetric(sigma)) throw Error(ErrorCode::NonSymmetric, "covariance is not symmetric");
    sigma_ = eigen_clamp(sigma, 0.0);
}

GaussianParams GaussianParams::isotropic(std::size_t dim, double sigma_sq) {
    const auto d = static_cast<Eigen::Index>(dim);
    return {Vector::Zero(d), sigma_sq * Matrix::Identity(d, d)};
}

MomentAccumulator::MomentAccumulator(std::size_t dim)
    : mean_(Vector::Zero(static_cast<Eigen::Index>(dim))),
      scatter_(Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))) {}

void MomentAccumulator::add(const Dataset& data, std::size_t first_row) {
    if (data.dim() != static_cast<std::size_t>(mean_.size()))
        throw Error(ErrorCode::DimensionMismatch, "rows do not match accumulator dimension");
    if (first_row >= data.size()) return;
    const auto all = data.matrix();
    const auto m = static_cast<Eigen::Index>(data.size() - first_row);
    const auto block = all.bottomRows(m);
    const Vector block_mean = block.colwise().mean().transpose();
    const RowMatrix centered = block.rowwise() - block_mean.transpose();
    Matrix block_scatter = Matrix::Zero(mean_.size(), mean_.size());
    block_scatter.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
    block_scatter = block_scatter.selfadjointView<Eigen::Lower>();

    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(m);
    const double total = na + nb;
    const Vector delta = block_mean - mean_;
    scatter_ += block_scatter + (na * nb / total) * (delta * delta.transpose());
    mean_ += (nb / total) * delta;
    count_ += static_cast<std::size_t>(m);
}

GaussianParams MomentAccumulator::params(CovarianceNormalization normalization) const {
    if (count_ < 2)
        throw Error(ErrorCode::TooFewSamples, "need >= 2 rows to fit a Gaussian, got " + std::to_string(count_));
    const double denom = normalization == CovarianceNormalization::Unbiased
                             ? static_cast<double>(count_ - 1)
                             : static_cast<double>(count_);
    return {mean_, scatter_ / denom};
}

GaussianParams fit_gaussian(const Dataset& data, CovarianceNormalization normalization) {
    if (data.size() < 2)
        throw Error(ErrorCode::TooFewSamples, "need >= 2 rows to fit a Gaussian, got " + std::to_string(data.size()));
    MomentAccumulator acc(data.dim());
    acc.add(data);
    return acc.params(normalization);
}

Dataset sample_gaussian(const GaussianParams& params, std::size_t count, RngStream& rng) {
    if (count == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
    const CovarianceFactor f = cholesky(params.sigma());
    RowMatrix z = standard_normal_block(rng, count, params.dim());
    RowMatrix x = z * f.factor.transpose();
    x.rowwise() += params.mu().transpose();
    return Dataset(x, Origin::synthetic_from(0));
}

double wasserstein2_sq(const GaussianParams& p, const GaussianParams& q, const Matrix& sqrt_sigma_q) {
    if (p.dim() != q.dim())
        throw Error(ErrorCode::DimensionMismatch,
                    "dimensions " + std::to_string(p.dim()) + " and " + std::to_string(q.dim()));
    const Matrix inner = sqrt_sigma_q * p.sigma() * sqrt_sigma_q;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly);
    const double cross = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    const double value = (p.mu() - q.mu()).squaredNorm() + p.sigma().trace() + q.sigma().trace() - 2.0 * cross;
    return std::max(value, 0.0);
}

double wasserstein2_sq(const GaussianParams& p, const GaussianParams& q) {
    return wasserstein2_sq(p, q, psd_sqrt(q.sigma()));
}

namespace {

double log_det_psd(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
    double sum = 0.0;
    for (double v : eig.eigenvalues()) {
        if (v <= 0.0) return -std::numeric_limits<double>::infinity();
        sum += std::log(v);
    }
    return sum;
}

double det_ratio(const Matrix& fit, const Matrix& truth) {
    const double log_ratio = log_det_psd(fit) - log_det_psd(truth);
    if (!(log_ratio >= -700.0)) return 0.0;
    return std::exp(std::min(log_ratio, 700.0));
}

std::vector<Metric> metrics_with(const GaussianParams& fit, const GaussianParams& truth, const Matrix& truth_sqrt) {
    if (fit.dim() != truth.dim()) throw Error(ErrorCode::DimensionMismatch, "fit and truth dimensions differ");
    return {{"squared_error_mean", (fit.mu() - truth.mu()).squaredNorm()},
            {"trace_ratio", fit.sigma().trace() / truth.sigma().trace()},
            {"det_ratio", det_ratio(fit.sigma(), truth.sigma())},
            {"w2_sq", wasserstein2_sq(fit, truth, truth_sqrt)}};
}

}  // namespace

std::vector<Metric> gaussian_metrics(const GaussianParams& fit, const GaussianParams& truth) {
    return metrics_with(fit, truth, psd_sqrt(truth.sigma()));
}

double expected_variance_product(std::size_t n, std::size_t t) {
    if (n == 0) throw Error(ErrorCode::InvalidN, "n must be positive");
    const double nd = static_cast<double>(n);
    double product = 1.0;
    for (std::size_t k = 1; k <= t; ++k) {
        const double kd = static_cast<double>(k);
        product *= 1.0 - 1.0 / (nd * kd * kd);
    }
    return product;
}

double expected_unbiased_variance_product(std::size_t n, std::size_t t) {
    if (n < 2) throw Error(ErrorCode::InvalidN, "n must be >= 2");
    const double nd = static_cast<double>(n);
    double product = 1.0;
    for (std::size_t k = 2; k <= t; ++k) {
        const double kd = static_cast<double>(k);
        product *= 1.0 - 1.0 / (kd * (nd * kd - 1.0));
    }
    return product;
}

Theorem1Limits theorem1_limits(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidN, "n must be positive");
    const double x = std::numbers::pi / std::sqrt(static_cast<double>(n));
    const double ratio = std::sin(x) / x;
    return {ratio, 1.0 - ratio};
}

GaussianAdapter::GaussianAdapter(GaussianParams truth, CovarianceNormalization normalization)
    : truth_(std::move(truth)), truth_sqrt_(psd_sqrt(truth_.sigma())), normalization_(normalization) {}

GaussianAdapter::Model GaussianAdapter::fit(const Dataset& data, std::size_t) {
    return fit_gaussian(data, normalization_);
}

GaussianAdapter::Model GaussianAdapter::fit_appended(const Dataset& pool, std::size_t first_new, std::size_t) {
    if (first_new == 0 || !pool_moments_) pool_moments_.emplace(pool.dim());
    pool_moments_->add(pool, first_new);
    return pool_moments_->params(normalization_);
}

Dataset GaussianAdapter::sample(const Model& model, std::size_t count, RngStream& rng) {
    return sample_gaussian(model, count, rng);
}

std::vector<Metric> GaussianAdapter::evaluate(const Model& model, const Dataset&, std::size_t) {
    return metrics_with(model, truth_, truth_sqrt_);
}

MetricSeries run_gaussian_setting(const LoopConfig& config, std::size_t dim, double sigma0_sq,
                                  const RngStream& rng, CovarianceNormalization normalization) {
    const GaussianParams truth = GaussianParams::isotropic(dim, sigma0_sq);
    RngStream real_rng = rng.split("real");
    RngStream test_rng = rng.split("test");
    const Dataset real = generate_gaussian_real(truth.mu(), sigma0_sq, config.n_per_iteration, real_rng);
    const Dataset test = generate_gaussian_real(truth.mu(), sigma0_sq, 2, test_rng);
    GaussianAdapter adapter(truth, normalization);
    return run_loop(config, adapter, real, test, rng.split("loop"));
}

}  // namespace collapse
