#pragma once

#include "collapse/dataset.hpp"
#include "collapse/engine.hpp"
#include "collapse/linalg.hpp"
#include "collapse/metric_series.hpp"
#include "collapse/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace collapse {

/// Denominator of the covariance estimate: N − 1 (Unbiased) or N.
enum class CovarianceNormalization { Unbiased, MaximumLikelihood };

/// Mean vector and covariance of a multivariate normal. The covariance is
/// symmetrized and clamped to PSD on construction.
class GaussianParams {
public:
    GaussianParams(Vector mu, const Matrix& sigma);

    /// N(0, sigma_sq·I_d).
    static GaussianParams isotropic(std::size_t dim, double sigma_sq);

    const Vector& mu() const noexcept { return mu_; }
    const Matrix& sigma() const noexcept { return sigma_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(mu_.size()); }

private:
    Vector mu_;
    Matrix sigma_;
};

/// Row mean and covariance of every row in `data`. Throws TooFewSamples for
/// fewer than two rows.
GaussianParams fit_gaussian(const Dataset& data,
                            CovarianceNormalization normalization = CovarianceNormalization::Unbiased);

/// Running count/mean/scatter; merging blocks gives the same estimate as one
/// pass over the concatenated rows.
class MomentAccumulator {
public:
    explicit MomentAccumulator(std::size_t dim);

    void add(const Dataset& data, std::size_t first_row = 0);
    std::size_t count() const noexcept { return count_; }
    GaussianParams params(CovarianceNormalization normalization) const;

private:
    std::size_t count_ = 0;
    Vector mean_;
    Matrix scatter_;
};

/// count rows of mu + F·z where F·Fᵀ = sigma.
Dataset sample_gaussian(const GaussianParams& params, std::size_t count, RngStream& rng);

/// Squared 2-Wasserstein distance between two Gaussians.
double wasserstein2_sq(const GaussianParams& p, const GaussianParams& q);
/// Same, with q's covariance square root precomputed.
double wasserstein2_sq(const GaussianParams& p, const GaussianParams& q, const Matrix& sqrt_sigma_q);

/// squared_error_mean, trace_ratio, det_ratio, w2_sq (in that order).
std::vector<Metric> gaussian_metrics(const GaussianParams& fit, const GaussianParams& truth);

/// ∏_{k=1}^{t} (1 − 1/(n k²)): E[σ_t²]/σ₀² for the 1-D Accumulate loop with
/// the maximum-likelihood variance. n = 1 yields 0 for t ≥ 1; n = 0 throws InvalidN.
double expected_variance_product(std::size_t n, std::size_t t);

/// ∏_{k=2}^{t} (1 − 1/(k(nk − 1))): the same expectation when both fitting
/// and sampling use the unbiased variance. Requires n ≥ 2.
double expected_unbiased_variance_product(std::size_t n, std::size_t t);

struct Theorem1Limits {
    double variance_ratio;
    double mean_sq_error_ratio;
};

/// t → ∞ limits of E[σ_t²]/σ₀² and E[(μ_t − μ₀)²]/σ₀²: sinc(π/√n) and its complement.
Theorem1Limits theorem1_limits(std::size_t n);

/// Gaussian task-setting for `run_loop`: fits N(μ̂, Σ̂) and reports the
/// collapse metrics against the ground truth.
class GaussianAdapter {
public:
    using Model = GaussianParams;

    explicit GaussianAdapter(GaussianParams truth,
                             CovarianceNormalization normalization = CovarianceNormalization::Unbiased);

    std::string task_name() const { return "gaussians"; }
    Model fit(const Dataset& data, std::size_t iteration);
    Model fit_appended(const Dataset& pool, std::size_t first_new, std::size_t iteration);
    Dataset sample(const Model& model, std::size_t count, RngStream& rng);
    std::vector<Metric> evaluate(const Model& model, const Dataset& test, std::size_t iteration);

private:
    GaussianParams truth_;
    Matrix truth_sqrt_;
    CovarianceNormalization normalization_;
    std::optional<MomentAccumulator> pool_moments_;
};

/// One full run: n real points from N(0, σ₀²·I_d), then the loop.
MetricSeries run_gaussian_setting(const LoopConfig& config, std::size_t dim, double sigma0_sq,
                                  const RngStream& rng,
                                  CovarianceNormalization normalization = CovarianceNormalization::Unbiased);

}  // namespace collapse
