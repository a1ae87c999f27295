#pragma once

#include "collapse/datagen.hpp"
#include "collapse/dataset.hpp"
#include "collapse/engine.hpp"
#include "collapse/metric_series.hpp"
#include "collapse/rng.hpp"

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace collapse {

/// Per-point log-density floor (the double-precision underflow boundary).
inline constexpr double kLogDensityFloor = -745.0;

/// Isotropic Gaussian-kernel density estimate with a scalar bandwidth.
class KdeModel {
public:
    KdeModel(Dataset support, double bandwidth);

    const Dataset& support() const noexcept { return support_; }
    double bandwidth() const noexcept { return bandwidth_; }
    std::size_t dim() const noexcept { return support_.dim(); }

private:
    Dataset support_;
    double bandwidth_;
};

/// Fixed(h), or Shrinking(c) which evaluates to c·(t·n)^(-1/5) at iteration t.
class BandwidthSchedule {
public:
    static BandwidthSchedule fixed(double h);
    static BandwidthSchedule shrinking(double c);

    bool is_fixed() const noexcept { return fixed_; }
    double constant() const noexcept { return value_; }
    double at(std::size_t iteration, std::size_t n_per_model) const;

private:
    BandwidthSchedule(bool fixed, double value) : fixed_(fixed), value_(value) {}
    bool fixed_;
    double value_;
};

/// log p̂(x), evaluated with log-sum-exp. Throws DimensionMismatch.
double kde_log_density(const KdeModel& model, std::span<const double> x);

struct NllResult {
    double value = 0.0;
    /// Some test point's log-density fell below kLogDensityFloor and was clipped.
    bool diverged = false;
};

/// −mean log p̂ over `test`, with per-point clipping at kLogDensityFloor and
/// compensated summation.
NllResult mean_nll_detail(const KdeModel& model, const Dataset& test);
double mean_nll(const KdeModel& model, const Dataset& test);

/// Each draw: a uniformly chosen support point plus N(0, h²·I).
Dataset sample_kde(const KdeModel& model, std::size_t count, RngStream& rng);

/// Trace of the covariance of the KDE as a distribution:
/// tr(biased covariance of the support) + d·h².
double kde_variance_trace(const KdeModel& model);

/// var0 + t·h²: variance after t convolutions with a width-h Gaussian kernel.
double replace_variance_prediction(double var0, double h, std::size_t t);

/// var0 + (c²/n^(2/5))·Σ_{i≤t} i^(-7/5).
double shrinking_variance_bound(double var0, double c, std::size_t n, std::size_t t);

struct KdeRunOptions {
    std::size_t test_size = 1000;
    /// Iterations at which the test NLL is computed; nullopt means every one.
    std::optional<std::set<std::size_t>> nll_iterations;
};

class KdeAdapter {
public:
    using Model = KdeModel;

    KdeAdapter(BandwidthSchedule schedule, std::size_t n_per_model,
               std::optional<std::set<std::size_t>> nll_iterations = std::nullopt);

    std::string task_name() const { return "kdes"; }
    Model fit(const Dataset& data, std::size_t iteration);
    Dataset sample(const Model& model, std::size_t count, RngStream& rng);
    /// nll and nll_diverged (when scheduled), empirical_variance_trace always.
    std::vector<Metric> evaluate(const Model& model, const Dataset& test, std::size_t iteration);

private:
    BandwidthSchedule schedule_;
    std::size_t n_per_model_;
    std::optional<std::set<std::size_t>> nll_iterations_;
};

/// Loop over caller-provided real and test data.
MetricSeries run_kde_loop(const LoopConfig& config, const BandwidthSchedule& schedule,
                          const Dataset& real, const Dataset& test, const RngStream& rng,
                          const KdeRunOptions& options = {});

/// Toy-dataset run: spec.n is overridden by config.n_per_iteration, and the
/// test set is an independent draw of options.test_size points.
MetricSeries run_kde_setting(const LoopConfig& config, const BandwidthSchedule& schedule,
                             const ToyDatasetSpec& spec, const RngStream& rng,
                             const KdeRunOptions& options = {});

}  // namespace collapse
