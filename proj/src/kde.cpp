#include "collapse/kde.hpp"

#include "collapse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace collapse {

namespace {

// Terms more than this far below the largest exponent cannot move the sum.
constexpr double kNegligibleExponent = -60.0;

class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double log_density_with(const KdeModel& model, std::span<const double> x, std::vector<double>& scratch) {
    const Dataset& s = model.support();
    const std::size_t d = s.dim();
    const std::size_t count = s.size();
    const double* rows = s.values().data();
    scratch.resize(count);
    double min_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < count; ++j) {
        const double* r = rows + j * d;
        double d2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = x[k] - r[k];
            d2 += diff * diff;
        }
        scratch[j] = d2;
        min_d2 = std::min(min_d2, d2);
    }
    const double h = model.bandwidth();
    const double inv_two_h2 = 1.0 / (2.0 * h * h);
    double sum = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        const double e = -(scratch[j] - min_d2) * inv_two_h2;
        if (e > kNegligibleExponent) sum += std::exp(e);
    }
    const double dd = static_cast<double>(d);
    return std::log(sum) - min_d2 * inv_two_h2 - std::log(static_cast<double>(count)) -
           0.5 * dd * std::log(2.0 * std::numbers::pi) - dd * std::log(h);
}

}  // namespace

KdeModel::KdeModel(Dataset support, double bandwidth) : support_(std::move(support)), bandwidth_(bandwidth) {
    if (support_.empty()) throw Error(ErrorCode::InvalidArgument, "KDE support is empty");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw Error(ErrorCode::InvalidArgument, "KDE bandwidth must be positive and finite");
}

BandwidthSchedule BandwidthSchedule::fixed(double h) {
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "fixed bandwidth must be positive");
    return {true, h};
}

BandwidthSchedule BandwidthSchedule::shrinking(double c) {
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "bandwidth constant must be positive");
    return {false, c};
}

double BandwidthSchedule::at(std::size_t iteration, std::size_t n_per_model) const {
    if (fixed_) return value_;
    if (iteration == 0 || n_per_model == 0)
        throw Error(ErrorCode::InvalidArgument, "shrinking bandwidth needs t >= 1 and n >= 1");
    return value_ * std::pow(static_cast<double>(iteration) * static_cast<double>(n_per_model), -0.2);
}

double kde_log_density(const KdeModel& model, std::span<const double> x) {
    if (x.size() != model.dim())
        throw Error(ErrorCode::DimensionMismatch,
                    "query of length " + std::to_string(x.size()) + " for KDE of dim " + std::to_string(model.dim()));
    std::vector<double> scratch;
    return log_density_with(model, x, scratch);
}

NllResult mean_nll_detail(const KdeModel& model, const Dataset& test) {
    if (test.empty()) throw Error(ErrorCode::InvalidArgument, "test set is empty");
    if (test.dim() != model.dim()) throw Error(ErrorCode::DimensionMismatch, "test and model dimensions differ");
    std::vector<double> scratch;
    NeumaierSum total;
    bool diverged = false;
    for (std::size_t i = 0; i < test.size(); ++i) {
        double lp = log_density_with(model, test.row(i), scratch);
        if (lp < kLogDensityFloor) {
            lp = kLogDensityFloor;
            diverged = true;
        }
        total.add(-lp);
    }
    return {total.value() / static_cast<double>(test.size()), diverged};
}

double mean_nll(const KdeModel& model, const Dataset& test) { return mean_nll_detail(model, test).value; }

Dataset sample_kde(const KdeModel& model, std::size_t count, RngStream& rng) {
    if (count == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
    const Dataset& s = model.support();
    const std::size_t d = s.dim();
    const double h = model.bandwidth();
    std::vector<double> values(count * d);
    for (std::size_t i = 0; i < count; ++i) {
        const auto src = s.row(static_cast<std::size_t>(rng.uniform_index(s.size())));
        for (std::size_t k = 0; k < d; ++k) values[i * d + k] = src[k] + h * rng.normal();
    }
    return Dataset(d, std::move(values), std::vector<Origin>(count, Origin::synthetic_from(0)));
}

double kde_variance_trace(const KdeModel& model) {
    const auto m = model.support().matrix();
    const double count = static_cast<double>(m.rows());
    const Eigen::RowVectorXd mean = m.colwise().mean();
    const double spread = (m.rowwise() - mean).squaredNorm() / count;
    const double h = model.bandwidth();
    return spread + static_cast<double>(model.dim()) * h * h;
}

double replace_variance_prediction(double var0, double h, std::size_t t) {
    return var0 + static_cast<double>(t) * h * h;
}

double shrinking_variance_bound(double var0, double c, std::size_t n, std::size_t t) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    // Smallest terms first.
    double tail = 0.0;
    for (std::size_t i = t; i >= 1; --i) tail += std::pow(static_cast<double>(i), -1.4);
    return var0 + c * c * std::pow(static_cast<double>(n), -0.4) * tail;
}

KdeAdapter::KdeAdapter(BandwidthSchedule schedule, std::size_t n_per_model,
                       std::optional<std::set<std::size_t>> nll_iterations)
    : schedule_(schedule), n_per_model_(n_per_model), nll_iterations_(std::move(nll_iterations)) {}

KdeAdapter::Model KdeAdapter::fit(const Dataset& data, std::size_t iteration) {
    return {data, schedule_.at(iteration, n_per_model_)};
}

Dataset KdeAdapter::sample(const Model& model, std::size_t count, RngStream& rng) {
    return sample_kde(model, count, rng);
}

std::vector<Metric> KdeAdapter::evaluate(const Model& model, const Dataset& test, std::size_t iteration) {
    std::vector<Metric> out;
    if (!nll_iterations_ || nll_iterations_->contains(iteration)) {
        const NllResult nll = mean_nll_detail(model, test);
        out.push_back({"nll", nll.value});
        out.push_back({"nll_diverged", nll.diverged ? 1.0 : 0.0});
    }
    out.push_back({"empirical_variance_trace", kde_variance_trace(model)});
    return out;
}

MetricSeries run_kde_loop(const LoopConfig& config, const BandwidthSchedule& schedule, const Dataset& real,
                          const Dataset& test, const RngStream& rng, const KdeRunOptions& options) {
    KdeAdapter adapter(schedule, config.n_per_iteration, options.nll_iterations);
    return run_loop(config, adapter, real, test, rng.split("loop"));
}

MetricSeries run_kde_setting(const LoopConfig& config, const BandwidthSchedule& schedule,
                             const ToyDatasetSpec& spec, const RngStream& rng, const KdeRunOptions& options) {
    ToyDatasetSpec train_spec = spec;
    train_spec.n = config.n_per_iteration;
    RngStream data_rng = rng.split("data");
    const TrainTest data = generate_toy_train_test(train_spec, options.test_size, data_rng);
    return run_kde_loop(config, schedule, data.train, data.test, rng, options);
}

}  // namespace collapse
