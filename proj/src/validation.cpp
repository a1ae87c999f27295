#include "collapse/validation.hpp"

#include "collapse/error.hpp"
#include "collapse/gaussian.hpp"
#include "collapse/kde.hpp"
#include "collapse/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <sstream>

namespace collapse {

double tanh_sinh(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    constexpr double t_max = 6.0;
    const double half_pi = 0.5 * std::numbers::pi;
    const double width = b - a;
    auto node = [&](double t) {
        const double u = half_pi * std::sinh(t);
        // Distance to the nearer endpoint, computed without cancellation.
        const double near = width / (1.0 + std::exp(2.0 * std::abs(u)));
        if (near <= 0.0) return 0.0;
        const double x = u < 0 ? a + near : b - near;
        const double cu = std::cosh(u);
        const double weight = width * half_pi * std::cosh(t) / (2.0 * cu * cu);
        if (!(weight > 0.0) || !std::isfinite(weight)) return 0.0;
        const double fx = f(x);
        return std::isfinite(fx) ? fx * weight : 0.0;
    };

    double h = 0.5;
    double sum = node(0.0);
    for (double t = h; t <= t_max; t += h) sum += node(t) + node(-t);
    double estimate = sum * h;
    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        for (double t = h; t <= t_max; t += 2.0 * h) sum += node(t) + node(-t);
        const double next = sum * h;
        const bool settled = std::abs(next - estimate) <= rel_tol * std::abs(next);
        estimate = next;
        if (level >= 3 && settled) break;
    }
    return estimate;
}

double incomplete_beta_by_quadrature(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_norm = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    auto density = [log_norm](double p, double q) {
        return [=](double s) { return std::exp((p - 1.0) * std::log(s) + (q - 1.0) * std::log1p(-s) - log_norm); };
    };
    // Integrate from 0 so the nodes crowd the endpoint that may be singular.
    if (x <= 0.5) return tanh_sinh(density(a, b), 0.0, x);
    return 1.0 - tanh_sinh(density(b, a), 0.0, 1.0 - x);
}

double f_tail_by_quadrature(double f, double d1, double d2) {
    if (f <= 0.0) return 1.0;
    const double log_beta = std::lgamma(0.5 * d1) + std::lgamma(0.5 * d2) - std::lgamma(0.5 * (d1 + d2));
    auto pdf = [&](double x) {
        const double log_num = 0.5 * (d1 * std::log(d1 * x) + d2 * std::log(d2) - (d1 + d2) * std::log(d1 * x + d2));
        return std::exp(log_num - log_beta) / x;
    };
    // x = f + (1 − s)/s maps (0, 1] onto [f, ∞); s → 0 is the far tail.
    auto integrand = [&](double s) { return pdf(f + (1.0 - s) / s) / (s * s); };
    return tanh_sinh(integrand, 0.0, 1.0);
}

namespace {

std::string describe(double got, double want, double tol) {
    std::ostringstream os;
    os.precision(10);
    os << "got " << got << ", expected " << want << " (tol " << tol << ")";
    return os.str();
}

std::string scientific(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

OracleCheck close(const std::string& name, double got, double want, double abs_tol) {
    return {name, std::abs(got - want) <= abs_tol, describe(got, want, abs_tol)};
}

double relative_gap(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

std::vector<OracleCheck> gaussian_suite() {
    std::vector<OracleCheck> out;
    out.push_back(close("product n=10 t=1", expected_variance_product(10, 1), 0.9, 1e-15));
    out.push_back(close("product n=10 t=2", expected_variance_product(10, 2), 0.8775, 1e-15));
    out.push_back(close("product t=0", expected_variance_product(7, 0), 1.0, 0.0));
    const Theorem1Limits four = theorem1_limits(4);
    out.push_back(close("limit n=4", four.variance_ratio, 2.0 / std::numbers::pi, 1e-12));
    out.push_back(close("limits sum to one", four.variance_ratio + four.mean_sq_error_ratio, 1.0, 0.0));
    out.push_back(close("product n=10 t=1e4 vs limit", expected_variance_product(10, 10000),
                        theorem1_limits(10).variance_ratio, 1e-4));

    // Monte Carlo: 1-D Accumulate with the 1/N estimator.
    constexpr std::size_t seeds = 1000;
    constexpr std::size_t horizon = 30;
    constexpr std::size_t n = 10;
    std::vector<double> var_t(seeds);
    std::vector<double> err_t(seeds);
    const RngStream root(20240601, stable_hash("oracle/gaussian"));
    for (std::size_t s = 0; s < seeds; ++s) {
        const LoopConfig cfg{Workflow::accumulate(), n, horizon, static_cast<std::int64_t>(s)};
        const MetricSeries series =
            run_gaussian_setting(cfg, 1, 1.0, root.split(s), CovarianceNormalization::MaximumLikelihood);
        var_t[s] = *series.value("trace_ratio", horizon);
        err_t[s] = *series.value("squared_error_mean", horizon);
    }
    const double want = expected_variance_product(n, horizon);
    const MeanSe v = mean_se(var_t);
    out.push_back({"MC variance at t=30 within 3 SE", std::abs(v.mean - want) <= 3.0 * v.se,
                   describe(v.mean, want, 3.0 * v.se)});
    const MeanSe e = mean_se(err_t);
    out.push_back({"MC mean error at t=30 within 3 SE", std::abs(e.mean - (1.0 - want)) <= 3.0 * e.se,
                   describe(e.mean, 1.0 - want, 3.0 * e.se)});
    return out;
}

std::vector<OracleCheck> kde_suite() {
    std::vector<OracleCheck> out;
    out.push_back(close("replace prediction h=0.5 t=4", replace_variance_prediction(2.0, 0.5, 4), 3.0, 1e-15));
    out.push_back(close("replace prediction h=1 t=9", replace_variance_prediction(1.0, 1.0, 9), 10.0, 1e-15));
    out.push_back(close("shrinking bound c=1 n=1 t=1", shrinking_variance_bound(1.0, 1.0, 1, 1), 2.0, 1e-15));
    {
        // Σ_{t<i≤T} i^(-7/5) lies between the integrals of x^(-7/5) over [t+1, T+1] and [t, T].
        const double t = 1e6, big = 1e7;
        const double gap = shrinking_variance_bound(0.0, 1.0, 1, 10000000) - shrinking_variance_bound(0.0, 1.0, 1, 1000000);
        const double lo = 2.5 * (std::pow(t + 1, -0.4) - std::pow(big + 1, -0.4));
        const double hi = 2.5 * (std::pow(t, -0.4) - std::pow(big, -0.4));
        out.push_back({"shrinking bound tail 1e6..1e7 within integral bounds", gap >= lo && gap <= hi,
                       "gap " + scientific(gap) + " in [" + scientific(lo) + ", " + scientific(hi) + "]"});
    }

    {
        RngStream rng(7, stable_hash("oracle/kde/density"));
        const Dataset support = sample_standard_normal(rng, 50, 1);
        const KdeModel model(support, 0.3);
        const auto m = support.matrix();
        const double lo = m.minCoeff() - 10 * 0.3;
        const double hi = m.maxCoeff() + 10 * 0.3;
        constexpr int nodes = 100000;
        const double step = (hi - lo) / (nodes - 1);
        double total = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double x = lo + step * i;
            const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
            total += w * std::exp(kde_log_density(model, std::span<const double>(&x, 1)));
        }
        out.push_back(close("density integrates to one", total * step, 1.0, 1e-4));
    }

    {
        constexpr std::size_t seeds = 40;
        constexpr std::size_t n = 500;
        constexpr double h = 0.5;
        std::vector<std::vector<double>> traces(2, std::vector<double>(seeds));
        const RngStream root(11, stable_hash("oracle/kde/replace"));
        for (std::size_t s = 0; s < seeds; ++s) {
            const RngStream rng = root.split(s);
            RngStream real_rng = rng.split("real");
            RngStream test_rng = rng.split("test");
            const Dataset real = sample_standard_normal(real_rng, n, 1);
            const Dataset test = sample_standard_normal(test_rng, 10, 1);
            KdeRunOptions opts;
            opts.nll_iterations = std::set<std::size_t>{};
            const MetricSeries series = run_kde_loop({Workflow::replace(), n, 10, static_cast<std::int64_t>(s)},
                                                     BandwidthSchedule::fixed(h), real, test, rng, opts);
            traces[0][s] = *series.value("empirical_variance_trace", 5);
            traces[1][s] = *series.value("empirical_variance_trace", 10);
        }
        const std::size_t ts[] = {5, 10};
        for (int k = 0; k < 2; ++k) {
            const double got = mean_se(traces[k]).mean;
            const double want = replace_variance_prediction(1.0, h, ts[k]);
            out.push_back({"replace variance t=" + std::to_string(ts[k]) + " within 5%", relative_gap(got, want) < 0.05,
                           describe(got, want, 0.05 * want)});
        }
    }
    return out;
}

std::vector<OracleCheck> stats_suite() {
    std::vector<OracleCheck> out;
    out.push_back(close("I_0(2,3)", regularized_incomplete_beta(2, 3, 0.0), 0.0, 0.0));
    out.push_back(close("I_1(2,3)", regularized_incomplete_beta(2, 3, 1.0), 1.0, 0.0));
    out.push_back(close("I_0.5(a,a)", regularized_incomplete_beta(3.7, 3.7, 0.5), 0.5, 1e-14));
    out.push_back(close("I_0.3(2,5) vs quadrature", regularized_incomplete_beta(2, 5, 0.3),
                        incomplete_beta_by_quadrature(2, 5, 0.3), 1e-9));
    out.push_back(close("F(1,10) tail at 4.96", f_upper_tail(4.96, 1, 10), 0.05, 1e-3));

    RngStream rng(3, stable_hash("oracle/stats"));
    double worst_beta = 0.0;
    double worst_f = 0.0;
    double worst_sym = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double a = rng.uniform(0.5, 20.0);
        const double b = rng.uniform(0.5, 20.0);
        const double x = rng.uniform(0.01, 0.99);
        worst_beta = std::max(worst_beta, relative_gap(regularized_incomplete_beta(a, b, x),
                                                       incomplete_beta_by_quadrature(a, b, x)));
        worst_sym = std::max(worst_sym, std::abs(regularized_incomplete_beta(a, b, x) +
                                                 regularized_incomplete_beta(b, a, 1.0 - x) - 1.0));
        const double d1 = static_cast<double>(1 + rng.uniform_index(10));
        const double d2 = static_cast<double>(1 + rng.uniform_index(100));
        const double f = rng.uniform(0.05, 10.0);
        worst_f = std::max(worst_f, relative_gap(f_upper_tail(f, d1, d2), f_tail_by_quadrature(f, d1, d2)));
    }
    out.push_back({"incomplete beta vs quadrature (50 cases)", worst_beta < 1e-8,
                   "max relative gap " + scientific(worst_beta)});
    out.push_back({"F tail vs quadrature (50 cases)", worst_f < 1e-8, "max relative gap " + scientific(worst_f)});
    out.push_back({"beta symmetry identity", worst_sym < 1e-12, "max gap " + scientific(worst_sym)});

    constexpr int sims = 10000;
    constexpr Eigen::Index n_obs = 40;
    std::vector<double> p_values;
    p_values.reserve(sims);
    for (int s = 0; s < sims; ++s) {
        Matrix full(n_obs, 3);
        Vector y(n_obs);
        for (Eigen::Index i = 0; i < n_obs; ++i) {
            const double x1 = rng.normal();
            const double x2 = rng.normal();
            full.row(i) << 1.0, x1, x2;
            y[i] = 1.0 + 2.0 * x1 + rng.normal();
        }
        const OlsFit restricted = ols(full.leftCols(2), y);
        const OlsFit both = ols(full, y);
        p_values.push_back(f_test_nested(restricted, both).p);
    }
    const double ks = ks_distance_uniform(p_values);
    out.push_back({"null p-values uniform (KS, 1e4 sims)", ks < 0.02, "KS distance " + std::to_string(ks)});
    return out;
}

}  // namespace

std::vector<std::string> oracle_suite_names() { return {"gaussian-theorem1", "kde-variance", "stats-beta"}; }

std::vector<OracleCheck> run_oracle_suite(std::string_view name) {
    if (name == "gaussian-theorem1") return gaussian_suite();
    if (name == "kde-variance") return kde_suite();
    if (name == "stats-beta") return stats_suite();
    throw Error(ErrorCode::UnknownKey,
                "oracle suite '" + std::string(name) + "'; allowed: gaussian-theorem1, kde-variance, stats-beta");
}

}  // namespace collapse
