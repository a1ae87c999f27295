#include "collapse/stats.hpp"

#include "collapse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace collapse {

namespace {

double residual_sum(const Matrix& design, const Vector& response, const Vector& beta, Vector& residual) {
    residual = response - design * beta;
    return residual.squaredNorm();
}

bool residual_orthogonal(const Matrix& design, const Vector& residual, const Vector& response) {
    const double scale = std::max(response.norm(), std::numeric_limits<double>::min());
    return (design.transpose() * residual).cwiseAbs().maxCoeff() < 1e-8 * scale;
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 100000; ++m) {
        const double md = m;
        const double m2 = 2.0 * md;
        double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    return h;
}

}  // namespace

OlsFit ols(const Matrix& design, const Vector& response) {
    const auto n = design.rows();
    const auto p = design.cols();
    if (response.size() != n) throw Error(ErrorCode::DimensionMismatch, "response length differs from design rows");
    if (p == 0 || n < p)
        throw Error(ErrorCode::InvalidArgument,
                    "need n >= p >= 1, got n=" + std::to_string(n) + ", p=" + std::to_string(p));
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < p)
        throw Error(ErrorCode::RankDeficient,
                    "design rank " + std::to_string(qr.rank()) + " < " + std::to_string(p) + " columns");
    OlsFit fit;
    fit.coefficients = qr.solve(response);
    Vector residual;
    fit.rss = residual_sum(design, response, fit.coefficients, residual);
    if (!residual_orthogonal(design, residual, response)) {
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
        fit.coefficients = cod.solve(response);
        fit.rss = residual_sum(design, response, fit.coefficients, residual);
    }
    fit.tss = (response.array() - response.mean()).square().sum();
    fit.n_obs = static_cast<std::size_t>(n);
    fit.n_params = static_cast<std::size_t>(p);
    return fit;
}

double r_squared(const OlsFit& fit, const Vector& response) {
    if (static_cast<std::size_t>(response.size()) != fit.n_obs)
        throw Error(ErrorCode::DimensionMismatch, "response does not match the fit");
    const double tss = (response.array() - response.mean()).square().sum();
    if (!(tss > 0.0)) throw Error(ErrorCode::ZeroVariance, "response has zero variance");
    return 1.0 - fit.rss / tss;
}

FTestResult f_test_nested(const OlsFit& restricted, const OlsFit& full) {
    if (restricted.n_obs != full.n_obs) throw Error(ErrorCode::NotNested, "models use different observations");
    if (full.n_params <= restricted.n_params)
        throw Error(ErrorCode::NotNested, "full model must have more parameters than the restricted one");
    const double tol = 1e-12 * std::max(1.0, restricted.tss);
    if (full.rss > restricted.rss + tol)
        throw Error(ErrorCode::NotNested, "full model fits worse than the restricted one");
    if (full.n_obs <= full.n_params)
        throw Error(ErrorCode::InvalidArgument, "full model leaves no residual degrees of freedom");

    FTestResult out;
    out.df1 = full.n_params - restricted.n_params;
    out.df2 = full.n_obs - full.n_params;
    const double gain = restricted.rss - full.rss;
    if (gain <= tol) return out;
    if (full.rss <= 0.0) {
        out.f = std::numeric_limits<double>::infinity();
        out.p = 0.0;
        return out;
    }
    out.f = (gain / static_cast<double>(out.df1)) / (full.rss / static_cast<double>(out.df2));
    out.p = f_upper_tail(out.f, static_cast<double>(out.df1), static_cast<double>(out.df2));
    return out;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidArgument, "x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_upper_tail(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
    if (std::isnan(f)) throw Error(ErrorCode::InvalidArgument, "F is NaN");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double f_density(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    const double log_pdf = 0.5 * d1 * std::log(d1) + 0.5 * d2 * std::log(d2) + (0.5 * d1 - 1.0) * std::log(x) -
                           0.5 * (d1 + d2) * std::log(d2 + d1 * x) -
                           (std::lgamma(0.5 * d1) + std::lgamma(0.5 * d2) - std::lgamma(0.5 * (d1 + d2)));
    return std::exp(log_pdf);
}

double ks_distance_uniform(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no values");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double u = std::clamp(values[i], 0.0, 1.0);
        worst = std::max({worst, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
    }
    return worst;
}

}  // namespace collapse
