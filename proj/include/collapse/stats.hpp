#pragma once

#include "collapse/dataset.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace collapse {

struct OlsFit {
    Vector coefficients;  // same order as the design columns (intercept first by convention)
    double rss = 0.0;
    double tss = 0.0;     // Σ(y − ȳ)²
    std::size_t n_obs = 0;
    std::size_t n_params = 0;
};

/// Least squares via column-pivoted QR, falling back to a complete orthogonal
/// decomposition if the residuals are not orthogonal to the columns.
/// Throws InvalidArgument if n < p, RankDeficient if the design has rank < p.
OlsFit ols(const Matrix& design, const Vector& response);

/// 1 − rss/tss. Throws ZeroVariance if tss = 0, DimensionMismatch if the
/// response length differs from fit.n_obs.
double r_squared(const OlsFit& fit, const Vector& response);

struct FTestResult {
    double f = 0.0;
    double p = 1.0;
    std::size_t df1 = 0;
    std::size_t df2 = 0;
};

/// Nested-model F-test. Throws NotNested if the observation counts differ,
/// full has no extra parameters, or full.rss exceeds restricted.rss beyond
/// round-off. Throws InvalidArgument when full leaves no residual degrees of freedom.
FTestResult f_test_nested(const OlsFit& restricted, const OlsFit& full);

/// I_x(a, b) by continued fraction, using I_x(a,b) = 1 − I_{1−x}(b,a) on the
/// slowly converging side. Throws InvalidArgument unless a, b > 0 and x ∈ [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// P(F(d1, d2) > f).
double f_upper_tail(double f, double d1, double d2);

/// Density of the F(d1, d2) distribution.
double f_density(double x, double d1, double d2);

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `values` and Uniform[0, 1].
double ks_distance_uniform(std::vector<double> values);

}  // namespace collapse
