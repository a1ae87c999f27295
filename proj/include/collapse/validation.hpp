#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace collapse {

/// Double-exponential (tanh-sinh) quadrature of f over [a, b]. Endpoint
/// singularities are tolerated; non-finite samples are skipped.
double tanh_sinh(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13);

/// I_x(a, b) by quadrature of the Beta density (independent of the continued fraction).
double incomplete_beta_by_quadrature(double a, double b, double x);

/// P(F(d1, d2) > f) by quadrature of the F density over (f, ∞).
double f_tail_by_quadrature(double f, double d1, double d2);

struct OracleCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Names accepted by run_oracle_suite.
std::vector<std::string> oracle_suite_names();

/// Closed-form validation suites: "gaussian-theorem1", "kde-variance",
/// "stats-beta". Throws UnknownKey for other names.
std::vector<OracleCheck> run_oracle_suite(std::string_view name);

}  // namespace collapse
