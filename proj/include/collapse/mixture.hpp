#pragma once

#include "collapse/dataset.hpp"
#include "collapse/rng.hpp"
#include "collapse/stats.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace collapse {

enum class MixtureSetting { Gaussian, LinReg };

std::string_view to_string(MixtureSetting setting) noexcept;
/// "gaussian" or "linreg"; throws UnknownKey otherwise.
MixtureSetting parse_mixture_setting(std::string_view name);

struct MixtureCell {
    std::size_t n_real = 0;
    std::size_t n_syn = 0;
    double test_loss = 0.0;
    std::int64_t seed = 0;
};

/// Ground truth is N(0, sigma_sq·I_d) for the Gaussian setting and the
/// isotropic regression task for LinReg.
struct MixtureTruth {
    MixtureSetting setting = MixtureSetting::Gaussian;
    std::size_t data_dim = 1;
    double sigma_sq = 1.0;
    std::size_t source_size = 100;
    std::size_t test_size = 10000;

    void validate() const;
};

struct MixtureDesign {
    std::vector<std::size_t> real_grid;
    std::vector<std::size_t> syn_grid;
    std::size_t seeds_per_cell = 1;
    std::int64_t first_seed = 0;
    MixtureTruth truth;

    /// Powers of two 4..4096 for n_real, 0 plus the same for n_syn.
    static MixtureDesign defaults(MixtureSetting setting, std::size_t seeds);
    void validate() const;
};

/// Everything one seed needs: prefix-nested real and synthetic pools (so a
/// cell with fewer points sees a prefix of a larger cell's points), the
/// synthetic-source model fit on an independent sample, and the test set.
class MixtureSeed {
public:
    MixtureSeed(const MixtureTruth& truth, std::size_t max_real, std::size_t max_syn, const RngStream& rng);

    /// Test loss of the model fit on the first n_real real and n_syn synthetic points:
    /// Gaussian NLL on the test set (+inf for a singular fit), or ‖ŵ − w*‖².
    double loss(std::size_t n_real, std::size_t n_syn) const;

private:
    MixtureTruth truth_;
    Dataset real_;
    Dataset synthetic_;
    Dataset test_;
};

/// Every (n_real, n_syn, seed) cell; seed s uses rng.split(s).
std::vector<MixtureCell> run_mixture_grid(const MixtureDesign& design, const RngStream& rng);

struct MixtureCovariates {
    double x1 = 0.0;  // n_real^(-1/2)
    double x2 = 0.0;  // log(n_real / (n_real + n_syn))
};

MixtureCovariates covariate_transform(const MixtureCell& cell);

struct MixtureReport {
    std::size_t n_cells = 0;
    OlsFit fit_x1;
    OlsFit fit_x2;
    OlsFit fit_both;
    double r2_x1 = 0.0;
    double r2_x2 = 0.0;
    double r2_both = 0.0;
    FTestResult add_x2_to_x1;
    FTestResult add_x1_to_x2;
};

/// Regresses test_loss on {x1}, {x2} and {x1, x2} (each with an intercept),
/// one observation per cell. Throws InvalidArgument for < 4 cells or a
/// non-finite loss, Collinear if the two-covariate design is rank-deficient.
MixtureReport analyze_mixture(const std::vector<MixtureCell>& cells);

struct ScarceRealFinding {
    std::size_t n_real = 0;
    std::size_t seeds = 0;
    /// Fraction of seeds in which some n_syn > 0 has lower loss than n_syn = 0.
    double synthetic_helps = 0.0;
    /// Fraction of seeds in which n_syn = 0 is the argmin over n_syn.
    double zero_is_argmin = 0.0;
};

/// One row per n_real value, in increasing order.
std::vector<ScarceRealFinding> scarce_real_findings(const std::vector<MixtureCell>& cells);

}  // namespace collapse
