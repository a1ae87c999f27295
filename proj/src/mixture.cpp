#include "collapse/mixture.hpp"

#include "collapse/error.hpp"
#include "collapse/gaussian.hpp"
#include "collapse/linreg.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace collapse {

namespace {

// Labelled rows drawn row by row (covariates, then noise) so that the first
// k rows do not depend on how many rows were requested.
Dataset labelled_rows(const LinRegTask& task, const Vector& w, std::size_t count, RngStream& rng) {
    const std::size_t d = task.dim();
    const double sd = std::sqrt(task.sigma_sq);
    std::vector<double> values(count * (d + 1));
    for (std::size_t i = 0; i < count; ++i) {
        double* row = values.data() + i * (d + 1);
        double y = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            row[k] = rng.normal();
            y += row[k] * w[static_cast<Eigen::Index>(k)];
        }
        row[d] = y + sd * rng.normal();
    }
    return Dataset(d + 1, std::move(values), std::vector<Origin>(count, Origin::real()));
}

double gaussian_nll(const GaussianParams& fit, const Dataset& test) {
    Eigen::LLT<Matrix> llt(fit.sigma());
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Matrix& l = llt.matrixL();
    const Vector diag = l.diagonal();
    if ((diag.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    const double log_det = 2.0 * diag.array().log().sum();
    RowMatrix centered = test.matrix().rowwise() - fit.mu().transpose();
    const Matrix z = llt.matrixL().solve(Matrix(centered.transpose()));
    const double quad = z.squaredNorm() / static_cast<double>(test.size());
    const double d = static_cast<double>(fit.dim());
    const double nll = 0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det + quad);
    return std::isfinite(nll) ? nll : std::numeric_limits<double>::infinity();
}

Dataset prefix_union(const Dataset& real, std::size_t n_real, const Dataset& synthetic, std::size_t n_syn) {
    Dataset train = real.slice(0, n_real);
    if (n_syn > 0) train.append(synthetic.slice(0, n_syn));
    return train;
}

}  // namespace

std::string_view to_string(MixtureSetting setting) noexcept {
    return setting == MixtureSetting::Gaussian ? "gaussian" : "linreg";
}

MixtureSetting parse_mixture_setting(std::string_view name) {
    if (name == "gaussian") return MixtureSetting::Gaussian;
    if (name == "linreg") return MixtureSetting::LinReg;
    throw Error(ErrorCode::UnknownKey, "mixture setting '" + std::string(name) + "'; allowed: gaussian, linreg");
}

void MixtureTruth::validate() const {
    if (data_dim == 0) throw Error(ErrorCode::InvalidArgument, "data_dim must be positive");
    if (setting == MixtureSetting::Gaussian ? !(sigma_sq > 0.0) : !(sigma_sq >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "invalid sigma_squared");
    if (source_size < 2) throw Error(ErrorCode::InvalidArgument, "source_size must be >= 2");
    if (test_size == 0) throw Error(ErrorCode::InvalidArgument, "test_size must be positive");
}

MixtureDesign MixtureDesign::defaults(MixtureSetting setting, std::size_t seeds) {
    MixtureDesign d;
    for (std::size_t v = 4; v <= 4096; v *= 2) d.real_grid.push_back(v);
    d.syn_grid.push_back(0);
    d.syn_grid.insert(d.syn_grid.end(), d.real_grid.begin(), d.real_grid.end());
    d.seeds_per_cell = seeds;
    d.truth.setting = setting;
    return d;
}

void MixtureDesign::validate() const {
    truth.validate();
    if (real_grid.empty() || syn_grid.empty()) throw Error(ErrorCode::EmptyGrid, "mixture grids must be nonempty");
    if (seeds_per_cell == 0) throw Error(ErrorCode::EmptyGrid, "seeds_per_cell must be positive");
    for (std::size_t i = 1; i < real_grid.size(); ++i)
        if (real_grid[i] <= real_grid[i - 1]) throw Error(ErrorCode::InvalidArgument, "real_grid must increase");
    for (std::size_t i = 1; i < syn_grid.size(); ++i)
        if (syn_grid[i] <= syn_grid[i - 1]) throw Error(ErrorCode::InvalidArgument, "syn_grid must increase");
    if (real_grid.front() == 0) throw Error(ErrorCode::InvalidArgument, "n_real must be >= 1");
}

MixtureSeed::MixtureSeed(const MixtureTruth& truth, std::size_t max_real, std::size_t max_syn, const RngStream& rng)
    : truth_(truth), real_(1), synthetic_(1), test_(1) {
    truth_.validate();
    if (max_real == 0) throw Error(ErrorCode::InvalidArgument, "n_real must be >= 1");
    RngStream real_rng = rng.split("real");
    RngStream source_rng = rng.split("source");
    RngStream syn_rng = rng.split("synthetic");
    RngStream test_rng = rng.split("test");
    const std::size_t d = truth_.data_dim;
    if (truth_.setting == MixtureSetting::Gaussian) {
        const GaussianParams p0 = GaussianParams::isotropic(d, truth_.sigma_sq);
        real_ = generate_gaussian_real(p0.mu(), truth_.sigma_sq, std::max<std::size_t>(max_real, 2), real_rng);
        const GaussianParams source =
            fit_gaussian(generate_gaussian_real(p0.mu(), truth_.sigma_sq, truth_.source_size, source_rng));
        synthetic_ = max_syn > 0 ? sample_gaussian(source, max_syn, syn_rng) : Dataset(d);
        test_ = generate_gaussian_real(p0.mu(), truth_.sigma_sq, std::max<std::size_t>(truth_.test_size, 2), test_rng);
    } else {
        const LinRegTask task = LinRegTask::isotropic(d, truth_.sigma_sq);
        real_ = labelled_rows(task, task.w_star, max_real, real_rng);
        const Dataset source_rows = labelled_rows(task, task.w_star, truth_.source_size, source_rng);
        const RegressionData source = unpack_regression(source_rows);
        const LinRegModel source_model = fit_ols(source.covariates, source.labels);
        synthetic_ = labelled_rows(task, source_model.w_hat, max_syn, syn_rng);
    }
    if (!synthetic_.empty()) synthetic_.tag_all(Origin::synthetic_from(1));
}

double MixtureSeed::loss(std::size_t n_real, std::size_t n_syn) const {
    if (n_real == 0 || n_real > real_.size() || n_syn > synthetic_.size())
        throw Error(ErrorCode::InvalidArgument, "cell exceeds the drawn pools");
    const Dataset train = prefix_union(real_, n_real, synthetic_, n_syn);
    if (truth_.setting == MixtureSetting::Gaussian) return gaussian_nll(fit_gaussian(train), test_);
    const LinRegTask task = LinRegTask::isotropic(truth_.data_dim, truth_.sigma_sq);
    const RegressionData data = unpack_regression(train);
    return linreg_test_error(fit_ols(data.covariates, data.labels), task);
}

std::vector<MixtureCell> run_mixture_grid(const MixtureDesign& design, const RngStream& rng) {
    design.validate();
    std::vector<MixtureCell> cells;
    cells.reserve(design.real_grid.size() * design.syn_grid.size() * design.seeds_per_cell);
    for (std::size_t s = 0; s < design.seeds_per_cell; ++s) {
        const std::int64_t seed = design.first_seed + static_cast<std::int64_t>(s);
        const MixtureSeed pools(design.truth, design.real_grid.back(), design.syn_grid.back(),
                                rng.split(static_cast<std::uint64_t>(seed)));
        for (std::size_t r : design.real_grid)
            for (std::size_t m : design.syn_grid) cells.push_back({r, m, pools.loss(r, m), seed});
    }
    return cells;
}

MixtureCovariates covariate_transform(const MixtureCell& cell) {
    if (cell.n_real == 0) throw Error(ErrorCode::InvalidArgument, "n_real must be >= 1");
    const double r = static_cast<double>(cell.n_real);
    const double x2 = cell.n_syn == 0 ? 0.0 : std::log(r / (r + static_cast<double>(cell.n_syn)));
    return {1.0 / std::sqrt(r), x2};
}

MixtureReport analyze_mixture(const std::vector<MixtureCell>& cells) {
    if (cells.size() < 4) throw Error(ErrorCode::InvalidArgument, "need at least 4 cells");
    const auto n = static_cast<Eigen::Index>(cells.size());
    Matrix both(n, 3);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& c = cells[static_cast<std::size_t>(i)];
        if (!std::isfinite(c.test_loss)) throw Error(ErrorCode::InvalidArgument, "non-finite test loss in cell");
        const MixtureCovariates x = covariate_transform(c);
        both.row(i) << 1.0, x.x1, x.x2;
        y[i] = c.test_loss;
    }
    MixtureReport report;
    report.n_cells = cells.size();
    try {
        report.fit_both = ols(both, y);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::RankDeficient)
            throw Error(ErrorCode::Collinear, "covariates x1 and x2 are collinear over these cells");
        throw;
    }
    Matrix only_x1(n, 2);
    only_x1 << both.col(0), both.col(1);
    Matrix only_x2(n, 2);
    only_x2 << both.col(0), both.col(2);
    report.fit_x1 = ols(only_x1, y);
    report.fit_x2 = ols(only_x2, y);
    report.r2_x1 = r_squared(report.fit_x1, y);
    report.r2_x2 = r_squared(report.fit_x2, y);
    report.r2_both = r_squared(report.fit_both, y);
    report.add_x2_to_x1 = f_test_nested(report.fit_x1, report.fit_both);
    report.add_x1_to_x2 = f_test_nested(report.fit_x2, report.fit_both);
    return report;
}

std::vector<ScarceRealFinding> scarce_real_findings(const std::vector<MixtureCell>& cells) {
    // n_real -> seed -> (baseline loss, best synthetic loss, argmin n_syn)
    struct PerSeed {
        double baseline = std::numeric_limits<double>::quiet_NaN();
        double best = std::numeric_limits<double>::infinity();
        std::size_t argmin = 0;
        double best_synthetic = std::numeric_limits<double>::infinity();
    };
    std::map<std::size_t, std::map<std::int64_t, PerSeed>> table;
    for (const auto& c : cells) {
        PerSeed& s = table[c.n_real][c.seed];
        if (c.n_syn == 0)
            s.baseline = c.test_loss;
        else
            s.best_synthetic = std::min(s.best_synthetic, c.test_loss);
        if (c.test_loss < s.best || (c.test_loss == s.best && c.n_syn < s.argmin)) {
            s.best = c.test_loss;
            s.argmin = c.n_syn;
        }
    }
    std::vector<ScarceRealFinding> out;
    for (const auto& [n_real, seeds] : table) {
        ScarceRealFinding f;
        f.n_real = n_real;
        std::size_t helps = 0;
        std::size_t zero_best = 0;
        for (const auto& [seed, s] : seeds) {
            if (std::isnan(s.baseline)) continue;
            ++f.seeds;
            if (s.best_synthetic < s.baseline) ++helps;
            if (s.argmin == 0) ++zero_best;
        }
        if (f.seeds > 0) {
            f.synthetic_helps = static_cast<double>(helps) / static_cast<double>(f.seeds);
            f.zero_is_argmin = static_cast<double>(zero_best) / static_cast<double>(f.seeds);
        }
        out.push_back(f);
    }
    return out;
}

}  // namespace collapse
