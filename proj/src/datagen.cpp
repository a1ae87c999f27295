#include "collapse/datagen.hpp"

#include "collapse/error.hpp"
#include "collapse/linalg.hpp"

#include <cmath>
#include <numbers>

namespace collapse {

namespace {

constexpr double kPi = std::numbers::pi;

void add_noise(RowMatrix& points, double noise, RngStream& rng) {
    if (noise == 0.0) return;
    points += noise * standard_normal_block(rng, static_cast<std::size_t>(points.rows()),
                                            static_cast<std::size_t>(points.cols()));
}

RowMatrix circles(std::size_t n, double factor) {
    const std::size_t outer = (n + 1) / 2;
    const std::size_t inner = n / 2;
    RowMatrix pts(static_cast<Eigen::Index>(n), 2);
    for (std::size_t k = 0; k < outer; ++k) {
        const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(outer);
        pts.row(static_cast<Eigen::Index>(k)) << std::cos(theta), std::sin(theta);
    }
    for (std::size_t k = 0; k < inner; ++k) {
        const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(inner);
        pts.row(static_cast<Eigen::Index>(outer + k)) << factor * std::cos(theta),
            factor * std::sin(theta);
    }
    return pts;
}

// Angles in [0, π], both endpoints included.
double arc_angle(std::size_t k, std::size_t count) {
    return count <= 1 ? 0.0 : kPi * static_cast<double>(k) / static_cast<double>(count - 1);
}

RowMatrix moons(std::size_t n) {
    const std::size_t upper = (n + 1) / 2;
    const std::size_t lower = n / 2;
    RowMatrix pts(static_cast<Eigen::Index>(n), 2);
    for (std::size_t k = 0; k < upper; ++k) {
        const double theta = arc_angle(k, upper);
        pts.row(static_cast<Eigen::Index>(k)) << std::cos(theta), std::sin(theta);
    }
    for (std::size_t k = 0; k < lower; ++k) {
        const double theta = arc_angle(k, lower);
        pts.row(static_cast<Eigen::Index>(upper + k)) << 1.0 - std::cos(theta),
            0.5 - std::sin(theta);
    }
    return pts;
}

RowMatrix swiss_roll(std::size_t n, RngStream& rng) {
    RowMatrix pts(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const double t = 1.5 * kPi * (1.0 + 2.0 * rng.uniform());
        const double height = 21.0 * rng.uniform();
        pts.row(i) << t * std::cos(t), height, t * std::sin(t);
    }
    return pts;
}

RowMatrix blobs(std::size_t n, const RowMatrix& centers, double cluster_std, RngStream& rng) {
    RowMatrix pts(static_cast<Eigen::Index>(n), centers.cols());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const auto c = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(centers.rows())));
        for (Eigen::Index j = 0; j < pts.cols(); ++j) pts(i, j) = centers(c, j) + cluster_std * rng.normal();
    }
    return pts;
}

}  // namespace

std::string_view to_string(ToyDataset name) noexcept {
    switch (name) {
        case ToyDataset::Blobs: return "blobs";
        case ToyDataset::Circles: return "circles";
        case ToyDataset::Moons: return "moons";
        case ToyDataset::SwissRoll: return "swiss_roll";
    }
    return "unknown";
}

ToyDataset parse_toy_dataset(std::string_view name) {
    for (auto d : {ToyDataset::Blobs, ToyDataset::Circles, ToyDataset::Moons, ToyDataset::SwissRoll})
        if (to_string(d) == name) return d;
    throw Error(ErrorCode::UnknownDataset,
                "'" + std::string(name) + "' (expected blobs, circles, moons or swiss_roll)");
}

ToyDatasetSpec ToyDatasetSpec::defaults(ToyDataset name, std::size_t n) {
    ToyDatasetSpec spec{name, n, 0.0, std::monostate{}};
    if (name == ToyDataset::Blobs) {
        spec.noise = 1.0;
        spec.extra = BlobsOptions{};
    } else if (name == ToyDataset::Circles) {
        spec.extra = CirclesOptions{};
    }
    return spec;
}

std::size_t ToyDatasetSpec::dim() const {
    switch (name) {
        case ToyDataset::Blobs: return std::get<BlobsOptions>(extra).n_features;
        case ToyDataset::SwissRoll: return 3;
        default: return 2;
    }
}

void ToyDatasetSpec::validate() const {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "toy dataset needs n >= 1");
    if (!(noise >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise must be non-negative");
    const bool ok = (name == ToyDataset::Blobs && std::holds_alternative<BlobsOptions>(extra)) ||
                    (name == ToyDataset::Circles && std::holds_alternative<CirclesOptions>(extra)) ||
                    ((name == ToyDataset::Moons || name == ToyDataset::SwissRoll) &&
                     std::holds_alternative<std::monostate>(extra));
    if (!ok)
        throw Error(ErrorCode::InvalidArgument,
                    "options do not match dataset " + std::string(to_string(name)));
    if (const auto* b = std::get_if<BlobsOptions>(&extra); b && (b->n_features == 0 || b->centers == 0))
        throw Error(ErrorCode::InvalidArgument, "blobs needs n_features >= 1 and centers >= 1");
}

RowMatrix blob_centers(const ToyDatasetSpec& spec, RngStream& rng) {
    const auto& opts = std::get<BlobsOptions>(spec.extra);
    RowMatrix centers(static_cast<Eigen::Index>(opts.centers), static_cast<Eigen::Index>(opts.n_features));
    for (Eigen::Index i = 0; i < centers.size(); ++i) centers.data()[i] = rng.uniform(-10.0, 10.0);
    return centers;
}

Dataset generate_toy(const ToyDatasetSpec& spec, const RowMatrix& centers, RngStream& rng) {
    spec.validate();
    RowMatrix pts;
    switch (spec.name) {
        case ToyDataset::Blobs:
            return Dataset(blobs(spec.n, centers, spec.noise, rng), Origin::real());
        case ToyDataset::Circles:
            pts = circles(spec.n, std::get<CirclesOptions>(spec.extra).factor);
            break;
        case ToyDataset::Moons:
            pts = moons(spec.n);
            break;
        case ToyDataset::SwissRoll:
            pts = swiss_roll(spec.n, rng);
            break;
    }
    add_noise(pts, spec.noise, rng);
    return Dataset(pts, Origin::real());
}

Dataset generate_toy(const ToyDatasetSpec& spec, RngStream& rng) {
    spec.validate();
    const RowMatrix centers = spec.name == ToyDataset::Blobs ? blob_centers(spec, rng) : RowMatrix{};
    return generate_toy(spec, centers, rng);
}

TrainTest generate_toy_train_test(const ToyDatasetSpec& spec, std::size_t n_test, RngStream& rng) {
    spec.validate();
    RngStream center_rng = rng.split("centers");
    RngStream train_rng = rng.split("train");
    RngStream test_rng = rng.split("test");
    const RowMatrix centers =
        spec.name == ToyDataset::Blobs ? blob_centers(spec, center_rng) : RowMatrix{};
    ToyDatasetSpec test_spec = spec;
    test_spec.n = n_test;
    return {generate_toy(spec, centers, train_rng), generate_toy(test_spec, centers, test_rng)};
}

Dataset generate_gaussian_real(const Vector& mu0, double sigma0_sq, std::size_t n, RngStream& rng) {
    if (n < 2) throw Error(ErrorCode::TooFewSamples, "need n >= 2 real samples, got " + std::to_string(n));
    if (!(sigma0_sq > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma0_sq must be positive");
    const auto d = static_cast<std::size_t>(mu0.size());
    RowMatrix pts = std::sqrt(sigma0_sq) * standard_normal_block(rng, n, d);
    pts.rowwise() += mu0.transpose();
    return Dataset(pts, Origin::real());
}

RegressionData generate_linreg_data(const LinRegTask& task, std::size_t n, RngStream& rng) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "need n >= 1");
    RowMatrix x = standard_normal_block(rng, n, task.dim());
    Vector y = x * task.w_star;
    if (task.sigma_sq > 0.0) {
        const double sd = std::sqrt(task.sigma_sq);
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sd * rng.normal();
    }
    return {Dataset(x, Origin::real()), std::move(y)};
}

LinRegTask LinRegTask::isotropic(std::size_t dim, double sigma_sq) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "regression dimension must be positive");
    if (!(sigma_sq >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_sq must be non-negative");
    return {Vector::Constant(static_cast<Eigen::Index>(dim), 1.0 / std::sqrt(static_cast<double>(dim))),
            sigma_sq};
}

}  // namespace collapse
