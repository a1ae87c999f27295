#include "collapse/datagen.hpp"
#include "collapse/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace collapse;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no exception");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("circles, n=4, noise 0") {
    RngStream rng(0, 0);
    const Dataset d = generate_toy(ToyDatasetSpec::defaults(ToyDataset::Circles, 4), rng);
    REQUIRE(d.size() == 4);
    const double want[4][2] = {{1, 0}, {-1, 0}, {0.8, 0}, {-0.8, 0}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(d.row(i)[0] == doctest::Approx(want[i][0]).epsilon(1e-12));
        CHECK(std::abs(d.row(i)[1] - want[i][1]) < 1e-12);
        CHECK(d.origin(i) == Origin::real());
    }
}

TEST_CASE("moons, n=2: first point of each arc") {
    RngStream rng(0, 0);
    const Dataset d = generate_toy(ToyDatasetSpec::defaults(ToyDataset::Moons, 2), rng);
    CHECK(d.row(0)[0] == 1.0);
    CHECK(d.row(0)[1] == 0.0);
    CHECK(d.row(1)[0] == 0.0);
    CHECK(d.row(1)[1] == 0.5);
}

TEST_CASE("noise-free points lie on their manifolds") {
    RngStream rng(1, 1);
    const Dataset c = generate_toy(ToyDatasetSpec::defaults(ToyDataset::Circles, 101), rng);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double r = std::hypot(c.row(i)[0], c.row(i)[1]);
        CHECK(std::min(std::abs(r - 1.0), std::abs(r - 0.8)) < 1e-12);
    }
    const Dataset m = generate_toy(ToyDatasetSpec::defaults(ToyDataset::Moons, 101), rng);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double x = m.row(i)[0], y = m.row(i)[1];
        const bool upper = std::abs(std::hypot(x, y) - 1.0) < 1e-12 && y >= -1e-12;
        const bool lower = std::abs(std::hypot(x - 1.0, y - 0.5) - 1.0) < 1e-12 && y <= 0.5 + 1e-12;
        CHECK((upper || lower));
    }
    const Dataset s = generate_toy(ToyDatasetSpec::defaults(ToyDataset::SwissRoll, 200), rng);
    CHECK(s.dim() == 3);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double x = s.row(i)[0], y = s.row(i)[1], z = s.row(i)[2];
        const double t = std::hypot(x, z);
        CHECK(t >= 1.5 * std::numbers::pi - 1e-12);
        CHECK(t <= 4.5 * std::numbers::pi + 1e-12);
        CHECK(std::abs(x - t * std::cos(t)) < 1e-12);
        CHECK(std::abs(z - t * std::sin(t)) < 1e-12);
        CHECK(y >= 0.0);
        CHECK(y <= 21.0);
    }
}

TEST_CASE("component balance ceil/floor") {
    RngStream rng(0, 0);
    const Dataset c = generate_toy(ToyDatasetSpec::defaults(ToyDataset::Circles, 7), rng);
    int outer = 0;
    for (std::size_t i = 0; i < 7; ++i) outer += std::hypot(c.row(i)[0], c.row(i)[1]) > 0.9;
    CHECK(outer == 4);
    const Dataset m = generate_toy(ToyDatasetSpec::defaults(ToyDataset::Moons, 7), rng);
    int upper = 0;
    for (std::size_t i = 0; i < 7; ++i) upper += std::abs(std::hypot(m.row(i)[0], m.row(i)[1]) - 1.0) < 1e-12 && m.row(i)[1] >= 0;
    CHECK(upper >= 4);
}

TEST_CASE("blobs assign points uniformly to centers") {
    ToyDatasetSpec spec = ToyDatasetSpec::defaults(ToyDataset::Blobs, 100000);
    spec.noise = 0.0;  // every point sits exactly on its center
    RngStream rng(2, 2);
    const RowMatrix centers = blob_centers(spec, rng);
    CHECK(centers.cwiseAbs().maxCoeff() <= 10.0);
    const Dataset d = generate_toy(spec, centers, rng);
    std::vector<int> counts(3, 0);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (Eigen::Index c = 0; c < 3; ++c)
            if (d.row(i)[0] == centers(c, 0) && d.row(i)[1] == centers(c, 1)) ++counts[static_cast<std::size_t>(c)];
    const double p = 1.0 / 3.0;
    const double sd = std::sqrt(1e5 * p * (1 - p));
    for (int c : counts) CHECK(std::abs(c - 1e5 * p) < 5 * sd);
}

TEST_CASE("toy determinism and errors") {
    for (auto name : {ToyDataset::Blobs, ToyDataset::Circles, ToyDataset::Moons, ToyDataset::SwissRoll}) {
        RngStream a(4, 4), b(4, 4);
        const auto spec = ToyDatasetSpec::defaults(name, 50);
        CHECK(generate_toy(spec, a) == generate_toy(spec, b));
    }
    CHECK(code_of([] { parse_toy_dataset("spirals"); }) == ErrorCode::UnknownDataset);
    CHECK(parse_toy_dataset("swiss_roll") == ToyDataset::SwissRoll);
    ToyDatasetSpec bad = ToyDatasetSpec::defaults(ToyDataset::Moons, 5);
    bad.extra = CirclesOptions{};
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("train/test split shares blob centers, not points") {
    RngStream rng(5, 5);
    const TrainTest tt = generate_toy_train_test(ToyDatasetSpec::defaults(ToyDataset::Blobs, 300), 300, rng);
    CHECK(tt.train.size() == 300);
    CHECK(tt.test.size() == 300);
    CHECK_FALSE(tt.train == tt.test);
    // Same three clusters: every test point is within 6 std of some training point's cluster mean.
    const auto tr = tt.train.matrix();
    for (std::size_t i = 0; i < 20; ++i) {
        double best = 1e300;
        for (Eigen::Index j = 0; j < tr.rows(); ++j)
            best = std::min(best, std::hypot(tr(j, 0) - tt.test.row(i)[0], tr(j, 1) - tt.test.row(i)[1]));
        CHECK(best < 3.0);
    }
}

TEST_CASE("generate_gaussian_real") {
    RngStream rng(6, 6);
    const Dataset d = generate_gaussian_real(Vector::Zero(1), 1.0, 100000, rng);
    const auto m = d.matrix();
    const double mean = m.mean();
    CHECK(std::abs((m.array() - mean).square().sum() / (1e5 - 1) - 1.0) < 0.02);
    CHECK(code_of([&] { generate_gaussian_real(Vector::Zero(1), 1.0, 1, rng); }) == ErrorCode::TooFewSamples);
    const Dataset s = generate_gaussian_real(Vector::Zero(3), 1.0, 5, rng);
    CHECK(s.size() == 5);
    CHECK(s.dim() == 3);
}

TEST_CASE("generate_linreg_data") {
    SUBCASE("noiseless projection") {
        LinRegTask task{Vector::Unit(2, 0), 0.0};
        RngStream rng(7, 7);
        const RegressionData d = generate_linreg_data(task, 50, rng);
        for (std::size_t i = 0; i < 50; ++i) CHECK(d.labels[static_cast<Eigen::Index>(i)] == d.covariates.row(i)[0]);
    }
    SUBCASE("pure noise variance") {
        LinRegTask task{Vector::Zero(3), 1.0};
        RngStream rng(8, 8);
        const RegressionData d = generate_linreg_data(task, 100000, rng);
        const double mean = d.labels.mean();
        CHECK(std::abs((d.labels.array() - mean).square().sum() / (1e5 - 1) - 1.0) < 0.02);
    }
    SUBCASE("determinism") {
        const LinRegTask task = LinRegTask::isotropic(3, 1.0);
        RngStream a(9, 9), b(9, 9);
        const RegressionData x = generate_linreg_data(task, 20, a), y = generate_linreg_data(task, 20, b);
        CHECK(x.covariates == y.covariates);
        CHECK(x.labels == y.labels);
    }
    CHECK(LinRegTask::isotropic(4, 1.0).w_star.norm() == doctest::Approx(1.0));
}
