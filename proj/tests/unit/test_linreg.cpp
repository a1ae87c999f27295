#include "collapse/linalg.hpp"
#include "collapse/linreg.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace collapse;

namespace {

Dataset from_matrix(const RowMatrix& m) { return Dataset(m, Origin::real()); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

// test_error[t-1][seed]
std::vector<std::vector<double>> collect(Workflow w, std::size_t d, double s2, std::size_t n, std::size_t iters,
                                         int seeds, std::uint64_t stream) {
    std::vector<std::vector<double>> out(iters);
    const LinRegTask task = LinRegTask::isotropic(d, s2);
    for (int s = 0; s < seeds; ++s) {
        const MetricSeries series = run_linreg_setting({w, n, iters, s}, task, RngStream(s, stream));
        for (std::size_t t = 1; t <= iters; ++t) out[t - 1].push_back(*series.value("test_error", t));
    }
    return out;
}

}  // namespace

TEST_CASE("fit_ols examples") {
    const Vector w_star = (Vector(3) << 0.5, -2.0, 3.0).finished();
    const RowMatrix eye = RowMatrix::Identity(3, 3);
    CHECK((fit_ols(from_matrix(eye), eye * w_star).w_hat - w_star).norm() < 1e-14);

    const RowMatrix x = (RowMatrix(2, 1) << 1.0, 2.0).finished();
    CHECK(fit_ols(from_matrix(x), (Vector(2) << 2.0, 4.0).finished()).w_hat[0] == doctest::Approx(2.0));

    CHECK_THROWS_AS(fit_ols(from_matrix(x), Vector::Zero(3)), Error);
}

TEST_CASE("underdetermined fits are minimum norm") {
    RngStream rng(1, 1);
    for (int rep = 0; rep < 20; ++rep) {
        RowMatrix x = RowMatrix::NullaryExpr(4, 10, [&] { return rng.normal(); });
        const Vector y = Vector::NullaryExpr(4, [&] { return rng.normal(); });
        const Vector w = fit_ols(from_matrix(x), y).w_hat;
        CHECK((x * w - y).norm() < 1e-10);
        // Any other interpolant differs by a null-space vector and is longer.
        Eigen::FullPivLU<Matrix> lu(x);
        const Matrix null = lu.kernel();
        for (Eigen::Index k = 0; k < null.cols(); ++k) CHECK(w.norm() <= (w + 0.3 * null.col(k)).norm());
        CHECK(std::abs((null.transpose() * w).norm()) < 1e-10);
    }
}

TEST_CASE("synth_labels") {
    RngStream rng(2, 2);
    const LinRegModel model{(Vector(2) << 1.0, -1.0).finished()};
    const Dataset x = sample_standard_normal(rng, 50, 2);
    const Vector exact = synth_labels(model, x, 0.0, rng);
    CHECK((exact - x.matrix() * model.w_hat).norm() == 0.0);

    const Dataset big = sample_standard_normal(rng, 100000, 2);
    const Vector noise = synth_labels(LinRegModel{Vector::Zero(2)}, big, 1.0, rng);
    const double mean = noise.mean();
    CHECK(std::abs((noise.array() - mean).square().sum() / (1e5 - 1) - 1.0) < 0.02);

    RngStream a(3, 3), b(3, 3);
    CHECK(synth_labels(model, x, 0.5, a) == synth_labels(model, x, 0.5, b));
    CHECK_THROWS_AS(synth_labels(LinRegModel{Vector::Zero(3)}, x, 1.0, rng), Error);
}

TEST_CASE("linreg_test_error") {
    const LinRegTask task = LinRegTask::isotropic(2, 1.0);
    CHECK(linreg_test_error(LinRegModel{task.w_star}, task) == 0.0);
    CHECK(linreg_test_error(LinRegModel{task.w_star + Vector::Ones(2)}, task) == doctest::Approx(2.0));
    CHECK_THROWS_AS(linreg_test_error(LinRegModel{Vector::Zero(3)}, task), Error);

    RngStream rng(4, 4);
    const Vector delta = (Vector(4) << 0.3, -1.2, 0.7, 2.0).finished();
    const LinRegTask t4 = LinRegTask::isotropic(4, 1.0);
    const RowMatrix x = standard_normal_block(rng, 1000000, 4);
    const double mc = (x * delta).squaredNorm() / 1e6;
    CHECK(std::abs(mc / delta.squaredNorm() - 1.0) < 0.02);
    CHECK(linreg_test_error(LinRegModel{t4.w_star + delta}, t4) == doctest::Approx(delta.squaredNorm()));
}

TEST_CASE("pack and unpack regression rows") {
    RngStream rng(5, 5);
    const Dataset x = sample_standard_normal(rng, 7, 3);
    const Vector y = Vector::LinSpaced(7, 0.0, 6.0);
    const Dataset packed = pack_regression(x, y);
    CHECK(packed.dim() == 4);
    const RegressionData back = unpack_regression(packed);
    CHECK(back.covariates == x);
    CHECK(back.labels == y);
}

TEST_CASE("one generation is unbiased") {
    const LinRegTask task = LinRegTask::isotropic(3, 1.0);
    const int seeds = 2000;
    Matrix w(3, seeds);
    for (int s = 0; s < seeds; ++s) {
        RngStream rng(s, stable_hash("test/linreg/unbiased"));
        const RegressionData d = generate_linreg_data(task, 100, rng);
        w.col(s) = fit_ols(d.covariates, d.labels).w_hat;
    }
    const Vector mean = w.rowwise().mean();
    for (Eigen::Index j = 0; j < 3; ++j) {
        const double sd = std::sqrt((w.row(j).array() - mean[j]).square().sum() / (seeds - 1));
        CHECK(std::abs(mean[j] - task.w_star[j]) < 3 * sd / std::sqrt(double(seeds)));
    }
}

TEST_CASE("Accumulate fast path equals refitting the pool") {
    const LinRegTask task = LinRegTask::isotropic(5, 0.5);
    const LoopConfig cfg{Workflow::accumulate(), 20, 12, 9};
    const RngStream rng(9, 9);
    const MetricSeries fast = run_linreg_setting(cfg, task, rng);
    struct Plain {
        using Model = LinRegModel;
        LinRegAdapter inner;
        std::string task_name() const { return inner.task_name(); }
        Model fit(const Dataset& d, std::size_t t) { return inner.fit(d, t); }
        Dataset sample(const Model& m, std::size_t c, RngStream& r) { return inner.sample(m, c, r); }
        std::vector<Metric> evaluate(const Model& m, const Dataset& d, std::size_t t) { return inner.evaluate(m, d, t); }
    };
    RngStream real_rng = rng.split("real"), test_rng = rng.split("test");
    const RegressionData real = generate_linreg_data(task, 20, real_rng);
    const RegressionData test = generate_linreg_data(task, 1, test_rng);
    Plain plain{LinRegAdapter(task)};
    const MetricSeries ref = run_loop(cfg, plain, pack_regression(real.covariates, real.labels),
                                      pack_regression(test.covariates, test.labels), rng.split("loop"));
    REQUIRE(fast.records().size() == ref.records().size());
    for (std::size_t i = 0; i < ref.records().size(); ++i)
        CHECK(fast.records()[i].value == doctest::Approx(ref.records()[i].value).epsilon(1e-8));
}

TEST_CASE("rank-deficient cells still run") {
    const MetricSeries s = run_linreg_setting({Workflow::replace(), 10, 5, 0}, LinRegTask::isotropic(100, 1.0),
                                              RngStream(0, 0));
    for (std::size_t t = 1; t <= 5; ++t) CHECK(std::isfinite(*s.value("test_error", t)));
}

TEST_CASE("Replace error grows, Accumulate stays bounded") {
    const std::uint64_t stream = stable_hash("test/linreg/growth");
    const auto rep = collect(Workflow::replace(), 3, 1.0, 100, 100, 2000, stream);
    for (std::size_t t = 11; t <= 100; ++t)
        CHECK_MESSAGE(median(rep[t - 1]) > median(rep[t - 2]), "t=" << t);
    const auto acc = collect(Workflow::accumulate(), 3, 1.0, 100, 100, 2000, stream);
    CHECK(median(acc[99]) <= 3 * median(acc[0]));
}

TEST_CASE("workflow ordering over the (d, sigma^2) grid at n=100") {
    int ordered = 0;
    for (std::size_t d : {1, 3, 10}) {
        for (double s2 : {0.1, 1.0, 10.0}) {
            const std::uint64_t stream = stable_hash("test/linreg/order");
            const double acc = median(collect(Workflow::accumulate(), d, s2, 100, 100, 100, stream)[99]);
            const double sub = median(collect(Workflow::accumulate_subsample(100), d, s2, 100, 100, 100, stream)[99]);
            const double rep = median(collect(Workflow::replace(), d, s2, 100, 100, 100, stream)[99]);
            const bool ok = acc <= sub && sub <= rep;
            MESSAGE("d=" << d << " s2=" << s2 << ": " << acc << " " << sub << " " << rep);
            ordered += ok;
        }
    }
    CHECK(ordered >= 8);
}
