#include "collapse/kde.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace collapse;

namespace {

constexpr double kHalfLog2Pi = 0.918938533204672742;

Dataset rows(std::initializer_list<std::initializer_list<double>> v) {
    Dataset d(v.begin()->size());
    for (const auto& r : v) d.push_back(std::vector<double>(r), Origin::real());
    return d;
}

Dataset normal_1d(std::size_t n, RngStream& rng) {
    Dataset d(1);
    for (std::size_t i = 0; i < n; ++i) d.push_back(std::vector<double>{rng.normal()}, Origin::real());
    return d;
}

double slope(const std::vector<std::pair<std::size_t, double>>& pts, std::size_t from, std::size_t to) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
    for (auto [t, y] : pts) {
        if (t < from || t > to) continue;
        const double x = static_cast<double>(t);
        sx += x, sy += y, sxx += x * x, sxy += x * y, k += 1;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace

TEST_CASE("log density at and near a single point") {
    const KdeModel m(rows({{3.0}}), 1.0);
    const double at[] = {3.0}, off[] = {5.0};
    CHECK(kde_log_density(m, at) == doctest::Approx(-kHalfLog2Pi).epsilon(1e-12));
    CHECK(kde_log_density(m, off) == doctest::Approx(-kHalfLog2Pi - 2.0).epsilon(1e-12));

    const KdeModel two(rows({{-1.0, 0.0}, {1.0, 0.0}}), 0.7);
    const KdeModel one(rows({{1.0, 0.0}}), 0.7);
    const double mid[] = {0.0, 0.4};
    CHECK(kde_log_density(two, mid) == doctest::Approx(kde_log_density(one, mid)).epsilon(1e-12));

    const double wrong[] = {0.0};
    CHECK_THROWS_AS(kde_log_density(two, wrong), Error);
    CHECK_THROWS_AS(KdeModel(rows({{0.0}}), 0.0), Error);
    CHECK_THROWS_AS(KdeModel(Dataset(1), 1.0), Error);
}

TEST_CASE("far queries stay finite") {
    const KdeModel m(rows({{0.0}, {1.0}}), 0.01);
    const double far[] = {1e3};
    const double lp = kde_log_density(m, far);
    CHECK(std::isfinite(lp));
    CHECK(lp == doctest::Approx(-(999.0 * 999.0) / (2e-4) - std::log(2.0) - kHalfLog2Pi - std::log(0.01)));
}

TEST_CASE("mean_nll") {
    CHECK(mean_nll(KdeModel(rows({{0.25}}), 1.0), rows({{0.25}})) == doctest::Approx(kHalfLog2Pi).epsilon(1e-12));

    RngStream rng(1, 1);
    const Dataset support = normal_1d(50, rng), test = normal_1d(40, rng);
    const double base = mean_nll(KdeModel(support, 0.3), test);
    Dataset doubled = support;
    doubled.append(support);
    CHECK(mean_nll(KdeModel(doubled, 0.3), test) == doctest::Approx(base).epsilon(1e-12));

    auto shifted = [](const Dataset& d, double by) {
        Dataset out(d.dim());
        for (std::size_t i = 0; i < d.size(); ++i) out.push_back(std::vector<double>{d.row(i)[0] + by}, Origin::real());
        return out;
    };
    CHECK(mean_nll(KdeModel(shifted(support, 7.5), 0.3), shifted(test, 7.5)) == doctest::Approx(base).epsilon(1e-9));
    CHECK_THROWS_AS(mean_nll(KdeModel(support, 0.3), Dataset(1)), Error);
    CHECK_THROWS_AS(mean_nll(KdeModel(support, 0.3), rows({{0.0, 1.0}})), Error);
}

TEST_CASE("NLL clipping sets the diverged flag") {
    const KdeModel m(rows({{0.0}}), 0.01);
    const NllResult near = mean_nll_detail(m, rows({{0.0}}));
    CHECK_FALSE(near.diverged);
    const NllResult far = mean_nll_detail(m, rows({{0.0}, {100.0}}));
    CHECK(far.diverged);
    CHECK(far.value == doctest::Approx(0.5 * (near.value - kLogDensityFloor)));
}

TEST_CASE("density integrates to one") {
    RngStream rng(2, 2);
    for (double h : {0.05, 0.5, 2.0}) {
        const KdeModel m(normal_1d(30, rng), h);
        const auto v = m.support().values();
        const double lo = *std::min_element(v.begin(), v.end()) - 10 * h;
        const double hi = *std::max_element(v.begin(), v.end()) + 10 * h;
        const int nodes = 100000;
        const double step = (hi - lo) / (nodes - 1);
        double sum = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double x[] = {lo + step * i};
            const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
            sum += w * std::exp(kde_log_density(m, x));
        }
        CHECK(std::abs(sum * step - 1.0) < 1e-4);
    }
}

TEST_CASE("sample_kde") {
    RngStream rng(3, 3);
    const KdeModel tiny(rows({{1.0, 2.0}, {-4.0, 0.5}}), 1e-12);
    const Dataset s = sample_kde(tiny, 1000, rng);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double d0 = std::hypot(s.row(i)[0] - 1.0, s.row(i)[1] - 2.0);
        const double d1 = std::hypot(s.row(i)[0] + 4.0, s.row(i)[1] - 0.5);
        CHECK(std::min(d0, d1) < 1e-10);
    }

    const Dataset big = sample_kde(KdeModel(rows({{0.0}}), 2.0), 1000000, rng);
    const auto m = big.matrix();
    const double mean = m.mean();
    CHECK(std::abs((m.array() - mean).square().sum() / (1e6 - 1) / 4.0 - 1.0) < 0.02);

    RngStream a(4, 4), b(4, 4);
    CHECK(sample_kde(tiny, 30, a) == sample_kde(tiny, 30, b));
}

TEST_CASE("sampling convolves with the kernel") {
    RngStream rng(5, 5);
    const Dataset support = normal_1d(200, rng);
    const double h = 0.7;
    const auto sm = support.matrix();
    const double mu = sm.mean();
    const double var = (sm.array() - mu).square().mean();
    const Dataset draw = sample_kde(KdeModel(support, h), 400000, rng);
    const auto dm = draw.matrix();
    const double dmu = dm.mean();
    const double dvar = (dm.array() - dmu).square().mean();
    const double total = var + h * h;
    CHECK(std::abs(dmu - mu) < 4 * std::sqrt(total / 4e5));
    CHECK(std::abs(dvar - total) < 4 * total * std::sqrt(2.0 / 4e5) * 1.5);
    CHECK(kde_variance_trace(KdeModel(support, h)) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("variance predictions") {
    CHECK(replace_variance_prediction(2.5, 0.3, 0) == 2.5);
    CHECK(replace_variance_prediction(1.0, 0.5, 4) == doctest::Approx(2.0));
    CHECK(replace_variance_prediction(1.0, 1.0, 9) == doctest::Approx(10.0));
    CHECK(shrinking_variance_bound(1.5, 2.0, 7, 0) == 1.5);
    CHECK(shrinking_variance_bound(0.25, 1.0, 1, 1) == doctest::Approx(1.25));
    // Tail of Σ i^(-7/5) between 10^6 and 10^7 lies within the integral bounds.
    const double a = 1e6, b = 1e7;
    const double diff = shrinking_variance_bound(0, 1, 1, 10000000) - shrinking_variance_bound(0, 1, 1, 1000000);
    auto integral = [](double lo, double hi) { return 2.5 * (std::pow(lo, -0.4) - std::pow(hi, -0.4)); };
    CHECK(diff >= integral(a + 1, b + 1));
    CHECK(diff <= integral(a, b));
}

TEST_CASE("bandwidth schedules") {
    CHECK(BandwidthSchedule::fixed(0.3).at(50, 100) == 0.3);
    CHECK(BandwidthSchedule::shrinking(2.0).at(1, 32) == doctest::Approx(1.0));
    CHECK(BandwidthSchedule::shrinking(1.0).at(10, 10) == doctest::Approx(std::pow(100.0, -0.2)));
    CHECK_THROWS_AS(BandwidthSchedule::fixed(-1.0), Error);
    CHECK_THROWS_AS(BandwidthSchedule::shrinking(0.0), Error);
}

TEST_CASE("Replace NLL trends upward for each sweep bandwidth") {
    // Same setup as the Replace convolution law: 1-D standard normal, n=1000.
    const std::size_t n = 1000, iters = 100;
    KdeRunOptions opts;
    opts.nll_iterations = std::set<std::size_t>{};
    for (std::size_t t = 20; t <= iters; t += 5) opts.nll_iterations->insert(t);
    for (double h : {0.1, 0.5, 1.0}) {
        int rising = 0;
        for (int s = 0; s < 100; ++s) {
            const RngStream rng(s, stable_hash("test/kde/slope"));
            RngStream data = rng.split("data");
            const Dataset real = normal_1d(n, data), test = normal_1d(200, data);
            const MetricSeries series = run_kde_loop({Workflow::replace(), n, iters, s},
                                                     BandwidthSchedule::fixed(h), real, test, rng, opts);
            rising += slope(series.trajectory("nll"), 20, 100) > 0.0;
        }
        CHECK_MESSAGE(rising >= 90, "h=" << h << " rising=" << rising);
    }
}

TEST_CASE("shrinking schedule keeps Accumulate variance under the bound") {
    const std::size_t n = 100, iters = 30;
    const int seeds = 60;
    const double c = 1.0;
    std::vector<std::vector<double>> var(iters);
    for (int s = 0; s < seeds; ++s) {
        const RngStream rng(s, stable_hash("test/kde/shrinking"));
        RngStream data = rng.split("data");
        const Dataset real = normal_1d(n, data);
        KdeRunOptions opts;
        opts.nll_iterations = std::set<std::size_t>{};
        const MetricSeries series =
            run_kde_loop({Workflow::accumulate(), n, iters, s}, BandwidthSchedule::shrinking(c), real, real, rng, opts);
        for (std::size_t t = 1; t <= iters; ++t) var[t - 1].push_back(*series.value("empirical_variance_trace", t));
        CHECK_FALSE(series.value("nll", 1).has_value());
    }
    for (std::size_t t = 1; t <= iters; ++t) {
        const auto& v = var[t - 1];
        double m = 0, ss = 0;
        for (double x : v) m += x;
        m /= seeds;
        for (double x : v) ss += (x - m) * (x - m);
        const double se = std::sqrt(ss / (seeds - 1) / seeds);
        CHECK(m <= shrinking_variance_bound(1.0, c, n, t) + 3 * se);
    }
}

TEST_CASE("run_kde_setting on blobs separates the workflows") {
    auto nll_change = [](Workflow w, int s) {
        KdeRunOptions opts;
        opts.test_size = 300;
        opts.nll_iterations = std::set<std::size_t>{1, 100};
        const MetricSeries series = run_kde_setting({w, 100, 100, s}, BandwidthSchedule::fixed(0.5),
                                                    ToyDatasetSpec::defaults(ToyDataset::Blobs, 100),
                                                    RngStream(s, stable_hash("test/kde/blobs")), opts);
        return *series.value("nll", 100) - *series.value("nll", 1);
    };
    std::vector<double> rep, acc;
    for (int s = 0; s < 5; ++s) {
        rep.push_back(nll_change(Workflow::replace(), s));
        acc.push_back(std::abs(nll_change(Workflow::accumulate(), s)));
    }
    std::sort(rep.begin(), rep.end());
    std::sort(acc.begin(), acc.end());
    CHECK(rep[2] > 0.0);
    CHECK(acc[2] < 0.5);
}
