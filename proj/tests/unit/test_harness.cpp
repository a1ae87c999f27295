#include "collapse/error.hpp"
#include "collapse/harness/config.hpp"
#include "collapse/harness/plot.hpp"
#include "collapse/harness/results.hpp"
#include "collapse/harness/sweep.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

using namespace collapse;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(COLLAPSE_SOURCE_DIR) / "configs";

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no exception");
    return ErrorCode::InvalidArgument;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("collapse_harness_test_" + name);
    fs::remove_all(p);
    return p;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

constexpr const char* kSmallGaussian = R"(program: src/fit_gaussians/fit_gaussians.py
method: grid
parameters:
  data_dim:
    values: [1, 3]
  num_samples_per_iteration:
    values: [10]
  num_iterations:
    values: [20]
  seed:
    values: [0, 1, 2, 3]
  setting:
    values: ["Accumulate", "Accumulate-Subsample", "Replace"]
  sigma_squared:
    values: [1.0]
)";

}  // namespace

TEST_CASE("the shipped sweep files expand to the full grids") {
    CHECK(load_config(kConfigs / "gaussians.yaml").cells.size() == 7500);
    for (const char* f : {"kdes_blobs.yaml", "kdes_circles.yaml", "kdes_moons.yaml", "kdes_swiss_roll.yaml"}) {
        const SweepConfig c = load_config(kConfigs / f);
        CHECK(c.task == SweepTask::Kdes);
        CHECK(c.cells.size() == 4500);
    }
    const SweepConfig lr = load_config(kConfigs / "linear_regressions.yaml");
    CHECK(lr.task == SweepTask::LinearRegressions);
    CHECK(lr.cells.size() == 22500);
}

TEST_CASE("config errors") {
    std::string text = kSmallGaussian;
    std::string lower = text;
    lower.replace(lower.find("\"Replace\""), 9, "\"replace\"");
    CHECK(code_of([&] { parse_config(lower); }) == ErrorCode::UnknownKey);
    try {
        parse_config(lower);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("Accumulate-Subsample") != std::string::npos);
    }

    std::string empty = text;
    empty.replace(empty.find("[0, 1, 2, 3]"), 12, "[]");
    CHECK(code_of([&] { parse_config(empty); }) == ErrorCode::EmptyGrid);

    std::string unknown = text + "  learning_rate:\n    values: [0.1]\n";
    CHECK(code_of([&] { parse_config(unknown); }) == ErrorCode::UnknownKey);

    CHECK(code_of([&] { parse_config(std::string(kSmallGaussian) + "extra: 1\n"); }) == ErrorCode::UnknownKey);

    const std::string broken = "program: x\nparameters:\n  seed:\n    values: [1, 2\n";
    try {
        parse_config(broken);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() >= 4);
        CHECK(e.column() >= 1);
    }

    std::string typed = text;
    typed.replace(typed.find("values: [20]"), 12, "values: [\"twenty\"]");
    CHECK(code_of([&] { parse_config(typed); }) == ErrorCode::ParseError);

    CHECK(code_of([] { load_config("/nonexistent/sweep.yaml"); }) == ErrorCode::IoError);
}

TEST_CASE("cells and canonical strings") {
    const SweepConfig c = parse_config(kSmallGaussian);
    REQUIRE(c.cells.size() == 24);
    const Cell& cell = c.cells.front();
    CHECK(cell.cell_params().find("seed=") == std::string::npos);
    CHECK(cell.cell_params().find("setting=") == std::string::npos);
    CHECK(cell.cell_params().find("data_dim=") == 0);
    CHECK(cell.canonical().rfind("task=gaussians;", 0) == 0);
    std::set<std::string> stems;
    for (const auto& x : c.cells) stems.insert(cell_file_stem(x));
    CHECK(stems.size() == 24);
    CHECK(cell_file_stem(cell).size() == 16);
}

TEST_CASE("quantiles and aggregation") {
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[i] = i;
    CHECK(quantile_sorted(v, 0.1) == doctest::Approx(9.9));
    CHECK(quantile_sorted(v, 0.5) == doctest::Approx(49.5));
    CHECK(quantile_sorted({7.0}, 0.9) == 7.0);

    auto row = [](std::int64_t seed, double value, std::size_t it = 1) {
        return SeriesRow{"gaussians", "Replace", seed, "data_dim=1;", it, "trace_ratio", value};
    };
    auto one = aggregate({row(0, 3.5)});
    REQUIRE(one.size() == 1);
    CHECK(one[0].mean == 3.5);
    CHECK(one[0].median == 3.5);
    CHECK(one[0].q10 == 3.5);
    CHECK(one[0].q90 == 3.5);
    CHECK(one[0].stderr_ == 0.0);
    CHECK(one[0].seed_count == 1);

    auto three = aggregate({row(0, 1), row(1, 3), row(2, 2), row(0, 10, 2)});
    REQUIRE(three.size() == 2);
    CHECK(three[0].mean == 2.0);
    CHECK(three[0].median == 2.0);
    CHECK(three[0].stderr_ == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(three[0].q10 <= three[0].median);
    CHECK(three[0].median <= three[0].q90);
    CHECK(three[1].seed_count == 1);

    const double inf = std::numeric_limits<double>::infinity();
    auto with_inf = aggregate({row(0, 1), row(1, inf), row(2, 2)});
    CHECK(std::isinf(with_inf[0].mean));
    CHECK(with_inf[0].median == 2.0);
}

TEST_CASE("series and aggregate round-trip through csv and json") {
    const fs::path dir = scratch("roundtrip");
    fs::create_directories(dir);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<SeriesRow> rows = {
        {"kdes", "Replace", 3, "kernel_bandwidth=0.5;", 100, "nll", inf},
        {"kdes", "Replace", 3, "kernel_bandwidth=0.5;", 1, "nll", 0.1 + 0.2},
        {"kdes", "Accumulate", 4, "kernel_bandwidth=0.5;", 1, "nll", -1e-300},
    };
    for (const char* ext : {"s.csv", "s.json"}) {
        write_series(rows, dir / ext);
        CHECK(read_series(dir / ext) == rows);
    }
    CHECK(slurp(dir / "s.csv").rfind(std::string(kSeriesHeader) + "\n", 0) == 0);
    CHECK(slurp(dir / "s.csv").find(",inf\n") != std::string::npos);

    const auto agg = aggregate(rows);
    for (const char* ext : {"a.csv", "a.json"}) {
        write_aggregate(agg, dir / ext);
        CHECK(read_aggregate(dir / ext) == agg);
    }
    CHECK(slurp(dir / "a.csv").rfind("task,setting,seed_count,cell_params,iteration,metric,mean,median,q10,q90,stderr\n", 0) == 0);
    CHECK_THROWS_AS(write_aggregate({}, dir / "empty.csv"), Error);
    CHECK(code_of([&] { read_series(dir / "missing.csv"); }) == ErrorCode::IoError);

    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -0.0})
        CHECK(parse_real(format_real(x)) == x);
    CHECK(format_real(inf) == "inf");
    CHECK(std::isinf(parse_real("-inf")));
    fs::remove_all(dir);
}

TEST_CASE("chart has one polyline per setting") {
    std::vector<SeriesRow> rows;
    for (const char* s : {"Accumulate", "Accumulate-Subsample", "Replace"})
        for (std::size_t t = 1; t <= 5; ++t)
            for (std::int64_t seed = 0; seed < 3; ++seed)
                rows.push_back({"gaussians", s, seed, "data_dim=1;", t, "trace_ratio", 1.0 / double(t + seed)});
    const std::string svg = render_svg(aggregate(rows), {"trace_ratio", std::nullopt, false});
    CHECK(count_of(svg, "<polyline") == 3);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK_THROWS_AS(render_svg(aggregate(rows), {"w2_sq", std::nullopt, false}), Error);
}

TEST_CASE("a small cell runs quickly") {
    Cell cell{SweepTask::Gaussians,
              {{"data_dim", std::int64_t{1}},
               {"num_samples_per_iteration", std::int64_t{10}},
               {"num_iterations", std::int64_t{100}},
               {"seed", std::int64_t{0}},
               {"setting", std::string("Replace")},
               {"sigma_squared", 1.0}}};
    const auto start = std::chrono::steady_clock::now();
    const MetricSeries s = run_cell(cell);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(secs < 1.0);
    CHECK(s.value("w2_sq", 100).has_value());
    CHECK(run_cell(cell) == s);
}

TEST_CASE("sweep output is independent of parallelism; resume recomputes only missing cells") {
    const SweepConfig config = parse_config(kSmallGaussian);
    const fs::path one = scratch("p1"), four = scratch("p4");
    const SweepSummary a = execute_sweep(config, {one, "csv", 1, false, {}});
    const SweepSummary b = execute_sweep(config, {four, "csv", 4, false, {}});
    CHECK(a.total == 24);
    CHECK(a.computed == 24);
    CHECK(a.failed == 0);
    CHECK(b.computed == 24);
    const std::string merged = slurp(one / "series.csv");
    CHECK(merged == slurp(four / "series.csv"));
    CHECK(count_of(merged, "\n") == 1 + 24 * 20 * 4);

    const fs::path victim = one / "cells" / (cell_file_stem(config.cells[5]) + ".csv");
    REQUIRE(fs::exists(victim));
    fs::remove(victim);
    const SweepSummary r = execute_sweep(config, {one, "csv", 2, true, {}});
    CHECK(r.computed == 1);
    CHECK(r.skipped == 23);
    CHECK(slurp(one / "series.csv") == merged);

    const SweepSummary again = execute_sweep(config, {one, "csv", 1, true, {}});
    CHECK(again.computed == 0);
    CHECK(slurp(one / "series.csv") == merged);

    const SweepSummary js = execute_sweep(config, {four, "json", 1, true, {}});
    CHECK(js.skipped == 24);
    CHECK(read_series(four / "series.json") == read_series(one / "series.csv"));
    fs::remove_all(one);
    fs::remove_all(four);
}

TEST_CASE("failing cells are recorded without stopping the sweep") {
    // A Gaussian fit on a single real point cannot run; the other cells can.
    const std::string text = R"(task: mixture
parameters:
  mixture_setting: {values: ["gaussian"]}
  n_real: {values: [1, 4]}
  n_syn: {values: [0]}
  seed: {values: [0, 1, 2]}
  test_size: {values: [100]}
)";
    const SweepConfig config = parse_config(text);
    REQUIRE(config.cells.size() == 6);
    const fs::path out = scratch("fail");
    const SweepSummary s = execute_sweep(config, {out, "csv", 2, false, {}});
    CHECK(s.failed == 3);
    CHECK(s.computed == 3);
    const std::string errors = slurp(out / "errors.txt");
    CHECK(count_of(errors, "\n") == 3);
    CHECK(errors.find("n_real=1;") != std::string::npos);
    const Cell& bad = config.cells.front().get_int("n_real", 0) == 1 ? config.cells.front() : config.cells.back();
    CHECK(slurp(out / "cells" / (cell_file_stem(bad) + ".error")).find("TooFewSamples") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("every task runs through the harness") {
    const std::string kde = R"(program: src/fit_kdes/fit_kdes.py
parameters:
  data_config:
    parameters:
      dataset_name:
        values: ["moons"]
      dataset_kwargs:
        parameters:
          noise:
            values: [0.05]
  kernel:
    values: ["gaussian"]
  kernel_bandwidth:
    values: [0.5]
  num_samples_per_iteration:
    values: [20]
  num_iterations:
    values: [3]
  seed:
    values: [0]
  setting:
    values: ["Replace"]
  test_size:
    values: [50]
)";
    const SweepConfig k = parse_config(kde);
    REQUIRE(k.cells.size() == 1);
    CHECK(k.cells[0].cell_params().find("data_config.dataset_kwargs.noise=0.05;") != std::string::npos);
    CHECK(run_cell(k.cells[0]).value("nll", 3).has_value());

    const std::string lr = R"(program: src/fit_linear_regressions/fit_linear_regressions.py
parameters:
  data_dim: {values: [3]}
  num_samples_per_iteration: {values: [10]}
  num_iterations: {values: [4]}
  seed: {values: [1]}
  setting: {values: ["Accumulate-Subsample"]}
  sigma_squared: {values: [0.1]}
)";
    CHECK(run_cell(parse_config(lr).cells.at(0)).value("test_error", 4).has_value());

    const std::string mix = R"(task: mixture
parameters:
  mixture_setting: {values: ["gaussian"]}
  n_real: {values: [8]}
  n_syn: {values: [0, 16]}
  seed: {values: [2]}
)";
    const SweepConfig m = parse_config(mix);
    REQUIRE(m.cells.size() == 2);
    // Cells of one seed share their real pool, so their stream ids match.
    CHECK(cell_stream(m.cells[0]).stream_id() == cell_stream(m.cells[1]).stream_id());
    const MetricSeries ms = run_cell(m.cells[1]);
    CHECK(ms.records().size() >= 1);
}
