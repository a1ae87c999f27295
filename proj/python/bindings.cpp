#include "collapse/datagen.hpp"
#include "collapse/error.hpp"
#include "collapse/gaussian.hpp"
#include "collapse/harness/config.hpp"
#include "collapse/harness/sweep.hpp"
#include "collapse/kde.hpp"
#include "collapse/linreg.hpp"
#include "collapse/mixture.hpp"
#include "collapse/stats.hpp"
#include "collapse/validation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace collapse;

namespace {

Dataset to_dataset(const RowMatrix& rows) {
    if (rows.rows() == 0 || rows.cols() == 0) throw Error(ErrorCode::InvalidArgument, "empty array");
    return Dataset(rows, Origin::real());
}

RowMatrix to_array(const Dataset& d) { return d.matrix(); }

py::list records(const MetricSeries& s) {
    py::list out;
    for (const auto& r : s.records()) out.append(py::make_tuple(r.iteration, r.metric, r.value));
    return out;
}

LoopConfig loop(const std::string& workflow, std::size_t n, std::size_t iterations, std::int64_t seed,
                std::optional<std::size_t> subsample) {
    Workflow w{parse_workflow_kind(workflow), std::nullopt};
    if (w.kind == WorkflowKind::AccumulateSubsample) w.subsample_size = subsample.value_or(n);
    return {w, n, iterations, seed};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Self-consuming generative loops: simulation and analysis kernels.";

    // Messages start with the error code, e.g. "UnknownKey: ...".
    py::register_exception<Error>(m, "CollapseError", PyExc_RuntimeError);

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id"))
        .def("split", py::overload_cast<std::string_view>(&RngStream::split, py::const_), py::arg("label"))
        .def("uniform", [](RngStream& r) { return r.uniform(); })
        .def("normal", &RngStream::normal)
        .def("next_u64", &RngStream::next_u64)
        .def_property_readonly("seed", &RngStream::seed)
        .def_property_readonly("stream_id", &RngStream::stream_id);
    m.def("stable_hash", &stable_hash, py::arg("text"));

    m.def("expected_variance_product", &expected_variance_product, py::arg("n"), py::arg("t"));
    m.def("theorem1_limits", [](std::size_t n) {
        const auto l = theorem1_limits(n);
        return py::make_tuple(l.variance_ratio, l.mean_sq_error_ratio);
    }, py::arg("n"));
    m.def("fit_gaussian", [](const RowMatrix& rows, bool unbiased) {
        const GaussianParams p = fit_gaussian(to_dataset(rows), unbiased ? CovarianceNormalization::Unbiased
                                                                       : CovarianceNormalization::MaximumLikelihood);
        return py::make_tuple(Vector(p.mu()), Matrix(p.sigma()));
    }, py::arg("rows"), py::arg("unbiased") = true);
    m.def("wasserstein2_sq", [](const Vector& mu_p, const Matrix& sigma_p, const Vector& mu_q, const Matrix& sigma_q) {
        return wasserstein2_sq(GaussianParams(mu_p, sigma_p), GaussianParams(mu_q, sigma_q));
    }, py::arg("mu_p"), py::arg("sigma_p"), py::arg("mu_q"), py::arg("sigma_q"));
    m.def("run_gaussian", [](const std::string& workflow, std::size_t n, std::size_t iterations, std::int64_t seed,
                             std::size_t dim, double sigma_sq, bool unbiased, std::optional<std::size_t> subsample) {
        const auto norm = unbiased ? CovarianceNormalization::Unbiased : CovarianceNormalization::MaximumLikelihood;
        return records(run_gaussian_setting(loop(workflow, n, iterations, seed, subsample), dim, sigma_sq,
                                            RngStream(static_cast<std::uint64_t>(seed), stable_hash("python/gaussian")),
                                            norm));
    }, py::arg("workflow"), py::arg("n"), py::arg("iterations"), py::arg("seed"), py::arg("dim") = 1,
          py::arg("sigma_sq") = 1.0, py::arg("unbiased") = true, py::arg("subsample_size") = py::none());

    m.def("generate_toy", [](const std::string& name, std::size_t n, std::optional<double> noise, RngStream& rng) {
        ToyDatasetSpec spec = ToyDatasetSpec::defaults(parse_toy_dataset(name), n);
        if (noise) spec.noise = *noise;
        return to_array(generate_toy(spec, rng));
    }, py::arg("name"), py::arg("n"), py::arg("noise") = py::none(), py::arg("rng"));
    m.def("kde_log_density", [](const RowMatrix& support, double h, const Vector& x) {
        return kde_log_density(KdeModel(to_dataset(support), h), std::span<const double>(x.data(), x.size()));
    }, py::arg("support"), py::arg("bandwidth"), py::arg("x"));
    m.def("kde_mean_nll", [](const RowMatrix& support, double h, const RowMatrix& test) {
        const NllResult r = mean_nll_detail(KdeModel(to_dataset(support), h), to_dataset(test));
        return py::make_tuple(r.value, r.diverged);
    }, py::arg("support"), py::arg("bandwidth"), py::arg("test"));
    m.def("sample_kde", [](const RowMatrix& support, double h, std::size_t count, RngStream& rng) {
        return to_array(sample_kde(KdeModel(to_dataset(support), h), count, rng));
    }, py::arg("support"), py::arg("bandwidth"), py::arg("count"), py::arg("rng"));
    m.def("replace_variance_prediction", &replace_variance_prediction, py::arg("var0"), py::arg("h"), py::arg("t"));
    m.def("shrinking_variance_bound", &shrinking_variance_bound, py::arg("var0"), py::arg("c"), py::arg("n"),
          py::arg("t"));

    m.def("fit_ols", [](const RowMatrix& x, const Vector& y) { return fit_ols(to_dataset(x), y).w_hat; },
          py::arg("x"), py::arg("y"));
    m.def("run_linreg", [](const std::string& workflow, std::size_t n, std::size_t iterations, std::int64_t seed,
                           std::size_t dim, double sigma_sq, std::optional<std::size_t> subsample) {
        return records(run_linreg_setting(loop(workflow, n, iterations, seed, subsample),
                                          LinRegTask::isotropic(dim, sigma_sq),
                                          RngStream(static_cast<std::uint64_t>(seed), stable_hash("python/linreg"))));
    }, py::arg("workflow"), py::arg("n"), py::arg("iterations"), py::arg("seed"), py::arg("dim") = 3,
          py::arg("sigma_sq") = 1.0, py::arg("subsample_size") = py::none());

    m.def("regularized_incomplete_beta", &regularized_incomplete_beta, py::arg("a"), py::arg("b"), py::arg("x"));
    m.def("f_upper_tail", &f_upper_tail, py::arg("f"), py::arg("d1"), py::arg("d2"));
    m.def("ols", [](const Matrix& design, const Vector& y) {
        const OlsFit f = ols(design, y);
        return py::dict(py::arg("coefficients") = f.coefficients, py::arg("rss") = f.rss, py::arg("tss") = f.tss);
    }, py::arg("design"), py::arg("response"));

    m.def("covariate_transform", [](std::size_t n_real, std::size_t n_syn) {
        const auto c = covariate_transform({n_real, n_syn, 0.0, 0});
        return py::make_tuple(c.x1, c.x2);
    }, py::arg("n_real"), py::arg("n_syn"));
    m.def("analyze_mixture", [](const std::vector<std::tuple<std::size_t, std::size_t, double>>& rows) {
        std::vector<MixtureCell> cells;
        for (const auto& [r, s, loss] : rows) cells.push_back({r, s, loss, 0});
        const MixtureReport rep = analyze_mixture(cells);
        auto ftest = [](const FTestResult& t) { return py::make_tuple(t.f, t.p, t.df1, t.df2); };
        return py::dict(py::arg("r2_x1") = rep.r2_x1, py::arg("r2_x2") = rep.r2_x2, py::arg("r2_both") = rep.r2_both,
                        py::arg("add_x2_to_x1") = ftest(rep.add_x2_to_x1),
                        py::arg("add_x1_to_x2") = ftest(rep.add_x1_to_x2));
    }, py::arg("cells"), "cells: list of (n_real, n_syn, test_loss)");

    m.def("count_cells", [](const std::string& text) { return parse_config(text).cells.size(); }, py::arg("text"));
    m.def("run_oracle", [](const std::string& name) {
        py::list out;
        for (const auto& c : run_oracle_suite(name)) out.append(py::make_tuple(c.name, c.passed, c.detail));
        return out;
    }, py::arg("name"));
}
