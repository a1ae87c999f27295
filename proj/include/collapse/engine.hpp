#pragma once

#include "collapse/dataset.hpp"
#include "collapse/error.hpp"
#include "collapse/metric_series.hpp"
#include "collapse/rng.hpp"
#include "collapse/workflow.hpp"

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace collapse {

struct LoopConfig {
    Workflow workflow;
    std::size_t n_per_iteration = 0;
    std::size_t num_iterations = 0;
    std::int64_t seed = 0;

    void validate() const;
};

/// A task-setting plugged into the loop. The engine owns the data pool; the
/// adapter owns the model family.
template <class A>
concept TaskAdapter = requires(A& a, const Dataset& data, const typename A::Model& model,
                               RngStream& rng, std::size_t n) {
    typename A::Model;
    { a.task_name() } -> std::convertible_to<std::string>;
    { a.fit(data, n) } -> std::same_as<typename A::Model>;
    { a.sample(model, n, rng) } -> std::same_as<Dataset>;
    { a.evaluate(model, data, n) } -> std::same_as<std::vector<Metric>>;
};

/// Optional fast path for Accumulate: `fit_appended(pool, first_new, t)` is
/// given the whole pool and the index of the first row it has not seen yet,
/// and must return the same model as `fit(pool, t)`.
template <class A>
concept AppendableAdapter = TaskAdapter<A> && requires(A& a, const Dataset& pool, std::size_t n) {
    { a.fit_appended(pool, n, n) } -> std::same_as<typename A::Model>;
};

/// Called once per iteration just before the model is fit.
using TrainingObserver =
    std::function<void(std::size_t iteration, const Dataset& pool, std::span<const std::size_t> rows)>;

/// Uniform sample of `count` distinct indices from [0, population), sorted.
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    RngStream& rng);

/// Runs the fit → sample → evaluate loop for `config.num_iterations` models.
///
/// Model 1 is fit on `real_data` under every workflow. For t ≥ 2 the training
/// set is the previous generation (Replace), the whole pool (Accumulate), or a
/// uniform subsample of the pool without replacement (Accumulate-Subsample).
/// The pool always grows by n rows per iteration, tagged with the generation.
template <TaskAdapter A>
MetricSeries run_loop(const LoopConfig& config, A& adapter, const Dataset& real_data,
                      const Dataset& test_data, const RngStream& rng,
                      const TrainingObserver& observer = {}) {
    config.validate();
    const auto kind = config.workflow.kind;
    const std::size_t n = config.n_per_iteration;
    if (kind != WorkflowKind::Accumulate && real_data.size() < n)
        throw Error(ErrorCode::TooFewSamples, "real data has " + std::to_string(real_data.size()) +
                                                  " rows, workflow needs " + std::to_string(n));
    if (real_data.size() < 2) throw Error(ErrorCode::TooFewSamples, "real data needs >= 2 rows");
    if (test_data.empty()) throw Error(ErrorCode::InvalidArgument, "test data is empty");

    MetricSeries series(std::string(adapter.task_name()), std::string(to_string(kind)), config.seed);
    const RngStream sample_base = rng.split("sample");
    const RngStream subsample_base = rng.split("subsample");

    Dataset pool = real_data;
    pool.reserve(real_data.size() + n * config.num_iterations);
    std::size_t last_generation_start = 0;
    std::size_t seen_by_adapter = 0;
    std::vector<std::size_t> rows;

    for (std::size_t t = 1; t <= config.num_iterations; ++t) {
        const bool first = t == 1;
        const bool accumulate = kind == WorkflowKind::Accumulate || first;
        if (kind == WorkflowKind::AccumulateSubsample && !first) {
            const std::size_t s = *config.workflow.subsample_size;
            if (s > pool.size())
                throw Error(ErrorCode::PoolExhausted, "subsample of " + std::to_string(s) +
                                                          " from pool of " + std::to_string(pool.size()));
            RngStream sub = subsample_base.split(t);
            rows = sample_without_replacement(pool.size(), s, sub);
        } else if (observer) {
            const std::size_t begin = accumulate ? 0 : last_generation_start;
            rows.resize(pool.size() - begin);
            std::iota(rows.begin(), rows.end(), begin);
        }
        if (observer) observer(t, pool, rows);

        auto model = [&]() -> typename A::Model {
            if (kind == WorkflowKind::AccumulateSubsample && !first) return adapter.fit(pool.select(rows), t);
            if (accumulate && kind == WorkflowKind::Accumulate) {
                if constexpr (AppendableAdapter<A>) {
                    auto m = adapter.fit_appended(pool, seen_by_adapter, t);
                    seen_by_adapter = pool.size();
                    return m;
                } else {
                    return adapter.fit(pool, t);
                }
            }
            if (first) return adapter.fit(pool, t);
            return adapter.fit(pool.slice(last_generation_start, pool.size()), t);
        }();

        RngStream sample_rng = sample_base.split(t);
        Dataset synthetic = adapter.sample(model, n, sample_rng);
        if (synthetic.dim() != real_data.dim() || synthetic.size() != n)
            throw Error(ErrorCode::DimensionMismatch, "adapter produced a sample of the wrong shape");
        synthetic.tag_all(Origin::synthetic_from(static_cast<std::uint32_t>(t)));
        last_generation_start = pool.size();
        pool.append(synthetic);

        for (const auto& metric : adapter.evaluate(model, test_data, t))
            series.add(t, metric.name, metric.value);
    }
    return series;
}

}  // namespace collapse
