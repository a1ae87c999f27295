#include "collapse/harness/config.hpp"

#include "collapse/datagen.hpp"
#include "collapse/error.hpp"
#include "collapse/mixture.hpp"
#include "collapse/workflow.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace collapse {

namespace {

enum class ValueKind { Int, Real, Text };

struct KeySpec {
    ValueKind kind;
    bool required;
};

using Schema = std::map<std::string, KeySpec>;

Schema schema_for(SweepTask task) {
    Schema s;
    if (task != SweepTask::Mixture) {
        s["num_samples_per_iteration"] = {ValueKind::Int, true};
        s["num_iterations"] = {ValueKind::Int, true};
        s["setting"] = {ValueKind::Text, true};
        s["subsample_size"] = {ValueKind::Int, false};
    }
    s["seed"] = {ValueKind::Int, true};
    switch (task) {
        case SweepTask::Gaussians:
            s["data_dim"] = {ValueKind::Int, true};
            s["sigma_squared"] = {ValueKind::Real, false};
            s["covariance_normalization"] = {ValueKind::Text, false};
            break;
        case SweepTask::Kdes:
            s["data_config.dataset_name"] = {ValueKind::Text, true};
            s["data_config.dataset_kwargs.noise"] = {ValueKind::Real, false};
            s["data_config.dataset_kwargs.n_features"] = {ValueKind::Int, false};
            s["data_config.dataset_kwargs.centers"] = {ValueKind::Int, false};
            s["data_config.dataset_kwargs.factor"] = {ValueKind::Real, false};
            s["kernel"] = {ValueKind::Text, false};
            s["kernel_bandwidth"] = {ValueKind::Real, true};
            s["bandwidth_schedule"] = {ValueKind::Text, false};
            s["test_size"] = {ValueKind::Int, false};
            s["nll_stride"] = {ValueKind::Int, false};
            break;
        case SweepTask::LinearRegressions:
            s["data_dim"] = {ValueKind::Int, true};
            s["sigma_squared"] = {ValueKind::Real, false};
            break;
        case SweepTask::Mixture:
            s["mixture_setting"] = {ValueKind::Text, false};
            s["data_dim"] = {ValueKind::Int, false};
            s["sigma_squared"] = {ValueKind::Real, false};
            s["source_size"] = {ValueKind::Int, false};
            s["test_size"] = {ValueKind::Int, false};
            s["n_real"] = {ValueKind::Int, true};
            s["n_syn"] = {ValueKind::Int, true};
            break;
    }
    return s;
}

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& message) {
    const YAML::Mark m = node.Mark();
    throw ParseError(message, m.line + 1, m.column + 1);
}

ParamValue parse_scalar(const YAML::Node& node, const std::string& key, ValueKind kind) {
    if (!node.IsScalar()) fail_at(node, "value of '" + key + "' must be a scalar");
    const std::string& text = node.Scalar();
    if (kind == ValueKind::Text) return text;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (kind == ValueKind::Int) {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec == std::errc() && ptr == last) return v;
        fail_at(node, "value '" + text + "' of '" + key + "' is not an integer");
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        fail_at(node, "value '" + text + "' of '" + key + "' is not a finite number");
    return v;
}

void check_value(const YAML::Node& node, const std::string& key, const ParamValue& value) {
    auto positive = [&](std::int64_t minimum) {
        if (std::get<std::int64_t>(value) < minimum)
            fail_at(node, "'" + key + "' must be >= " + std::to_string(minimum));
    };
    if (key == "setting") {
        parse_workflow_kind(std::get<std::string>(value));
    } else if (key == "data_config.dataset_name") {
        try {
            parse_toy_dataset(std::get<std::string>(value));
        } catch (const Error& e) {
            throw Error(ErrorCode::UnknownKey, e.what());
        }
    } else if (key == "kernel") {
        if (std::get<std::string>(value) != "gaussian")
            throw Error(ErrorCode::UnknownKey, "kernel '" + std::get<std::string>(value) + "'; allowed: gaussian");
    } else if (key == "bandwidth_schedule") {
        const auto& v = std::get<std::string>(value);
        if (v != "fixed" && v != "shrinking")
            throw Error(ErrorCode::UnknownKey, "bandwidth_schedule '" + v + "'; allowed: fixed, shrinking");
    } else if (key == "covariance_normalization") {
        const auto& v = std::get<std::string>(value);
        if (v != "unbiased" && v != "maximum_likelihood")
            throw Error(ErrorCode::UnknownKey,
                        "covariance_normalization '" + v + "'; allowed: unbiased, maximum_likelihood");
    } else if (key == "mixture_setting") {
        parse_mixture_setting(std::get<std::string>(value));
    } else if (key == "num_samples_per_iteration" || key == "source_size") {
        positive(2);
    } else if (key == "data_dim" || key == "num_iterations" || key == "subsample_size" || key == "n_real" ||
               key == "test_size" || key == "nll_stride" || key.ends_with("n_features") || key.ends_with("centers")) {
        positive(1);
    } else if (key == "n_syn") {
        positive(0);
    } else if (std::holds_alternative<double>(value)) {
        const double v = std::get<double>(value);
        if (key == "data_config.dataset_kwargs.noise" ? v < 0.0 : !(v > 0.0))
            fail_at(node, "'" + key + "' out of range");
    }
}

using Grid = std::map<std::string, std::vector<ParamValue>>;

void collect(const YAML::Node& parameters, const std::string& prefix, const Schema& schema, Grid& grid) {
    if (!parameters.IsMap()) fail_at(parameters, "'parameters' must be a mapping");
    for (const auto& entry : parameters) {
        const std::string name = entry.first.as<std::string>();
        const std::string key = prefix.empty() ? name : prefix + "." + name;
        const YAML::Node& body = entry.second;
        if (!body.IsMap()) fail_at(body, "'" + key + "' must be a mapping with 'values' or 'parameters'");
        if (body["parameters"]) {
            if (body.size() != 1) fail_at(body, "'" + key + "' mixes 'parameters' with other keys");
            collect(body["parameters"], key, schema, grid);
            continue;
        }
        const auto spec = schema.find(key);
        if (spec == schema.end()) {
            std::string allowed;
            for (const auto& [k, _] : schema) allowed += (allowed.empty() ? "" : ", ") + k;
            throw Error(ErrorCode::UnknownKey, "parameter '" + key + "'; allowed: " + allowed);
        }
        std::vector<ParamValue> values;
        if (body["values"] && body.size() == 1) {
            const YAML::Node list = body["values"];
            if (!list.IsSequence()) fail_at(list, "'values' of '" + key + "' must be a list");
            for (const auto& item : list) values.push_back(parse_scalar(item, key, spec->second.kind));
            if (values.empty()) throw Error(ErrorCode::EmptyGrid, "parameter '" + key + "' has no values");
        } else if (body["value"] && body.size() == 1) {
            values.push_back(parse_scalar(body["value"], key, spec->second.kind));
        } else {
            fail_at(body, "'" + key + "' must contain exactly one of 'values' or 'value'");
        }
        std::set<std::string> seen;
        for (const auto& v : values) {
            check_value(body, key, v);
            if (!seen.insert(format_param(v)).second)
                fail_at(body, "duplicate value '" + format_param(v) + "' for '" + key + "'");
        }
        grid[key] = std::move(values);
    }
}

SweepTask infer_task(const std::string& program) {
    if (program.find("fit_gaussians") != std::string::npos) return SweepTask::Gaussians;
    if (program.find("fit_kdes") != std::string::npos) return SweepTask::Kdes;
    if (program.find("fit_linear_regressions") != std::string::npos) return SweepTask::LinearRegressions;
    if (program.find("mixture") != std::string::npos) return SweepTask::Mixture;
    throw Error(ErrorCode::UnknownKey, "cannot infer the task from program '" + program +
                                           "'; add 'task: gaussians|kdes|linear_regressions|mixture'");
}

}  // namespace

std::string_view to_string(SweepTask task) noexcept {
    switch (task) {
        case SweepTask::Gaussians: return "gaussians";
        case SweepTask::Kdes: return "kdes";
        case SweepTask::LinearRegressions: return "linear_regressions";
        case SweepTask::Mixture: return "mixture";
    }
    return "unknown";
}

SweepTask parse_sweep_task(std::string_view name) {
    for (auto t : {SweepTask::Gaussians, SweepTask::Kdes, SweepTask::LinearRegressions, SweepTask::Mixture})
        if (name == to_string(t)) return t;
    throw Error(ErrorCode::UnknownKey,
                "task '" + std::string(name) + "'; allowed: gaussians, kdes, linear_regressions, mixture");
}

std::string format_param(const ParamValue& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&value)) {
        char buf[64];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *d);
        return std::string(buf, ptr);
    }
    return std::get<std::string>(value);
}

std::int64_t Cell::seed() const { return get_int("seed", 0); }

std::string Cell::setting() const {
    if (task == SweepTask::Mixture) return get_string("mixture_setting", "gaussian");
    return get_string("setting", "");
}

std::string Cell::cell_params() const {
    std::string out;
    for (const auto& [k, v] : params) {
        if (k == "seed" || k == "setting" || k == "mixture_setting") continue;
        out += k + "=" + format_param(v) + ";";
    }
    return out;
}

std::string Cell::canonical() const {
    std::string out = "task=" + std::string(to_string(task)) + ";";
    for (const auto& [k, v] : params) out += k + "=" + format_param(v) + ";";
    return out;
}

std::int64_t Cell::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : std::get<std::int64_t>(it->second);
}

double Cell::get_real(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : std::get<double>(it->second);
}

std::string Cell::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : std::get<std::string>(it->second);
}

SweepConfig parse_config(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    if (!root.IsMap()) throw ParseError("top level must be a mapping", 1, 1);

    SweepConfig config;
    std::optional<SweepTask> explicit_task;
    YAML::Node parameters;
    for (const auto& entry : root) {
        const std::string key = entry.first.as<std::string>();
        const YAML::Node& value = entry.second;
        if (key == "parameters") {
            parameters = value;
            continue;
        }
        if (key != "program" && key != "project" && key != "method" && key != "task")
            throw Error(ErrorCode::UnknownKey,
                        "top-level key '" + key + "'; allowed: program, project, method, task, parameters");
        if (!value.IsScalar()) fail_at(value, "'" + key + "' must be a scalar");
        if (key == "program") config.program = value.Scalar();
        if (key == "project") config.project = value.Scalar();
        if (key == "method" && value.Scalar() != "grid")
            throw Error(ErrorCode::UnknownKey, "method '" + value.Scalar() + "'; allowed: grid");
        if (key == "task") explicit_task = parse_sweep_task(value.Scalar());
    }
    if (!parameters) throw ParseError("missing 'parameters' block", 1, 1);
    config.task = explicit_task ? *explicit_task : infer_task(config.program);

    const Schema schema = schema_for(config.task);
    Grid grid;
    collect(parameters, "", schema, grid);
    for (const auto& [key, spec] : schema)
        if (spec.required && !grid.contains(key)) fail_at(parameters, "missing required parameter '" + key + "'");

    std::size_t total = 1;
    for (const auto& [_, values] : grid) total *= values.size();
    config.cells.reserve(total);
    std::vector<std::size_t> index(grid.size(), 0);
    for (std::size_t c = 0; c < total; ++c) {
        Cell cell;
        cell.task = config.task;
        std::size_t k = 0;
        for (const auto& [key, values] : grid) cell.params.emplace(key, values[index[k++]]);
        config.cells.push_back(std::move(cell));
        // Odometer increment, last key fastest.
        for (std::size_t j = grid.size(); j-- > 0;) {
            auto it = std::next(grid.begin(), static_cast<std::ptrdiff_t>(j));
            if (++index[j] < it->second.size()) break;
            index[j] = 0;
        }
    }
    for (const auto& cell : config.cells) {
        const auto n = cell.get_int("num_samples_per_iteration", 0);
        if (cell.has("subsample_size") && cell.get_int("subsample_size", 0) > n)
            throw Error(ErrorCode::InvalidArgument, "subsample_size exceeds num_samples_per_iteration");
    }
    return config;
}

SweepConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace collapse
