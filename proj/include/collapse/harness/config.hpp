#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace collapse {

enum class SweepTask { Gaussians, Kdes, LinearRegressions, Mixture };

std::string_view to_string(SweepTask task) noexcept;
/// "gaussians", "kdes", "linear_regressions", "mixture"; throws UnknownKey.
SweepTask parse_sweep_task(std::string_view name);

using ParamValue = std::variant<std::int64_t, double, std::string>;

/// Canonical text of a value: integers in decimal, reals in shortest
/// round-trip form, strings verbatim.
std::string format_param(const ParamValue& value);

/// One grid point. Keys are flattened with '.' for nested `parameters:`
/// blocks, e.g. data_config.dataset_kwargs.noise.
struct Cell {
    SweepTask task = SweepTask::Gaussians;
    std::map<std::string, ParamValue> params;

    std::int64_t seed() const;
    /// The workflow name for loop tasks, the mixture setting for mixture cells.
    std::string setting() const;
    /// Sorted `key=value;` over every parameter except seed and setting.
    std::string cell_params() const;
    /// task=...;key=value;... over every parameter; hashed into the RNG stream id.
    std::string canonical() const;

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_real(const std::string& key, double fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    bool has(const std::string& key) const { return params.contains(key); }
};

struct SweepConfig {
    SweepTask task = SweepTask::Gaussians;
    std::string program;
    std::string project;
    std::vector<Cell> cells;
};

/// Parses a sweep file. Throws ParseError (with 1-based line/column) for
/// malformed text or ill-typed values, UnknownKey for keys or vocabulary
/// outside the task's schema, EmptyGrid for an empty value list.
SweepConfig parse_config(std::string_view text);

/// Throws IoError if the file cannot be read.
SweepConfig load_config(const std::filesystem::path& path);

}  // namespace collapse
