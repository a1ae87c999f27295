#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace collapse {

enum class WorkflowKind { Replace, Accumulate, AccumulateSubsample };

/// Sweep-file spelling: "Replace", "Accumulate", "Accumulate-Subsample".
std::string_view to_string(WorkflowKind kind) noexcept;
/// Exact spelling only; throws UnknownKey listing the allowed names.
WorkflowKind parse_workflow_kind(std::string_view name);

struct Workflow {
    WorkflowKind kind = WorkflowKind::Replace;
    std::optional<std::size_t> subsample_size;

    static Workflow replace() { return {WorkflowKind::Replace, std::nullopt}; }
    static Workflow accumulate() { return {WorkflowKind::Accumulate, std::nullopt}; }
    static Workflow accumulate_subsample(std::size_t size) {
        return {WorkflowKind::AccumulateSubsample, size};
    }

    /// subsample_size is present (and positive) exactly for AccumulateSubsample.
    void validate() const;
};

}  // namespace collapse
