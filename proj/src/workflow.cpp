#include "collapse/workflow.hpp"

#include "collapse/error.hpp"

#include <string>

namespace collapse {

std::string_view to_string(WorkflowKind kind) noexcept {
    switch (kind) {
        case WorkflowKind::Replace: return "Replace";
        case WorkflowKind::Accumulate: return "Accumulate";
        case WorkflowKind::AccumulateSubsample: return "Accumulate-Subsample";
    }
    return "Unknown";
}

WorkflowKind parse_workflow_kind(std::string_view name) {
    for (auto k : {WorkflowKind::Accumulate, WorkflowKind::AccumulateSubsample, WorkflowKind::Replace})
        if (to_string(k) == name) return k;
    throw Error(ErrorCode::UnknownKey, "setting '" + std::string(name) +
                                           "' (allowed: \"Accumulate\", \"Accumulate-Subsample\", "
                                           "\"Replace\")");
}

void Workflow::validate() const {
    const bool needs_size = kind == WorkflowKind::AccumulateSubsample;
    if (needs_size != subsample_size.has_value())
        throw Error(ErrorCode::InvalidArgument,
                    needs_size ? "Accumulate-Subsample requires a subsample size"
                               : "subsample size is only valid for Accumulate-Subsample");
    if (needs_size && *subsample_size == 0)
        throw Error(ErrorCode::InvalidArgument, "subsample size must be positive");
}

}  // namespace collapse
