#include "collapse/error.hpp"

namespace collapse {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonSymmetric: return "NonSymmetric";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::InvalidN: return "InvalidN";
        case ErrorCode::UnknownDataset: return "UnknownDataset";
        case ErrorCode::PoolExhausted: return "PoolExhausted";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::NotNested: return "NotNested";
        case ErrorCode::Collinear: return "Collinear";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace collapse
