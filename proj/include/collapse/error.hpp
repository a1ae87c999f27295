#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace collapse {

enum class ErrorCode {
    InvalidArgument,
    NonSymmetric,
    DimensionMismatch,
    TooFewSamples,
    InvalidN,
    UnknownDataset,
    PoolExhausted,
    RankDeficient,
    ZeroVariance,
    NotNested,
    Collinear,
    ParseError,
    UnknownKey,
    EmptyGrid,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Config errors carry the source position (1-based).
class ParseError : public Error {
public:
    ParseError(std::string message, int line, int column)
        : Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                    message),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace collapse
