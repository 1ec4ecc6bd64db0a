#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contractive {

enum class ErrorKind {
    NonPositiveParameter,
    DegenerateNorm,
    NonPositiveTime,
    ZeroXi,
    InvalidBeta,
    ZeroOutcome,
    GridTooSmall,
    NoFiniteEvaluation,
    Config,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers (and the
/// CLI exit-code mapping) which contract was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    bool is_domain_error() const noexcept { return kind_ != ErrorKind::Config; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonPositiveParameter: return "NonPositiveParameter";
        case ErrorKind::DegenerateNorm: return "DegenerateNorm";
        case ErrorKind::NonPositiveTime: return "NonPositiveTime";
        case ErrorKind::ZeroXi: return "ZeroXi";
        case ErrorKind::InvalidBeta: return "InvalidBeta";
        case ErrorKind::ZeroOutcome: return "ZeroOutcome";
        case ErrorKind::GridTooSmall: return "GridTooSmall";
        case ErrorKind::NoFiniteEvaluation: return "NoFiniteEvaluation";
        case ErrorKind::Config: return "ConfigError";
    }
    return "Error";
}

}  // namespace contractive
