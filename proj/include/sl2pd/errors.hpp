// errors.hpp - Error kinds raised by the sl2pd library.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sl2pd {

enum class ErrorKind {
    NegativeLadderNorm,
    NonzeroRemainder,
    LabelMismatch,
    UnsupportedClosedForm,
    ConvergenceFailure,
    NoConvergence,
    DegenerateLeadingCoefficient,
    ImaginaryFrequency,
    CutoffTooSmall,
    NoRealRoot,
    NegativePhiArgument,
    NegativePhi,
    ChartSingularity,
    StepFailure,
    DegenerateDenominator,
    DimensionMismatch,
    InvalidArgument,
    ParseError,
    ValidationError,
    IoError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NegativeLadderNorm: return "NegativeLadderNorm";
    case ErrorKind::NonzeroRemainder: return "NonzeroRemainder";
    case ErrorKind::LabelMismatch: return "LabelMismatch";
    case ErrorKind::UnsupportedClosedForm: return "UnsupportedClosedForm";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorKind::ImaginaryFrequency: return "ImaginaryFrequency";
    case ErrorKind::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorKind::NoRealRoot: return "NoRealRoot";
    case ErrorKind::NegativePhiArgument: return "NegativePhiArgument";
    case ErrorKind::NegativePhi: return "NegativePhi";
    case ErrorKind::ChartSingularity: return "ChartSingularity";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

// Every failure carries a machine-readable kind so sweeps can flag rows.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace sl2pd
