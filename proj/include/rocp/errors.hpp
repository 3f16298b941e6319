#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rocp {

// Every throwing operation in the library raises Error with one of these
// codes. The CLI maps input-class codes to exit 2 and compute-class codes
// to exit 3.
enum class Err {
    // series / input validation
    EmptySeries,
    NonFiniteValue,
    NonMonotoneTimestamps,
    InsufficientScores,
    InvalidSpec,
    BadConfig,
    IoError,

    // model fitting / forecasting
    SeriesTooShort,
    SingularDesign,
    OptimizerDiverged,
    HistoryTooShort,
    NumericOverflow,
    RollingFailed,

    // calibration
    WindowTooLarge,
    MissingSigma,
    ScaledSetRequiresSigma,
    NonPositiveSigma,
    SchemeMismatch,

    // metrics
    EmptyInput,
    TooFewObservations,

    // window selection / bound evaluation
    DegenerateGrid,
    InvalidExponent,
    InvalidDensityBounds,

    // regression
    RankDeficient,
    TooFewRows,
    TooFewGroups,
};

class Error : public std::runtime_error {
  public:
    static constexpr std::size_t no_index = static_cast<std::size_t>(-1);

    Error(Err code, std::string message, std::size_t index = no_index)
        : std::runtime_error(std::move(message)), code_(code), index_(index) {}

    Err code() const noexcept { return code_; }

    // 1-based position of the offending element, when one exists.
    std::size_t index() const noexcept { return index_; }

  private:
    Err code_;
    std::size_t index_;
};

// Input/validation problems exit the CLI with status 2; numeric and
// runtime failures exit with status 3.
inline bool is_input_error(Err code) noexcept {
    switch (code) {
        case Err::SingularDesign:
        case Err::OptimizerDiverged:
        case Err::NumericOverflow:
        case Err::RollingFailed:
            return false;
        default:
            return true;
    }
}

inline const char* err_name(Err code) noexcept {
    switch (code) {
        case Err::EmptySeries: return "EmptySeries";
        case Err::NonFiniteValue: return "NonFiniteValue";
        case Err::NonMonotoneTimestamps: return "NonMonotoneTimestamps";
        case Err::InsufficientScores: return "InsufficientScores";
        case Err::InvalidSpec: return "InvalidSpec";
        case Err::BadConfig: return "BadConfig";
        case Err::IoError: return "IoError";
        case Err::SeriesTooShort: return "SeriesTooShort";
        case Err::SingularDesign: return "SingularDesign";
        case Err::OptimizerDiverged: return "OptimizerDiverged";
        case Err::HistoryTooShort: return "HistoryTooShort";
        case Err::NumericOverflow: return "NumericOverflow";
        case Err::RollingFailed: return "RollingFailed";
        case Err::WindowTooLarge: return "WindowTooLarge";
        case Err::MissingSigma: return "MissingSigma";
        case Err::ScaledSetRequiresSigma: return "ScaledSetRequiresSigma";
        case Err::NonPositiveSigma: return "NonPositiveSigma";
        case Err::SchemeMismatch: return "SchemeMismatch";
        case Err::EmptyInput: return "EmptyInput";
        case Err::TooFewObservations: return "TooFewObservations";
        case Err::DegenerateGrid: return "DegenerateGrid";
        case Err::InvalidExponent: return "InvalidExponent";
        case Err::InvalidDensityBounds: return "InvalidDensityBounds";
        case Err::RankDeficient: return "RankDeficient";
        case Err::TooFewRows: return "TooFewRows";
        case Err::TooFewGroups: return "TooFewGroups";
    }
    return "Unknown";
}

}  // namespace rocp
