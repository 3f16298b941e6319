#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rocp/errors.hpp"

namespace rocp {

// A univariate series observed at times t = 1..T. All user-facing indices
// (ScoreRecord::origin, error indices) are 1-based.
struct TimeSeries {
    std::vector<double> values;
    std::optional<std::string> id;
    std::optional<std::string> freq_tag;
    // numeric time axis: raw integers, or epoch seconds for ISO-8601 input
    std::optional<std::vector<double>> timestamps;

    std::size_t size() const noexcept { return values.size(); }
};

// One pseudo-out-of-sample conformal score: the absolute h-step forecast
// error made from origin t. `sigma` carries the volatility forecast when
// the producing model has one.
struct ScoreRecord {
    std::size_t origin = 0;  // 1-based index into the series
    int horizon = 1;
    double score = 0.0;  // >= 0, in the units of the series
    std::optional<double> sigma;  // > 0 when present
};

struct PredictionInterval {
    double center = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;  // nominal coverage, in (0,1)

    double half_width() const noexcept { return 0.5 * (upper - lower); }
    bool contains(double y) const noexcept { return lower <= y && y <= upper; }
};

// Contiguous, temporally ordered calibration/validation split of a score
// sequence. Validation always follows calibration.
struct SplitSpec {
    double calibration_fraction = 0.7;
    double validation_fraction = 0.3;
};

inline TimeSeries validate_series(std::vector<double> raw,
                                  std::optional<std::string> id = std::nullopt,
                                  std::optional<std::string> freq_tag = std::nullopt,
                                  std::optional<std::vector<double>> timestamps = std::nullopt) {
    if (raw.empty()) throw Error(Err::EmptySeries, "series is empty");
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i]))
            throw Error(Err::NonFiniteValue,
                        "non-finite value at position " + std::to_string(i + 1), i + 1);
    }
    if (timestamps) {
        if (timestamps->size() != raw.size())
            throw Error(Err::NonMonotoneTimestamps,
                        "timestamp count does not match value count");
        for (std::size_t i = 1; i < timestamps->size(); ++i) {
            if (!((*timestamps)[i] > (*timestamps)[i - 1]))
                throw Error(Err::NonMonotoneTimestamps,
                            "timestamps not strictly increasing at position " +
                                std::to_string(i + 1),
                            i + 1);
        }
    }
    return TimeSeries{std::move(raw), std::move(id), std::move(freq_tag), std::move(timestamps)};
}

// Validating an already-valid TimeSeries returns an equal value.
inline TimeSeries validate_series(const TimeSeries& ts) {
    return validate_series(ts.values, ts.id, ts.freq_tag, ts.timestamps);
}

// Splits `scores` (sorted by origin) into (calibration, validation).
// Calibration takes the first floor(calibration_fraction * n) records,
// validation the next floor(validation_fraction * n).
inline std::pair<std::vector<ScoreRecord>, std::vector<ScoreRecord>>
split_scores(const std::vector<ScoreRecord>& scores, const SplitSpec& spec) {
    if (!(spec.calibration_fraction > 0.0 && spec.calibration_fraction < 1.0) ||
        !(spec.validation_fraction > 0.0 && spec.validation_fraction < 1.0) ||
        spec.calibration_fraction + spec.validation_fraction > 1.0 + 1e-12)
        throw Error(Err::InvalidSpec, "split fractions must lie in (0,1) and sum to <= 1");

    const std::size_t n = scores.size();
    const auto n_cal = static_cast<std::size_t>(std::floor(spec.calibration_fraction * static_cast<double>(n)));
    const auto n_val = static_cast<std::size_t>(std::floor(spec.validation_fraction * static_cast<double>(n)));
    if (n_cal < 1 || n_val < 1 || n_cal + n_val > n)
        throw Error(Err::InsufficientScores,
                    "need at least one record per fold, have " + std::to_string(n));

    std::vector<ScoreRecord> cal(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(n_cal));
    std::vector<ScoreRecord> val(scores.begin() + static_cast<std::ptrdiff_t>(n_cal),
                                 scores.begin() + static_cast<std::ptrdiff_t>(n_cal + n_val));
    return {std::move(cal), std::move(val)};
}

}  // namespace rocp
