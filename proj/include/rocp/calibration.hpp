#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "rocp/errors.hpp"
#include "rocp/series.hpp"

namespace rocp {

// The m most recent scores, oldest first. `scaled` marks entries already
// divided by their volatility forecast.
struct CalibrationSet {
    std::vector<double> scores;
    bool scaled = false;

    std::size_t m() const noexcept { return scores.size(); }
};

inline CalibrationSet take_window(const std::vector<ScoreRecord>& scores, std::size_t m) {
    if (m < 1) throw Error(Err::InvalidSpec, "window must be >= 1");
    if (m > scores.size())
        throw Error(Err::WindowTooLarge, "window " + std::to_string(m) + " exceeds " +
                                             std::to_string(scores.size()) + " available scores");
    CalibrationSet cal;
    cal.scores.reserve(m);
    for (std::size_t i = scores.size() - m; i < scores.size(); ++i)
        cal.scores.push_back(scores[i].score);
    return cal;
}

// Scaled window: entries are score / sigma. Every record in the window
// must carry a positive volatility forecast.
inline CalibrationSet scale_window(const std::vector<ScoreRecord>& scores, std::size_t m) {
    if (m < 1) throw Error(Err::InvalidSpec, "window must be >= 1");
    if (m > scores.size())
        throw Error(Err::WindowTooLarge, "window " + std::to_string(m) + " exceeds " +
                                             std::to_string(scores.size()) + " available scores");
    CalibrationSet cal;
    cal.scaled = true;
    cal.scores.reserve(m);
    for (std::size_t i = scores.size() - m; i < scores.size(); ++i) {
        const auto& rec = scores[i];
        if (!rec.sigma || !(*rec.sigma > 0.0))
            throw Error(Err::MissingSigma,
                        "no volatility forecast at origin " + std::to_string(rec.origin),
                        rec.origin);
        cal.scores.push_back(rec.score / *rec.sigma);
    }
    return cal;
}

namespace detail {

// k-th smallest (1-based) of a sequence, without assuming it is sorted.
inline double order_statistic(std::vector<double> v, std::size_t k) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
    return v[k - 1];
}

// Smallest integer k with k >= level * m, computed exactly.
inline std::size_t quantile_rank(double level, std::size_t m) {
    auto k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(m)));
    while (k > 1 && static_cast<double>(k - 1) >= level * static_cast<double>(m)) --k;
    while (static_cast<double>(k) < level * static_cast<double>(m)) ++k;
    return std::max<std::size_t>(k, 1);
}

}  // namespace detail

// Empirical quantile inf{x : Fhat(x) >= level}: the ceil(level*m)-th order
// statistic of the calibration scores. With `plus_one`, the split-conformal
// ceil(level*(m+1)) rank is used instead (clamped to m).
inline double empirical_quantile(const CalibrationSet& cal, double level, bool plus_one = false) {
    if (cal.scores.empty()) throw Error(Err::EmptyInput, "empty calibration set");
    if (!(level > 0.0 && level <= 1.0))
        throw Error(Err::InvalidSpec, "quantile level must lie in (0,1]");
    const std::size_t m = cal.m();
    std::size_t k = detail::quantile_rank(level, plus_one ? m + 1 : m);
    k = std::min(k, m);
    return detail::order_statistic(cal.scores, k);
}

// Symmetric conformal interval [center - qhat, center + qhat] at level
// 1 - alpha from a raw (unscaled) calibration set.
inline PredictionInterval rocp_interval(double center, const CalibrationSet& cal, double alpha,
                                        bool plus_one = false) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Err::InvalidSpec, "alpha must lie in (0,1)");
    if (cal.scaled)
        throw Error(Err::ScaledSetRequiresSigma,
                    "calibration set is volatility-scaled; use vs_rocp_interval");
    const double q = empirical_quantile(cal, 1.0 - alpha, plus_one);
    return PredictionInterval{center, center - q, center + q, 1.0 - alpha};
}

// Volatility-scaled interval: the scaled quantile is re-inflated by the
// current volatility forecast sigma_now.
inline PredictionInterval vs_rocp_interval(double center, const CalibrationSet& cal,
                                           double sigma_now, double alpha,
                                           bool plus_one = false) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Err::InvalidSpec, "alpha must lie in (0,1)");
    if (!cal.scaled)
        throw Error(Err::SchemeMismatch, "calibration set is not volatility-scaled");
    if (!(sigma_now > 0.0))
        throw Error(Err::NonPositiveSigma, "current volatility forecast must be positive");
    const double q = empirical_quantile(cal, 1.0 - alpha, plus_one) * sigma_now;
    return PredictionInterval{center, center - q, center + q, 1.0 - alpha};
}

}  // namespace rocp
