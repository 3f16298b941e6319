#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rocp/errors.hpp"
#include "rocp/series.hpp"

namespace rocp {

struct EvalReport {
    double coverage = 0.0;
    double mean_halfwidth = 0.0;
    double mean_winkler = 0.0;
    std::size_t n = 0;
    // std of rolling local-coverage means; absent when n < window
    std::optional<double> local_cov_std;
};

// Winkler interval score: width plus 2/alpha times the breach distance.
inline double winkler(double y, const PredictionInterval& interval, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Err::InvalidSpec, "alpha must lie in (0,1)");
    const double width = interval.upper - interval.lower;
    const double below = std::max(interval.lower - y, 0.0);
    const double above = std::max(y - interval.upper, 0.0);
    return width + (2.0 / alpha) * (below + above);
}

// Fraction of realised values inside their (closed) intervals.
inline double coverage(const std::vector<std::pair<double, PredictionInterval>>& pairs) {
    if (pairs.empty()) throw Error(Err::EmptyInput, "no (y, interval) pairs");
    std::size_t hits = 0;
    for (const auto& [y, iv] : pairs) hits += iv.contains(y) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

struct LocalCoverage {
    std::vector<double> means;  // sliding-window coverage, stride 1
    double overall_std = 0.0;   // std across the window means
};

inline LocalCoverage local_coverage(const std::vector<bool>& hits, std::size_t window = 50) {
    if (window < 1) throw Error(Err::InvalidSpec, "window must be >= 1");
    if (hits.size() < window)
        throw Error(Err::TooFewObservations, "need at least " + std::to_string(window) +
                                                 " observations, have " +
                                                 std::to_string(hits.size()));
    LocalCoverage out;
    out.means.reserve(hits.size() - window + 1);
    std::size_t in_window = 0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        in_window += hits[i] ? 1 : 0;
        if (i + 1 >= window) {
            out.means.push_back(static_cast<double>(in_window) / static_cast<double>(window));
            in_window -= hits[i + 1 - window] ? 1 : 0;
        }
    }
    double mean = 0.0;
    for (double v : out.means) mean += v;
    mean /= static_cast<double>(out.means.size());
    double ss = 0.0;
    for (double v : out.means) ss += (v - mean) * (v - mean);
    out.overall_std = std::sqrt(ss / static_cast<double>(out.means.size()));
    return out;
}

inline EvalReport evaluate(const std::vector<std::pair<double, PredictionInterval>>& pairs,
                           double alpha, std::size_t window = 50) {
    if (pairs.empty()) throw Error(Err::EmptyInput, "no (y, interval) pairs");
    EvalReport report;
    report.n = pairs.size();
    report.coverage = coverage(pairs);
    std::vector<bool> hits;
    hits.reserve(pairs.size());
    for (const auto& [y, iv] : pairs) {
        report.mean_halfwidth += iv.half_width();
        report.mean_winkler += winkler(y, iv, alpha);
        hits.push_back(iv.contains(y));
    }
    report.mean_halfwidth /= static_cast<double>(pairs.size());
    report.mean_winkler /= static_cast<double>(pairs.size());
    if (hits.size() >= window) report.local_cov_std = local_coverage(hits, window).overall_std;
    return report;
}

}  // namespace rocp
