#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rocp/calibration.hpp"
#include "rocp/csv_io.hpp"
#include "rocp/errors.hpp"
#include "rocp/metrics.hpp"
#include "rocp/series.hpp"

namespace rocp {

enum class SchemeKind { Full, Rolling, VsRolling };

struct SchemeSpec {
    SchemeKind kind = SchemeKind::Full;
    std::size_t m = 0;  // window for rolling schemes

    static SchemeSpec full() { return {SchemeKind::Full, 0}; }
    static SchemeSpec rolling(std::size_t m) { return {SchemeKind::Rolling, m}; }
    static SchemeSpec vs_rolling(std::size_t m) { return {SchemeKind::VsRolling, m}; }
};

inline const char* scheme_name(SchemeKind kind) noexcept {
    switch (kind) {
        case SchemeKind::Full: return "full";
        case SchemeKind::Rolling: return "rolling";
        case SchemeKind::VsRolling: return "vs";
    }
    return "full";
}

// Replays a calibration scheme across a realised score sequence: at each
// origin with enough history the interval half-width is computed from the
// scores strictly prior to it, and the origin's own score decides the hit.
// `first_eval` (index into `scores`) makes cross-scheme comparisons start
// at a common origin; it is clamped up to the scheme's minimum history.
inline EvalReport evaluate_scheme(const std::vector<ScoreRecord>& scores, const SchemeSpec& scheme,
                                  double alpha, std::size_t window = 50,
                                  std::size_t first_eval = 0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Err::InvalidSpec, "alpha must lie in (0,1)");
    const std::size_t n = scores.size();
    const std::size_t min_history = (scheme.kind == SchemeKind::Full) ? 1 : scheme.m;
    if (scheme.kind != SchemeKind::Full && scheme.m < 1)
        throw Error(Err::InvalidSpec, "rolling scheme needs m >= 1");
    if (n <= min_history)
        throw Error(Err::InsufficientScores, "not enough scores to evaluate the scheme");

    const std::size_t start = std::max(first_eval, min_history);
    const bool scaled = scheme.kind == SchemeKind::VsRolling;
    const double level = 1.0 - alpha;

    auto entry = [&](std::size_t i) {
        if (!scaled) return scores[i].score;
        if (!scores[i].sigma || !(*scores[i].sigma > 0.0))
            throw Error(Err::MissingSigma,
                        "no volatility forecast at origin " + std::to_string(scores[i].origin),
                        scores[i].origin);
        return scores[i].score / *scores[i].sigma;
    };

    // sorted view of the active calibration window
    std::vector<double> sorted;
    sorted.reserve(scheme.kind == SchemeKind::Full ? n : scheme.m + 1);
    for (std::size_t i = (scheme.kind == SchemeKind::Full) ? 0 : start - scheme.m; i < start; ++i)
        sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), entry(i)), entry(i));

    std::vector<std::pair<double, PredictionInterval>> pairs;
    pairs.reserve(n - start);
    for (std::size_t i = start; i < n; ++i) {
        const std::size_t k = detail::quantile_rank(level, sorted.size());
        double half_width = sorted[k - 1];
        if (scaled) {
            if (!scores[i].sigma || !(*scores[i].sigma > 0.0))
                throw Error(Err::MissingSigma,
                            "no volatility forecast at origin " +
                                std::to_string(scores[i].origin),
                            scores[i].origin);
            half_width *= *scores[i].sigma;
        }
        pairs.emplace_back(scores[i].score,
                           PredictionInterval{0.0, -half_width, half_width, level});

        if (i + 1 < n) {
            if (scheme.kind != SchemeKind::Full) {
                const double leaving = entry(i - scheme.m);
                sorted.erase(std::lower_bound(sorted.begin(), sorted.end(), leaving));
            }
            const double arriving = entry(i);
            sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), arriving), arriving);
        }
    }
    return evaluate(pairs, alpha, window);
}

// Metrics for externally supplied (y, interval) rows.
inline EvalReport evaluate_predictions(const std::vector<std::pair<double, PredictionInterval>>& pairs,
                                       double alpha, std::size_t window = 50) {
    return evaluate(pairs, alpha, window);
}

inline std::string eval_report_csv(const EvalReport& report, const std::string& scheme,
                                   std::size_t m, int h, double alpha) {
    std::string out = "scheme,m,h,alpha,coverage,mean_halfwidth,mean_winkler,n,local_cov_std\n";
    out += scheme;
    out += ',';
    out += std::to_string(m);
    out += ',';
    out += std::to_string(h);
    out += ',';
    out += detail::fmt_double(alpha);
    out += ',';
    out += detail::fmt_double(report.coverage);
    out += ',';
    out += detail::fmt_double(report.mean_halfwidth);
    out += ',';
    out += detail::fmt_double(report.mean_winkler);
    out += ',';
    out += std::to_string(report.n);
    out += ',';
    if (report.local_cov_std) out += detail::fmt_double(*report.local_cov_std);
    out += '\n';
    return out;
}

}  // namespace rocp
