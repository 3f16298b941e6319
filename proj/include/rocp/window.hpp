#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rocp/calibration.hpp"
#include "rocp/errors.hpp"
#include "rocp/series.hpp"

namespace rocp {

struct WindowGrid {
    std::vector<std::size_t> candidates;  // strictly increasing, >= 1
    std::size_t T_ref = 0;
    double beta = 1.0;
    double lo_ratio = 0.1;
    double hi_ratio = 4.0;
    std::size_t n_points = 30;
};

// Geometrically spaced candidate windows in [lo, hi] * T^(2b/(2b+1)),
// rounded to integers, clamped to >= 1, deduplicated.
inline WindowGrid make_grid(std::size_t T, double beta, std::size_t n_points = 30,
                            double lo = 0.1, double hi = 4.0) {
    if (T < 4) throw Error(Err::InvalidSpec, "grid needs T >= 4");
    if (!(beta > 0.0)) throw Error(Err::InvalidSpec, "beta must be positive");
    if (n_points < 1 || !(lo > 0.0) || !(hi >= lo))
        throw Error(Err::InvalidSpec, "grid needs n_points >= 1 and 0 < lo <= hi");

    const double anchor = std::pow(static_cast<double>(T), 2.0 * beta / (2.0 * beta + 1.0));
    WindowGrid grid;
    grid.T_ref = T;
    grid.beta = beta;
    grid.lo_ratio = lo;
    grid.hi_ratio = hi;
    grid.n_points = n_points;
    grid.candidates.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double frac = (n_points == 1) ? 0.0
                                            : static_cast<double>(i) /
                                                  static_cast<double>(n_points - 1);
        const double ratio = lo * std::pow(hi / lo, frac);
        const auto cand = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(ratio * anchor)));
        if (grid.candidates.empty() || cand > grid.candidates.back())
            grid.candidates.push_back(cand);
    }
    if (grid.candidates.size() == 1 && T < 8)
        throw Error(Err::DegenerateGrid, "grid collapsed to a single candidate");
    return grid;
}

enum class Boundary { No, Lower, Upper };

inline const char* boundary_name(Boundary b) noexcept {
    switch (b) {
        case Boundary::No: return "none";
        case Boundary::Lower: return "lower";
        case Boundary::Upper: return "upper";
    }
    return "none";
}

struct CandidateEval {
    std::size_t m = 0;
    double mean_winkler = 0.0;
    double coverage = 0.0;
};

struct SelectionResult {
    std::size_t m_hat = 0;
    std::vector<CandidateEval> per_candidate;  // evaluated candidates only
    Boundary at_boundary = Boundary::No;
};

namespace detail {

// Mean validation Winkler and coverage for one candidate window. At each
// validation origin the quantile is taken over the m scores strictly prior
// to it (sliding across the realised sequence), so no validation origin
// ever sees its own score. The Winkler of a forecast-centred interval
// depends only on the score and the half-width:
//   W = 2*hw + (2/alpha) * max(score - hw, 0).
inline CandidateEval eval_window(const std::vector<ScoreRecord>& scores, std::size_t cal_size,
                                 std::size_t m, double alpha, bool scaled) {
    const std::size_t n = scores.size();
    const std::size_t n_val = n - cal_size;

    auto entry = [&](std::size_t i) {
        if (!scaled) return scores[i].score;
        if (!scores[i].sigma || !(*scores[i].sigma > 0.0))
            throw Error(Err::MissingSigma,
                        "no volatility forecast at origin " + std::to_string(scores[i].origin),
                        scores[i].origin);
        return scores[i].score / *scores[i].sigma;
    };

    const std::size_t k = quantile_rank(1.0 - alpha, m);
    std::vector<double> window;
    window.reserve(m + 1);
    for (std::size_t i = cal_size - m; i < cal_size; ++i) window.push_back(entry(i));
    std::sort(window.begin(), window.end());

    double winkler_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t j = 0; j < n_val; ++j) {
        const std::size_t i = cal_size + j;
        const double q = window[k - 1];
        double half_width = q;
        if (scaled) {
            if (!scores[i].sigma || !(*scores[i].sigma > 0.0))
                throw Error(Err::MissingSigma,
                            "no volatility forecast at origin " +
                                std::to_string(scores[i].origin),
                            scores[i].origin);
            half_width = q * *scores[i].sigma;
        }
        const double s = scores[i].score;
        winkler_sum += 2.0 * half_width + (2.0 / alpha) * std::max(s - half_width, 0.0);
        hits += (s <= half_width) ? 1 : 0;

        if (j + 1 < n_val) {
            const double leaving = entry(i - m);
            window.erase(std::lower_bound(window.begin(), window.end(), leaving));
            const double arriving = entry(i);
            window.insert(std::lower_bound(window.begin(), window.end(), arriving), arriving);
        }
    }
    CandidateEval eval;
    eval.m = m;
    eval.mean_winkler = winkler_sum / static_cast<double>(n_val);
    eval.coverage = static_cast<double>(hits) / static_cast<double>(n_val);
    return eval;
}

}  // namespace detail

struct SelectOptions {
    double val_fraction = 0.3;  // size of the temporally final validation fold
    bool scaled = false;        // select on volatility-scaled scores
    // explicit fold size; overrides val_fraction when set (lets experiments
    // match the fold to the drift scale instead of the sample size)
    std::optional<std::size_t> val_count;
};

// Winkler cross-validation over the candidate grid: the window minimising
// the mean validation Winkler wins, ties broken toward smaller m.
// Candidates larger than the calibration fold are dropped.
inline SelectionResult select_window(const std::vector<ScoreRecord>& scores,
                                     const WindowGrid& grid, double alpha,
                                     const SelectOptions& opts = {}) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Err::InvalidSpec, "alpha must lie in (0,1)");
    if (!(opts.val_fraction > 0.0 && opts.val_fraction < 1.0))
        throw Error(Err::InvalidSpec, "val_fraction must lie in (0,1)");

    const std::size_t n = scores.size();
    const std::size_t n_val =
        opts.val_count
            ? *opts.val_count
            : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(
                                           opts.val_fraction * static_cast<double>(n))));
    if (n < 2 || n_val < 1 || n_val >= n)
        throw Error(Err::InsufficientScores, "need at least one calibration and one validation score");
    const std::size_t cal_size = n - n_val;

    SelectionResult result;
    for (std::size_t m : grid.candidates) {
        if (m > cal_size) continue;  // does not fit inside the calibration fold
        result.per_candidate.push_back(detail::eval_window(scores, cal_size, m, alpha, opts.scaled));
    }
    if (result.per_candidate.empty())
        throw Error(Err::InsufficientScores,
                    "no grid candidate fits inside the calibration fold of " +
                        std::to_string(cal_size) + " scores");

    const auto best = std::min_element(
        result.per_candidate.begin(), result.per_candidate.end(),
        [](const CandidateEval& a, const CandidateEval& b) {
            return a.mean_winkler < b.mean_winkler ||
                   (a.mean_winkler == b.mean_winkler && a.m < b.m);
        });
    result.m_hat = best->m;
    if (result.m_hat == result.per_candidate.front().m)
        result.at_boundary = Boundary::Lower;
    else if (result.m_hat == result.per_candidate.back().m)
        result.at_boundary = Boundary::Upper;
    return result;
}

// ---------------------------------------------------------------------------
// Closed-form window rules and bound evaluators
// ---------------------------------------------------------------------------

enum class MixingRegime { ShortMemory, BoundaryMixing, Polynomial };

// Rate-optimal window with unit constant:
//   short memory        T^(2b/(2b+1))
//   boundary mixing     T^(2/3) (log T)^(1/3)   (b = 1 only)
//   polynomial, a in (0,1)   T^(2b/(2b+a))
inline double theoretical_window(std::size_t T, double beta, MixingRegime regime,
                                 double poly_a = 0.0) {
    if (T < 2) throw Error(Err::InvalidSpec, "need T >= 2");
    if (!(beta > 0.0)) throw Error(Err::InvalidSpec, "beta must be positive");
    const double t = static_cast<double>(T);
    switch (regime) {
        case MixingRegime::ShortMemory:
            return std::pow(t, 2.0 * beta / (2.0 * beta + 1.0));
        case MixingRegime::BoundaryMixing:
            if (beta != 1.0)
                throw Error(Err::InvalidSpec, "boundary-mixing rule is defined for beta = 1 only");
            return std::pow(t, 2.0 / 3.0) * std::cbrt(std::log(t));
        case MixingRegime::Polynomial:
            if (!(poly_a > 0.0 && poly_a < 1.0))
                throw Error(Err::InvalidExponent, "polynomial mixing exponent must lie in (0,1)");
            return std::pow(t, 2.0 * beta / (2.0 * beta + poly_a));
    }
    throw Error(Err::InvalidSpec, "unknown regime");
}

// Window-dependent part of the coverage bound:
//   R(m) = Gamma m^{-1/2} + L (m/T)^beta
inline double tradeoff_curve(std::size_t m, std::size_t T, double beta, double gamma, double l) {
    if (m < 1 || T < m) throw Error(Err::InvalidSpec, "need 1 <= m <= T");
    if (!(beta > 0.0) || gamma < 0.0 || l < 0.0)
        throw Error(Err::InvalidSpec, "beta must be positive, Gamma and L nonnegative");
    const double md = static_cast<double>(m);
    return gamma / std::sqrt(md) + l * std::pow(md / static_cast<double>(T), beta);
}

// Continuous stationary point of the tradeoff curve,
//   m = (T^beta Gamma / (2 beta L))^(2/(2beta+1)),
// clamped to [1, T]; pure-noise (L = 0) puts the optimum at T, pure-drift
// (Gamma = 0) at 1.
inline double tradeoff_minimizer(std::size_t T, double beta, double gamma, double l) {
    if (!(beta > 0.0)) throw Error(Err::InvalidSpec, "beta must be positive");
    if (l <= 0.0) return static_cast<double>(T);
    if (gamma <= 0.0) return 1.0;
    const double m = std::pow(std::pow(static_cast<double>(T), beta) * gamma / (2.0 * beta * l),
                              2.0 / (2.0 * beta + 1.0));
    return std::clamp(m, 1.0, static_cast<double>(T));
}

struct BoundParams {
    double f_bar = 1.0;    // density upper bound
    double f_under = 1.0;  // density lower bound
    double a_inf = 0.0;    // cumulative mixing
    double l_drift = 0.0;  // drift rate
    double c_star = 1.0;   // remainder constant
    double r_t = 0.0;      // forecast-estimation radius
    double eta_t = 0.0;    // forecast-estimation failure probability
};

// Four-term coverage deviation bound: quantile noise, linearisation
// remainder, drift bias, estimation error. A diagnostic evaluator over
// user-supplied constants, not an estimator.
inline double coverage_bound(std::size_t m, std::size_t T, double beta, const BoundParams& p) {
    if (!(p.f_under > 0.0) || p.f_bar < p.f_under)
        throw Error(Err::InvalidDensityBounds, "need f_bar >= f_under > 0");
    if (m < 2 || T < m) throw Error(Err::InvalidSpec, "need 2 <= m <= T");
    if (!(beta > 0.0) || p.a_inf < 0.0 || p.l_drift < 0.0 || p.c_star < 0.0 || p.r_t < 0.0 ||
        p.eta_t < 0.0)
        throw Error(Err::InvalidSpec, "bound parameters must be nonnegative, beta positive");
    const double md = static_cast<double>(m);
    const double noise = (p.f_bar / p.f_under) * std::sqrt(0.25 / md + 8.0 * p.a_inf / md);
    const double remainder = p.c_star * std::pow(1.0 + p.a_inf, 0.75) *
                             std::pow(std::log(md), 0.75) /
                             (std::pow(p.f_under, 1.5) * std::pow(md, 0.75));
    const double drift = p.l_drift * std::pow(md / static_cast<double>(T), beta);
    return noise + p.f_bar * remainder + drift + 4.0 * p.f_bar * p.r_t + p.eta_t;
}

// Integer minimiser of the coverage bound over m in [2, T]. The bound is
// a sum of decreasing noise/remainder terms and an increasing drift term,
// so a ternary search applies; a local scan absorbs rounding at the end.
inline std::size_t minimize_coverage_bound(std::size_t T, double beta, const BoundParams& p) {
    if (T < 2) throw Error(Err::InvalidSpec, "need T >= 2");
    std::size_t lo = 2, hi = T;
    while (hi - lo > 8) {
        const std::size_t m1 = lo + (hi - lo) / 3;
        const std::size_t m2 = hi - (hi - lo) / 3;
        if (coverage_bound(m1, T, beta, p) < coverage_bound(m2, T, beta, p))
            hi = m2;
        else
            lo = m1;
    }
    std::size_t best = lo;
    double best_v = coverage_bound(lo, T, beta, p);
    for (std::size_t m = lo + 1; m <= hi; ++m) {
        const double v = coverage_bound(m, T, beta, p);
        if (v < best_v) {
            best_v = v;
            best = m;
        }
    }
    return best;
}

}  // namespace rocp
