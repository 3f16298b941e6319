#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rocp/errors.hpp"
#include "rocp/linalg.hpp"
#include "rocp/optim.hpp"
#include "rocp/rng.hpp"
#include "rocp/series.hpp"

namespace rocp {

enum class ModelKind { Naive, Ar, ArmaGarch };

struct ModelSpec {
    ModelKind kind = ModelKind::Naive;
    int max_lag = 12;  // AR only
    std::map<std::string, double> options;

    static ModelSpec naive() { return ModelSpec{ModelKind::Naive, 0, {}}; }
    static ModelSpec ar(int max_lag) { return ModelSpec{ModelKind::Ar, max_lag, {}}; }
    static ModelSpec arma_garch() { return ModelSpec{ModelKind::ArmaGarch, 0, {}}; }

    bool provides_volatility() const noexcept { return kind == ModelKind::ArmaGarch; }
};

struct FittedAR {
    int order = 0;
    double intercept = 0.0;
    std::vector<double> coefficients;  // phi_1 .. phi_p
    double residual_variance = 0.0;
    double bic = 0.0;
};

struct ArmaGarchParams {
    double intercept = 0.0;
    double ar1 = 0.0;
    double ma1 = 0.0;
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

// Residual and one-step-ahead conditional variance after filtering a
// history; the starting point of every multi-step forecast.
struct GarchState {
    double last_residual = 0.0;
    double next_variance = 0.0;
};

struct FittedArmaGarch {
    ArmaGarchParams params;
    GarchState last_state;
    double loglik = 0.0;
};

struct FittedNaive {};

using FittedModel = std::variant<FittedNaive, FittedAR, FittedArmaGarch>;

namespace detail {

inline double sample_variance(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / n;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// AR(p), conditional least squares, order selected by BIC
// ---------------------------------------------------------------------------

// All candidate orders p in {0..max_lag} are fit on the common effective
// sample (targets t = max_lag+1 .. T), so their BIC values are comparable.
// BIC(p) = n log(sigma2) + (p+1) log(n); ties break toward smaller p.
inline FittedAR fit_ar(std::span<const double> values, int max_lag) {
    if (max_lag < 0) throw Error(Err::InvalidSpec, "max_lag must be >= 0");
    const std::size_t n = values.size();
    const auto lag = static_cast<std::size_t>(max_lag);
    if (n < lag + 2)
        throw Error(Err::SeriesTooShort,
                    "need at least max_lag + 2 = " + std::to_string(lag + 2) +
                        " observations, have " + std::to_string(n));

    const std::size_t n_eff = n - lag;
    const std::size_t k_max = lag + 1;

    // Gram matrix of [1, y_{t-1}, ..., y_{t-max_lag}] over the common
    // sample; order-p systems are its leading (p+1)-blocks.
    Matrix gram(k_max, k_max);
    std::vector<double> rhs(k_max, 0.0);
    double yty = 0.0;
    for (std::size_t t = lag; t < n; ++t) {
        const double y = values[t];
        yty += y * y;
        for (std::size_t i = 0; i < k_max; ++i) {
            const double xi = (i == 0) ? 1.0 : values[t - i];
            rhs[i] += xi * y;
            for (std::size_t j = i; j < k_max; ++j) {
                const double xj = (j == 0) ? 1.0 : values[t - j];
                gram(i, j) += xi * xj;
            }
        }
    }
    for (std::size_t i = 0; i < k_max; ++i)
        for (std::size_t j = 0; j < i; ++j) gram(i, j) = gram(j, i);

    const double var_floor = 1e-12 * std::max(yty / static_cast<double>(n_eff), 1e-12);
    const double log_n = std::log(static_cast<double>(n_eff));

    std::optional<FittedAR> best;
    bool any_solved = false;
    for (std::size_t p = 0; p <= lag; ++p) {
        const std::size_t k = p + 1;
        Matrix g(k, k);
        std::vector<double> b(k);
        for (std::size_t i = 0; i < k; ++i) {
            b[i] = rhs[i];
            for (std::size_t j = 0; j < k; ++j) g(i, j) = gram(i, j);
        }
        auto coef = solve_spd(g, b);
        if (!coef) continue;  // collinear lags at this order
        any_solved = true;

        double rss = yty;
        for (std::size_t i = 0; i < k; ++i) {
            rss -= 2.0 * (*coef)[i] * b[i];
            for (std::size_t j = 0; j < k; ++j) rss += (*coef)[i] * g(i, j) * (*coef)[j];
        }
        rss = std::max(rss, 0.0);
        const double sigma2 = rss / static_cast<double>(n_eff);
        const double bic = (sigma2 < var_floor)
                               ? -std::numeric_limits<double>::infinity()
                               : static_cast<double>(n_eff) * std::log(sigma2) +
                                     static_cast<double>(k) * log_n;
        if (!best || bic < best->bic) {
            FittedAR fit;
            fit.order = static_cast<int>(p);
            fit.intercept = (*coef)[0];
            fit.coefficients.assign(coef->begin() + 1, coef->end());
            fit.residual_variance = sigma2;
            fit.bic = bic;
            best = std::move(fit);
        }
    }

    if (!any_solved || !best)
        throw Error(Err::SingularDesign, "all candidate lag designs are collinear");
    if (best->residual_variance < var_floor)
        throw Error(Err::SingularDesign,
                    "degenerate fit: residual variance is numerically zero");
    return *best;
}

inline FittedAR fit_ar(const TimeSeries& history, int max_lag) {
    return fit_ar(std::span<const double>(history.values), max_lag);
}

// Iterated plug-in forecast: unknown future values are replaced by their
// own forecasts, recursively to horizon h.
inline double forecast_ar(const FittedAR& model, std::span<const double> history, int h) {
    const auto p = static_cast<std::size_t>(model.order);
    if (history.size() < p)
        throw Error(Err::HistoryTooShort, "history shorter than AR order");
    if (h < 1) throw Error(Err::InvalidSpec, "horizon must be >= 1");

    // buf holds the p most recent values, most recent last
    std::vector<double> buf(history.end() - static_cast<std::ptrdiff_t>(p), history.end());
    double pred = model.intercept;
    for (int step = 0; step < h; ++step) {
        pred = model.intercept;
        for (std::size_t i = 0; i < p; ++i) pred += model.coefficients[i] * buf[p - 1 - i];
        if (p > 0) {
            buf.erase(buf.begin());
            buf.push_back(pred);
        }
    }
    return pred;
}

inline double forecast_ar(const FittedAR& model, const TimeSeries& history, int h) {
    return forecast_ar(model, std::span<const double>(history.values), h);
}

// ---------------------------------------------------------------------------
// ARMA(1,1)-GARCH(1,1), Gaussian quasi-maximum likelihood
// ---------------------------------------------------------------------------

namespace detail {

constexpr double kVarianceCap = 1e30;
constexpr std::uint64_t kGarchFitSeed = 0x6a09e667f3bcc909ULL;

// ARMA(1,1) residual + GARCH(1,1) variance recursion over a history.
// Conditions on the first observation; h2_1 is the sample variance.
// Returns the Gaussian quasi-log-likelihood, or -inf if the recursion
// leaves the finite range.
inline double garch_filter(const ArmaGarchParams& p, std::span<const double> y,
                           GarchState* state_out) {
    const std::size_t n = y.size();
    const double var0 = std::max(sample_variance(y), 1e-10);
    double e_prev = 0.0;
    double hvar = var0;
    double ll = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        if (t >= 2) hvar = p.omega + p.alpha * e_prev * e_prev + p.beta * hvar;
        if (!(hvar > 0.0) || hvar > kVarianceCap) return -std::numeric_limits<double>::infinity();
        const double e = y[t] - p.intercept - p.ar1 * y[t - 1] - p.ma1 * e_prev;
        ll -= 0.5 * (std::log(hvar) + e * e / hvar);
        e_prev = e;
    }
    if (!std::isfinite(ll)) return -std::numeric_limits<double>::infinity();
    if (state_out) {
        state_out->last_residual = e_prev;
        state_out->next_variance = p.omega + p.alpha * e_prev * e_prev + p.beta * hvar;
    }
    return ll;
}

// Unconstrained parameter vector -> feasible ARMA-GARCH parameters.
// omega via exp, (alpha, beta) via a logistic persistence/share pair that
// keeps alpha + beta < 1 strictly.
inline ArmaGarchParams garch_from_theta(const std::vector<double>& th) {
    ArmaGarchParams p;
    p.intercept = th[0];
    p.ar1 = 0.998 * std::tanh(th[1]);
    p.ma1 = 0.998 * std::tanh(th[2]);
    p.omega = std::exp(std::clamp(th[3], -40.0, 40.0));
    const double persistence = 0.9995 / (1.0 + std::exp(-std::clamp(th[4], -40.0, 40.0)));
    const double share = 1.0 / (1.0 + std::exp(-std::clamp(th[5], -40.0, 40.0)));
    p.alpha = persistence * share;
    p.beta = persistence * (1.0 - share);
    return p;
}

}  // namespace detail

struct GarchFitOptions {
    int restarts = 5;
    std::size_t max_evals = 3000;
    std::uint64_t seed = detail::kGarchFitSeed;
};

// Fits ARMA(1,1)-GARCH(1,1) by QMLE over a derivative-free simplex search
// with deterministic random restarts. The series is standardised
// internally; reported parameters are on the original scale.
inline FittedArmaGarch fit_arma_garch(std::span<const double> values,
                                      const GarchFitOptions& opts = {}) {
    const std::size_t n = values.size();
    if (n < 50)
        throw Error(Err::SeriesTooShort,
                    "ARMA-GARCH needs at least 50 observations, have " + std::to_string(n));

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    const double sd = std::sqrt(std::max(detail::sample_variance(values), 1e-20));

    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (values[i] - mean) / sd;

    const auto objective = [&z](const std::vector<double>& th) {
        const ArmaGarchParams p = detail::garch_from_theta(th);
        return -detail::garch_filter(p, z, nullptr);
    };

    // Multistart across persistence levels: the quasi-likelihood has
    // separate basins for persistent and near-iid dynamics, so restarts
    // must cover both. Starts: (persistence, alpha share) on logit scale.
    const std::vector<std::pair<double, double>> bases = {{2.2, -2.08},    // ~0.90, 1:8
                                                          {-0.85, -0.69},  // ~0.30, 1:2
                                                          {-3.89, 0.0}};   // ~0.02, 1:1
    const std::vector<double> theta0 = {0.0, std::atanh(0.2 / 0.998), std::atanh(0.1 / 0.998),
                                        std::log(0.1), 0.0, 0.0};

    Rng rng(opts.seed);
    std::vector<SimplexResult> results;
    for (int r = 0; r < std::max(opts.restarts, 1); ++r) {
        std::vector<double> start = theta0;
        const auto& [persistence, share] = bases[static_cast<std::size_t>(r) % bases.size()];
        start[4] = persistence;
        start[5] = share;
        if (r >= static_cast<int>(bases.size()))
            for (double& c : start) c += 0.5 * rng.normal();
        results.push_back(nelder_mead(objective, start, 0.25, opts.max_evals));
    }
    double best_value = std::numeric_limits<double>::infinity();
    for (const auto& res : results) best_value = std::min(best_value, res.value);
    if (!std::isfinite(best_value))
        throw Error(Err::OptimizerDiverged, "non-finite quasi-likelihood at every restart");

    // When ARCH effects are absent the likelihood is flat in the
    // persistence direction; among restarts within a fixed tolerance of
    // the best, take the least persistent parameters. Genuine volatility
    // clustering separates restarts by far more than the tolerance.
    constexpr double flat_tol = 5.0;
    const SimplexResult* chosen = nullptr;
    double chosen_persistence = std::numeric_limits<double>::infinity();
    for (const auto& res : results) {
        if (res.value > best_value + flat_tol) continue;
        const ArmaGarchParams p = detail::garch_from_theta(res.x);
        if (p.alpha + p.beta < chosen_persistence) {
            chosen_persistence = p.alpha + p.beta;
            chosen = &res;
        }
    }

    const ArmaGarchParams pz = detail::garch_from_theta(chosen->x);
    ArmaGarchParams p;
    p.ar1 = pz.ar1;
    p.ma1 = pz.ma1;
    p.alpha = pz.alpha;
    p.beta = pz.beta;
    p.intercept = pz.intercept * sd + mean * (1.0 - pz.ar1);
    p.omega = pz.omega * sd * sd;

    FittedArmaGarch fit;
    fit.params = p;
    fit.loglik = detail::garch_filter(p, values, &fit.last_state);
    return fit;
}

inline FittedArmaGarch fit_arma_garch(const TimeSeries& history,
                                      const GarchFitOptions& opts = {}) {
    return fit_arma_garch(std::span<const double>(history.values), opts);
}

namespace detail {

// sqrt of the h-step variance recursion started from a filtered state:
// v_{j+1} = omega + (alpha + beta) v_j. Errors out rather than silently
// clamping when an intermediate variance exceeds the representable cap.
inline double volatility_from_state(const ArmaGarchParams& p, const GarchState& state, int h) {
    if (h < 1) throw Error(Err::InvalidSpec, "horizon must be >= 1");
    double v = state.next_variance;
    for (int j = 1; j <= h; ++j) {
        if (j > 1) v = p.omega + (p.alpha + p.beta) * v;
        if (!(v >= 0.0) || v > kVarianceCap)
            throw Error(Err::NumericOverflow, "multi-step variance forecast overflowed");
    }
    return std::sqrt(v);
}

// ARMA(1,1) mean recursion; MA contribution enters at the first step only.
inline double mean_from_state(const ArmaGarchParams& p, const GarchState& state, double last_value,
                              int h) {
    double pred = p.intercept + p.ar1 * last_value + p.ma1 * state.last_residual;
    for (int j = 2; j <= h; ++j) pred = p.intercept + p.ar1 * pred;
    return pred;
}

}  // namespace detail

inline double forecast_volatility(const FittedArmaGarch& model, int h) {
    return detail::volatility_from_state(model.params, model.last_state, h);
}

// ---------------------------------------------------------------------------
// Unified fit / forecast dispatch used by the rolling engine
// ---------------------------------------------------------------------------

inline FittedModel fit_model(const ModelSpec& spec, std::span<const double> history) {
    switch (spec.kind) {
        case ModelKind::Naive:
            if (history.empty()) throw Error(Err::SeriesTooShort, "empty history");
            return FittedNaive{};
        case ModelKind::Ar:
            if (spec.max_lag < 1) throw Error(Err::InvalidSpec, "AR max_lag must be >= 1");
            if (static_cast<std::size_t>(spec.max_lag) >= history.size())
                throw Error(Err::SeriesTooShort, "max_lag must be < series length");
            return fit_ar(history, spec.max_lag);
        case ModelKind::ArmaGarch:
            return fit_arma_garch(history);
    }
    throw Error(Err::InvalidSpec, "unknown model kind");
}

// Point forecast from a fitted model given the (possibly extended) history
// prefix; refilters the ARMA-GARCH state so a model fitted at an earlier
// origin can be reused later in the rolling pass.
inline double point_forecast(const FittedModel& model, std::span<const double> history, int h) {
    if (history.empty()) throw Error(Err::HistoryTooShort, "empty history");
    if (std::holds_alternative<FittedNaive>(model)) return history.back();
    if (const auto* ar = std::get_if<FittedAR>(&model)) return forecast_ar(*ar, history, h);
    const auto& ag = std::get<FittedArmaGarch>(model);
    GarchState state;
    detail::garch_filter(ag.params, history, &state);
    return detail::mean_from_state(ag.params, state, history.back(), h);
}

// h-step conditional volatility forecast; nullopt when the model has no
// volatility component.
inline std::optional<double> volatility_forecast(const FittedModel& model,
                                                 std::span<const double> history, int h) {
    const auto* ag = std::get_if<FittedArmaGarch>(&model);
    if (!ag) return std::nullopt;
    GarchState state;
    detail::garch_filter(ag->params, history, &state);
    return detail::volatility_from_state(ag->params, state, h);
}

}  // namespace rocp
