#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rocp/errors.hpp"
#include "rocp/models.hpp"
#include "rocp/series.hpp"

namespace rocp {

struct RollingConfig {
    int horizon = 1;
    std::size_t min_train = 30;  // first forecast origin (1-based)
    std::size_t refit_stride = 1;
    bool scale_scores = false;  // record sigma_hat alongside each score

    // Default first origin: max(30, 2*max_lag + 2) for AR, enough history
    // for a stable QMLE for ARMA-GARCH.
    static std::size_t default_min_train(const ModelSpec& spec) {
        switch (spec.kind) {
            case ModelKind::Ar:
                return std::max<std::size_t>(30, 2 * static_cast<std::size_t>(spec.max_lag) + 2);
            case ModelKind::ArmaGarch:
                return 60;
            case ModelKind::Naive:
                return 30;
        }
        return 30;
    }
};

using RollingLog = std::function<void(const std::string&)>;

// Algorithm step 1: for each origin t = min_train..T-h, fit the model on
// the prefix (Y_1..Y_t) and record |Y_{t+h} - Yhat_{t+h|t}|. Models are
// refit every `refit_stride` origins and reused (with the updated history
// prefix) in between. Failed origins are dropped; the run fails only when
// more than 20% of origins fail.
inline std::vector<ScoreRecord> rolling_scores(const TimeSeries& series, const ModelSpec& spec,
                                               const RollingConfig& cfg,
                                               const RollingLog& log = {}) {
    if (cfg.horizon < 1) throw Error(Err::InvalidSpec, "horizon must be >= 1");
    if (cfg.min_train < 1) throw Error(Err::InvalidSpec, "min_train must be >= 1");
    if (cfg.refit_stride < 1) throw Error(Err::InvalidSpec, "refit_stride must be >= 1");

    const std::size_t n = series.size();
    const auto h = static_cast<std::size_t>(cfg.horizon);
    if (n < cfg.min_train + h)
        throw Error(Err::SeriesTooShort,
                    "series length " + std::to_string(n) + " leaves no origin for min_train " +
                        std::to_string(cfg.min_train) + ", h " + std::to_string(cfg.horizon));

    const std::span<const double> values(series.values);
    std::vector<ScoreRecord> records;
    records.reserve(n - h - cfg.min_train + 1);

    std::optional<FittedModel> model;
    std::size_t n_failed = 0;
    std::size_t n_origins = 0;

    for (std::size_t t = cfg.min_train; t + h <= n; ++t) {
        ++n_origins;
        const auto prefix = values.first(t);
        try {
            if (!model || (t - cfg.min_train) % cfg.refit_stride == 0)
                model = fit_model(spec, prefix);
            ScoreRecord rec;
            rec.origin = t;
            rec.horizon = cfg.horizon;
            const double center = point_forecast(*model, prefix, cfg.horizon);
            rec.score = std::fabs(values[t + h - 1] - center);
            if (cfg.scale_scores) rec.sigma = volatility_forecast(*model, prefix, cfg.horizon);
            records.push_back(rec);
        } catch (const Error& e) {
            ++n_failed;
            model.reset();  // retry the fit at the next origin
            if (log)
                log("origin " + std::to_string(t) + ": dropped (" + err_name(e.code()) + ": " +
                    e.what() + ")");
        }
    }

    if (n_failed * 5 > n_origins)
        throw Error(Err::RollingFailed, std::to_string(n_failed) + " of " +
                                            std::to_string(n_origins) +
                                            " origins failed (> 20%)");
    return records;
}

}  // namespace rocp
