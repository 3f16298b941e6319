#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rocp/errors.hpp"
#include "rocp/models.hpp"
#include "rocp/regression.hpp"
#include "rocp/rng.hpp"
#include "rocp/rolling.hpp"
#include "rocp/synthetic.hpp"
#include "rocp/window.hpp"

namespace rocp {

// A process description that scales with the series length, so one family
// covers a whole T grid. The drift family can tie both the bump width
// (round(coeff * T^exponent)) and its amplitude (delta = amp / sqrt(width))
// to T. `Planted` bypasses simulation and emits m* = round(coeff * T^exp)
// directly; it exists to exercise the regression pipeline on a known law.
struct ProcessFamily {
    enum class Kind { Ar1, Garch11, PureScale, HolderDrift, Planted };

    Kind kind = Kind::Ar1;
    Ar1Process ar1;
    Garch11Process garch;
    PureScaleProcess pure_scale;

    // holder drift family
    double beta_h = 1.0;
    double base_sigma = 1.0;
    std::optional<std::size_t> m_bump;  // fixed width; otherwise coeff * T^exp
    double bump_coeff = 1.0;
    double bump_exponent = 2.0 / 3.0;
    std::optional<double> delta;  // fixed amplitude; otherwise amp_coeff / sqrt(width)
    double amplitude_coeff = 2.0;

    // planted law
    double planted_coeff = 1.0;
    double planted_exponent = 2.0 / 3.0;

    ProcessSpec resolve(std::size_t T, std::uint64_t seed) const {
        ProcessSpec spec;
        spec.length = T;
        spec.seed = seed;
        switch (kind) {
            case Kind::Ar1:
                spec.kind = ar1;
                break;
            case Kind::Garch11:
                spec.kind = garch;
                break;
            case Kind::PureScale:
                spec.kind = pure_scale;
                break;
            case Kind::HolderDrift: {
                HolderDriftProcess p;
                p.beta_h = beta_h;
                p.base_sigma = base_sigma;
                p.m_bump = m_bump ? *m_bump
                                  : static_cast<std::size_t>(std::max<long long>(
                                        2, std::llround(bump_coeff *
                                                        std::pow(static_cast<double>(T),
                                                                 bump_exponent))));
                p.m_bump = std::min(p.m_bump, T);
                p.delta = delta ? *delta
                                : amplitude_coeff / std::sqrt(static_cast<double>(p.m_bump));
                spec.kind = p;
                break;
            }
            case Kind::Planted:
                throw Error(Err::InvalidSpec, "planted family has no generative process");
        }
        return spec;
    }
};

struct ExperimentConfig {
    ProcessFamily process;
    ModelSpec model = ModelSpec::ar(12);
    std::vector<std::size_t> T_grid;
    std::size_t n_reps = 1;
    std::uint64_t seed = 1;
    double alpha = 0.1;
    int horizon = 1;

    std::size_t grid_points = 30;
    double grid_lo = 0.1;
    double grid_hi = 4.0;
    double beta = 1.0;

    double val_fraction = 0.3;
    // when set, the validation fold is round(coeff * T^exponent) scores
    // instead of a fixed fraction
    std::optional<double> val_count_coeff;
    double val_count_exponent = 2.0 / 3.0;
    std::optional<std::size_t> min_train;
    std::size_t refit_stride = 1;
    bool scaled_scheme = false;  // select on volatility-scaled scores

    bool fixed_effects = false;
    bool exclude_boundary = true;
    unsigned jobs = 1;
};

struct ExperimentOutput {
    std::vector<ScalingRow> rows;
    std::vector<std::string> failures;  // one message per dropped replicate
};

namespace detail {

inline ScalingRow run_one_replicate(const ExperimentConfig& cfg, std::size_t T, std::size_t rep,
                                    std::uint64_t seed) {
    const std::string id = "sim-T" + std::to_string(T) + "-r" + std::to_string(rep);

    if (cfg.process.kind == ProcessFamily::Kind::Planted) {
        ScalingRow row;
        row.series_id = id;
        row.freq_tag = "Synthetic";
        row.length = T;
        row.m_star = static_cast<std::size_t>(std::max<long long>(
            1, std::llround(cfg.process.planted_coeff *
                            std::pow(static_cast<double>(T), cfg.process.planted_exponent))));
        row.at_boundary = false;
        row.coverage = 1.0 - cfg.alpha;
        row.mean_winkler = 0.0;
        return row;
    }

    ProcessSpec pspec = cfg.process.resolve(T, seed);
    pspec.id = id;
    pspec.freq_tag = "Synthetic";
    const TimeSeries series = generate(pspec);

    RollingConfig rcfg;
    rcfg.horizon = cfg.horizon;
    rcfg.min_train = cfg.min_train ? *cfg.min_train : RollingConfig::default_min_train(cfg.model);
    rcfg.refit_stride = cfg.refit_stride;
    rcfg.scale_scores = cfg.scaled_scheme && cfg.model.provides_volatility();

    const auto scores = rolling_scores(series, cfg.model, rcfg);
    const WindowGrid grid = make_grid(T, cfg.beta, cfg.grid_points, cfg.grid_lo, cfg.grid_hi);

    SelectOptions sopts;
    sopts.val_fraction = cfg.val_fraction;
    sopts.scaled = rcfg.scale_scores;
    if (cfg.val_count_coeff) {
        const auto count = static_cast<std::size_t>(std::max<long long>(
            20, std::llround(*cfg.val_count_coeff *
                             std::pow(static_cast<double>(T), cfg.val_count_exponent))));
        sopts.val_count = std::min(count, scores.size() / 2);
    }
    const SelectionResult sel = select_window(scores, grid, cfg.alpha, sopts);

    ScalingRow row;
    row.series_id = id;
    row.freq_tag = series.freq_tag.value_or("Synthetic");
    row.length = T;
    row.m_star = sel.m_hat;
    row.at_boundary = sel.at_boundary != Boundary::No;
    for (const auto& cand : sel.per_candidate)
        if (cand.m == sel.m_hat) {
            row.coverage = cand.coverage;
            row.mean_winkler = cand.mean_winkler;
        }
    return row;
}

}  // namespace detail

// Runs every (T, replicate) cell of the experiment. Replicates are
// independent tasks with counter-derived seeds, so results do not depend
// on the number of worker threads; output is ordered by (T, replicate).
// Failed replicates are dropped with a message; the run fails only when
// nothing survives.
inline ExperimentOutput run_scaling_experiment(const ExperimentConfig& cfg) {
    if (cfg.T_grid.empty()) throw Error(Err::InvalidSpec, "empty T grid");
    if (cfg.n_reps < 1) throw Error(Err::InvalidSpec, "need at least one replicate");

    const std::size_t n_tasks = cfg.T_grid.size() * cfg.n_reps;
    std::vector<std::optional<ScalingRow>> slots(n_tasks);
    std::vector<std::string> fail_slots(n_tasks);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= n_tasks) return;
            const std::size_t T = cfg.T_grid[idx / cfg.n_reps];
            const std::size_t rep = idx % cfg.n_reps;
            try {
                slots[idx] = detail::run_one_replicate(cfg, T, rep, derive_seed(cfg.seed, idx));
            } catch (const Error& e) {
                fail_slots[idx] = "sim-T" + std::to_string(T) + "-r" + std::to_string(rep) +
                                  ": " + err_name(e.code()) + ": " + e.what();
            }
        }
    };

    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(n_tasks)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentOutput out;
    for (std::size_t i = 0; i < n_tasks; ++i) {
        if (slots[i])
            out.rows.push_back(std::move(*slots[i]));
        else
            out.failures.push_back(std::move(fail_slots[i]));
    }
    if (out.rows.empty())
        throw Error(Err::RollingFailed,
                    "every replicate failed; first failure: " +
                        (out.failures.empty() ? std::string("(none)") : out.failures.front()));
    return out;
}

}  // namespace rocp
