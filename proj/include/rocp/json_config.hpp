#pragma once

#include <string>

#include <json.hpp>

#include "rocp/errors.hpp"
#include "rocp/experiment.hpp"
#include "rocp/models.hpp"
#include "rocp/regression.hpp"
#include "rocp/synthetic.hpp"

namespace rocp {

using json = nlohmann::json;

inline ModelSpec model_spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw Error(Err::BadConfig, "model spec needs a `kind` field");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "naive") return ModelSpec::naive();
    if (kind == "ar") {
        const int max_lag = j.value("max_lag", 12);
        if (max_lag < 1) throw Error(Err::BadConfig, "ar model needs max_lag >= 1");
        return ModelSpec::ar(max_lag);
    }
    if (kind == "arma_garch") return ModelSpec::arma_garch();
    throw Error(Err::BadConfig, "unknown model kind: " + kind);
}

inline json model_spec_to_json(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::Naive: return json{{"kind", "naive"}};
        case ModelKind::Ar: return json{{"kind", "ar"}, {"max_lag", spec.max_lag}};
        case ModelKind::ArmaGarch: return json{{"kind", "arma_garch"}};
    }
    throw Error(Err::BadConfig, "unknown model kind");
}

// Accepts "naive", "ar", "ar:12", "arma_garch" from the command line.
inline ModelSpec model_spec_from_string(const std::string& text) {
    if (text == "naive") return ModelSpec::naive();
    if (text == "arma_garch") return ModelSpec::arma_garch();
    if (text == "ar") return ModelSpec::ar(12);
    if (text.rfind("ar:", 0) == 0) {
        try {
            const int lag = std::stoi(text.substr(3));
            if (lag < 1) throw Error(Err::BadConfig, "ar model needs max_lag >= 1");
            return ModelSpec::ar(lag);
        } catch (const std::invalid_argument&) {
        } catch (const std::out_of_range&) {
        }
    }
    throw Error(Err::BadConfig, "unknown model: " + text + " (expected naive|ar[:lag]|arma_garch)");
}

inline ProcessFamily process_family_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw Error(Err::BadConfig, "process spec needs a `kind` field");
    const std::string kind = j.at("kind").get<std::string>();
    ProcessFamily fam;
    if (kind == "ar1") {
        fam.kind = ProcessFamily::Kind::Ar1;
        fam.ar1.phi = j.value("phi", 0.0);
        fam.ar1.sigma = j.value("sigma", 1.0);
    } else if (kind == "garch11") {
        fam.kind = ProcessFamily::Kind::Garch11;
        fam.garch.omega = j.value("omega", 0.05);
        fam.garch.alpha = j.value("alpha", 0.1);
        fam.garch.beta = j.value("beta", 0.8);
    } else if (kind == "pure_scale") {
        fam.kind = ProcessFamily::Kind::PureScale;
        const json path = j.value("path", json{{"kind", "constant"}});
        const std::string pk = path.value("kind", "constant");
        if (pk == "constant") {
            fam.pure_scale.path = ConstantSigmaPath{path.value("level", 1.0)};
        } else if (pk == "log_sine") {
            fam.pure_scale.path = LogSineSigmaPath{path.value("base", 1.0),
                                                   path.value("amplitude", 0.5),
                                                   path.value("period", 100.0)};
        } else {
            throw Error(Err::BadConfig, "unknown sigma path kind: " + pk);
        }
    } else if (kind == "holder_drift") {
        fam.kind = ProcessFamily::Kind::HolderDrift;
        fam.beta_h = j.value("beta_h", 1.0);
        fam.base_sigma = j.value("base_sigma", 1.0);
        if (j.contains("m_bump")) fam.m_bump = j.at("m_bump").get<std::size_t>();
        fam.bump_coeff = j.value("bump_coeff", 1.0);
        fam.bump_exponent = j.value("bump_exponent", 2.0 / 3.0);
        if (j.contains("delta")) fam.delta = j.at("delta").get<double>();
        fam.amplitude_coeff = j.value("amplitude_coeff", 2.0);
    } else if (kind == "planted") {
        fam.kind = ProcessFamily::Kind::Planted;
        fam.planted_coeff = j.value("coeff", 1.0);
        fam.planted_exponent = j.value("exponent", 2.0 / 3.0);
    } else {
        throw Error(Err::BadConfig, "unknown process kind: " + kind);
    }
    return fam;
}

inline json process_family_to_json(const ProcessFamily& fam) {
    json j;
    switch (fam.kind) {
        case ProcessFamily::Kind::Ar1:
            j = {{"kind", "ar1"}, {"phi", fam.ar1.phi}, {"sigma", fam.ar1.sigma}};
            break;
        case ProcessFamily::Kind::Garch11:
            j = {{"kind", "garch11"},
                 {"omega", fam.garch.omega},
                 {"alpha", fam.garch.alpha},
                 {"beta", fam.garch.beta}};
            break;
        case ProcessFamily::Kind::PureScale: {
            json path;
            if (const auto* c = std::get_if<ConstantSigmaPath>(&fam.pure_scale.path))
                path = {{"kind", "constant"}, {"level", c->level}};
            else {
                const auto& s = std::get<LogSineSigmaPath>(fam.pure_scale.path);
                path = {{"kind", "log_sine"},
                        {"base", s.base},
                        {"amplitude", s.amplitude},
                        {"period", s.period}};
            }
            j = {{"kind", "pure_scale"}, {"path", path}};
            break;
        }
        case ProcessFamily::Kind::HolderDrift:
            j = {{"kind", "holder_drift"},
                 {"beta_h", fam.beta_h},
                 {"base_sigma", fam.base_sigma},
                 {"bump_coeff", fam.bump_coeff},
                 {"bump_exponent", fam.bump_exponent},
                 {"amplitude_coeff", fam.amplitude_coeff}};
            if (fam.m_bump) j["m_bump"] = *fam.m_bump;
            if (fam.delta) j["delta"] = *fam.delta;
            break;
        case ProcessFamily::Kind::Planted:
            j = {{"kind", "planted"},
                 {"coeff", fam.planted_coeff},
                 {"exponent", fam.planted_exponent}};
            break;
    }
    return j;
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
    if (!j.is_object()) throw Error(Err::BadConfig, "experiment config must be a JSON object");
    ExperimentConfig cfg;
    if (!j.contains("process")) throw Error(Err::BadConfig, "experiment config needs `process`");
    cfg.process = process_family_from_json(j.at("process"));
    if (j.contains("model")) cfg.model = model_spec_from_json(j.at("model"));
    if (!j.contains("T_grid")) throw Error(Err::BadConfig, "experiment config needs `T_grid`");
    cfg.T_grid = j.at("T_grid").get<std::vector<std::size_t>>();
    if (cfg.T_grid.empty()) throw Error(Err::BadConfig, "T_grid must be nonempty");
    cfg.n_reps = j.value("n_reps", std::size_t{1});
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.alpha = j.value("alpha", 0.1);
    cfg.horizon = j.value("h", 1);
    cfg.grid_points = j.value("grid_points", std::size_t{30});
    cfg.grid_lo = j.value("grid_lo", 0.1);
    cfg.grid_hi = j.value("grid_hi", 4.0);
    cfg.beta = j.value("beta", 1.0);
    cfg.val_fraction = j.value("val_fraction", 0.3);
    if (j.contains("val_count_coeff")) cfg.val_count_coeff = j.at("val_count_coeff").get<double>();
    cfg.val_count_exponent = j.value("val_count_exponent", 2.0 / 3.0);
    if (j.contains("min_train")) cfg.min_train = j.at("min_train").get<std::size_t>();
    cfg.refit_stride = j.value("refit_stride", std::size_t{1});
    cfg.scaled_scheme = j.value("scaled_scheme", false);
    cfg.fixed_effects = j.value("fixed_effects", false);
    cfg.exclude_boundary = j.value("exclude_boundary", true);
    cfg.jobs = j.value("jobs", 1u);
    return cfg;
}

inline json experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["process"] = process_family_to_json(cfg.process);
    j["model"] = model_spec_to_json(cfg.model);
    j["T_grid"] = cfg.T_grid;
    j["n_reps"] = cfg.n_reps;
    j["seed"] = cfg.seed;
    j["alpha"] = cfg.alpha;
    j["h"] = cfg.horizon;
    j["grid_points"] = cfg.grid_points;
    j["grid_lo"] = cfg.grid_lo;
    j["grid_hi"] = cfg.grid_hi;
    j["beta"] = cfg.beta;
    j["val_fraction"] = cfg.val_fraction;
    if (cfg.val_count_coeff) {
        j["val_count_coeff"] = *cfg.val_count_coeff;
        j["val_count_exponent"] = cfg.val_count_exponent;
    }
    if (cfg.min_train) j["min_train"] = *cfg.min_train;
    j["refit_stride"] = cfg.refit_stride;
    j["scaled_scheme"] = cfg.scaled_scheme;
    j["fixed_effects"] = cfg.fixed_effects;
    j["exclude_boundary"] = cfg.exclude_boundary;
    j["jobs"] = cfg.jobs;
    return j;
}

inline json regression_result_to_json(const RegressionResult& r, bool fixed_effects) {
    json j;
    j["slope"] = r.slope;
    j["slope_se_hc1"] = r.slope_se_hc1;
    j["ci95"] = {r.ci95_lo, r.ci95_hi};
    j["r2"] = r.r2;
    j["n"] = r.n;
    j["intercepts"] = r.intercepts;
    if (fixed_effects) {
        json cf;
        for (const auto& [tag, a] : r.intercepts) cf[tag] = std::exp(a);
        j["c_f"] = cf;
    }
    return j;
}

}  // namespace rocp
