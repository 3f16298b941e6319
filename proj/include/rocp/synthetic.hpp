#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rocp/errors.hpp"
#include "rocp/rng.hpp"
#include "rocp/series.hpp"

namespace rocp {

struct Ar1Process {
    double phi = 0.0;     // |phi| < 1
    double sigma = 1.0;   // innovation sd
};

struct Garch11Process {
    double omega = 0.05;
    double alpha = 0.1;
    double beta = 0.8;  // alpha + beta < 1
};

// Mean bump concentrated in the final m_bump observations:
//   mu_t = delta * phi((T+1-t)/m_bump),  phi(u) = (1-u)_+^beta_h,
// on top of iid N(0, base_sigma^2) noise.
struct HolderDriftProcess {
    std::size_t m_bump = 1;
    double delta = 0.0;
    double beta_h = 1.0;
    double base_sigma = 1.0;
};

struct ConstantSigmaPath {
    double level = 1.0;
};

// sigma_t = base * exp(amplitude * sin(2 pi t / period))
struct LogSineSigmaPath {
    double base = 1.0;
    double amplitude = 0.5;
    double period = 100.0;
};

using SigmaPath = std::variant<ConstantSigmaPath, LogSineSigmaPath>;

// Y_t = sigma_t * eps_t with iid standard normal innovations.
struct PureScaleProcess {
    SigmaPath path = ConstantSigmaPath{};
};

using ProcessKind = std::variant<Ar1Process, Garch11Process, HolderDriftProcess, PureScaleProcess>;

struct ProcessSpec {
    ProcessKind kind = Ar1Process{};
    std::size_t length = 0;
    std::uint64_t seed = 0;
    std::optional<std::string> id;
    std::optional<std::string> freq_tag;
};

inline double holder_bump(double u, double beta_h) {
    return (u >= 1.0) ? 0.0 : std::pow(1.0 - u, beta_h);
}

inline double holder_drift_mean(const HolderDriftProcess& p, std::size_t t, std::size_t length) {
    const double u = static_cast<double>(length + 1 - t) / static_cast<double>(p.m_bump);
    return p.delta * holder_bump(u, p.beta_h);
}

inline double sigma_path_at(const SigmaPath& path, std::size_t t) {
    if (const auto* c = std::get_if<ConstantSigmaPath>(&path)) return c->level;
    const auto& s = std::get<LogSineSigmaPath>(path);
    return s.base * std::exp(s.amplitude *
                             std::sin(6.283185307179586 * static_cast<double>(t) / s.period));
}

// Deterministic given (spec, seed); innovations are drawn in time order
// from a single stream.
inline TimeSeries generate(const ProcessSpec& spec) {
    if (spec.length < 1) throw Error(Err::InvalidSpec, "process length must be >= 1");
    Rng rng(spec.seed);
    std::vector<double> y(spec.length);

    if (const auto* ar = std::get_if<Ar1Process>(&spec.kind)) {
        if (!(std::fabs(ar->phi) < 1.0)) throw Error(Err::InvalidSpec, "AR(1) needs |phi| < 1");
        if (!(ar->sigma > 0.0)) throw Error(Err::InvalidSpec, "AR(1) sigma must be positive");
        // stationary start
        double prev = ar->sigma / std::sqrt(1.0 - ar->phi * ar->phi) * rng.normal();
        y[0] = prev;
        for (std::size_t t = 1; t < spec.length; ++t) {
            prev = ar->phi * prev + ar->sigma * rng.normal();
            y[t] = prev;
        }
    } else if (const auto* g = std::get_if<Garch11Process>(&spec.kind)) {
        if (!(g->omega > 0.0) || g->alpha < 0.0 || g->beta < 0.0 || g->alpha + g->beta >= 1.0)
            throw Error(Err::InvalidSpec, "GARCH(1,1) needs omega > 0, alpha, beta >= 0, alpha + beta < 1");
        double hvar = g->omega / (1.0 - g->alpha - g->beta);  // unconditional start
        for (std::size_t t = 0; t < spec.length; ++t) {
            y[t] = std::sqrt(hvar) * rng.normal();
            hvar = g->omega + g->alpha * y[t] * y[t] + g->beta * hvar;
        }
    } else if (const auto* hd = std::get_if<HolderDriftProcess>(&spec.kind)) {
        if (hd->m_bump < 1 || hd->m_bump > spec.length)
            throw Error(Err::InvalidSpec, "bump width must lie in [1, T]");
        if (!(hd->beta_h > 0.0) || !(hd->base_sigma > 0.0) || !std::isfinite(hd->delta))
            throw Error(Err::InvalidSpec, "drift process needs beta_h, base_sigma > 0 and finite delta");
        for (std::size_t t = 1; t <= spec.length; ++t)
            y[t - 1] = holder_drift_mean(*hd, t, spec.length) + hd->base_sigma * rng.normal();
    } else {
        const auto& ps = std::get<PureScaleProcess>(spec.kind);
        for (std::size_t t = 1; t <= spec.length; ++t) {
            const double sigma = sigma_path_at(ps.path, t);
            if (!(sigma > 0.0)) throw Error(Err::InvalidSpec, "sigma path must stay positive");
            y[t - 1] = sigma * rng.normal();
        }
    }

    return validate_series(std::move(y), spec.id, spec.freq_tag);
}

}  // namespace rocp
