#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rocp/errors.hpp"
#include "rocp/linalg.hpp"

namespace rocp {

// One experiment observation: the Winkler-selected window for a series of
// length T, with its validation metrics.
struct ScalingRow {
    std::string series_id;
    std::string freq_tag;
    std::size_t length = 0;  // T
    std::size_t m_star = 0;
    bool at_boundary = false;
    double coverage = 0.0;
    double mean_winkler = 0.0;
};

struct OlsFit {
    std::vector<double> coefficients;
    Matrix cov_hc1;  // k x k sandwich covariance with n/(n-k) correction
    double r2 = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
};

// OLS with heteroskedasticity-robust HC1 standard errors:
//   cov = (X'X)^-1 X' diag(e_i^2) X (X'X)^-1 * n/(n-k)
inline OlsFit ols_hc1(const Matrix& x, const std::vector<double>& y) {
    const std::size_t n = x.rows;
    const std::size_t k = x.cols;
    if (y.size() != n) throw Error(Err::InvalidSpec, "row count mismatch between X and y");
    if (n <= k)
        throw Error(Err::TooFewRows, "need more rows than columns: n = " + std::to_string(n) +
                                         ", k = " + std::to_string(k));

    Matrix xtx(k, k);
    std::vector<double> xty(k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += x(i, a) * y[i];
            for (std::size_t b = a; b < k; ++b) xtx(a, b) += x(i, a) * x(i, b);
        }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);

    auto xtx_inv = invert_spd(xtx);
    if (!xtx_inv) throw Error(Err::RankDeficient, "design matrix is rank deficient");

    OlsFit fit;
    fit.n = n;
    fit.k = k;
    fit.coefficients.assign(k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) fit.coefficients[a] += (*xtx_inv)(a, b) * xty[b];

    // meat of the sandwich
    Matrix meat(k, k);
    double rss = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) y_mean += y[i];
    y_mean /= static_cast<double>(n);
    double tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fitted = 0.0;
        for (std::size_t a = 0; a < k; ++a) fitted += x(i, a) * fit.coefficients[a];
        const double e = y[i] - fitted;
        rss += e * e;
        tss += (y[i] - y_mean) * (y[i] - y_mean);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a; b < k; ++b) meat(a, b) += e * e * x(i, a) * x(i, b);
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) meat(a, b) = meat(b, a);

    const double dof_adjust = static_cast<double>(n) / static_cast<double>(n - k);
    fit.cov_hc1 = Matrix(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            double s = 0.0;
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t d = 0; d < k; ++d)
                    s += (*xtx_inv)(a, c) * meat(c, d) * (*xtx_inv)(d, b);
            fit.cov_hc1(a, b) = s * dof_adjust;
        }

    fit.r2 = (tss > 0.0) ? 1.0 - rss / tss : (rss < 1e-24 ? 1.0 : 0.0);
    return fit;
}

struct RegressionResult {
    double slope = 0.0;
    double slope_se_hc1 = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
    // pooled: {"(intercept)": a}; fixed effects: one intercept per group
    std::map<std::string, double> intercepts;
    double r2 = 0.0;
    std::size_t n = 0;
};

// log m* on log T, optionally with per-frequency intercepts (fixed
// effects). Boundary rows are excluded by default since the grid edge
// prevents identification of the true optimum.
inline RegressionResult scaling_regression(const std::vector<ScalingRow>& rows,
                                           bool fixed_effects, bool exclude_boundary = true) {
    std::vector<const ScalingRow*> usable;
    for (const auto& r : rows)
        if (!(exclude_boundary && r.at_boundary)) usable.push_back(&r);

    if (fixed_effects) {
        // drop groups too small to identify an intercept
        std::map<std::string, std::size_t> counts;
        for (const auto* r : usable) ++counts[r->freq_tag];
        std::vector<const ScalingRow*> kept;
        for (const auto* r : usable)
            if (counts[r->freq_tag] >= 2) kept.push_back(r);
        usable = std::move(kept);
    }
    if (usable.size() < 3)
        throw Error(Err::TooFewRows,
                    "need at least 3 usable rows, have " + std::to_string(usable.size()));

    std::map<std::string, std::size_t> group_index;
    if (fixed_effects) {
        for (const auto* r : usable)
            group_index.emplace(r->freq_tag, group_index.size());
        if (group_index.size() < 2)
            throw Error(Err::TooFewGroups, "fixed effects need at least 2 groups");
    }

    const std::size_t n = usable.size();
    const std::size_t k = fixed_effects ? group_index.size() + 1 : 2;
    Matrix x(n, k);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = *usable[i];
        y[i] = std::log(static_cast<double>(r.m_star));
        const double log_t = std::log(static_cast<double>(r.length));
        if (fixed_effects) {
            x(i, group_index[r.freq_tag]) = 1.0;
            x(i, k - 1) = log_t;
        } else {
            x(i, 0) = 1.0;
            x(i, 1) = log_t;
        }
    }

    const OlsFit fit = ols_hc1(x, y);
    RegressionResult out;
    out.n = n;
    out.r2 = fit.r2;
    out.slope = fit.coefficients[k - 1];
    out.slope_se_hc1 = std::sqrt(std::max(fit.cov_hc1(k - 1, k - 1), 0.0));
    out.ci95_lo = out.slope - 1.96 * out.slope_se_hc1;
    out.ci95_hi = out.slope + 1.96 * out.slope_se_hc1;
    if (fixed_effects) {
        for (const auto& [tag, idx] : group_index) out.intercepts[tag] = fit.coefficients[idx];
    } else {
        out.intercepts["(intercept)"] = fit.coefficients[0];
    }
    return out;
}

}  // namespace rocp
