#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace rocp {

struct SimplexResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
};

// Derivative-free Nelder-Mead minimiser. The objective may return +inf to
// reject a point. Deterministic given the start point.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> start, double initial_step = 0.25,
                                 std::size_t max_evals = 4000, double f_tol = 1e-10) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> pts(n + 1, start);
    std::vector<double> fv(n + 1);
    std::size_t evals = 0;

    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    for (std::size_t i = 1; i <= n; ++i) {
        double& c = pts[i][i - 1];
        c += (c == 0.0) ? initial_step : initial_step * std::fabs(c);
    }
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];

        if (std::isfinite(fv[best]) &&
            fv[worst] - fv[best] <= f_tol * (1.0 + std::fabs(fv[best])))
            break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (std::size_t j = 0; j < n; ++j) centroid[j] /= static_cast<double>(n);

        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - pts[worst][j]);
        const double fr = eval(xr);

        if (fr < fv[best]) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const auto& ref = outside ? xr : pts[worst];
            for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + 0.5 * (ref[j] - centroid[j]);
            const double fc = eval(xc);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
                    fv[i] = eval(pts[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    return SimplexResult{pts[best], fv[best], evals};
}

}  // namespace rocp
