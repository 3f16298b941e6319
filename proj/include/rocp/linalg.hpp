#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace rocp {

// Minimal dense row-major matrix; problem sizes here are tiny (k <= ~15).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

namespace detail {

// Cholesky factorisation of a symmetric PSD matrix. Returns the lower
// factor, or nullopt when a pivot falls below rel_tol times the largest
// diagonal entry (rank deficiency).
inline std::optional<Matrix> cholesky(const Matrix& a, double rel_tol = 1e-12) {
    const std::size_t n = a.rows;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::fabs(a(i, i)));
    const double tol = rel_tol * std::max(max_diag, 1e-300);

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > tol)) return std::nullopt;
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

inline std::vector<double> chol_solve(const Matrix& l, const std::vector<double>& b) {
    const std::size_t n = l.rows;
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

}  // namespace detail

// Solves the SPD system a x = b; nullopt when a is (numerically) singular.
inline std::optional<std::vector<double>> solve_spd(const Matrix& a, const std::vector<double>& b,
                                                    double rel_tol = 1e-12) {
    auto l = detail::cholesky(a, rel_tol);
    if (!l) return std::nullopt;
    return detail::chol_solve(*l, b);
}

// Inverse of an SPD matrix via its Cholesky factor.
inline std::optional<Matrix> invert_spd(const Matrix& a, double rel_tol = 1e-12) {
    auto l = detail::cholesky(a, rel_tol);
    if (!l) return std::nullopt;
    const std::size_t n = a.rows;
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        auto col = detail::chol_solve(*l, e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

}  // namespace rocp
