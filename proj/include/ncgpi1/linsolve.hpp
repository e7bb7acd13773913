#pragma once

#include <optional>
#include <vector>

#include "ncgpi1/matrix.hpp"
#include "ncgpi1/scalar.hpp"

namespace ncg {

/// Dense Gaussian elimination over Scalar, shared by the center solves, rank
/// decisions and fibre evaluation. In exact mode pivots are exact-nonzero;
/// in numeric mode entries below tol * (matrix scale) count as zero.

namespace linalg {

inline double matrix_scale(const Matrix<Scalar>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s = std::max(s, m(i, j).abs());
    return s > 0 ? s : 1.0;
}

/// Reduced row echelon form in place; returns the pivot column per pivot row.
inline std::vector<std::size_t> rref(Matrix<Scalar>& m, double tol) {
    std::vector<std::size_t> pivots;
    if (m.rows() == 0 || m.cols() == 0) return pivots;
    const bool exact = m(0, 0).is_exact();
    const double thresh = exact ? 0.0 : tol * matrix_scale(m);
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t piv = row;
        double best = 0.0;
        for (std::size_t i = row; i < m.rows(); ++i) {
            double a = m(i, col).abs();
            if (a > best) {
                best = a;
                piv = i;
            }
        }
        if (best <= thresh) continue;
        if (piv != row)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(piv, j));
        Scalar inv = m(row, col).inverse();
        for (std::size_t j = 0; j < m.cols(); ++j) m(row, j) = m(row, j) * inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row) continue;
            Scalar f = m(i, col);
            if (f.is_zero(0.0)) continue;
            for (std::size_t j = 0; j < m.cols(); ++j)
                m(i, j) = m(i, j) - f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline std::size_t rank(Matrix<Scalar> m, double tol) { return rref(m, tol).size(); }

/// Basis of the right kernel {x : M x = 0}, one vector per free column, in
/// reduced echelon parameterization (deterministic given column order).
inline std::vector<std::vector<Scalar>> kernel(Matrix<Scalar> m, double tol) {
    ScalarMode mode = ScalarMode::exact;
    if (m.rows() > 0 && m.cols() > 0) mode = m(0, 0).mode();
    auto pivots = rref(m, tol);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<std::vector<Scalar>> basis;
    for (std::size_t free_col = 0; free_col < m.cols(); ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<Scalar> v(m.cols(), Scalar::zero(mode));
        v[free_col] = Scalar::one(mode);
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = -m(r, free_col);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// One solution of M x = b, or nullopt when inconsistent.
inline std::optional<std::vector<Scalar>> solve(Matrix<Scalar> m,
                                                std::vector<Scalar> b,
                                                double tol) {
    const std::size_t rows = m.rows(), cols = m.cols();
    Matrix<Scalar> aug(rows, cols + 1,
                       Scalar::zero(rows && cols ? m(0, 0).mode()
                                                 : (b.empty() ? ScalarMode::exact : b[0].mode())));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) aug(i, j) = m(i, j);
        aug(i, cols) = b[i];
    }
    auto pivots = rref(aug, tol);
    ScalarMode mode = rows && cols ? m(0, 0).mode() : ScalarMode::exact;
    const bool exact = mode == ScalarMode::exact;
    const double thresh = exact ? 0.0 : tol * matrix_scale(aug);
    // inconsistent iff a pivot lands in the rhs column
    if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
    std::vector<Scalar> x(cols, Scalar::zero(mode));
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, cols);
    // guard: residual rows below the pivot count must vanish
    for (std::size_t i = pivots.size(); i < rows; ++i)
        if (aug(i, cols).abs() > thresh) return std::nullopt;
    return x;
}

} // namespace linalg

} // namespace ncg
