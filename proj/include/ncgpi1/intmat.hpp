#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ncgpi1/errors.hpp"
#include "ncgpi1/rational.hpp"

namespace ncg {

using IntMatrix = std::vector<std::vector<Integer>>;

inline IntMatrix int_identity(std::size_t n) {
    IntMatrix m(n, std::vector<Integer>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline IntMatrix int_transpose(const IntMatrix& m) {
    if (m.empty()) return {};
    IntMatrix r(m[0].size(), std::vector<Integer>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) r[j][i] = m[i][j];
    return r;
}

inline std::vector<Integer> int_mat_vec(const IntMatrix& m, const std::vector<Integer>& v) {
    std::vector<Integer> r(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) r[i] += m[i][j] * v[j];
    return r;
}

struct HnfResult {
    IntMatrix h;         // row Hermite normal form
    IntMatrix transform; // unimodular U with U * input = h
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_cols;
};

/// Row-style Hermite normal form: pivots positive with increasing columns,
/// entries above each pivot reduced into [0, pivot), zero rows last.
inline HnfResult row_hnf(IntMatrix m) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    HnfResult out;
    out.transform = int_identity(rows);
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        // clear below (row) in this column by remainder exchanges
        while (true) {
            std::size_t best = rows;
            for (std::size_t i = row; i < rows; ++i)
                if (m[i][col] != 0 &&
                    (best == rows || abs(m[i][col]) < abs(m[best][col])))
                    best = i;
            if (best == rows) break; // column clear from `row` down
            if (best != row) {
                std::swap(m[best], m[row]);
                std::swap(out.transform[best], out.transform[row]);
            }
            bool any = false;
            for (std::size_t i = row + 1; i < rows; ++i) {
                if (m[i][col] == 0) continue;
                Integer q = m[i][col] / m[row][col]; // truncated division
                if (q != 0) {
                    for (std::size_t j = 0; j < cols; ++j) m[i][j] -= q * m[row][j];
                    for (std::size_t j = 0; j < rows; ++j)
                        out.transform[i][j] -= q * out.transform[row][j];
                }
                if (m[i][col] != 0) any = true;
            }
            if (!any) break;
        }
        if (m[row][col] == 0) continue;
        if (m[row][col] < 0) {
            for (auto& x : m[row]) x = -x;
            for (auto& x : out.transform[row]) x = -x;
        }
        for (std::size_t i = 0; i < row; ++i) {
            // floor division keeps entries above the pivot in [0, pivot)
            Integer q = m[i][col] / m[row][col];
            if (m[i][col] - q * m[row][col] < 0) q -= 1;
            if (q != 0) {
                for (std::size_t j = 0; j < cols; ++j) m[i][j] -= q * m[row][j];
                for (std::size_t j = 0; j < rows; ++j)
                    out.transform[i][j] -= q * out.transform[row][j];
            }
        }
        out.pivot_cols.push_back(col);
        ++row;
    }
    out.rank = row;
    out.h = std::move(m);
    return out;
}

/// Canonical basis (HNF rows) of the lattice spanned by the given rows.
inline IntMatrix lattice_basis(const IntMatrix& spanning_rows) {
    HnfResult h = row_hnf(spanning_rows);
    IntMatrix basis(h.h.begin(), h.h.begin() + static_cast<long>(h.rank));
    return basis;
}

/// Basis of {x : x * M = 0} (left kernel) as rows, HNF-canonicalized.
inline IntMatrix left_kernel(const IntMatrix& m) {
    HnfResult h = row_hnf(m);
    IntMatrix ker;
    for (std::size_t i = h.rank; i < h.transform.size(); ++i)
        ker.push_back(h.transform[i]);
    return lattice_basis(ker);
}

/// Basis of {x : M x = 0} as rows.
inline IntMatrix right_kernel(const IntMatrix& m) { return left_kernel(int_transpose(m)); }

/// Smith normal form invariant factors d_1 | d_2 | ... (positive, rank many).
inline std::vector<Integer> smith_invariant_factors(IntMatrix m) {
    std::vector<Integer> factors;
    std::size_t rows = m.size();
    std::size_t cols = rows ? m[0].size() : 0;
    std::size_t t = 0;
    while (t < rows && t < cols) {
        // find a nonzero entry in the remaining block
        std::size_t pi = rows, pj = cols;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (m[i][j] != 0 &&
                    (pi == rows || abs(m[i][j]) < abs(m[pi][pj]))) {
                    pi = i;
                    pj = j;
                }
        if (pi == rows) break;
        std::swap(m[t], m[pi]);
        for (std::size_t i = 0; i < rows; ++i) std::swap(m[i][t], m[i][pj]);

        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                Integer q = m[i][t] / m[t][t];
                if (q != 0)
                    for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
                if (m[i][t] != 0) {
                    std::swap(m[t], m[i]);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                Integer q = m[t][j] / m[t][t];
                if (q != 0)
                    for (std::size_t i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
                if (m[t][j] != 0) {
                    for (std::size_t i = t; i < rows; ++i) std::swap(m[i][t], m[i][j]);
                    clean = false;
                }
            }
        }
        // enforce divisibility: fold any non-divisible entry into the pivot
        for (std::size_t i = t + 1; i < rows && m[t][t] != 0; ++i)
            for (std::size_t j = t + 1; j < cols; ++j)
                if (m[i][j] % m[t][t] != 0) {
                    for (std::size_t jj = t; jj < cols; ++jj) m[t][jj] += m[i][jj];
                    // restart the cleaning pass
                    i = rows;
                    clean = false;
                    break;
                }
        if (!clean) continue; // re-run the block at the same t
        if (m[t][t] < 0)
            for (std::size_t j = t; j < cols; ++j) m[t][j] = -m[t][j];
        factors.push_back(m[t][t]);
        ++t;
    }
    return factors;
}

/// Fraction-free (Bareiss) determinant.
inline Integer int_determinant(IntMatrix m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    Integer sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap_row = n;
            for (std::size_t i = k + 1; i < n; ++i)
                if (m[i][k] != 0) {
                    swap_row = i;
                    break;
                }
            if (swap_row == n) return 0;
            std::swap(m[k], m[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

} // namespace ncg
