#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "ncgpi1/algebra.hpp"

namespace ncg {

namespace detail {

/// Subsets of {0..n-1} as bitmasks, ordered by (size, value); index 0 is the
/// empty set.
inline std::vector<std::uint32_t> wedge_subsets(int n) {
    std::vector<std::uint32_t> out;
    for (int sz = 0; sz <= n; ++sz)
        for (std::uint32_t m = 0; m < (1u << n); ++m)
            if (std::popcount(m) == sz) out.push_back(m);
    return out;
}

/// Koszul reordering sign of eta_S * eta_T into the sorted monomial; 0 means
/// the sets intersect.
inline int wedge_sign(std::uint32_t S, std::uint32_t T) {
    if (S & T) return 0;
    int inversions = 0;
    for (std::uint32_t t = T; t; t &= t - 1) {
        int bit = std::countr_zero(t);
        inversions += std::popcount(S >> (bit + 1));
    }
    return inversions % 2 == 0 ? 1 : -1;
}

inline std::string wedge_name(std::uint32_t S, const std::string& gen_prefix) {
    if (S == 0) return "1";
    std::string s;
    for (int bit = 0; bit < 32; ++bit)
        if (S & (1u << bit)) s += gen_prefix + std::to_string(bit + 1);
    return s;
}

} // namespace detail

/// Exterior algebra on n generators with d = 0 and star fixing generators.
/// All products are total (the algebra is nilpotent, nothing truncates).
inline AlgebraPtr build_exterior_algebra(int n, ScalarMode mode = ScalarMode::exact) {
    if (n < 1) throw InvalidInput("build_exterior_algebra requires n >= 1");
    auto subsets = detail::wedge_subsets(n);
    const int N = static_cast<int>(subsets.size());

    AlgebraData d;
    d.max_degree = n;
    d.mode = mode;
    d.policy = Truncation::strict;
    d.basis.resize(subsets.size());
    std::vector<int> index_of_mask(1u << n, -1);
    for (int i = 0; i < N; ++i) {
        d.basis[static_cast<std::size_t>(i)] = {detail::wedge_name(subsets[i], "e"),
                                                std::popcount(subsets[i])};
        index_of_mask[subsets[i]] = i;
    }
    d.unit = {{0, Scalar::one(mode)}};

    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            SparseVec v;
            int sign = detail::wedge_sign(subsets[i], subsets[j]);
            if (sign != 0) {
                Scalar c = Scalar::one(mode);
                if (sign < 0) c = -c;
                v[index_of_mask[subsets[i] | subsets[j]]] = c;
            }
            d.products[{i, j}] = v;
        }

    for (int i = 0; i < N; ++i) d.differential[i] = SparseVec{};

    std::vector<StarEntry> st(subsets.size());
    for (int i = 0; i < N; ++i) {
        int k = std::popcount(subsets[i]);
        // reversal of a k-fold wedge
        Scalar c = Scalar::one(mode);
        if ((k * (k - 1) / 2) % 2 != 0) c = -c;
        st[static_cast<std::size_t>(i)] = {i, c};
    }
    d.star = st;

    return make_algebra(std::move(d));
}

/// The two-point space: even degrees are diagonal 2x2 matrices, odd degrees
/// antidiagonal ones, with d(diag(a,d)) = [[0,d-a],[a-d,0]] and
/// d(offdiag(b,c)) = (b+c)*I. Carries no star (none is compatible with d).
inline AlgebraPtr build_two_point_space(int max_degree, ScalarMode mode = ScalarMode::exact) {
    if (max_degree < 0) throw InvalidInput("max_degree must be nonnegative");
    AlgebraData d;
    d.max_degree = max_degree;
    d.mode = mode;
    d.policy = Truncation::strict;

    // per degree k: two symbols; even {E11,E22}, odd {E12,E21}
    auto idx = [&](int k, int which) { return 2 * k + which; };
    for (int k = 0; k <= max_degree; ++k) {
        const bool even = k % 2 == 0;
        d.basis.push_back({(even ? std::string("E11_") : std::string("E12_")) + std::to_string(k), k});
        d.basis.push_back({(even ? std::string("E22_") : std::string("E21_")) + std::to_string(k), k});
    }
    const Scalar one = Scalar::one(mode);
    d.unit = {{idx(0, 0), one}, {idx(0, 1), one}};

    // matrix-unit labels per degree: even {11,22}, odd {12,21}
    auto row = [](int k, int which) { return (k % 2 == 0) ? (which == 0 ? 0 : 1) : (which == 0 ? 0 : 1); };
    auto col = [](int k, int which) { return (k % 2 == 0) ? (which == 0 ? 0 : 1) : (which == 0 ? 1 : 0); };
    auto unit_index = [&](int k, int r, int c) -> int {
        // matrix unit E_{rc} inside degree k, or -1 if absent from that parity
        const bool even = k % 2 == 0;
        if (even && r == 0 && c == 0) return idx(k, 0);
        if (even && r == 1 && c == 1) return idx(k, 1);
        if (!even && r == 0 && c == 1) return idx(k, 0);
        if (!even && r == 1 && c == 0) return idx(k, 1);
        return -1;
    };

    for (int k = 0; k <= max_degree; ++k)
        for (int w1 = 0; w1 < 2; ++w1)
            for (int l = 0; k + l <= max_degree; ++l)
                for (int w2 = 0; w2 < 2; ++w2) {
                    SparseVec v;
                    if (col(k, w1) == row(l, w2)) {
                        int target = unit_index(k + l, row(k, w1), col(l, w2));
                        v[target] = one;
                    }
                    d.products[{idx(k, w1), idx(l, w2)}] = v;
                }

    for (int k = 0; k + 1 <= max_degree; ++k) {
        if (k % 2 == 0) {
            // d(E11) = -E12 + E21, d(E22) = E12 - E21
            d.differential[idx(k, 0)] = {{idx(k + 1, 0), -one}, {idx(k + 1, 1), one}};
            d.differential[idx(k, 1)] = {{idx(k + 1, 0), one}, {idx(k + 1, 1), -one}};
        } else {
            // d(E12) = d(E21) = E11 + E22
            d.differential[idx(k, 0)] = {{idx(k + 1, 0), one}, {idx(k + 1, 1), one}};
            d.differential[idx(k, 1)] = {{idx(k + 1, 0), one}, {idx(k + 1, 1), one}};
        }
    }

    return make_algebra(std::move(d));
}

/// Two identified points: full M_2(C) in every degree, with d the graded
/// commutator ad_D(x) = Dx - (-1)^{|x|} x D for D = diag(1,-1); this is the
/// sign convention under which d is a graded derivation. Carries no star
/// (none is compatible with d).
inline AlgebraPtr build_identified_points(int max_degree, ScalarMode mode = ScalarMode::exact) {
    if (max_degree < 0) throw InvalidInput("max_degree must be nonnegative");
    AlgebraData d;
    d.max_degree = max_degree;
    d.mode = mode;
    d.policy = Truncation::strict;

    static const char* unit_names[4] = {"E11", "E12", "E21", "E22"};
    auto idx = [&](int k, int r, int c) { return 4 * k + 2 * r + c; };
    for (int k = 0; k <= max_degree; ++k)
        for (int u = 0; u < 4; ++u)
            d.basis.push_back({std::string(unit_names[u]) + "_" + std::to_string(k), k});

    const Scalar one = Scalar::one(mode);
    const Scalar two = Scalar::one(mode) + Scalar::one(mode);
    d.unit = {{idx(0, 0, 0), one}, {idx(0, 1, 1), one}};

    for (int k = 0; k <= max_degree; ++k)
        for (int l = 0; k + l <= max_degree; ++l)
            for (int r1 = 0; r1 < 2; ++r1)
                for (int c1 = 0; c1 < 2; ++c1)
                    for (int r2 = 0; r2 < 2; ++r2)
                        for (int c2 = 0; c2 < 2; ++c2) {
                            SparseVec v;
                            if (c1 == r2) v[idx(k + l, r1, c2)] = one;
                            d.products[{idx(k, r1, c1), idx(l, r2, c2)}] = v;
                        }

    for (int k = 0; k + 1 <= max_degree; ++k) {
        if (k % 2 == 0) {
            // [[a,b],[c,d]] -> [[0,2b],[-2c,0]]
            d.differential[idx(k, 0, 0)] = SparseVec{};
            d.differential[idx(k, 0, 1)] = {{idx(k + 1, 0, 1), two}};
            d.differential[idx(k, 1, 0)] = {{idx(k + 1, 1, 0), -two}};
            d.differential[idx(k, 1, 1)] = SparseVec{};
        } else {
            // [[a,b],[c,d]] -> [[2a,0],[0,-2d]]
            d.differential[idx(k, 0, 0)] = {{idx(k + 1, 0, 0), two}};
            d.differential[idx(k, 0, 1)] = SparseVec{};
            d.differential[idx(k, 1, 0)] = SparseVec{};
            d.differential[idx(k, 1, 1)] = {{idx(k + 1, 1, 1), -two}};
        }
    }

    return make_algebra(std::move(d));
}

/// Graded tensor product with the Koszul-signed multiplication
/// (a(x)b)(a'(x)b') = (-1)^{|b||a'|} aa' (x) bb'
/// and d(a(x)b) = da(x)b + (-1)^{|a|} a(x)db. Entries whose factor products
/// are truncated in A or B stay truncated here. Star is not propagated.
inline AlgebraPtr tensor_dga(const AlgebraPtr& A, const AlgebraPtr& B) {
    if (A->mode() != B->mode())
        throw ScalarModeMismatch("tensor factors have different scalar modes");
    const int NA = static_cast<int>(A->size());
    const int NB = static_cast<int>(B->size());

    AlgebraData d;
    d.max_degree = A->max_degree() + B->max_degree();
    d.mode = A->mode();
    d.policy = (A->policy() == Truncation::drop || B->policy() == Truncation::drop)
                   ? Truncation::drop
                   : Truncation::strict;
    d.tolerance = std::max(A->tolerance(), B->tolerance());

    auto idx = [&](int i, int j) { return i * NB + j; };
    for (int i = 0; i < NA; ++i)
        for (int j = 0; j < NB; ++j)
            d.basis.push_back({A->symbol(i).name + "(x)" + B->symbol(j).name,
                               A->degree(i) + B->degree(j)});

    for (const auto& [ia, ca] : A->unit_coords())
        for (const auto& [jb, cb] : B->unit_coords()) d.unit[idx(ia, jb)] = ca * cb;

    auto tensor_entry = [&](const SparseVec& va, const SparseVec& vb, int sign) {
        SparseVec v;
        for (const auto& [k, c1] : va)
            for (const auto& [l, c2] : vb) {
                Scalar c = c1 * c2;
                if (sign < 0) c = -c;
                v[idx(k, l)] = c;
            }
        return v;
    };

    for (int i = 0; i < NA; ++i)
        for (int j = 0; j < NB; ++j)
            for (int i2 = 0; i2 < NA; ++i2)
                for (int j2 = 0; j2 < NB; ++j2) {
                    std::optional<SparseVec> entry;
                    bool a_oow = A->degree(i) + A->degree(i2) > A->max_degree() ||
                                 !A->product(i, i2);
                    bool b_oow = B->degree(j) + B->degree(j2) > B->max_degree() ||
                                 !B->product(j, j2);
                    if (!a_oow && !b_oow) {
                        int sign = (B->degree(j) * A->degree(i2)) % 2 != 0 ? -1 : 1;
                        entry = tensor_entry(*A->product(i, i2), *B->product(j, j2), sign);
                    }
                    d.products[{idx(i, j), idx(i2, j2)}] = std::move(entry);
                }

    for (int i = 0; i < NA; ++i)
        for (int j = 0; j < NB; ++j) {
            bool da_known = A->degree(i) + 1 <= A->max_degree() && A->differential_of(i);
            bool db_known = B->degree(j) + 1 <= B->max_degree() && B->differential_of(j);
            if (!da_known || !db_known) {
                d.differential[idx(i, j)] = std::nullopt;
                continue;
            }
            SparseVec v;
            for (const auto& [k, c] : *A->differential_of(i)) {
                for (const auto& [l, cb] : SparseVec{{j, Scalar::one(d.mode)}})
                    v[idx(k, l)] = c * cb;
            }
            const bool flip = A->degree(i) % 2 != 0;
            for (const auto& [l, c] : *B->differential_of(j)) {
                Scalar coeff = flip ? -c : c;
                auto it = v.find(idx(i, l));
                if (it == v.end()) v[idx(i, l)] = coeff;
                else it->second += coeff;
            }
            d.differential[idx(i, j)] = std::move(v);
        }

    return make_algebra(std::move(d));
}

} // namespace ncg
