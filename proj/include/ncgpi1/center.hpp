#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncgpi1/algebra.hpp"
#include "ncgpi1/axioms.hpp"
#include "ncgpi1/linsolve.hpp"

namespace ncg {

/// Per-degree basis of the graded center, in reduced echelon form over the
/// algebra's scalar mode.
struct CenterBasis {
    AlgebraPtr owner;
    std::map<int, std::vector<AlgebraElement>> by_degree;
    /// Highest generator degree whose commutator constraints fit the window
    /// for each center degree; -1 when no constraint applied at all.
    std::map<int, int> tested_generator_degree;

    std::vector<int> dimensions() const {
        std::vector<int> dims(static_cast<std::size_t>(owner->max_degree()) + 1, 0);
        for (const auto& [deg, elems] : by_degree)
            dims[static_cast<std::size_t>(deg)] = static_cast<int>(elems.size());
        return dims;
    }

    std::vector<AlgebraElement> all() const {
        std::vector<AlgebraElement> out;
        for (const auto& [deg, elems] : by_degree)
            out.insert(out.end(), elems.begin(), elems.end());
        return out;
    }
};

/// Per-degree kernel of x -> [x, g] over the supplied generators (all
/// in-window basis elements when omitted, which is always sound). Constraints
/// whose commutator would leave the truncation window are skipped.
inline CenterBasis graded_center(const AlgebraPtr& A,
                                 std::optional<std::vector<int>> generators = std::nullopt) {
    std::vector<int> gens;
    if (generators) gens = *generators;
    else
        for (int i = 0; i < static_cast<int>(A->size()); ++i) gens.push_back(i);

    const double tol = A->mode() == ScalarMode::numeric ? A->tolerance() : 0.0;
    CenterBasis out;
    out.owner = A;

    for (int k = 0; k <= A->max_degree(); ++k) {
        const auto& unknowns = A->basis_of_degree(k);
        if (unknowns.empty()) continue;
        const std::size_t n = unknowns.size();

        // stacked commutator coefficients: rows indexed by (generator, result
        // basis), columns by the unknown degree-k basis
        std::vector<std::vector<Scalar>> rows;
        int tested_deg = -1;
        for (int g : gens) {
            if (k + A->degree(g) > A->max_degree()) continue;
            // the constraint map must be defined on the whole degree-k space
            bool testable = true;
            std::vector<AlgebraElement> images;
            images.reserve(n);
            AlgebraElement bg = AlgebraElement::basis(A, g);
            for (int x : unknowns) {
                if (!A->product(x, g) || !A->product(g, x)) {
                    testable = false;
                    break;
                }
                images.push_back(graded_commutator(AlgebraElement::basis(A, x), bg));
            }
            if (!testable) continue;
            tested_deg = std::max(tested_deg, A->degree(g));
            std::map<int, std::size_t> result_rows;
            for (const auto& img : images)
                for (const auto& [idx, c] : img.coords())
                    if (!result_rows.count(idx)) {
                        result_rows[idx] = rows.size();
                        rows.emplace_back(n, Scalar::zero(A->mode()));
                    }
            for (std::size_t col = 0; col < n; ++col)
                for (const auto& [idx, c] : images[col].coords())
                    rows[result_rows[idx]][col] = c;
        }
        out.tested_generator_degree[k] = tested_deg;

        Matrix<Scalar> M(rows.size(), n, Scalar::zero(A->mode()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) M(i, j) = rows[i][j];
        auto null_basis = rows.empty()
                              ? [&] {
                                    std::vector<std::vector<Scalar>> full;
                                    for (std::size_t j = 0; j < n; ++j) {
                                        std::vector<Scalar> v(n, Scalar::zero(A->mode()));
                                        v[j] = Scalar::one(A->mode());
                                        full.push_back(std::move(v));
                                    }
                                    return full;
                                }()
                              : linalg::kernel(M, tol);

        std::vector<AlgebraElement> elems;
        for (const auto& v : null_basis) {
            SparseVec coords;
            for (std::size_t j = 0; j < n; ++j)
                if (!v[j].is_zero(0.0)) coords[unknowns[j]] = v[j];
            elems.emplace_back(A, std::move(coords));
        }
        if (!elems.empty()) out.by_degree[k] = std::move(elems);
    }
    return out;
}

/// Coordinates of e in the span of the degree-matched center elements, or
/// nullopt when e escapes the span.
inline std::optional<std::vector<Scalar>> express_in_span(
    const std::vector<AlgebraElement>& span, const AlgebraElement& e, double tol) {
    if (span.empty()) {
        if (e.is_zero(tol)) return std::vector<Scalar>{};
        return std::nullopt;
    }
    const AlgebraPtr& A = span.front().owner();
    std::map<int, std::size_t> row_of;
    auto note = [&](const AlgebraElement& x) {
        for (const auto& [idx, c] : x.coords())
            if (!row_of.count(idx)) {
                std::size_t r = row_of.size();
                row_of[idx] = r;
            }
    };
    for (const auto& s : span) note(s);
    note(e);
    Matrix<Scalar> M(row_of.size(), span.size(), Scalar::zero(A->mode()));
    std::vector<Scalar> b(row_of.size(), Scalar::zero(A->mode()));
    for (std::size_t j = 0; j < span.size(); ++j)
        for (const auto& [idx, c] : span[j].coords()) M(row_of[idx], j) = c;
    for (const auto& [idx, c] : e.coords()) b[row_of[idx]] = c;
    return linalg::solve(M, b, tol);
}

/// True iff e lies in the span (per homogeneous degree) of the center basis.
inline bool lies_in_center_span(const CenterBasis& cb, const AlgebraElement& e, double tol) {
    for (const auto& [deg, part] : e.homogeneous_components()) {
        auto it = cb.by_degree.find(deg);
        std::vector<AlgebraElement> span =
            it == cb.by_degree.end() ? std::vector<AlgebraElement>{} : it->second;
        if (!express_in_span(span, part, tol)) return false;
    }
    return true;
}

/// The graded center repackaged as a dga in its own right, with the embedding
/// back into the ambient algebra. Products, differential, unit and star are
/// re-expressed in the center basis; the dga closure of the center makes the
/// solves well-posed.
struct CenterAlgebra {
    AlgebraPtr algebra;                     // the center as a standalone dga
    AlgebraPtr ambient;                     // the original algebra
    std::vector<AlgebraElement> embedding;  // center basis index -> ambient element

    /// Ambient element -> element of the center algebra; throws
    /// RestrictionEscapesCenter if any homogeneous part escapes.
    AlgebraElement pull_back(const AlgebraElement& e) const {
        const double tol =
            ambient->mode() == ScalarMode::numeric ? ambient->tolerance() : 0.0;
        SparseVec coords;
        for (const auto& [deg, part] : e.homogeneous_components()) {
            std::vector<AlgebraElement> span;
            std::vector<int> span_idx;
            for (int i = 0; i < static_cast<int>(embedding.size()); ++i)
                if (algebra->degree(i) == deg) {
                    span.push_back(embedding[static_cast<std::size_t>(i)]);
                    span_idx.push_back(i);
                }
            auto sol = express_in_span(span, part, tol);
            if (!sol)
                throw RestrictionEscapesCenter("element does not lie in the graded center: " +
                                               e.to_string());
            for (std::size_t j = 0; j < sol->size(); ++j)
                if (!(*sol)[j].is_zero(0.0)) coords[span_idx[j]] = (*sol)[j];
        }
        return AlgebraElement(algebra, std::move(coords));
    }

    AlgebraElement push_forward(const AlgebraElement& e) const {
        AlgebraElement out = AlgebraElement::zero(ambient);
        for (const auto& [i, c] : e.coords())
            out = out + embedding[static_cast<std::size_t>(i)] * c;
        return out;
    }
};

inline CenterAlgebra center_subalgebra(const AlgebraPtr& A, const CenterBasis& cb) {
    const double tol = A->mode() == ScalarMode::numeric ? A->tolerance() : 0.0;
    std::vector<AlgebraElement> embed;
    AlgebraData d;
    d.max_degree = A->max_degree();
    d.mode = A->mode();
    d.policy = A->policy();
    d.tolerance = A->tolerance();
    for (const auto& [deg, elems] : cb.by_degree) {
        int i = 0;
        for (const auto& e : elems) {
            d.basis.push_back({"z" + std::to_string(deg) + "_" + std::to_string(i++), deg});
            embed.push_back(e);
        }
    }
    const int N = static_cast<int>(embed.size());

    auto span_of_degree = [&](int deg) {
        std::vector<AlgebraElement> span;
        std::vector<int> idx;
        for (int i = 0; i < N; ++i)
            if (d.basis[static_cast<std::size_t>(i)].degree == deg) {
                span.push_back(embed[static_cast<std::size_t>(i)]);
                idx.push_back(i);
            }
        return std::pair(span, idx);
    };
    auto express = [&](const AlgebraElement& e, int deg,
                       const std::string& what) -> SparseVec {
        auto [span, idx] = span_of_degree(deg);
        auto sol = express_in_span(span, e, tol);
        if (!sol)
            throw Error("graded center is not closed under " + what +
                        " (unexpected); offending element: " + e.to_string());
        SparseVec v;
        for (std::size_t j = 0; j < sol->size(); ++j)
            if (!(*sol)[j].is_zero(0.0)) v[idx[j]] = (*sol)[j];
        return v;
    };

    AlgebraElement one = AlgebraElement::unit(A);
    d.unit = express(one, 0, "unit embedding");

    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            int deg = d.basis[static_cast<std::size_t>(i)].degree +
                      d.basis[static_cast<std::size_t>(j)].degree;
            if (deg > d.max_degree) continue;
            std::optional<SparseVec> entry;
            try {
                AlgebraElement prod =
                    mul(embed[static_cast<std::size_t>(i)], embed[static_cast<std::size_t>(j)]);
                entry = express(prod, deg, "multiplication");
            } catch (const OutOfWindow&) {
                entry = std::nullopt;
            }
            d.products[{i, j}] = std::move(entry);
        }

    for (int i = 0; i < N; ++i) {
        int deg = d.basis[static_cast<std::size_t>(i)].degree;
        if (deg + 1 > d.max_degree) continue;
        std::optional<SparseVec> entry;
        try {
            entry = express(apply_d(embed[static_cast<std::size_t>(i)]), deg + 1, "d");
        } catch (const OutOfWindow&) {
            entry = std::nullopt;
        }
        d.differential[i] = std::move(entry);
    }

    if (A->has_star()) {
        // the center is star-closed; a starred center element may be a
        // combination, so express it and keep single-term entries only
        bool single = true;
        std::vector<StarEntry> st(static_cast<std::size_t>(N));
        for (int i = 0; i < N && single; ++i) {
            SparseVec v = express(star(embed[static_cast<std::size_t>(i)]),
                                  d.basis[static_cast<std::size_t>(i)].degree, "star");
            if (v.size() == 1) st[static_cast<std::size_t>(i)] = {v.begin()->first,
                                                                  v.begin()->second};
            else single = false;
        }
        if (single) d.star = st;
    }

    CenterAlgebra out;
    out.algebra = make_algebra(std::move(d));
    out.ambient = A;
    out.embedding = std::move(embed);
    return out;
}

} // namespace ncg
