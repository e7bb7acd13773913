#pragma once

#include <map>
#include <string>
#include <vector>

#include "ncgpi1/algebra.hpp"
#include "ncgpi1/axioms.hpp"
#include "ncgpi1/center.hpp"
#include "ncgpi1/matrix.hpp"

namespace ncg {

using ElementMatrix = Matrix<AlgebraElement>;
using ModuleVec = std::vector<AlgebraElement>;

inline ElementMatrix zero_matrix(const AlgebraPtr& A, std::size_t r, std::size_t c) {
    return ElementMatrix(r, c, AlgebraElement::zero(A));
}
inline ElementMatrix identity_matrix(const AlgebraPtr& A, std::size_t n) {
    return ElementMatrix::identity(n, AlgebraElement::unit(A), AlgebraElement::zero(A));
}
inline ElementMatrix apply_d_entrywise(const ElementMatrix& m) {
    return m.map([](const AlgebraElement& x) { return apply_d(x); });
}
inline ElementMatrix star_entrywise_transpose(const ElementMatrix& m) {
    ElementMatrix r(m.cols(), m.rows(), AlgebraElement());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = star(m(i, j));
    return r;
}
inline bool matrix_is_zero(const ElementMatrix& m, double tol) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_zero(tol)) return false;
    return true;
}
inline double matrix_residual(const ElementMatrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (const auto& [k, c] : m(i, j).coords()) worst = std::max(worst, c.abs());
    return worst;
}

inline ModuleVec mat_vec(const ElementMatrix& m, const ModuleVec& v) {
    if (m.cols() != v.size()) throw ShapeMismatch("matrix/vector shape mismatch");
    ModuleVec out;
    out.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        AlgebraElement acc = mul(m(i, 0), v[0]);
        for (std::size_t k = 1; k < m.cols(); ++k) acc = acc + mul(m(i, k), v[k]);
        out.push_back(acc);
    }
    return out;
}
inline ModuleVec vec_add(const ModuleVec& a, const ModuleVec& b) {
    ModuleVec out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] + b[i]);
    return out;
}
inline ModuleVec vec_sub(const ModuleVec& a, const ModuleVec& b) {
    ModuleVec out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
    return out;
}
inline ModuleVec vec_d(const ModuleVec& v) {
    ModuleVec out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(apply_d(x));
    return out;
}
inline ModuleVec vec_mul_right(const ModuleVec& v, const AlgebraElement& a) {
    ModuleVec out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(mul(x, a));
    return out;
}
inline ModuleVec vec_mul_left(const AlgebraElement& a, const ModuleVec& v) {
    ModuleVec out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(mul(a, x));
    return out;
}
inline bool vec_is_zero(const ModuleVec& v, double tol) {
    for (const auto& x : v)
        if (!x.is_zero(tol)) return false;
    return true;
}
inline double vec_residual(const ModuleVec& v) {
    double worst = 0.0;
    for (const auto& x : v)
        for (const auto& [k, c] : x.coords()) worst = std::max(worst, c.abs());
    return worst;
}

/// Projection-presented module pA^N; p has degree-0 entries, p^2 = p, and
/// p* = p whenever the owner carries a star.
struct FgpModule {
    AlgebraPtr owner;
    std::size_t ambient_rank = 0;
    ElementMatrix projection;

    static FgpModule free(const AlgebraPtr& A, std::size_t n) {
        return {A, n, identity_matrix(A, n)};
    }

    static FgpModule from_projection(const AlgebraPtr& A, ElementMatrix p) {
        if (p.rows() != p.cols()) throw ShapeMismatch("projection must be square");
        FgpModule m{A, p.rows(), std::move(p)};
        m.validate();
        return m;
    }

    void validate() const {
        const double tol = owner->mode() == ScalarMode::numeric ? owner->tolerance() : 0.0;
        for (std::size_t i = 0; i < projection.rows(); ++i)
            for (std::size_t j = 0; j < projection.cols(); ++j)
                for (const auto& [k, c] : projection(i, j).coords())
                    if (owner->degree(k) != 0)
                        throw InvalidInput("projection entries must have degree 0");
        if (!matrix_is_zero(projection * projection - projection, tol))
            throw InvalidInput("projection is not idempotent");
        if (owner->has_star() &&
            !matrix_is_zero(star_entrywise_transpose(projection) - projection, tol))
            throw InvalidInput("projection is not self-adjoint");
    }

    bool is_free() const {
        const double tol = owner->mode() == ScalarMode::numeric ? owner->tolerance() : 0.0;
        return matrix_is_zero(projection - identity_matrix(owner, ambient_rank), tol);
    }

    /// Generator columns p e_j in canonical representation.
    std::vector<ModuleVec> generators() const {
        std::vector<ModuleVec> g;
        for (std::size_t j = 0; j < ambient_rank; ++j) g.push_back(projection.column(j));
        return g;
    }
};

/// Connection data nabla(v) = p d(v) + kappa v on canonical representatives
/// v = p v; kappa entries are one-forms.
struct FgpConnection {
    FgpModule module;
    ElementMatrix kappa;

    const AlgebraPtr& owner() const { return module.owner; }

    ModuleVec apply(const ModuleVec& v) const {
        return vec_add(mat_vec(module.projection, vec_d(v)), mat_vec(kappa, v));
    }

    static FgpConnection make(FgpModule m, ElementMatrix kappa) {
        if (kappa.rows() != m.ambient_rank || kappa.cols() != m.ambient_rank)
            throw ShapeMismatch("kappa shape does not match ambient rank");
        for (std::size_t i = 0; i < kappa.rows(); ++i)
            for (std::size_t j = 0; j < kappa.cols(); ++j)
                for (const auto& [k, c] : kappa(i, j).coords())
                    if (m.owner->degree(k) != 1)
                        throw InvalidInput("kappa entries must have degree 1");
        return {std::move(m), std::move(kappa)};
    }

    /// The plain exterior derivative as a connection on a free module.
    static FgpConnection trivial(const AlgebraPtr& A, std::size_t n) {
        FgpModule m = FgpModule::free(A, n);
        ElementMatrix z = zero_matrix(A, n, n);
        return {std::move(m), std::move(z)};
    }
};

/// nabla(g) = p dg via kappa = p d(p), which acts as zero on canonical
/// representatives.
inline FgpConnection grassmannian_connection(const FgpModule& m) {
    ElementMatrix dp = apply_d_entrywise(m.projection);
    ElementMatrix kappa = m.projection * dp;
    return {m, std::move(kappa)};
}

namespace detail {

inline bool element_is_central(const AlgebraElement& x) {
    const AlgebraPtr& A = x.owner();
    const double tol = A->mode() == ScalarMode::numeric ? A->tolerance() : 0.0;
    for (int b = 0; b < static_cast<int>(A->size()); ++b) {
        try {
            if (!graded_commutator(x, AlgebraElement::basis(A, b)).is_zero(tol)) return false;
        } catch (const OutOfWindow&) {
            continue;
        }
    }
    return true;
}

inline bool matrix_entries_central(const ElementMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!element_is_central(m(i, j))) return false;
    return true;
}

/// The tensor/dual/curvature calculus runs over graded-commutative owners
/// (typically after center reduction); connections with central coefficient
/// matrices over a noncommutative owner are also admitted.
inline void require_center_reduced(const FgpConnection& c, const std::string& op) {
    if (is_graded_commutative(c.owner())) return;
    if (matrix_entries_central(c.module.projection) && matrix_entries_central(c.kappa)) return;
    throw NotCenterReduced(op + " requires a graded-commutative owner or central "
                                "coefficients; reduce with center_connection first");
}

} // namespace detail

/// Pass/fail report for the connection laws: projection shape, kappa
/// sandwich, module-valuedness and both Leibniz rules evaluated literally on
/// generators against every in-window basis element.
inline CheckReport check_connection(const FgpConnection& c) {
    const AlgebraPtr& A = c.owner();
    const double tol = A->mode() == ScalarMode::numeric ? A->tolerance() : 0.0;
    const ElementMatrix& p = c.module.projection;
    CheckReport rep;

    CheckItem proj{"projection_idempotent", true, "", 0.0};
    ElementMatrix wit = p * p - p;
    proj.margin = matrix_residual(wit);
    if (!matrix_is_zero(wit, tol)) {
        proj.pass = false;
        proj.witness = "p*p != p";
    }
    rep.items.push_back(proj);

    if (A->has_star()) {
        CheckItem sa{"projection_self_adjoint", true, "", 0.0};
        ElementMatrix w = star_entrywise_transpose(p) - p;
        sa.margin = matrix_residual(w);
        if (!matrix_is_zero(w, tol)) {
            sa.pass = false;
            sa.witness = "p* != p";
        }
        rep.items.push_back(sa);
    }

    // kappa p = p kappa p keeps the action inside the module
    CheckItem sandwich{"kappa_sandwich", true, "", 0.0};
    ElementMatrix kp = c.kappa * p;
    ElementMatrix w = kp - p * kp;
    sandwich.margin = matrix_residual(w);
    if (!matrix_is_zero(w, tol)) {
        sandwich.pass = false;
        sandwich.witness = "kappa*p != p*kappa*p";
    }
    rep.items.push_back(sandwich);

    CheckItem module_valued{"module_valued", true, "", 0.0};
    CheckItem right_leibniz{"right_leibniz", true, "", 0.0};
    CheckItem left_leibniz{"left_leibniz", true, "", 0.0};
    auto gens = c.module.generators();
    for (std::size_t j = 0; j < gens.size(); ++j) {
        ModuleVec nabla_g;
        try {
            nabla_g = c.apply(gens[j]);
        } catch (const OutOfWindow&) {
            continue;
        }
        ModuleVec escaped = vec_sub(nabla_g, mat_vec(p, nabla_g));
        module_valued.margin = std::max(module_valued.margin, vec_residual(escaped));
        if (!vec_is_zero(escaped, tol) && module_valued.pass) {
            module_valued.pass = false;
            module_valued.witness = "nabla(g_" + std::to_string(j) + ") leaves the module";
        }
        for (int b = 0; b < static_cast<int>(A->size()); ++b) {
            AlgebraElement a = AlgebraElement::basis(A, b);
            const int da = A->degree(b);
            // right rule: nabla(g a) = nabla(g) a + g (da)   (|g| = 0)
            try {
                ModuleVec lhs = c.apply(vec_mul_right(gens[j], a));
                ModuleVec rhs =
                    vec_add(vec_mul_right(nabla_g, a), vec_mul_right(gens[j], apply_d(a)));
                ModuleVec diff = vec_sub(lhs, rhs);
                right_leibniz.margin = std::max(right_leibniz.margin, vec_residual(diff));
                if (!vec_is_zero(diff, tol) && right_leibniz.pass) {
                    right_leibniz.pass = false;
                    right_leibniz.witness =
                        "g_" + std::to_string(j) + " * " + A->symbol(b).name;
                }
            } catch (const OutOfWindow&) {
            }
            // left rule: nabla(a g) = (da) g + (-1)^{|a|} a nabla(g)
            try {
                ModuleVec lhs = c.apply(vec_mul_left(a, gens[j]));
                ModuleVec second = vec_mul_left(a, nabla_g);
                if (da % 2 != 0)
                    for (auto& x : second) x = -x;
                ModuleVec rhs = vec_add(vec_mul_left(apply_d(a), gens[j]), second);
                ModuleVec diff = vec_sub(lhs, rhs);
                left_leibniz.margin = std::max(left_leibniz.margin, vec_residual(diff));
                if (!vec_is_zero(diff, tol) && left_leibniz.pass) {
                    left_leibniz.pass = false;
                    left_leibniz.witness =
                        A->symbol(b).name + " * g_" + std::to_string(j);
                }
            } catch (const OutOfWindow&) {
            }
        }
    }
    rep.items.push_back(module_valued);
    rep.items.push_back(right_leibniz);
    rep.items.push_back(left_leibniz);
    return rep;
}

/// Curvature by literal double application of the connection to each
/// generator column, with the bilinearity witness recorded.
struct CurvatureForm {
    ElementMatrix entries;
    CheckItem bilinearity;

    bool is_zero(double tol) const { return matrix_is_zero(entries, tol); }
};

inline CurvatureForm curvature(const FgpConnection& c) {
    const AlgebraPtr& A = c.owner();
    if (A->max_degree() < 2)
        throw OutOfWindow("curvature needs degree window of at least 2");
    const std::size_t n = c.module.ambient_rank;
    CurvatureForm form{zero_matrix(A, n, n), {"curvature_bilinear", true, "", 0.0}};

    auto gens = c.module.generators();
    std::vector<ModuleVec> rr;
    for (std::size_t j = 0; j < n; ++j) {
        ModuleVec r = c.apply(c.apply(gens[j]));
        for (std::size_t i = 0; i < n; ++i) form.entries(i, j) = r[i];
        rr.push_back(std::move(r));
    }

    for (std::size_t j = 0; j < n; ++j)
        for (int b : A->basis_of_degree(0)) {
            AlgebraElement a = AlgebraElement::basis(A, b);
            try {
                ModuleVec lhs = c.apply(c.apply(vec_mul_right(gens[j], a)));
                ModuleVec diff = vec_sub(lhs, vec_mul_right(rr[j], a));
                form.bilinearity.margin =
                    std::max(form.bilinearity.margin, vec_residual(diff));
                if (!vec_is_zero(diff, A->mode() == ScalarMode::numeric ? A->tolerance() : 0.0) &&
                    form.bilinearity.pass) {
                    form.bilinearity.pass = false;
                    form.bilinearity.witness =
                        "nabla^2(g_" + std::to_string(j) + " * " + A->symbol(b).name + ")";
                }
            } catch (const OutOfWindow&) {
            }
        }
    return form;
}

/// Cross-check oracle: p (d kappa_tot + kappa_tot kappa_tot) p with
/// kappa_tot = p dp + p kappa p. Agrees with the double-application curvature.
inline ElementMatrix curvature_closed_form(const FgpConnection& c) {
    const ElementMatrix& p = c.module.projection;
    ElementMatrix ktot = p * apply_d_entrywise(p) + p * c.kappa * p;
    return p * (apply_d_entrywise(ktot) + ktot * ktot) * p;
}

inline bool is_flat(const FgpConnection& c, double tol) {
    return curvature(c).is_zero(tol);
}

inline ElementMatrix kron(const ElementMatrix& a, const ElementMatrix& b) {
    ElementMatrix r(a.rows() * b.rows(), a.cols() * b.cols(), AlgebraElement());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = mul(a(i, j), b(k, l));
    return r;
}

/// Tensor-product connection: module p1 (x) p2 with
/// kappa = kappa1 (x) p2 + p1 (x) kappa2.
inline FgpConnection tensor_connection(const FgpConnection& c1, const FgpConnection& c2) {
    if (c1.owner().get() != c2.owner().get())
        throw OwnerMismatch("tensor of connections over different algebras");
    detail::require_center_reduced(c1, "tensor_connection");
    detail::require_center_reduced(c2, "tensor_connection");
    ElementMatrix p = kron(c1.module.projection, c2.module.projection);
    ElementMatrix kappa = kron(c1.kappa, c2.module.projection) +
                          kron(c1.module.projection, c2.kappa);
    FgpModule m{c1.owner(), p.rows(), std::move(p)};
    return {std::move(m), std::move(kappa)};
}

/// Dual connection on the transposed projection; on free modules the
/// coefficient is -kappa^T.
inline FgpConnection dual_connection(const FgpConnection& c) {
    detail::require_center_reduced(c, "dual_connection");
    ElementMatrix pt = c.module.projection.transpose();
    ElementMatrix kappa = -(pt * c.kappa.transpose());
    FgpModule m{c.owner(), pt.rows(), std::move(pt)};
    return {std::move(m), std::move(kappa)};
}

inline FgpConnection direct_sum_connection(const FgpConnection& c1, const FgpConnection& c2) {
    if (c1.owner().get() != c2.owner().get())
        throw OwnerMismatch("direct sum of connections over different algebras");
    const AlgebraPtr& A = c1.owner();
    const std::size_t n1 = c1.module.ambient_rank, n2 = c2.module.ambient_rank;
    ElementMatrix p = zero_matrix(A, n1 + n2, n1 + n2);
    ElementMatrix kappa = zero_matrix(A, n1 + n2, n1 + n2);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n1; ++j) {
            p(i, j) = c1.module.projection(i, j);
            kappa(i, j) = c1.kappa(i, j);
        }
    for (std::size_t i = 0; i < n2; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            p(n1 + i, n1 + j) = c2.module.projection(i, j);
            kappa(n1 + i, n1 + j) = c2.kappa(i, j);
        }
    FgpModule m{A, n1 + n2, std::move(p)};
    return {std::move(m), std::move(kappa)};
}

/// Morphism check: phi intertwines the projections and
/// nabla_2 (phi v) = phi (nabla_1 v) on generators.
inline CheckReport check_morphism(const ElementMatrix& phi, const FgpConnection& c1,
                                  const FgpConnection& c2) {
    if (c1.owner().get() != c2.owner().get())
        throw OwnerMismatch("morphism between connections over different algebras");
    if (phi.rows() != c2.module.ambient_rank || phi.cols() != c1.module.ambient_rank)
        throw ShapeMismatch("phi shape does not match the modules");
    const AlgebraPtr& A = c1.owner();
    const double tol = A->mode() == ScalarMode::numeric ? A->tolerance() : 0.0;
    CheckReport rep;

    CheckItem deg{"phi_degree_zero", true, "", 0.0};
    for (std::size_t i = 0; i < phi.rows() && deg.pass; ++i)
        for (std::size_t j = 0; j < phi.cols() && deg.pass; ++j)
            for (const auto& [k, c] : phi(i, j).coords())
                if (A->degree(k) != 0) {
                    deg.pass = false;
                    deg.witness = "entry (" + std::to_string(i) + "," + std::to_string(j) + ")";
                }
    rep.items.push_back(deg);

    CheckItem sandwich{"phi_projection_sandwich", true, "", 0.0};
    ElementMatrix w = c2.module.projection * phi * c1.module.projection - phi;
    sandwich.margin = matrix_residual(w);
    if (!matrix_is_zero(w, tol)) {
        sandwich.pass = false;
        sandwich.witness = "phi != p2 phi p1";
    }
    rep.items.push_back(sandwich);

    CheckItem inter{"intertwines_connections", true, "", 0.0};
    auto gens = c1.module.generators();
    for (std::size_t j = 0; j < gens.size(); ++j) {
        try {
            ModuleVec lhs = c2.apply(mat_vec(phi, gens[j]));
            ModuleVec rhs = mat_vec(phi, c1.apply(gens[j]));
            ModuleVec diff = vec_sub(lhs, rhs);
            inter.margin = std::max(inter.margin, vec_residual(diff));
            if (!vec_is_zero(diff, tol) && inter.pass) {
                inter.pass = false;
                inter.witness = "generator " + std::to_string(j) + " residual " +
                                std::to_string(inter.margin);
            }
        } catch (const OutOfWindow&) {
            continue;
        }
    }
    rep.items.push_back(inter);
    return rep;
}

/// A connection together with the center reduction it lives over.
struct CenterConnection {
    CenterAlgebra center;
    FgpConnection connection;
};

/// Restriction of a connection to the graded center: valid bimodule data has
/// central projection and kappa entries, which are re-expressed over the
/// center dga. Escaping entries signal an invalid input connection.
inline CenterConnection center_connection(const FgpConnection& c) {
    const AlgebraPtr& A = c.owner();
    if (is_graded_commutative(A)) {
        CenterAlgebra ca;
        ca.algebra = A;
        ca.ambient = A;
        for (int i = 0; i < static_cast<int>(A->size()); ++i)
            ca.embedding.push_back(AlgebraElement::basis(A, i));
        return {std::move(ca), c};
    }
    CenterBasis cb = graded_center(A);
    CenterAlgebra ca = center_subalgebra(A, cb);
    const std::size_t n = c.module.ambient_rank;
    ElementMatrix p(n, n, AlgebraElement::zero(ca.algebra));
    ElementMatrix kappa(n, n, AlgebraElement::zero(ca.algebra));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            p(i, j) = ca.pull_back(c.module.projection(i, j));
            kappa(i, j) = ca.pull_back(c.kappa(i, j));
        }
    FgpModule m = FgpModule::from_projection(ca.algebra, std::move(p));
    return {std::move(ca), FgpConnection::make(std::move(m), std::move(kappa))};
}

/// Algebraically specified point of a commutative degree-0 part: a
/// multiplicative unital functional given by its values on the degree-0 basis.
struct Character {
    AlgebraPtr owner;
    std::map<int, Scalar> values;

    Scalar operator()(const AlgebraElement& e) const {
        Scalar acc = Scalar::zero(owner->mode());
        for (const auto& [i, c] : e.coords()) {
            if (owner->degree(i) != 0)
                throw InvalidInput("character applied to positive-degree element");
            auto it = values.find(i);
            if (it == values.end()) throw InvalidInput("character missing a basis value");
            acc += c * it->second;
        }
        return acc;
    }
};

/// Builds a character and verifies unitality and multiplicativity on all
/// degree-0 basis pairs; throws NotMultiplicative otherwise.
inline Character make_character(const AlgebraPtr& A, std::map<int, Scalar> values) {
    Character chi{A, std::move(values)};
    const double tol = A->mode() == ScalarMode::numeric ? A->tolerance() : 0.0;
    if (!chi(AlgebraElement::unit(A)).equals(Scalar::one(A->mode()), tol))
        throw NotMultiplicative("chi(1) != 1");
    for (int i : A->basis_of_degree(0))
        for (int j : A->basis_of_degree(0)) {
            AlgebraElement prod = mul(AlgebraElement::basis(A, i), AlgebraElement::basis(A, j));
            Scalar lhs = chi(prod);
            Scalar rhs = chi(AlgebraElement::basis(A, i)) * chi(AlgebraElement::basis(A, j));
            if (!lhs.equals(rhs, tol))
                throw NotMultiplicative("chi(" + A->symbol(i).name + "*" + A->symbol(j).name +
                                        ") != chi*chi");
        }
    return chi;
}

inline Matrix<Scalar> localize_matrix(const Character& chi, const ElementMatrix& m) {
    Matrix<Scalar> r(m.rows(), m.cols(), Scalar::zero(chi.owner->mode()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = chi(m(i, j));
    return r;
}

struct FibreData {
    std::size_t dimension = 0;
    Matrix<Scalar> projection_at_point;
};

/// The fibre of the module at the point cut out by chi: the rank of the
/// evaluated idempotent.
inline FibreData fibre_functor(const FgpConnection& c, const Character& chi) {
    const AlgebraPtr& A = c.owner();
    if (!is_graded_commutative(A))
        throw NotCenterReduced("fibre functor needs a graded-commutative owner");
    const double tol = A->mode() == ScalarMode::numeric ? A->tolerance() : 0.0;
    Matrix<Scalar> P = localize_matrix(chi, c.module.projection);
    Matrix<Scalar> w = P * P - P;
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j)
            if (!w(i, j).is_zero(std::max(tol, 1e-10)))
                throw NotMultiplicative("character does not evaluate p to an idempotent");
    FibreData out;
    out.dimension = linalg::rank(P, std::max(tol, 1e-10));
    out.projection_at_point = std::move(P);
    return out;
}

} // namespace ncg
