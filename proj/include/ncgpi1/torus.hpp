#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ncgpi1/algebra.hpp"
#include "ncgpi1/builders.hpp"
#include "ncgpi1/connection.hpp"
#include "ncgpi1/intmat.hpp"
#include "ncgpi1/matrix.hpp"
#include "ncgpi1/phase.hpp"

namespace ncg {

/// One deformation-matrix entry over Q + Q theta_1 + ... + Q theta_k.
struct ThetaEntry {
    Rational rational{0};
    std::vector<Rational> irr; // one coefficient per declared generator
};

/// Presentation of an n-torus deformation: skew-symmetric Theta with exact
/// rational and symbolic-irrational components, plus the Weyl support radius.
struct TorusPresentation {
    std::size_t n = 0;
    std::vector<std::string> generator_names;        // declared irrационals, may be empty
    std::vector<std::vector<ThetaEntry>> theta;      // n x n
    long radius = 1;                                 // sup-norm window on Z^n
    Truncation policy = Truncation::strict;
    std::vector<double> bindings;                    // numeric values, may be empty

    std::size_t generators() const { return generator_names.size(); }

    void validate() const {
        if (n == 0) throw InvalidInput("torus dimension must be positive");
        if (theta.size() != n) throw InvalidInput("Theta row count mismatch");
        for (const auto& row : theta) {
            if (row.size() != n) throw InvalidInput("Theta column count mismatch");
            for (const auto& e : row)
                if (e.irr.size() != generators())
                    throw InvalidInput("Theta entry has wrong irrational coefficient count");
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (theta[i][j].rational != -theta[j][i].rational)
                    throw InvalidInput("Theta rational part is not skew-symmetric");
                for (std::size_t g = 0; g < generators(); ++g)
                    if (theta[i][j].irr[g] != -theta[j][i].irr[g])
                        throw InvalidInput("Theta irrational part is not skew-symmetric");
            }
        if (radius < 1) throw InvalidInput("radius must be at least 1");
        if (!bindings.empty() && bindings.size() != generators())
            throw InvalidInput("numeric bindings must match the declared generators");
    }

    /// Cocycle exponent tau(r,s) = exp(i pi r^T Theta s) as a PhaseExponent.
    PhaseExponent cocycle(const std::vector<long>& r, const std::vector<long>& s) const {
        Rational rat(0);
        std::vector<Rational> irr(generators(), Rational(0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Integer f = Integer(r[i]) * Integer(s[j]);
                if (f == 0) continue;
                Rational fr(f);
                rat += fr * theta[i][j].rational;
                for (std::size_t g = 0; g < generators(); ++g)
                    irr[g] += fr * theta[i][j].irr[g];
            }
        return PhaseExponent(std::move(rat), std::move(irr));
    }

    /// True iff Theta r is an integer vector (exactly).
    bool lattice_contains(const std::vector<long>& r) const {
        for (std::size_t i = 0; i < n; ++i) {
            Rational rat(0);
            std::vector<Rational> irr(generators(), Rational(0));
            for (std::size_t j = 0; j < n; ++j) {
                Rational f{Integer(r[j])};
                rat += theta[i][j].rational * f;
                for (std::size_t g = 0; g < generators(); ++g)
                    irr[g] += theta[i][j].irr[g] * f;
            }
            if (rat_den(rat) != 1) return false;
            for (const auto& c : irr)
                if (c != 0) return false;
        }
        return true;
    }

    /// Exact scalars are possible exactly when every cocycle phase lies in
    /// {1, i, -1, -i}: no irrationals and 2*Theta integral.
    bool exact_phases() const {
        for (const auto& row : theta)
            for (const auto& e : row) {
                for (const auto& c : e.irr)
                    if (c != 0) return false;
                if (rat_den(e.rational) > 2) return false;
            }
        return true;
    }
};

/// coefficient * exp(i pi phase) * u^r with the canonical Weyl normalization
/// folded into u^r.
struct WeylElement {
    std::vector<long> exponent;
    Scalar coeff = Scalar::exact_int(1);
    PhaseExponent phase;

    bool operator==(const WeylElement& o) const {
        return exponent == o.exponent && coeff == o.coeff && phase == o.phase;
    }
};

inline long sup_norm(const std::vector<long>& r) {
    long m = 0;
    for (long x : r) m = std::max(m, x < 0 ? -x : x);
    return m;
}

/// u^r u^s = tau(r,s) u^{r+s}, with the phase tracked exactly.
inline WeylElement weyl_mul(const WeylElement& a, const WeylElement& b,
                            const TorusPresentation& T) {
    if (a.exponent.size() != T.n || b.exponent.size() != T.n)
        throw ShapeMismatch("Weyl exponent dimension mismatch");
    WeylElement out;
    out.exponent.resize(T.n);
    for (std::size_t i = 0; i < T.n; ++i) out.exponent[i] = a.exponent[i] + b.exponent[i];
    if (sup_norm(out.exponent) > T.radius) {
        if (T.policy == Truncation::strict)
            throw OutOfWindow("Weyl product exponent leaves the radius-" +
                              std::to_string(T.radius) + " window");
        out.coeff = Scalar::zero(a.coeff.mode());
        out.phase = PhaseExponent(T.generators());
        for (auto& x : out.exponent) x = 0;
        return out;
    }
    out.coeff = a.coeff * b.coeff;
    out.phase = a.phase + b.phase + T.cocycle(a.exponent, b.exponent);
    return out;
}

inline WeylElement weyl_unit(const TorusPresentation& T,
                             ScalarMode mode = ScalarMode::exact) {
    return {std::vector<long>(T.n, 0), Scalar::one(mode), PhaseExponent(T.generators())};
}

inline WeylElement weyl_generator(const TorusPresentation& T, std::size_t k,
                                  long power = 1, ScalarMode mode = ScalarMode::exact) {
    std::vector<long> r(T.n, 0);
    r[k] = power;
    return {std::move(r), Scalar::one(mode), PhaseExponent(T.generators())};
}

namespace detail {

/// Window enumeration |r|_inf <= R, ordered by (sup norm, lexicographic).
inline std::vector<std::vector<long>> weyl_window(std::size_t n, long R) {
    std::vector<std::vector<long>> out;
    std::vector<long> r(n, -R);
    while (true) {
        out.push_back(r);
        std::size_t i = 0;
        while (i < n && r[i] == R) r[i++] = -R;
        if (i == n) break;
        ++r[i];
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        long na = sup_norm(a), nb = sup_norm(b);
        if (na != nb) return na < nb;
        return a < b;
    });
    return out;
}

inline std::string weyl_name(const std::vector<long>& r, std::uint32_t S) {
    std::string s = "u[";
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(r[i]);
    }
    s += "]";
    if (S != 0) s += wedge_name(S, "e");
    return s;
}

} // namespace detail

/// Truncated differential forms of the deformed torus: Weyl span (sup-norm
/// window) tensored with the exterior algebra on the central one-form
/// generators eta_k = u_k^{-1} du_k, with d(u^r) = u^r sum_k r_k eta_k and
/// star (u^r)* = u^{-r}, eta_k* = -eta_k.
inline AlgebraPtr torus_forms(const TorusPresentation& T, int max_degree,
                              ScalarMode mode = ScalarMode::numeric) {
    T.validate();
    if (max_degree < 0 || max_degree > static_cast<int>(T.n))
        throw InvalidInput("torus form degree must lie in [0, n]");
    if (mode == ScalarMode::exact && !T.exact_phases())
        throw InvalidInput("exact torus forms need 2*Theta integral and no irrationals");
    std::vector<double> bindings = T.bindings;
    if (mode == ScalarMode::numeric && bindings.empty() && T.generators() > 0)
        throw InvalidInput("numeric torus forms need bindings for the irrational generators");

    auto window = detail::weyl_window(T.n, T.radius);
    auto subsets = detail::wedge_subsets(static_cast<int>(T.n));
    subsets.erase(std::remove_if(subsets.begin(), subsets.end(),
                                 [&](std::uint32_t s) {
                                     return std::popcount(s) > max_degree;
                                 }),
                  subsets.end());

    AlgebraData d;
    d.max_degree = max_degree;
    d.mode = mode;
    d.policy = T.policy;

    std::map<std::pair<std::vector<long>, std::uint32_t>, int> index;
    for (const auto& r : window)
        for (auto S : subsets) {
            index[{r, S}] = static_cast<int>(d.basis.size());
            d.basis.push_back({detail::weyl_name(r, S), std::popcount(S)});
        }
    const std::vector<long> zero_exp(T.n, 0);
    d.unit = {{index.at({zero_exp, 0u}), Scalar::one(mode)}};

    auto phase_scalar = [&](const PhaseExponent& ph) -> Scalar {
        if (mode == ScalarMode::exact) {
            auto v = ph.exact_value();
            if (!v) throw Error("non-Gaussian phase in exact torus forms");
            return *v;
        }
        return Scalar::numeric(ph.value(bindings));
    };

    const int N = static_cast<int>(d.basis.size());
    for (const auto& r : window)
        for (auto S : subsets)
            for (const auto& s : window)
                for (auto Tset : subsets) {
                    int i = index.at({r, S});
                    int j = index.at({s, Tset});
                    int deg = std::popcount(S) + std::popcount(Tset);
                    int sign = detail::wedge_sign(S, Tset);
                    if (sign == 0) {
                        // repeated one-form generator: the product is zero in
                        // any degree, truncated or not
                        d.products[{i, j}] = SparseVec{};
                        continue;
                    }
                    if (deg > max_degree) continue; // genuine degree overflow
                    std::vector<long> sum(T.n);
                    for (std::size_t t = 0; t < T.n; ++t) sum[t] = r[t] + s[t];
                    if (sup_norm(sum) > T.radius) {
                        d.products[{i, j}] = std::nullopt; // Weyl window overflow
                        continue;
                    }
                    Scalar c = phase_scalar(T.cocycle(r, s));
                    if (sign < 0) c = -c;
                    d.products[{i, j}] = SparseVec{{index.at({sum, S | Tset}), c}};
                }

    for (const auto& r : window)
        for (auto S : subsets) {
            int i = index.at({r, S});
            int deg = std::popcount(S);
            SparseVec v;
            bool overflow = false;
            for (std::size_t k = 0; k < T.n; ++k) {
                if (r[k] == 0) continue;
                if (S & (1u << k)) continue; // eta_k eta_S vanishes
                if (deg + 1 > max_degree) {
                    overflow = true;
                    break;
                }
                int sign = detail::wedge_sign(1u << k, S);
                Scalar c = mode == ScalarMode::exact
                               ? Scalar::exact_int(sign * r[k])
                               : Scalar::numeric(static_cast<double>(sign * r[k]));
                v[index.at({r, S | (1u << k)})] = c;
            }
            if (overflow) d.differential[i] = std::nullopt;
            else d.differential[i] = std::move(v);
        }

    std::vector<StarEntry> st(static_cast<std::size_t>(N));
    for (const auto& r : window)
        for (auto S : subsets) {
            int i = index.at({r, S});
            std::vector<long> neg(T.n);
            for (std::size_t t = 0; t < T.n; ++t) neg[t] = -r[t];
            int k = std::popcount(S);
            Scalar c = Scalar::one(mode);
            if ((k * (k + 1) / 2) % 2 != 0) c = -c;
            st[static_cast<std::size_t>(i)] = {index.at({neg, S}), c};
        }
    d.star = std::move(st);

    return make_algebra(std::move(d));
}

/// Basis data for Lambda = {r in Z^n : Theta r in Z^n}.
struct LatticeData {
    std::size_t n = 0;
    std::size_t m = 0;        // rank
    IntMatrix basis;          // m rows, HNF-canonical
    IntMatrix completion;     // n-m further rows, Q-independent from basis
    bool unimodular_extension = false;
};

/// Exact integer solve of Theta r in Z^n: irrational components impose
/// integer kernels, the rational component a congruence cleared by scaling.
inline LatticeData lattice_Lambda(const TorusPresentation& T) {
    T.validate();
    const std::size_t n = T.n;

    Integer D0 = 1;
    for (const auto& row : T.theta)
        for (const auto& e : row) D0 = int_lcm(D0, rat_den(e.rational));
    std::vector<Integer> Dg(T.generators(), 1);
    for (std::size_t g = 0; g < T.generators(); ++g)
        for (const auto& row : T.theta)
            for (const auto& e : row) Dg[g] = int_lcm(Dg[g], rat_den(e.irr[g]));

    // variables (r, k): D0*Theta0*r = D0*k, and Dg*Theta_g*r = 0
    IntMatrix sys;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Integer> row(2 * n, 0);
        for (std::size_t j = 0; j < n; ++j)
            row[j] = rat_num(T.theta[i][j].rational) * (D0 / rat_den(T.theta[i][j].rational));
        row[n + i] = -D0;
        sys.push_back(std::move(row));
    }
    for (std::size_t g = 0; g < T.generators(); ++g)
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Integer> row(2 * n, 0);
            for (std::size_t j = 0; j < n; ++j)
                row[j] = rat_num(T.theta[i][j].irr[g]) * (Dg[g] / rat_den(T.theta[i][j].irr[g]));
            sys.push_back(std::move(row));
        }

    IntMatrix ker = right_kernel(sys);
    IntMatrix projected;
    for (const auto& row : ker)
        projected.push_back(std::vector<Integer>(row.begin(), row.begin() + static_cast<long>(n)));

    LatticeData out;
    out.n = n;
    out.basis = lattice_basis(projected);
    out.m = out.basis.size();

    // complete to n Q-independent rows using standard basis vectors
    IntMatrix stack = out.basis;
    for (std::size_t i = 0; i < n && stack.size() < n; ++i) {
        std::vector<Integer> e(n, 0);
        e[i] = 1;
        IntMatrix trial = stack;
        trial.push_back(e);
        if (row_hnf(trial).rank == trial.size()) {
            stack.push_back(e);
            out.completion.push_back(std::move(e));
        }
    }
    if (stack.size() == n)
        out.unimodular_extension = abs(int_determinant(stack)) == 1;
    return out;
}

/// The dual subgroup of Lambda inside T^n: a product of cyclic groups (the
/// Smith invariant factors of the basis) and a torus factor T^{n-m}.
struct GammaDescription {
    std::vector<Integer> invariant_factors; // one per basis row
    std::size_t torus_rank = 0;
    std::string text;
};

inline GammaDescription gamma_subgroup(const LatticeData& L) {
    GammaDescription out;
    out.torus_rank = L.n - L.m;
    if (L.m > 0) out.invariant_factors = smith_invariant_factors(L.basis);
    std::string s;
    for (const auto& f : out.invariant_factors) {
        if (f == 1) continue;
        if (!s.empty()) s += " x ";
        s += "Z/" + f.str();
    }
    if (out.torus_rank > 0) {
        if (!s.empty()) s += " x ";
        s += "T^" + std::to_string(out.torus_rank);
    }
    out.text = s.empty() ? "trivial" : s;
    return out;
}

/// Classification descriptor for the fundamental group of the deformed torus.
struct Pi1Descriptor {
    std::size_t m = 0;
    std::size_t n_minus_m = 0;
    LatticeData lattice;
    GammaDescription gamma;
    std::string hull_text;      // "algebraic hull of Z^m x R^(n-m)"
    std::string generator_text; // "Z^n + Theta Z^n"
};

inline Pi1Descriptor pi1_descriptor(const TorusPresentation& T) {
    Pi1Descriptor out;
    out.lattice = lattice_Lambda(T);
    out.m = out.lattice.m;
    out.n_minus_m = T.n - out.m;
    out.gamma = gamma_subgroup(out.lattice);
    std::string hull;
    if (out.n_minus_m == 0) hull = "Z^" + std::to_string(out.m);
    else if (out.m == 0) hull = "R^" + std::to_string(out.n_minus_m);
    else hull = "Z^" + std::to_string(out.m) + " x R^" + std::to_string(out.n_minus_m);
    out.hull_text = "algebraic hull of " + hull;
    out.generator_text = "Z^" + std::to_string(T.n) + " + Theta Z^" + std::to_string(T.n);
    return out;
}

/// Exact comparison of the brute-force graded center of the truncated torus
/// forms against the lattice prediction, on the interior window and in the
/// requested degrees (0 and 1 by default).
struct CenterCrosscheck {
    bool match = true;
    long interior_radius = 0;
    std::size_t degree0_center = 0, degree0_predicted = 0;
    std::size_t degree1_center = 0, degree1_predicted = 0;
    std::vector<std::vector<long>> commutant_exponents; // interior r with u^r central
    std::vector<std::vector<long>> predicted_exponents; // interior r in Lambda
};

inline CenterCrosscheck center_crosscheck(const TorusPresentation& T, int max_degree = 1) {
    T.validate();
    LatticeData L = lattice_Lambda(T);
    const long interior = T.radius - 1;
    for (const auto& row : L.basis) {
        long nrm = 0;
        for (const auto& x : row)
            nrm = std::max(nrm, static_cast<long>(abs(x)));
        if (nrm > interior)
            throw Inconclusive("window radius " + std::to_string(T.radius) +
                               " does not contain a Lambda basis in its interior");
    }

    auto window = detail::weyl_window(T.n, T.radius);
    CenterCrosscheck out;
    out.interior_radius = interior;

    for (const auto& r : window) {
        if (sup_norm(r) > interior) continue;
        // exact commutant test: u^r eta_S commutes with u^s eta_T iff
        // tau(r,s) == tau(s,r) for all testable s (the eta parts always
        // graded-commute), i.e. the cocycle phases cancel pair by pair
        bool central = true;
        for (const auto& s : window) {
            std::vector<long> sum(T.n);
            for (std::size_t t = 0; t < T.n; ++t) sum[t] = r[t] + s[t];
            if (sup_norm(sum) > T.radius) continue;
            if (T.cocycle(r, s) != T.cocycle(s, r)) {
                central = false;
                break;
            }
        }
        bool predicted = T.lattice_contains(r);
        if (central) out.commutant_exponents.push_back(r);
        if (predicted) out.predicted_exponents.push_back(r);
        if (central != predicted) out.match = false;
    }

    out.degree0_center = out.commutant_exponents.size();
    out.degree0_predicted = out.predicted_exponents.size();
    if (max_degree >= 1) {
        out.degree1_center = out.commutant_exponents.size() * T.n;
        out.degree1_predicted = out.predicted_exponents.size() * T.n;
    }
    return out;
}

/// Free-module connection kappa = sum_k E_k (x) eta_k from pairwise-commuting
/// endomorphisms; the converse of endos_from_connection.
struct EndoConnection {
    AlgebraPtr forms;
    FgpConnection connection;
    bool flat = false;
};

inline EndoConnection connection_from_endos(const std::vector<CMatrix>& endos,
                                            const TorusPresentation& T,
                                            double tol = 1e-10) {
    if (endos.size() != T.n) throw InvalidInput("need one endomorphism per torus generator");
    const std::size_t k = endos[0].rows();
    for (const auto& e : endos)
        if (e.rows() != k || e.cols() != k)
            throw ShapeMismatch("endomorphisms must be square of equal size");
    for (std::size_t a = 0; a < endos.size(); ++a)
        for (std::size_t b = a + 1; b < endos.size(); ++b) {
            double c = frobenius_norm(commutator(endos[a], endos[b]));
            if (c > tol * std::max(1.0, frobenius_norm(endos[a]) * frobenius_norm(endos[b])))
                throw NonCommutingEndos("endomorphisms " + std::to_string(a) + "," +
                                        std::to_string(b) + " do not commute: ||[.,.]|| = " +
                                        std::to_string(c));
        }

    EndoConnection out;
    out.forms = torus_forms(T, std::min<int>(2, static_cast<int>(T.n)), ScalarMode::numeric);
    ElementMatrix kappa = zero_matrix(out.forms, k, k);
    for (std::size_t g = 0; g < T.n; ++g) {
        std::vector<long> zero_exp(T.n, 0);
        AlgebraElement eta =
            AlgebraElement::basis(out.forms, detail::weyl_name(zero_exp, 1u << g));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                kappa(i, j) = kappa(i, j) + eta * Scalar::numeric(endos[g](i, j));
    }
    out.connection = FgpConnection::make(FgpModule::free(out.forms, k), std::move(kappa));
    if (static_cast<int>(T.n) >= 2) out.flat = is_flat(out.connection, tol);
    else out.flat = true; // a single interval direction has no two-form window
    return out;
}

/// Extracts the constant endomorphism matrices from a connection in normal
/// form (kappa supported on the central generators with constant
/// coefficients); anything else is reported, normalization is out of scope.
inline std::vector<CMatrix> endos_from_connection(const FgpConnection& c,
                                                  const TorusPresentation& T) {
    const AlgebraPtr& A = c.owner();
    const std::size_t k = c.module.ambient_rank;
    std::vector<long> zero_exp(T.n, 0);
    std::vector<int> eta_index;
    for (std::size_t g = 0; g < T.n; ++g)
        eta_index.push_back(A->index_of(detail::weyl_name(zero_exp, 1u << g)));

    std::vector<CMatrix> endos(T.n, CMatrix(k, k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            for (const auto& [idx, coeff] : c.kappa(i, j).coords()) {
                auto it = std::find(eta_index.begin(), eta_index.end(), idx);
                if (it == eta_index.end())
                    throw NotInNormalForm("kappa entry (" + std::to_string(i) + "," +
                                          std::to_string(j) +
                                          ") has a non-constant or non-central component: " +
                                          A->symbol(idx).name);
                endos[static_cast<std::size_t>(it - eta_index.begin())](i, j) =
                    coeff.to_complex();
            }

    double tol = 1e-10;
    for (std::size_t a = 0; a < endos.size(); ++a)
        for (std::size_t b = a + 1; b < endos.size(); ++b)
            if (frobenius_norm(commutator(endos[a], endos[b])) >
                tol * std::max(1.0, frobenius_norm(endos[a]) * frobenius_norm(endos[b])))
                throw NonCommutingEndos("extracted endomorphisms do not commute");
    return endos;
}

} // namespace ncg
