#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "ncgpi1/builders.hpp"
#include "ncgpi1/connection.hpp"
#include "ncgpi1/dm_check.hpp"
#include "ncgpi1/pseudoinverse.hpp"
#include "ncgpi1/report.hpp"
#include "ncgpi1/rng.hpp"
#include "ncgpi1/torus.hpp"

namespace ncg {

/// Independent oracle for the pseudoinverse: truncated-SVD Moore-Penrose
/// inverse via Eigen's Jacobi SVD.
inline CMatrix svd_pseudoinverse(const CMatrix& m, double rcond = 1e-12) {
    Eigen::MatrixXcd E(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) E(static_cast<long>(i), static_cast<long>(j)) = m(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double cutoff = sv.size() ? rcond * sv(0) : 0.0;
    Eigen::MatrixXcd sinv = Eigen::MatrixXcd::Zero(sv.size(), sv.size());
    for (long i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) sinv(i, i) = 1.0 / sv(i);
    Eigen::MatrixXcd P = svd.matrixV() * sinv * svd.matrixU().adjoint();
    CMatrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = P(static_cast<long>(i), static_cast<long>(j));
    return out;
}

inline std::size_t svd_rank(const CMatrix& m, double rcond = 1e-10) {
    Eigen::MatrixXcd E(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) E(static_cast<long>(i), static_cast<long>(j)) = m(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(E);
    const auto& sv = svd.singularValues();
    std::size_t r = 0;
    for (long i = 0; i < sv.size(); ++i)
        if (sv(i) > rcond * (sv.size() ? sv(0) : 0.0)) ++r;
    return r;
}

struct FuzzConfig {
    std::uint64_t seed = 0;
    std::size_t trials = 0; // 0: suite default
    std::size_t n_min = 2;
    std::size_t n_max = 5;
    double tolerance = 1e-8;
};

struct FuzzOutcome {
    Report report;
    std::string jsonl; // one record per trial
    std::size_t failures = 0;
};

namespace fuzz_detail {

inline Matrix<Scalar> to_scalar_matrix(const CMatrix& m) {
    Matrix<Scalar> r(m.rows(), m.cols(), Scalar::numeric(0.0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Scalar::numeric(m(i, j));
    return r;
}

inline CMatrix to_cmatrix(const Matrix<Scalar>& m) {
    CMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).to_complex();
    return r;
}

/// Random unitary by modified Gram-Schmidt on a random complex matrix.
inline CMatrix random_unitary(TrialRng& rng, std::size_t n) {
    CMatrix q = rng.next_cmatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            std::complex<double> dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, k)) * q(i, j);
            for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += std::norm(q(i, j));
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            q(j, j) += 1.0;
            norm = 1.0;
        }
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
    }
    return q;
}

/// Random self-adjoint idempotent of the given rank, as constant algebra
/// elements over A.
inline ElementMatrix random_projection(TrialRng& rng, const AlgebraPtr& A, std::size_t n,
                                       std::size_t rank) {
    CMatrix q = random_unitary(rng, n);
    CMatrix p(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::complex<double> acc = 0.0;
            for (std::size_t k = 0; k < rank; ++k) acc += q(i, k) * std::conj(q(j, k));
            p(i, j) = acc;
        }
    ElementMatrix out = zero_matrix(A, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = AlgebraElement::unit(A) * Scalar::numeric(p(i, j));
    return out;
}

inline ElementMatrix random_one_form_matrix(TrialRng& rng, const AlgebraPtr& A, std::size_t n) {
    ElementMatrix out = zero_matrix(A, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            AlgebraElement e = AlgebraElement::zero(A);
            for (int b : A->basis_of_degree(1))
                e = e + AlgebraElement::basis(A, b) * Scalar::numeric(rng.next_complex());
            out(i, j) = e;
        }
    return out;
}

inline FgpConnection random_lambda_connection(TrialRng& rng, const AlgebraPtr& A,
                                              std::size_t rank_max) {
    std::size_t n = static_cast<std::size_t>(rng.next_int(1, static_cast<long>(rank_max)));
    FgpModule m = FgpModule::free(A, n);
    if (rng.next_unit() < 0.35 && n > 1) {
        std::size_t rank = static_cast<std::size_t>(rng.next_int(1, static_cast<long>(n)));
        m = FgpModule::from_projection(A, random_projection(rng, A, n, rank));
    }
    ElementMatrix kappa = random_one_form_matrix(rng, A, n);
    // keep the action inside the module
    kappa = m.projection * kappa * m.projection;
    return FgpConnection{std::move(m), std::move(kappa)};
}

inline double pairing_antisymmetry_residual(const FgpConnection& c) {
    CurvatureForm r = curvature(c);
    CurvatureForm rd = curvature(dual_connection(c));
    const ElementMatrix& p = c.module.projection;
    ElementMatrix pt = p.transpose();
    double worst = 0.0;
    const std::size_t n = c.module.ambient_rank;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ModuleVec theta = pt.column(i);
            ModuleVec eps = p.column(j);
            ModuleVec rd_theta = mat_vec(rd.entries, theta);
            ModuleVec r_eps = mat_vec(r.entries, eps);
            AlgebraElement s1 = mul(rd_theta[0], eps[0]);
            for (std::size_t k = 1; k < n; ++k) s1 = s1 + mul(rd_theta[k], eps[k]);
            AlgebraElement s2 = mul(theta[0], r_eps[0]);
            for (std::size_t k = 1; k < n; ++k) s2 = s2 + mul(theta[k], r_eps[k]);
            worst = std::max(worst, vec_residual({s1 + s2}));
        }
    return worst;
}

} // namespace fuzz_detail

inline FuzzOutcome run_fuzz_suite(const std::string& suite, const FuzzConfig& cfg) {
    FuzzOutcome out;
    out.report.command = "fuzz " + suite;
    out.report.has_seed = true;
    out.report.seed = cfg.seed;
    std::ostringstream lines;

    auto suite_default = [&](std::size_t d) { return cfg.trials ? cfg.trials : d; };
    double worst_margin = 0.0;

    auto emit = [&](std::size_t trial, bool pass, const Json& detail) {
        Json l;
        l["trial"] = trial;
        l["pass"] = pass;
        if (!detail.is_null()) l["detail"] = detail;
        lines << l.dump() << "\n";
        if (!pass) ++out.failures;
    };

    if (suite == "axioms") {
        const std::size_t trials = suite_default(200);
        for (std::size_t t = 0; t < trials; ++t) {
            TrialRng rng(cfg.seed, t);
            AlgebraPtr A;
            std::string which;
            switch (rng.next_int(0, 5)) {
                case 0:
                    which = "exterior";
                    A = build_exterior_algebra(static_cast<int>(rng.next_int(1, 3)));
                    break;
                case 1:
                    which = "two_point";
                    A = build_two_point_space(static_cast<int>(rng.next_int(2, 4)));
                    break;
                case 2:
                    which = "identified_points";
                    A = build_identified_points(static_cast<int>(rng.next_int(2, 4)));
                    break;
                case 3: {
                    which = "torus";
                    TorusPresentation T;
                    T.n = 2;
                    long q = rng.next_int(1, 6);
                    long p = rng.next_int(-q, q);
                    T.theta = {{ThetaEntry{Rational(0), {}}, ThetaEntry{Rational(p, q), {}}},
                               {ThetaEntry{Rational(-p, q), {}}, ThetaEntry{Rational(0), {}}}};
                    T.radius = 2;
                    A = torus_forms(T, 2, ScalarMode::numeric);
                    break;
                }
                case 4:
                    which = "exterior(x)exterior";
                    A = tensor_dga(build_exterior_algebra(static_cast<int>(rng.next_int(1, 2))),
                                   build_exterior_algebra(static_cast<int>(rng.next_int(1, 2))));
                    break;
                default:
                    which = "two_point(x)exterior";
                    A = tensor_dga(build_two_point_space(static_cast<int>(rng.next_int(1, 2))),
                                   build_exterior_algebra(1));
                    break;
            }
            CheckReport rep = check_dga_axioms(A);
            emit(t, rep.all_pass(), Json{{"algebra", which}, {"basis", A->size()}});
        }
        out.report.checks.push_back(
            {"dga_axioms_hold", out.failures == 0, Json{{"trials", trials}}});
    } else if (suite == "curvature-laws") {
        const std::size_t trials = suite_default(500);
        const double tol = cfg.tolerance > 0 ? cfg.tolerance : 1e-10;
        for (std::size_t t = 0; t < trials; ++t) {
            TrialRng rng(cfg.seed, t);
            AlgebraPtr A = build_exterior_algebra(static_cast<int>(rng.next_int(1, 3)),
                                                  ScalarMode::numeric);
            FgpConnection c1 = fuzz_detail::random_lambda_connection(rng, A, 3);
            FgpConnection c2 = fuzz_detail::random_lambda_connection(rng, A, 3);

            double tensor_res = 0.0, dual_res = 0.0, dd_res = 0.0, closed_res = 0.0;
            bool morphism_ok = true;
            if (A->max_degree() >= 2) {
                FgpConnection tc = tensor_connection(c1, c2);
                CurvatureForm rg = curvature(tc);
                CurvatureForm r1 = curvature(c1);
                CurvatureForm r2 = curvature(c2);
                ElementMatrix law = kron(r1.entries, c2.module.projection) +
                                    kron(c1.module.projection, r2.entries);
                tensor_res = matrix_residual(rg.entries - law);
                dual_res = fuzz_detail::pairing_antisymmetry_residual(c1);
                closed_res = matrix_residual(curvature(c1).entries - curvature_closed_form(c1));
            }
            FgpConnection dd = dual_connection(dual_connection(c1));
            ElementMatrix dd_law =
                c1.module.projection * c1.kappa * c1.module.projection - dd.kappa;
            dd_res = matrix_residual(dd_law);
            morphism_ok = check_morphism(identity_matrix(A, c1.module.ambient_rank) *
                                             AlgebraElement::unit(A),
                                         c1, c1)
                              .all_pass();
            // identity morphism needs phi = p phi p; compress it
            if (!morphism_ok) {
                ElementMatrix id_c = c1.module.projection;
                morphism_ok = check_morphism(id_c, c1, c1).all_pass();
            }
            double worst = std::max({tensor_res, dual_res, dd_res, closed_res});
            worst_margin = std::max(worst_margin, worst);
            bool pass = worst <= tol && morphism_ok;
            emit(t, pass,
                 Json{{"tensor", tensor_res},
                      {"dual_pairing", dual_res},
                      {"double_dual", dd_res},
                      {"closed_form", closed_res}});
        }
        out.report.checks.push_back({"curvature_laws_hold", out.failures == 0,
                                     Json{{"trials", trials}, {"worst_residual", worst_margin}}});
    } else if (suite == "pseudoinverse") {
        const std::size_t trials = suite_default(1000);
        for (std::size_t t = 0; t < trials; ++t) {
            TrialRng rng(cfg.seed, t);
            std::size_t n = static_cast<std::size_t>(
                rng.next_int(static_cast<long>(cfg.n_min), static_cast<long>(std::min<std::size_t>(cfg.n_max, 6))));
            CMatrix phi;
            double shape = rng.next_unit();
            if (shape < 0.55) {
                phi = rng.next_cmatrix(n, n);
            } else if (shape < 0.9) {
                std::size_t r = static_cast<std::size_t>(rng.next_int(1, static_cast<long>(n)));
                phi = rng.next_cmatrix(n, r) * rng.next_cmatrix(r, n);
            } else {
                std::size_t rows = static_cast<std::size_t>(rng.next_int(2, 6));
                phi = rng.next_cmatrix(rows, n);
            }
            SplitData<Scalar> sd = pseudoinverse(fuzz_detail::to_scalar_matrix(phi));
            double phin = frobenius_norm(phi);
            bool pass = sd.residual_phi <= 1e-8 * std::max(1.0, phin) &&
                        sd.residual_plus <= 1e-8 * std::max(1.0, entry_norm(sd.phi_plus));
            // characteristic-coefficient route vs singular-value route
            auto cc = char_coefficients(fuzz_detail::to_scalar_matrix(
                adjoint(phi) * phi));
            Matrix<Scalar> ch = cayley_hamilton_residual(
                fuzz_detail::to_scalar_matrix(adjoint(phi) * phi), cc);
            double ch_res = entry_norm(ch);
            double scale = std::pow(std::max(1.0, phin), 2.0 * static_cast<double>(n));
            pass = pass && ch_res <= 1e-9 * std::max(1.0, scale);
            double svd_diff = -1.0;
            bool well_margined =
                (sd.accepted_margin < 0 || sd.accepted_margin >= 1e3) &&
                sd.rejected_margin <= 1e-3;
            if (well_margined) {
                std::size_t orank = svd_rank(phi);
                if (orank == sd.rank) {
                    CMatrix oracle = svd_pseudoinverse(phi);
                    svd_diff = 0.0;
                    CMatrix mine = fuzz_detail::to_cmatrix(sd.phi_plus);
                    svd_diff = frobenius_norm(mine - oracle);
                    pass = pass && svd_diff <= 1e-6 * std::max(1.0, frobenius_norm(oracle));
                } else {
                    pass = false;
                }
            }
            worst_margin = std::max(worst_margin, sd.residual_phi);
            emit(t, pass,
                 Json{{"n", n},
                      {"rank", sd.rank},
                      {"residual", sd.residual_phi},
                      {"cayley_hamilton", ch_res},
                      {"svd_diff", svd_diff}});
        }
        out.report.checks.push_back({"pseudoinverse_postconditions", out.failures == 0,
                                     Json{{"trials", trials}, {"worst_residual", worst_margin}}});
    } else if (suite == "dm-inequality") {
        const std::size_t trials = suite_default(1000);
        for (std::size_t t = 0; t < trials; ++t) {
            TrialRng rng(cfg.seed, t);
            std::size_t n = static_cast<std::size_t>(rng.next_int(
                std::max<long>(2, static_cast<long>(cfg.n_min)),
                std::min<long>(5, static_cast<long>(cfg.n_max))));
            CMatrix M = rng.next_cmatrix(n, n);
            CMatrix K = rng.next_cmatrix(n, n);
            bool pass = true;
            double worst_ratio = 0.0;
            for (std::size_t m = 1; m <= n; ++m) {
                DmCheckResult r = dm_derivative_check(M, K, m);
                pass = pass && r.pass;
                if (r.rhs > 0) worst_ratio = std::max(worst_ratio, r.lhs / r.rhs);
                double dm = principal_minor_sum(adjoint(M) * M, m);
                pass = pass && dm >= -1e-9 * std::max(1.0, std::abs(dm));
            }
            worst_margin = std::max(worst_margin, worst_ratio);
            emit(t, pass, Json{{"n", n}, {"worst_ratio", worst_ratio}});
        }
        out.report.checks.push_back({"dm_inequality_holds", out.failures == 0,
                                     Json{{"trials", trials}, {"worst_ratio", worst_margin}}});
    } else if (suite == "torus-phases") {
        const std::size_t trials = suite_default(500);
        for (std::size_t t = 0; t < trials; ++t) {
            TrialRng rng(cfg.seed, t);
            std::size_t n = static_cast<std::size_t>(rng.next_int(2, 3));
            bool with_irrational = rng.next_unit() < 0.5;
            TorusPresentation T;
            T.n = n;
            if (with_irrational) T.generator_names = {"theta1"};
            T.radius = 3;
            T.theta.assign(n, std::vector<ThetaEntry>(n));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    T.theta[i][j].irr.assign(T.generators(), Rational(0));
                }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    Rational v(rng.next_int(-3, 3), rng.next_int(1, 4));
                    T.theta[i][j].rational = v;
                    T.theta[j][i].rational = -v;
                    if (with_irrational) {
                        Rational w(rng.next_int(-2, 2), rng.next_int(1, 3));
                        T.theta[i][j].irr[0] = w;
                        T.theta[j][i].irr[0] = -w;
                    }
                }
            T.validate();

            auto rand_exp = [&] {
                std::vector<long> r(n);
                for (auto& x : r) x = rng.next_int(-1, 1);
                return r;
            };
            WeylElement a{rand_exp(), Scalar::exact_int(1), PhaseExponent(T.generators())};
            WeylElement b{rand_exp(), Scalar::exact_int(1), PhaseExponent(T.generators())};
            WeylElement c{rand_exp(), Scalar::exact_int(1), PhaseExponent(T.generators())};

            bool pass = true;
            // cocycle identity tau(r,s)+tau(r+s,t) == tau(s,t)+tau(r,s+t)
            std::vector<long> rs(n), st(n);
            for (std::size_t i = 0; i < n; ++i) {
                rs[i] = a.exponent[i] + b.exponent[i];
                st[i] = b.exponent[i] + c.exponent[i];
            }
            pass = pass && (T.cocycle(a.exponent, b.exponent) + T.cocycle(rs, c.exponent) ==
                            T.cocycle(b.exponent, c.exponent) + T.cocycle(a.exponent, st));
            // associativity of the product itself
            pass = pass && (weyl_mul(weyl_mul(a, b, T), c, T) ==
                            weyl_mul(a, weyl_mul(b, c, T), T));
            // group commutator phase: u^r u^s u^-r u^-s = e^{2 pi i r.Theta.s}
            WeylElement am{a.exponent, Scalar::exact_int(1), PhaseExponent(T.generators())};
            WeylElement bm{b.exponent, Scalar::exact_int(1), PhaseExponent(T.generators())};
            for (auto& x : am.exponent) x = -x;
            for (auto& x : bm.exponent) x = -x;
            WeylElement gc = weyl_mul(weyl_mul(weyl_mul(a, b, T), am, T), bm, T);
            PhaseExponent expected = T.cocycle(a.exponent, b.exponent) +
                                     T.cocycle(a.exponent, b.exponent);
            pass = pass && gc.exponent == std::vector<long>(n, 0) && gc.phase == expected;
            // u^r u^-r is the unit: the normalization phase cancels by
            // skew-symmetry
            WeylElement inv = weyl_mul(a, am, T);
            pass = pass && inv.phase.is_zero() && inv.exponent == std::vector<long>(n, 0);
            emit(t, pass, Json{{"n", n}, {"irrational", with_irrational}});
        }
        out.report.checks.push_back(
            {"weyl_phase_identities", out.failures == 0, Json{{"trials", trials}}});
    } else {
        throw InvalidInput("unknown fuzz suite: " + suite);
    }

    out.jsonl = lines.str();
    out.report.payload["failures"] = out.failures;
    return out;
}

} // namespace ncg
