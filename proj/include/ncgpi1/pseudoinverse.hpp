#pragma once

#include <cstddef>
#include <vector>

#include "ncgpi1/char_poly.hpp"
#include "ncgpi1/connection.hpp"
#include "ncgpi1/matrix.hpp"

namespace ncg {

template <typename R>
Matrix<R> conj_transpose(const Matrix<R>& m) {
    using T = RingTraits<R>;
    Matrix<R> r(m.cols(), m.rows(), m.rows() && m.cols() ? T::zero_like(m(0, 0)) : R());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = T::conj(m(i, j));
    return r;
}

template <typename R>
double entry_norm(const Matrix<R>& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            worst = std::max(worst, RingTraits<R>::abs(m(i, j)));
    return worst;
}

/// The pseudoinverse and the idempotent splitting data it induces.
template <typename R>
struct SplitData {
    Matrix<R> phi_plus;
    Matrix<R> e_ker;   // 1 - phi+ phi on the source
    Matrix<R> e_im;    // phi phi+ on the target
    Matrix<R> e_coker; // 1 - phi phi+ on the target
    std::size_t m = 0; // smallest index with a_m != 0 in chi_{phi* phi}
    std::size_t rank = 0;
    double residual_phi = 0.0;  // max-entry norm of phi phi+ phi - phi
    double residual_plus = 0.0; // max-entry norm of phi+ phi phi+ - phi+
    double accepted_margin = 0.0; // |a_m| / threshold at the accepted index
    double rejected_margin = 0.0; // largest |a_k| / threshold among rejected k < m
};

namespace detail {

/// Largest eigenvalue estimate of the PSD matrix X by deterministic power
/// iteration; used only to scale the numeric rank thresholds.
inline double top_eigenvalue_estimate(const CMatrix& X) {
    const std::size_t n = X.rows();
    std::vector<std::complex<double>> v(n, {1.0, 0.0});
    double lambda = 0.0;
    for (int it = 0; it < 40; ++it) {
        std::vector<std::complex<double>> w(n, {0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w[i] += X(i, j) * v[j];
        double norm = 0.0;
        for (const auto& x : w) norm += std::norm(x);
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        lambda = norm;
        for (auto& x : w) x /= norm;
        v = std::move(w);
    }
    return lambda;
}

inline double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 0; i < k; ++i)
        r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return r;
}

template <typename R>
CMatrix to_cmatrix(const Matrix<R>& m);

template <>
inline CMatrix to_cmatrix<Scalar>(const Matrix<Scalar>& m) {
    CMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).to_complex();
    return r;
}

} // namespace detail

/// phi+ = q(phi* phi) phi* with q built from the characteristic coefficients
/// of phi* phi: the smallest m with a_m != 0 fixes p(x) = x^{-m} chi(x) and
/// q(x) = (1 + (-1)^{n-m-1} a_m^{-1} p(x)) / x, whose constant terms cancel.
/// Numeric rank decisions use |a_m| <= eps_rank * C(n, n-m) * sigma^{2(n-m)}.
template <typename R>
SplitData<R> pseudoinverse(const Matrix<R>& phi, double eps_rank = 1e-10) {
    using T = RingTraits<R>;
    if (phi.rows() == 0 || phi.cols() == 0) throw ShapeMismatch("empty matrix");
    const R zero = T::zero_like(phi(0, 0));
    const R one = T::one_like(phi(0, 0));
    const std::size_t n = phi.cols();

    Matrix<R> phi_star = conj_transpose(phi);
    Matrix<R> X = phi_star * phi; // n x n
    CharCoefficients<R> cc = char_coefficients(X);

    // rank decision: smallest m with a_m significantly nonzero
    bool numeric_thresholds = false;
    double sigma2 = 0.0;
    if constexpr (std::is_same_v<R, Scalar>) {
        numeric_thresholds = !phi(0, 0).is_exact();
    } else if constexpr (std::is_same_v<R, std::complex<double>>) {
        numeric_thresholds = true;
    }
    if (numeric_thresholds) sigma2 = detail::top_eigenvalue_estimate(detail::to_cmatrix(X));

    SplitData<R> out{Matrix<R>(n, phi.rows(), zero),
                     Matrix<R>(n, n, zero),
                     Matrix<R>(phi.rows(), phi.rows(), zero),
                     Matrix<R>(phi.rows(), phi.rows(), zero)};
    std::size_t m = n;
    for (std::size_t k = 0; k <= n; ++k) {
        double mag = T::abs(cc.a[k]);
        double threshold = 0.0;
        if (numeric_thresholds && k < n) {
            threshold = eps_rank * detail::binomial(n, n - k);
            for (std::size_t e = 0; e < n - k; ++e) threshold *= std::max(sigma2, 1e-300);
        }
        if (mag > threshold) {
            m = k;
            out.accepted_margin = threshold > 0 ? mag / threshold : -1.0;
            break;
        }
        if (k < n && threshold > 0)
            out.rejected_margin = std::max(out.rejected_margin, mag / threshold);
    }
    out.m = m;
    out.rank = n - m;

    if (m == n) {
        // phi+ = 0; flag the decision when phi itself is visibly nonzero
        double phinorm = entry_norm(phi);
        if (numeric_thresholds && phinorm > 1e3 * eps_rank)
            throw ZeroMatrix("rank decision collapsed to zero while ||phi|| = " +
                             std::to_string(phinorm));
    } else {
        // q(x)*x = 1 + s*a_m^{-1}*p(x) with s = (-1)^{n-m-1};
        // p(x) = x^{-m} chi(x) has coefficient (-1)^{n-k} a_k at x^{k-m}.
        R am_inv = T::invert(cc.a[m]);
        const bool s_neg = (n - m - 1) % 2 != 0;
        std::vector<R> q(n - m, zero); // q has degree n-m-1
        for (std::size_t k = m + 1; k <= n; ++k) {
            // coefficient of x^{k-m} in 1 + s a_m^{-1} p(x), shifted down by 1
            R coeff = cc.a[k] * am_inv;
            if (((n - k) % 2 != 0) != s_neg) coeff = -coeff; // sign (-1)^{n-k} * s
            q[k - m - 1] = coeff;
        }
        // Horner: q(X) phi*
        Matrix<R> acc(n, n, zero);
        Matrix<R> I = Matrix<R>::identity(n, one, zero);
        for (std::size_t idx = q.size(); idx-- > 0;) acc = acc * X + I * q[idx];
        out.phi_plus = acc * phi_star;
    }

    Matrix<R> plus_phi = out.phi_plus * phi;
    Matrix<R> phi_plus_phi = phi * out.phi_plus;
    out.e_ker = Matrix<R>::identity(n, one, zero) - plus_phi;
    out.e_im = phi_plus_phi;
    out.e_coker = Matrix<R>::identity(phi.rows(), one, zero) - phi_plus_phi;
    out.residual_phi = entry_norm(phi * plus_phi - phi);
    out.residual_plus = entry_norm(out.phi_plus * phi_plus_phi - out.phi_plus);
    return out;
}

/// Kernel/image/cokernel splitting of a connection morphism, with the
/// compressed connections on each summand. The coimage-to-image comparison
/// is phi itself between the induced connections.
struct ConnectionSplit {
    SplitData<AlgebraElement> data;
    FgpConnection ker;
    FgpConnection im;
    FgpConnection coker;
    FgpConnection coim;
};

inline ConnectionSplit split_with_connections(const ElementMatrix& phi,
                                              const FgpConnection& c1,
                                              const FgpConnection& c2) {
    CheckReport morph = check_morphism(phi, c1, c2);
    if (!morph.all_pass())
        throw NotAMorphism("phi does not intertwine the connections: " + morph.to_text());

    SplitData<AlgebraElement> sd = pseudoinverse(phi);
    const AlgebraPtr& A = c1.owner();

    auto compress = [&](ElementMatrix idem, const FgpConnection& base) {
        FgpModule m{A, idem.rows(), std::move(idem)};
        ElementMatrix kappa = m.projection * base.kappa * m.projection;
        return FgpConnection{std::move(m), std::move(kappa)};
    };

    // inside End(E1) the unit is p1, so the kernel idempotent is p1 - phi+ phi
    ElementMatrix coim_idem = sd.phi_plus * phi;
    ElementMatrix ker_idem = c1.module.projection - coim_idem;
    ElementMatrix im_idem = sd.e_im;
    ElementMatrix coker_idem = c2.module.projection - im_idem;

    ConnectionSplit out{std::move(sd), compress(std::move(ker_idem), c1),
                        compress(std::move(im_idem), c2),
                        compress(std::move(coker_idem), c2),
                        compress(std::move(coim_idem), c1)};
    return out;
}

} // namespace ncg
