#pragma once

#include <cmath>
#include <complex>

#include "ncgpi1/char_poly.hpp"
#include "ncgpi1/matrix.hpp"

namespace ncg {

/// Sum of the m x m principal minors, read off the characteristic
/// coefficients (D_m = a_{n-m}); real up to roundoff for self-adjoint input.
inline double principal_minor_sum(const CMatrix& A, std::size_t m) {
    CharCoefficients<std::complex<double>> cc = char_coefficients(A);
    return cc.principal_minor_sum(m).real();
}

struct DmCheckResult {
    double lhs = 0.0;     // |central finite difference|
    double rhs = 0.0;     // 4 n ||K||_HS D_m(M*M)
    double slack = 0.0;   // allowance added to rhs
    double h = 0.0;
    bool pass = false;
};

/// Finite-difference check of the derivative bound
///   |d/dt D_m(M*M + t 2Re(M*[M,K]))| <= 4 n ||K||_HS D_m(M*M).
/// h <= 0 picks the default 1e-6 (1 + ||M||^2); rel_slack covers the
/// quadrature error of the central difference.
inline DmCheckResult dm_derivative_check(const CMatrix& M, const CMatrix& K, std::size_t m,
                                         double h = 0.0, double rel_slack = 1e-4) {
    const std::size_t n = M.rows();
    if (n != M.cols() || n != K.rows() || n != K.cols())
        throw ShapeMismatch("dm_derivative_check needs square matrices of equal size");
    if (m > n) throw InvalidInput("minor size exceeds dimension");

    CMatrix Mstar = adjoint(M);
    CMatrix A = Mstar * M;
    CMatrix C = Mstar * commutator(M, K);
    CMatrix B = C + adjoint(C); // 2 Re(M*[M,K])

    DmCheckResult r;
    r.h = h > 0 ? h : 1e-6 * (1.0 + frobenius_norm(M) * frobenius_norm(M));
    double up = principal_minor_sum(A + B * std::complex<double>(r.h, 0.0), m);
    double down = principal_minor_sum(A - B * std::complex<double>(r.h, 0.0), m);
    r.lhs = std::abs((up - down) / (2.0 * r.h));
    r.rhs = 4.0 * static_cast<double>(n) * frobenius_norm(K) * principal_minor_sum(A, m);
    // absolute allowance against finite-difference roundoff at the natural
    // coefficient scale C(n,m) (1+||A||)^m (1+||B||)
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i)
        scale = scale * static_cast<double>(n - i) / static_cast<double>(i + 1);
    scale *= std::pow(1.0 + frobenius_norm(A), static_cast<double>(m)) *
             (1.0 + frobenius_norm(B));
    r.slack = rel_slack * r.rhs + 1e-8 * scale;
    r.pass = r.lhs <= r.rhs + r.slack;
    return r;
}

} // namespace ncg
