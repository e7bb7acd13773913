#pragma once

#include <complex>
#include <vector>

#include "ncgpi1/algebra.hpp"
#include "ncgpi1/axioms.hpp"
#include "ncgpi1/linsolve.hpp"
#include "ncgpi1/matrix.hpp"

namespace ncg {

/// Entry-type hooks for the division-free characteristic-coefficient
/// recurrence and the pseudoinverse construction.
template <typename R>
struct RingTraits;

template <>
struct RingTraits<Scalar> {
    static Scalar zero_like(const Scalar& p) { return Scalar::zero(p.mode()); }
    static Scalar one_like(const Scalar& p) { return Scalar::one(p.mode()); }
    static Scalar conj(const Scalar& x) { return x.conj(); }
    static Scalar invert(const Scalar& x) { return x.inverse(); }
    static Scalar divide_int(const Scalar& x, long k) {
        if (x.is_exact()) return x * Scalar::exact(Rational(1, k));
        return x * Scalar::numeric(1.0 / static_cast<double>(k));
    }
    static bool is_zero(const Scalar& x, double tol) { return x.is_zero(tol); }
    static double abs(const Scalar& x) { return x.abs(); }
    static bool entries_commute(const Matrix<Scalar>&) { return true; }
};

template <>
struct RingTraits<std::complex<double>> {
    using C = std::complex<double>;
    static C zero_like(const C&) { return {0.0, 0.0}; }
    static C one_like(const C&) { return {1.0, 0.0}; }
    static C conj(const C& x) { return std::conj(x); }
    static C invert(const C& x) { return C(1.0, 0.0) / x; }
    static C divide_int(const C& x, long k) { return x / static_cast<double>(k); }
    static bool is_zero(const C& x, double tol) { return std::abs(x) <= tol; }
    static double abs(const C& x) { return std::abs(x); }
    static bool entries_commute(const Matrix<C>&) { return true; }
};

template <>
struct RingTraits<AlgebraElement> {
    static AlgebraElement zero_like(const AlgebraElement& p) {
        return AlgebraElement::zero(p.owner());
    }
    static AlgebraElement one_like(const AlgebraElement& p) {
        return AlgebraElement::unit(p.owner());
    }
    static AlgebraElement conj(const AlgebraElement& x) { return star(x); }

    /// Inverse of a degree-0 element via the linear system x*y = 1.
    static AlgebraElement invert(const AlgebraElement& x) {
        const AlgebraPtr& A = x.owner();
        const double tol = A->mode() == ScalarMode::numeric ? A->tolerance() : 0.0;
        const auto& deg0 = A->basis_of_degree(0);
        std::vector<AlgebraElement> images;
        for (int b : deg0) images.push_back(mul(x, AlgebraElement::basis(A, b)));
        Matrix<Scalar> M(deg0.size(), deg0.size(), Scalar::zero(A->mode()));
        std::map<int, std::size_t> row_of;
        for (std::size_t r = 0; r < deg0.size(); ++r) row_of[deg0[r]] = r;
        for (std::size_t j = 0; j < images.size(); ++j)
            for (const auto& [idx, c] : images[j].coords()) M(row_of.at(idx), j) = c;
        std::vector<Scalar> rhs(deg0.size(), Scalar::zero(A->mode()));
        for (const auto& [idx, c] : A->unit_coords()) rhs[row_of.at(idx)] = c;
        auto sol = linalg::solve(M, rhs, tol);
        if (!sol) throw Error("element is not invertible: " + x.to_string());
        SparseVec coords;
        for (std::size_t j = 0; j < sol->size(); ++j)
            if (!(*sol)[j].is_zero(0.0)) coords[deg0[j]] = (*sol)[j];
        return AlgebraElement(A, std::move(coords));
    }

    static AlgebraElement divide_int(const AlgebraElement& x, long k) {
        if (x.owner()->mode() == ScalarMode::exact)
            return x * Scalar::exact(Rational(1, k));
        return x * Scalar::numeric(1.0 / static_cast<double>(k));
    }
    static bool is_zero(const AlgebraElement& x, double tol) { return x.is_zero(tol); }
    static double abs(const AlgebraElement& x) {
        double worst = 0.0;
        for (const auto& [k, c] : x.coords()) worst = std::max(worst, c.abs());
        return worst;
    }
    static bool entries_commute(const Matrix<AlgebraElement>& m) {
        const double tol =
            m(0, 0).owner()->mode() == ScalarMode::numeric ? m(0, 0).owner()->tolerance() : 0.0;
        for (std::size_t a = 0; a < m.rows() * m.cols(); ++a)
            for (std::size_t b = a + 1; b < m.rows() * m.cols(); ++b) {
                const AlgebraElement& x = m(a / m.cols(), a % m.cols());
                const AlgebraElement& y = m(b / m.cols(), b % m.cols());
                if (!(mul(x, y) - mul(y, x)).is_zero(tol)) return false;
            }
        return true;
    }
};

/// Coefficients a_0..a_n of the characteristic polynomial in the display
/// convention chi(x) = sum_m (-1)^{n-m} a_m x^m, so a_n = 1,
/// a_{n-1} = trace and a_0 = det.
template <typename R>
struct CharCoefficients {
    std::size_t n = 0;
    std::vector<R> a;

    /// Principal-minor-sum indexing (size-m minors): D_m = a_{n-m}.
    const R& principal_minor_sum(std::size_t m) const { return a[n - m]; }
};

/// Division-free Faddeev-LeVerrier recurrence (only integer divisions, valid
/// over any commutative C-algebra). Entries must commute.
template <typename R>
CharCoefficients<R> char_coefficients(const Matrix<R>& M) {
    using T = RingTraits<R>;
    const std::size_t n = M.rows();
    if (n == 0 || M.cols() != n) throw ShapeMismatch("char_coefficients needs a square matrix");
    if (!T::entries_commute(M))
        throw NonCommutativeEntries("characteristic coefficients need commuting entries");

    const R zero = T::zero_like(M(0, 0));
    const R one = T::one_like(M(0, 0));
    Matrix<R> I = Matrix<R>::identity(n, one, zero);
    Matrix<R> B = I;
    std::vector<R> c(n + 1, zero);
    c[n] = one;
    for (std::size_t k = 1; k <= n; ++k) {
        Matrix<R> Ak = M * B;
        R tr = Ak(0, 0);
        for (std::size_t i = 1; i < n; ++i) tr = tr + Ak(i, i);
        c[n - k] = -T::divide_int(tr, static_cast<long>(k));
        B = Ak + I * c[n - k];
    }
    CharCoefficients<R> out;
    out.n = n;
    out.a.resize(n + 1, zero);
    for (std::size_t m = 0; m <= n; ++m) {
        // a_m = (-1)^{n-m} * coefficient of x^m
        out.a[m] = ((n - m) % 2 != 0) ? -c[m] : c[m];
    }
    return out;
}

/// Cayley-Hamilton residual sum_m (-1)^{n-m} a_m M^m, which must vanish.
template <typename R>
Matrix<R> cayley_hamilton_residual(const Matrix<R>& M, const CharCoefficients<R>& cc) {
    using T = RingTraits<R>;
    const std::size_t n = M.rows();
    const R zero = T::zero_like(M(0, 0));
    const R one = T::one_like(M(0, 0));
    Matrix<R> acc(n, n, zero);
    Matrix<R> power = Matrix<R>::identity(n, one, zero);
    for (std::size_t m = 0; m <= n; ++m) {
        R coeff = ((n - m) % 2 != 0) ? -cc.a[m] : cc.a[m];
        acc = acc + power * coeff;
        if (m < n) power = power * M;
    }
    return acc;
}

} // namespace ncg
