#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "ncgpi1/errors.hpp"
#include "ncgpi1/matrix.hpp"

namespace ncg {

/// exp(A) by scaling-and-squaring with a Taylor tail below 1e-20.
inline CMatrix matrix_exp(const CMatrix& A) {
    const std::size_t n = A.rows();
    double norm = frobenius_norm(A);
    int s = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++s;
    }
    CMatrix X = A * std::complex<double>(std::ldexp(1.0, -s), 0.0);
    CMatrix term = cidentity(n);
    CMatrix sum = term;
    for (int k = 1; k < 64; ++k) {
        term = term * X * std::complex<double>(1.0 / k, 0.0);
        sum = sum + term;
        if (frobenius_norm(term) < 1e-20) break;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

/// log(I + X) by the plain power series; requires ||X|| < 1 and errors
/// outside that radius rather than falling back to a broader algorithm.
inline CMatrix matrix_log_series(const CMatrix& sample) {
    const std::size_t n = sample.rows();
    CMatrix X = sample - cidentity(n);
    double r = frobenius_norm(X);
    if (!(r < 1.0))
        throw OutsideConvergenceRadius("||sample - I|| = " + std::to_string(r) +
                                       " is outside the series radius 1");
    CMatrix power = X;
    CMatrix sum(n, n);
    for (int k = 1; k < 4096; ++k) {
        double sign = (k % 2 != 0) ? 1.0 : -1.0;
        sum = sum + power * std::complex<double>(sign / k, 0.0);
        power = power * X;
        if (frobenius_norm(power) / k < 1e-18) break;
    }
    return sum;
}

/// One-parameter generator recovery: alpha with sample = exp(t0 alpha),
/// by the log series.
inline CMatrix log_representation(const CMatrix& sample, double t0) {
    if (t0 <= 0) throw InvalidInput("t0 must be positive");
    return matrix_log_series(sample) * std::complex<double>(1.0 / t0, 0.0);
}

enum class PathKind { constant, polynomial, grid };

/// A matrix-valued coefficient path on [0,1]: closed form (constant or
/// polynomial in t) or a sampled grid with linear interpolation.
struct MatrixPath {
    PathKind kind = PathKind::constant;
    std::size_t dim = 0;
    std::vector<CMatrix> coeffs;  // constant: [A]; polynomial: A0 + A1 t + ...
    std::vector<double> knots;    // grid mode
    std::vector<CMatrix> values;  // grid mode

    static MatrixPath constant(CMatrix A) {
        MatrixPath p;
        p.kind = PathKind::constant;
        p.dim = A.rows();
        p.coeffs = {std::move(A)};
        return p;
    }
    static MatrixPath polynomial(std::vector<CMatrix> cs) {
        if (cs.empty()) throw InvalidInput("polynomial path needs coefficients");
        MatrixPath p;
        p.kind = PathKind::polynomial;
        p.dim = cs[0].rows();
        p.coeffs = std::move(cs);
        return p;
    }
    static MatrixPath grid(std::vector<double> ts, std::vector<CMatrix> vs) {
        if (ts.size() != vs.size() || ts.size() < 2)
            throw InvalidInput("grid path needs matching knots and values");
        if (ts.front() > 0.0 || ts.back() < 1.0)
            throw InvalidInput("grid knots must cover [0,1]");
        for (std::size_t i = 1; i < ts.size(); ++i)
            if (!(ts[i] > ts[i - 1])) throw InvalidInput("grid knots must increase");
        MatrixPath p;
        p.kind = PathKind::grid;
        p.dim = vs[0].rows();
        p.knots = std::move(ts);
        p.values = std::move(vs);
        return p;
    }

    CMatrix eval(double t) const {
        switch (kind) {
            case PathKind::constant:
                return coeffs[0];
            case PathKind::polynomial: {
                CMatrix acc = coeffs.back();
                for (std::size_t i = coeffs.size() - 1; i-- > 0;)
                    acc = acc * std::complex<double>(t, 0.0) + coeffs[i];
                return acc;
            }
            case PathKind::grid: {
                if (t <= knots.front()) return values.front();
                if (t >= knots.back()) return values.back();
                std::size_t hi = 1;
                while (knots[hi] < t) ++hi;
                double w = (t - knots[hi - 1]) / (knots[hi] - knots[hi - 1]);
                return values[hi - 1] * std::complex<double>(1.0 - w, 0.0) +
                       values[hi] * std::complex<double>(w, 0.0);
            }
        }
        throw Error("unreachable");
    }

    double sup_norm(std::size_t samples = 512) const {
        double m = 0.0;
        for (std::size_t i = 0; i <= samples; ++i)
            m = std::max(m, frobenius_norm(eval(static_cast<double>(i) / samples)));
        return m;
    }
};

enum class TransportMethod { picard, rk4, both };

struct TransportOptions {
    TransportMethod method = TransportMethod::picard;
    std::size_t steps = 1024;
    std::size_t max_terms = 96;
    double term_tail = 1e-16;        // stop when term norm < tail * sum norm
    double bound_slack = 0.05;       // allowed quadrature excess on the factorial bound
    double residual_threshold = -1;  // <0: adaptive from step size
};

struct TransportResult {
    std::vector<double> grid;
    std::vector<CMatrix> alpha;
    CMatrix alpha_at_1;
    double residual = 0.0;          // max ||alpha' - alpha w|| (central differences)
    double term_bound_ratio = 0.0;  // max ||alpha_n(t)|| / (t^n W^n / n!), picard only
    std::size_t terms_used = 0;
    double min_abs_det = 0.0;
    double max_condition = 0.0;     // coarse-sampled ||a|| ||a^-1||
    double agreement = -1.0;        // picard vs rk4, when both ran

    const CMatrix& at(std::size_t i) const { return alpha[i]; }
};

namespace detail {

/// Residual of the transport equation sign convention: left multiplication
/// flag distinguishes d a = a w from d a' = -w a'.
inline double transport_residual(const std::vector<double>& grid,
                                 const std::vector<CMatrix>& a, const MatrixPath& w,
                                 bool inverse_equation) {
    double worst = 0.0;
    const double h = grid[1] - grid[0];
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        CMatrix deriv = (a[i + 1] - a[i - 1]) * std::complex<double>(1.0 / (2.0 * h), 0.0);
        CMatrix rhs = inverse_equation ? -(w.eval(grid[i]) * a[i]) : a[i] * w.eval(grid[i]);
        worst = std::max(worst, frobenius_norm(deriv - rhs));
    }
    return worst;
}

inline void finish_diagnostics(TransportResult& r, const MatrixPath& w,
                               const TransportOptions& opt, bool inverse_equation) {
    r.alpha_at_1 = r.alpha.back();
    r.residual = transport_residual(r.grid, r.alpha, w, inverse_equation);
    r.min_abs_det = std::abs(determinant(r.alpha[0]));
    for (const auto& a : r.alpha) r.min_abs_det = std::min(r.min_abs_det, std::abs(determinant(a)));
    const std::size_t stride = std::max<std::size_t>(1, r.alpha.size() / 64);
    for (std::size_t i = 0; i < r.alpha.size(); i += stride) {
        try {
            r.max_condition = std::max(
                r.max_condition, frobenius_norm(r.alpha[i]) * frobenius_norm(inverse(r.alpha[i])));
        } catch (const Error&) {
            r.max_condition = std::numeric_limits<double>::infinity();
        }
    }
    double h = r.grid[1] - r.grid[0];
    double W = w.sup_norm();
    double thresh = opt.residual_threshold >= 0
                        ? opt.residual_threshold
                        : std::max(1e-8, 20.0 * h * h * std::pow(1.0 + W, 3.0));
    if (r.residual > thresh)
        throw DivergenceDetected("transport residual " + std::to_string(r.residual) +
                                 " exceeds threshold " + std::to_string(thresh));
    if (r.min_abs_det <= 0.0)
        throw DivergenceDetected("transport lost invertibility: min |det| = " +
                                 std::to_string(r.min_abs_det));
}

inline std::vector<CMatrix> picard_series(const std::vector<double>& grid, const MatrixPath& w,
                                          const TransportOptions& opt, bool inverse_equation,
                                          double& bound_ratio, std::size_t& terms_used) {
    const std::size_t n = w.dim;
    const std::size_t pts = grid.size();
    const double h = grid[1] - grid[0];
    const double W = w.sup_norm();

    std::vector<CMatrix> ws(pts);
    double W_grid = 0.0;
    for (std::size_t i = 0; i < pts; ++i) {
        ws[i] = w.eval(grid[i]);
        W_grid = std::max(W_grid, frobenius_norm(ws[i]));
    }
    (void)W;

    std::vector<CMatrix> term(pts, cidentity(n));
    std::vector<CMatrix> sum = term;
    bound_ratio = 0.0;
    double log_fact = 0.0;
    for (std::size_t k = 1; k <= opt.max_terms; ++k) {
        // term_{k}(t) = integral of term_{k-1} w (or -w term_{k-1}),
        // composite trapezoid, cumulative
        std::vector<CMatrix> next(pts, CMatrix(n, n));
        std::vector<CMatrix> integrand(pts);
        for (std::size_t i = 0; i < pts; ++i)
            integrand[i] = inverse_equation ? -(ws[i] * term[i]) : term[i] * ws[i];
        for (std::size_t i = 1; i < pts; ++i)
            next[i] = next[i - 1] + (integrand[i - 1] + integrand[i]) *
                                        std::complex<double>(h / 2.0, 0.0);
        log_fact += std::log(static_cast<double>(k));
        double term_norm = 0.0;
        for (std::size_t i = 0; i < pts; ++i) {
            sum[i] = sum[i] + next[i];
            double nn = frobenius_norm(next[i]);
            term_norm = std::max(term_norm, nn);
            // The discrete iterate obeys the factorial bound with t shifted
            // by k h: each cumulative trapezoid looks at most one step
            // ahead, so ||term_k(t_i)|| <= (W (t_i + k h))^k / k!.
            double shifted = grid[i] + static_cast<double>(k) * h;
            if (shifted > 0.0 && W_grid > 0.0) {
                double log_bound = k * std::log(W_grid * shifted) - log_fact;
                if (log_bound > -700.0)
                    bound_ratio = std::max(bound_ratio, nn / std::exp(log_bound));
            }
        }
        term = std::move(next);
        terms_used = k;
        double sum_norm = 0.0;
        for (const auto& s : sum) sum_norm = std::max(sum_norm, frobenius_norm(s));
        if (term_norm < opt.term_tail * std::max(1.0, sum_norm)) break;
        if (k == opt.max_terms)
            throw DivergenceDetected("picard series did not settle in " +
                                     std::to_string(opt.max_terms) + " terms");
    }
    return sum;
}

inline std::vector<CMatrix> rk4_integrate(const std::vector<double>& grid, const MatrixPath& w,
                                          bool inverse_equation) {
    const std::size_t n = w.dim;
    const double h = grid[1] - grid[0];
    auto f = [&](double t, const CMatrix& a) {
        return inverse_equation ? -(w.eval(t) * a) : a * w.eval(t);
    };
    std::vector<CMatrix> a;
    a.reserve(grid.size());
    a.push_back(cidentity(n));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const CMatrix& y = a.back();
        double t = grid[i];
        CMatrix k1 = f(t, y);
        CMatrix k2 = f(t + h / 2, y + k1 * std::complex<double>(h / 2, 0.0));
        CMatrix k3 = f(t + h / 2, y + k2 * std::complex<double>(h / 2, 0.0));
        CMatrix k4 = f(t + h, y + k3 * std::complex<double>(h, 0.0));
        a.push_back(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * std::complex<double>(h / 6.0, 0.0));
    }
    return a;
}

inline TransportResult run_transport(const MatrixPath& w, const TransportOptions& opt,
                                     bool inverse_equation) {
    if (opt.steps < 2) throw InvalidInput("transport needs at least 2 steps");
    TransportResult r;
    r.grid.resize(opt.steps + 1);
    for (std::size_t i = 0; i <= opt.steps; ++i)
        r.grid[i] = static_cast<double>(i) / static_cast<double>(opt.steps);

    std::vector<CMatrix> picard, rk4;
    if (opt.method != TransportMethod::rk4)
        picard = picard_series(r.grid, w, opt, inverse_equation, r.term_bound_ratio,
                               r.terms_used);
    if (opt.method != TransportMethod::picard) rk4 = rk4_integrate(r.grid, w, inverse_equation);

    if (opt.method == TransportMethod::both) {
        r.agreement = 0.0;
        for (std::size_t i = 0; i < r.grid.size(); ++i)
            r.agreement = std::max(r.agreement, frobenius_norm(picard[i] - rk4[i]));
    }
    r.alpha = opt.method == TransportMethod::rk4 ? std::move(rk4) : std::move(picard);
    finish_diagnostics(r, w, opt, inverse_equation);
    return r;
}

} // namespace detail

/// Solves d a = a w with a(0) = I by the iterated-integral series (composite
/// trapezoid) and/or classical RK4; reports the equation residual, the
/// factorial bound ratio on the series terms, and invertibility margins.
inline TransportResult path_ordered_exp(const MatrixPath& w, const TransportOptions& opt = {}) {
    return detail::run_transport(w, opt, false);
}

/// Solves d a' = -w a' with a'(0) = I; the pointwise inverse of the forward
/// transport.
inline TransportResult inverse_transport(const MatrixPath& w, const TransportOptions& opt = {}) {
    return detail::run_transport(w, opt, true);
}

struct TrivializationResult {
    TransportResult transport;
    double conjugation_residual = 0.0; // max over test sections of ||a(nabla s) - d(a s)||
};

/// Gauge transformation a with d a = a kappa, certified on a family of
/// polynomial test sections: a(s' + kappa s) = (a s)'.
inline TrivializationResult trivialize_flat(const MatrixPath& kappa,
                                            const TransportOptions& opt = {},
                                            std::size_t test_sections = 8) {
    TrivializationResult out{path_ordered_exp(kappa, opt), 0.0};
    const auto& grid = out.transport.grid;
    const std::size_t n = kappa.dim;
    const double h = grid[1] - grid[0];

    for (std::size_t sec = 0; sec < test_sections; ++sec) {
        // deterministic cubic vector polynomial s(t)
        std::vector<std::vector<std::complex<double>>> c(
            4, std::vector<std::complex<double>>(n));
        for (std::size_t d = 0; d < 4; ++d)
            for (std::size_t i = 0; i < n; ++i) {
                double phase = 0.7 * static_cast<double>(sec + 1) +
                               1.3 * static_cast<double>(d) + 0.29 * static_cast<double>(i);
                c[d][i] = {std::cos(phase), std::sin(2.0 * phase)};
            }
        auto s_at = [&](double t) {
            std::vector<std::complex<double>> v(n);
            for (std::size_t i = 0; i < n; ++i)
                v[i] = c[0][i] + t * (c[1][i] + t * (c[2][i] + t * c[3][i]));
            return v;
        };
        auto sprime_at = [&](double t) {
            std::vector<std::complex<double>> v(n);
            for (std::size_t i = 0; i < n; ++i)
                v[i] = c[1][i] + t * (2.0 * c[2][i] + t * 3.0 * c[3][i]);
            return v;
        };
        auto apply = [&](const CMatrix& m, const std::vector<std::complex<double>>& v) {
            std::vector<std::complex<double>> r(m.rows(), {0.0, 0.0});
            for (std::size_t i = 0; i < m.rows(); ++i)
                for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
            return r;
        };

        std::vector<std::vector<std::complex<double>>> as(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            as[i] = apply(out.transport.alpha[i], s_at(grid[i]));
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            auto nabla_s = sprime_at(grid[i]);
            auto ks = apply(kappa.eval(grid[i]), s_at(grid[i]));
            for (std::size_t j = 0; j < n; ++j) nabla_s[j] += ks[j];
            auto lhs = apply(out.transport.alpha[i], nabla_s);
            double res = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                std::complex<double> deriv = (as[i + 1][j] - as[i - 1][j]) / (2.0 * h);
                res = std::max(res, std::abs(lhs[j] - deriv));
            }
            out.conjugation_residual = std::max(out.conjugation_residual, res);
        }
    }
    return out;
}

struct HorizontalFrame {
    TransportResult forward;         // a with d a = a kappa
    std::vector<CMatrix> frame;      // frame(t) = a(t)^{-1}, columns horizontal
    CMatrix basis_at_0;              // frame(0) = I
    double horizontal_residual = 0;  // max ||frame' + kappa frame||
    double min_frame_det = 0.0;      // multiplication map margin
};

/// Horizontal sections of d/dt + kappa: the columns of a(t)^{-1}; evaluation
/// at t = 0 identifies them with the fibre there.
inline HorizontalFrame kernel_of_interval_part(const MatrixPath& kappa,
                                               const TransportOptions& opt = {}) {
    HorizontalFrame out{path_ordered_exp(kappa, opt), {}, {}, 0.0, 0.0};
    const auto& grid = out.forward.grid;
    out.frame.reserve(grid.size());
    for (const auto& a : out.forward.alpha) out.frame.push_back(inverse(a));
    out.basis_at_0 = out.frame.front();

    const double h = grid[1] - grid[0];
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        CMatrix deriv = (out.frame[i + 1] - out.frame[i - 1]) *
                        std::complex<double>(1.0 / (2.0 * h), 0.0);
        out.horizontal_residual = std::max(
            out.horizontal_residual,
            frobenius_norm(deriv + kappa.eval(grid[i]) * out.frame[i]));
    }
    out.min_frame_det = std::abs(determinant(out.frame[0]));
    for (const auto& f : out.frame)
        out.min_frame_det = std::min(out.min_frame_det, std::abs(determinant(f)));
    return out;
}

} // namespace ncg
