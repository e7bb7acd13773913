#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "ncgpi1/errors.hpp"
#include "ncgpi1/rational.hpp"

namespace ncg {

enum class ScalarMode { exact, numeric };

inline const char* to_string(ScalarMode m) {
    return m == ScalarMode::exact ? "exact" : "numeric";
}

/// Complex scalar in one of two fixed modes: exact Gaussian rationals or
/// complex doubles. Arithmetic never crosses modes; mixing throws.
class Scalar {
  public:
    Scalar() : mode_(ScalarMode::exact) {}

    static Scalar exact(Rational re, Rational im = Rational(0)) {
        Scalar s;
        s.mode_ = ScalarMode::exact;
        s.re_q_ = std::move(re);
        s.im_q_ = std::move(im);
        return s;
    }
    static Scalar exact_int(long re, long im = 0) {
        return exact(Rational(re), Rational(im));
    }
    static Scalar numeric(double re, double im = 0.0) {
        Scalar s;
        s.mode_ = ScalarMode::numeric;
        s.re_d_ = re;
        s.im_d_ = im;
        return s;
    }
    static Scalar numeric(std::complex<double> z) { return numeric(z.real(), z.imag()); }
    static Scalar zero(ScalarMode m) {
        return m == ScalarMode::exact ? exact_int(0) : numeric(0.0);
    }
    static Scalar one(ScalarMode m) {
        return m == ScalarMode::exact ? exact_int(1) : numeric(1.0);
    }

    ScalarMode mode() const { return mode_; }
    bool is_exact() const { return mode_ == ScalarMode::exact; }

    const Rational& re_rational() const {
        require_exact();
        return re_q_;
    }
    const Rational& im_rational() const {
        require_exact();
        return im_q_;
    }

    std::complex<double> to_complex() const {
        if (mode_ == ScalarMode::numeric) return {re_d_, im_d_};
        return {static_cast<double>(re_q_), static_cast<double>(im_q_)};
    }

    Scalar operator+(const Scalar& o) const {
        check_mode(o);
        if (is_exact()) return exact(re_q_ + o.re_q_, im_q_ + o.im_q_);
        return numeric(re_d_ + o.re_d_, im_d_ + o.im_d_);
    }
    Scalar operator-(const Scalar& o) const {
        check_mode(o);
        if (is_exact()) return exact(re_q_ - o.re_q_, im_q_ - o.im_q_);
        return numeric(re_d_ - o.re_d_, im_d_ - o.im_d_);
    }
    Scalar operator-() const {
        if (is_exact()) return exact(-re_q_, -im_q_);
        return numeric(-re_d_, -im_d_);
    }
    Scalar operator*(const Scalar& o) const {
        check_mode(o);
        if (is_exact())
            return exact(re_q_ * o.re_q_ - im_q_ * o.im_q_,
                         re_q_ * o.im_q_ + im_q_ * o.re_q_);
        return numeric(re_d_ * o.re_d_ - im_d_ * o.im_d_,
                       re_d_ * o.im_d_ + im_d_ * o.re_d_);
    }
    Scalar operator/(const Scalar& o) const {
        check_mode(o);
        if (is_exact()) {
            Rational n2 = o.re_q_ * o.re_q_ + o.im_q_ * o.im_q_;
            if (n2 == 0) throw Error("division by zero scalar");
            return exact((re_q_ * o.re_q_ + im_q_ * o.im_q_) / n2,
                         (im_q_ * o.re_q_ - re_q_ * o.im_q_) / n2);
        }
        std::complex<double> z = to_complex() / o.to_complex();
        return numeric(z);
    }
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    Scalar conj() const {
        if (is_exact()) return exact(re_q_, -im_q_);
        return numeric(re_d_, -im_d_);
    }

    Scalar inverse() const { return one(mode_) / *this; }

    double abs() const { return std::abs(to_complex()); }

    bool is_zero(double tol = 0.0) const {
        if (is_exact()) return re_q_ == 0 && im_q_ == 0;
        return std::abs(std::complex<double>(re_d_, im_d_)) <= tol;
    }

    /// Exact equality in exact mode; |a-b| <= tol*max(1,|a|,|b|) in numeric mode.
    bool equals(const Scalar& o, double tol = 0.0) const {
        check_mode(o);
        if (is_exact()) return re_q_ == o.re_q_ && im_q_ == o.im_q_;
        double scale = std::max({1.0, abs(), o.abs()});
        return std::abs(to_complex() - o.to_complex()) <= tol * scale;
    }
    bool operator==(const Scalar& o) const { return equals(o, 0.0); }

    std::string to_string() const {
        if (is_exact()) {
            std::string s = rat_to_string(re_q_);
            if (im_q_ != 0) s += (im_q_ > 0 ? "+" : "") + rat_to_string(im_q_) + "i";
            return s;
        }
        std::string s = std::to_string(re_d_);
        if (im_d_ != 0) s += (im_d_ >= 0 ? "+" : "") + std::to_string(im_d_) + "i";
        return s;
    }

  private:
    void require_exact() const {
        if (!is_exact()) throw ScalarModeMismatch("exact accessor on numeric scalar");
    }
    void check_mode(const Scalar& o) const {
        if (mode_ != o.mode_)
            throw ScalarModeMismatch("mixing exact and numeric scalars");
    }

    ScalarMode mode_;
    Rational re_q_, im_q_;
    double re_d_ = 0.0, im_d_ = 0.0;
};

} // namespace ncg
