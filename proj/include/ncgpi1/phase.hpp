#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "ncgpi1/rational.hpp"
#include "ncgpi1/scalar.hpp"

namespace ncg {

/// Exponent of a unit phase exp(i pi (rational + sum_j c_j theta_j)) over
/// declared rationally-independent irrational generators theta_j. The
/// rational part is kept reduced modulo 2, so equality of PhaseExponents is
/// an exact decision about equality of the phases.
class PhaseExponent {
  public:
    explicit PhaseExponent(std::size_t generators = 0)
        : rational_(0), irr_(generators, Rational(0)) {}
    PhaseExponent(Rational rational, std::vector<Rational> irr)
        : rational_(std::move(rational)), irr_(std::move(irr)) {
        normalize();
    }

    const Rational& rational_part() const { return rational_; }
    const std::vector<Rational>& irrational_coeffs() const { return irr_; }
    std::size_t generators() const { return irr_.size(); }

    bool is_rational() const {
        for (const auto& c : irr_)
            if (c != 0) return false;
        return true;
    }
    bool is_zero() const { return rational_ == 0 && is_rational(); }

    PhaseExponent operator+(const PhaseExponent& o) const {
        check(o);
        std::vector<Rational> irr(irr_.size());
        for (std::size_t i = 0; i < irr_.size(); ++i) irr[i] = irr_[i] + o.irr_[i];
        return PhaseExponent(rational_ + o.rational_, std::move(irr));
    }
    PhaseExponent operator-() const {
        std::vector<Rational> irr(irr_.size());
        for (std::size_t i = 0; i < irr_.size(); ++i) irr[i] = -irr_[i];
        return PhaseExponent(-rational_, std::move(irr));
    }
    PhaseExponent operator-(const PhaseExponent& o) const { return *this + (-o); }

    bool operator==(const PhaseExponent& o) const {
        return rational_ == o.rational_ && irr_ == o.irr_;
    }
    bool operator!=(const PhaseExponent& o) const { return !(*this == o); }

    /// exp(i pi q) as an exact Gaussian rational when q in {0,1/2,1,3/2};
    /// nullopt otherwise.
    std::optional<Scalar> exact_value() const {
        if (!is_rational()) return std::nullopt;
        if (rational_ == 0) return Scalar::exact_int(1);
        if (rational_ == Rational(1, 2)) return Scalar::exact_int(0, 1);
        if (rational_ == 1) return Scalar::exact_int(-1);
        if (rational_ == Rational(3, 2)) return Scalar::exact_int(0, -1);
        return std::nullopt;
    }

    /// Numeric evaluation with the declared irrationals bound to doubles.
    std::complex<double> value(const std::vector<double>& bindings) const {
        if (bindings.size() < irr_.size())
            throw InvalidInput("missing numeric bindings for irrational generators");
        double e = static_cast<double>(rational_);
        for (std::size_t i = 0; i < irr_.size(); ++i)
            e += static_cast<double>(irr_[i]) * bindings[i];
        const double pi = 3.14159265358979323846264338327950288;
        return {std::cos(pi * e), std::sin(pi * e)};
    }

    std::string to_string() const {
        std::string s = rat_to_string(rational_);
        for (std::size_t i = 0; i < irr_.size(); ++i)
            if (irr_[i] != 0) s += " + " + rat_to_string(irr_[i]) + "*theta" + std::to_string(i + 1);
        return s;
    }

  private:
    void check(const PhaseExponent& o) const {
        if (irr_.size() != o.irr_.size())
            throw InvalidInput("phase exponents over different generator lists");
    }
    void normalize() { rational_ = rat_mod(rational_, 2); }

    Rational rational_;
    std::vector<Rational> irr_;
};

} // namespace ncg
