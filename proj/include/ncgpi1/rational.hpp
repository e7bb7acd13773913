#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "ncgpi1/errors.hpp"

namespace ncg {

using Integer  = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer rat_num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer rat_den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline std::string rat_to_string(const Rational& q) {
    if (rat_den(q) == 1) return rat_num(q).str();
    return rat_num(q).str() + "/" + rat_den(q).str();
}

/// Parses "p", "-p/q" or a plain integer string. Throws InvalidInput on junk.
inline Rational rat_from_string(const std::string& s) {
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den == 0) throw InvalidInput("rational with zero denominator: " + s);
        return Rational(num, den);
    } catch (const std::exception&) {
        throw InvalidInput("cannot parse rational: '" + s + "'");
    }
}

/// Floor-reduction of q modulo a positive integer period.
inline Rational rat_mod(const Rational& q, const Integer& period) {
    Integer n = rat_num(q), d = rat_den(q);
    Integer pd = period * d;
    Integer r  = n % pd;
    if (r < 0) r += pd;
    return Rational(r, d);
}

inline Integer int_gcd(Integer a, Integer b) { return boost::multiprecision::gcd(a, b); }
inline Integer int_lcm(Integer a, Integer b) { return boost::multiprecision::lcm(a, b); }

} // namespace ncg
