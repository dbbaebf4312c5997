/**
 * Coefficient-field selection for exact linear algebra: GF(2), GF(p),
 * arbitrary-precision rationals, or float64 (spectral routines only).
 */

#ifndef QTDA_FIELD_HPP
#define QTDA_FIELD_HPP

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace qtda {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/** Selectable coefficient field.  Exact fields: GF2, GFP, Rational. */
struct FieldTag {
    enum class Kind { GF2, GFP, Rational, Real };
    Kind kind = Kind::Rational;
    std::uint64_t p = 0;  ///< prime modulus when kind == GFP

    static FieldTag gf2() { return {Kind::GF2, 2}; }
    static FieldTag gfp(std::uint64_t prime) {
        if (prime < 2) throw ConfigError("GF(p) modulus must be a prime >= 2");
        return {Kind::GFP, prime};
    }
    static FieldTag rational() { return {Kind::Rational, 0}; }
    static FieldTag real() { return {Kind::Real, 0}; }

    std::string name() const {
        switch (kind) {
            case Kind::GF2: return "GF2";
            case Kind::GFP: return "GF" + std::to_string(p);
            case Kind::Rational: return "Q";
            case Kind::Real: return "R";
        }
        return "?";
    }
};

}  // namespace qtda

#endif  // QTDA_FIELD_HPP
