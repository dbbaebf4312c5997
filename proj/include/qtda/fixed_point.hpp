/**
 * Two's-complement fixed-point coordinates with a user-declared
 * integer/fraction split and hard overflow errors.
 *
 * A coordinate is stored as a signed 64-bit raw integer whose value is
 * raw / 2^frac_bits, and must fit in the declared total width `bits`
 * (sign included).  Squared distances are computed exactly on the raw
 * integers (scale 2^(2*frac_bits)); any intermediate that does not fit in
 * 64 bits raises ComputeError rather than wrapping.
 */

#ifndef QTDA_FIXED_POINT_HPP
#define QTDA_FIXED_POINT_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "errors.hpp"

namespace qtda {

/** Declared fixed-point layout: total width and fractional bits. */
struct FixedPointFormat {
    int bits = 32;       ///< total width including sign bit
    int frac_bits = 12;  ///< bits to the right of the binary point

    bool operator==(const FixedPointFormat&) const = default;
};

namespace detail {

inline std::int64_t checked_add_i64(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw ComputeError("fixed-point overflow in addition");
    return r;
}

inline std::int64_t checked_sub_i64(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw ComputeError("fixed-point overflow in subtraction");
    return r;
}

inline std::int64_t checked_mul_i64(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw ComputeError("fixed-point overflow in multiplication");
    return r;
}

}  // namespace detail

/**
 * Quantize a real coordinate into the declared format.
 * Values whose scaled magnitude exceeds the b-bit range are a load error
 * (never silently truncated).
 */
inline std::int64_t quantize(double value, const FixedPointFormat& fmt) {
    if (fmt.bits < 2 || fmt.bits > 63 || fmt.frac_bits < 0 || fmt.frac_bits >= fmt.bits)
        throw ConfigError("invalid fixed-point format (bits=" + std::to_string(fmt.bits) +
                          ", frac_bits=" + std::to_string(fmt.frac_bits) + ")");
    if (!std::isfinite(value)) throw ConfigError("non-finite coordinate");
    const double scaled = std::round(value * std::ldexp(1.0, fmt.frac_bits));
    const double limit = std::ldexp(1.0, fmt.bits - 1);
    if (scaled >= limit || scaled < -limit)
        throw ConfigError("coordinate " + std::to_string(value) +
                          " not representable in " + std::to_string(fmt.bits) + " bits");
    return static_cast<std::int64_t>(scaled);
}

/** Raw integer back to a real value. */
inline double dequantize(std::int64_t raw, const FixedPointFormat& fmt) {
    return std::ldexp(static_cast<double>(raw), -fmt.frac_bits);
}

}  // namespace qtda

#endif  // QTDA_FIXED_POINT_HPP
