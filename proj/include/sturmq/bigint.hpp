#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "sturmq/errors.hpp"

namespace sturmq {

// Arbitrary-precision integers and rationals. Continuants can exceed any
// fixed machine width for adversarial quotient patterns, so the public
// types are arbitrary precision throughout; hot loops keep an internal
// 128-bit fast path and fall back to these on overflow.
using BigInt = mpz_class;
using BigRat = mpq_class;

inline BigRat make_rat(const BigInt& num, const BigInt& den) {
    BigRat r(num, den);
    r.canonicalize();
    return r;
}

inline BigRat make_rat(long num, long den) {
    BigRat r(num, den);
    r.canonicalize();
    return r;
}

// Base-10 integer parse (mpz auto-detects octal on leading zeros otherwise).
inline BigInt parse_int(const std::string& text) {
    BigInt z;
    if (text.empty() || mpz_set_str(z.get_mpz_t(), text.c_str(), 10) != 0)
        throw DomainError("malformed integer literal: " + text);
    return z;
}

// Parses "p/q", "p", or a plain decimal like "0.125" into an exact rational.
BigRat parse_rational(const std::string& text);

inline double to_double(const BigRat& r) { return r.get_d(); }
inline double to_double(const BigInt& z) { return z.get_d(); }

// Floor/ceil division for signed 128-bit operands (denominator nonzero).
inline __int128 floor_div(__int128 num, __int128 den) {
    __int128 q = num / den;
    __int128 r = num % den;
    if (r != 0 && ((r < 0) != (den < 0))) --q;
    return q;
}

inline __int128 ceil_div(__int128 num, __int128 den) {
    return -floor_div(-num, den);
}

} // namespace sturmq
