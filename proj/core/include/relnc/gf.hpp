#pragma once

#include <cstdint>

namespace relnc::gf {

// Field degree m in [1, 8]. Elements are ints in [0, 2^m).

// Fixed primitive polynomial per degree (bit i = coefficient of x^i,
// including the leading term).
int primitive_poly(int m);

inline int add(int x, int y) { return x ^ y; }

// Log/antilog table multiply modulo the fixed primitive polynomial.
int mul(int x, int y, int m);

// Multiplicative inverse; x must be nonzero.
int inv(int x, int m);

}  // namespace relnc::gf
