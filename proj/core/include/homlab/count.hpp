#pragma once

#include <cstdint>

#include "homlab/error.hpp"

namespace homlab {

/// Exact homomorphism counts. Arithmetic on counts is checked; a result that
/// does not fit in 64 bits raises CountOverflow instead of wrapping.
using Count = std::uint64_t;

inline Count checked_add(Count a, Count b) {
  Count r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw CountOverflow("count overflow in addition");
  return r;
}

inline Count checked_mul(Count a, Count b) {
  Count r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw CountOverflow("count overflow in multiplication");
  return r;
}

inline Count checked_pow(Count base, unsigned exponent) {
  Count r = 1;
  for (unsigned i = 0; i < exponent; ++i) r = checked_mul(r, base);
  return r;
}

}  // namespace homlab
