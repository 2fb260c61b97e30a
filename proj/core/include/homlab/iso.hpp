#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "homlab/structure.hpp"

namespace homlab {

/// Colour refinement on elements with structure-independent hashing, so
/// colours of different structures are comparable. Equal structures up to
/// isomorphism get equal colour multisets.
std::vector<std::uint64_t> refined_colors(const RelStructure& a);

/// Isomorphism-invariant fingerprint: size, per-symbol tuple counts and the
/// sorted refined colours.
std::vector<std::uint64_t> iso_invariant(const RelStructure& a);

/// An isomorphism a -> b if one exists. Backtracks over a's elements in index
/// order with b's candidates in increasing order, so the result is the
/// lexicographically first isomorphism.
std::optional<std::vector<Element>> iso_check(const RelStructure& a, const RelStructure& b);

inline bool isomorphic(const RelStructure& a, const RelStructure& b) {
  return iso_check(a, b).has_value();
}

}  // namespace homlab
