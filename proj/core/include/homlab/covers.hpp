#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "homlab/structure.hpp"

namespace homlab {

inline constexpr int kNoParent = -1;

/// A forest order on the universe of `base`, given by parent links. a <= b
/// iff a is an ancestor of b (or equal). Compatibility with the Gaifman graph
/// is checked by validate_forest_cover, not on construction.
struct ForestCover {
  RelStructure base;
  std::vector<int> parent;
  int height = 0;  // nodes on the longest root path

  /// Builds a cover and caches its height. Throws MalformedInput when the
  /// parent array has the wrong length, out-of-range entries or a cycle.
  static ForestCover make(RelStructure base, std::vector<int> parent);

  std::size_t size() const { return parent.size(); }
  int depth(Element a) const;                      // 1 for roots
  bool leq(Element a, Element b) const;            // a ancestor-or-equal of b
  bool comparable(Element a, Element b) const { return leq(a, b) || leq(b, a); }
  std::vector<Element> root_path(Element a) const;  // root first, a last
};

/// A forest cover together with a pebbling function into {1..k}.
struct PebbleForestCover {
  ForestCover cover;
  std::vector<int> pebbles;
  int k = 1;
};

/// Forest order valid, height <= max_height and every Gaifman edge joins
/// comparable elements.
bool validate_forest_cover(const RelStructure& a, const ForestCover& cover, int max_height);

/// a sees b: comparable, and no z with min(a,b) < z <= max(a,b) carries the
/// pebble of min(a,b).
bool sees(const PebbleForestCover& cover, Element a, Element b);

/// Forest order valid, height <= n, pebbles within {1..k}, and every Gaifman
/// edge joins elements that see each other.
bool validate_pebble_cover(const RelStructure& a, const PebbleForestCover& cover, int k, int n);

struct CoverLimits {
  std::size_t max_size = 10;
};

struct TreeDepth {
  int depth = 0;
  ForestCover cover;
};

/// Exact tree-depth by the vertex-deletion recursion memoised on vertex
/// subsets, with a cover realising it.
TreeDepth compute_tree_depth(const RelStructure& a, CoverLimits limits = {});

/// A k-pebble forest cover (of height at most `max_height` when given) if one
/// exists. Exhaustive: returns nullopt only when no such cover exists.
std::optional<PebbleForestCover> find_pebble_forest_cover(const RelStructure& a, int k,
                                                          std::optional<int> max_height = {},
                                                          CoverLimits limits = {});

/// Least k admitting a k-pebble forest cover, minus one.
int tree_width(const RelStructure& a, CoverLimits limits = {});

/// Cover of H(d) obtained by sending each I-class to its least member in the
/// forest order of `cover`. `cover` must be a valid forest cover of d.
ForestCover quotient_forest_cover(const RelStructure& d, const ForestCover& cover);

struct OneStepQuotient {
  RelStructure structure;
  PebbleForestCover cover;
  /// Index in the new structure of each old element; v maps to u's index.
  std::vector<Element> old_to_new;
};

/// Identifies v with u, where (u,v) or (v,u) is in I and u < v in the forest
/// order, repairing the pebbling so the result is again a valid cover with the
/// same k and no larger height.
OneStepQuotient one_step_quotient(const RelStructure& a, const PebbleForestCover& cover, Element u,
                                  Element v);

struct Elimination {
  RelStructure structure;  // over the signature without I
  PebbleForestCover cover;
  std::vector<Element> quotient_map;
  int steps = 0;
};

/// Applies one_step_quotient until I is the diagonal, then drops I.
Elimination eliminate_equalities(const RelStructure& a, const PebbleForestCover& cover);

}  // namespace homlab
