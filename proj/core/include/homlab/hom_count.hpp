#pragma once

#include <functional>
#include <string>
#include <vector>

#include "homlab/count.hpp"
#include "homlab/covers.hpp"
#include "homlab/structure.hpp"

namespace homlab {

/// Number of homomorphisms source -> target. Counts Gaifman components of the
/// source separately and multiplies.
Count hom_count(const RelStructure& source, const RelStructure& target);

/// Number of injective maps that preserve and reflect every relation.
Count strong_emb_count(const RelStructure& source, const RelStructure& target);

/// hom_count evaluated by dynamic programming over a pebble forest cover of
/// the source. Throws PreconditionViolation if the cover is invalid.
Count hom_count_treedec(const RelStructure& source, const PebbleForestCover& cover,
                        const RelStructure& target);

/// Homomorphisms sending the source's point to the target's point.
Count pointed_hom_count(const PointedStructure& source, const PointedStructure& target);

/// Visits every homomorphism source -> target in lexicographic order of the
/// map. Stops early when `visit` returns false.
void for_each_hom(const RelStructure& source, const RelStructure& target,
                  const std::function<bool(const std::vector<Element>&)>& visit);

/// Homomorphism counts of several sources into one target.
struct HomVector {
  std::vector<std::string> sources;
  std::vector<Count> counts;

  bool operator==(const HomVector&) const = default;
};

}  // namespace homlab
