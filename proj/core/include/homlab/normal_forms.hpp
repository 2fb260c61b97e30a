#pragma once

#include <cstddef>
#include <set>
#include <string>

#include "homlab/count.hpp"
#include "homlab/covers.hpp"
#include "homlab/formula.hpp"
#include "homlab/structure.hpp"

namespace homlab {

/// A counting formula built from atoms, conjunction and plain ∃ only.
class PrimitivePositiveFormula {
 public:
  /// Throws MalformedInput if `f` uses anything else (negation, equality,
  /// disjunction, ∃≤, thresholds other than 1).
  explicit PrimitivePositiveFormula(CountingFormula f);

  const CountingFormula& formula() const { return formula_; }
  const std::set<std::string>& free_variables() const { return formula_.free_variables(); }
  int depth() const { return formula_.depth(); }
  int width() const { return formula_.width(); }

 private:
  CountingFormula formula_;
};

/// γ_A with one variable per element, quantified in a single chain.
PrimitivePositiveFormula canonical_conjunctive_query(const RelStructure& a);
/// γ_A nested along a forest cover: depth equals the cover height.
PrimitivePositiveFormula canonical_conjunctive_query(const RelStructure& a, const ForestCover& cover);
/// γ_A along a pebble forest cover; each element reuses the variable of its
/// pebble, so the width is at most k.
PrimitivePositiveFormula canonical_conjunctive_query(const RelStructure& a, const PebbleForestCover& cover);

/// Number of quantifier witness functions of γ in `b` under `env`; for
/// γ = γ_A this is hom_count(A, b).
Count count_witnesses(const RelStructure& b, const PrimitivePositiveFormula& gamma, const Environment& env = {});

/// γ^t: true exactly when count_witnesses >= t. Same depth and width as γ,
/// negation- and equality-free, ∃≥ only.
CountingFormula threshold_lift(const PrimitivePositiveFormula& gamma, std::size_t t);

/// Equality-free sentence equivalent to ∃x∃y (x != y ∧ E(x,y)) on every
/// structure with |B|^2 <= bound.
CountingFormula distinct_edge_sentence(std::size_t bound, const std::string& symbol = "E");
/// The same property stated with equality.
CountingFormula distinct_edge_reference(const std::string& symbol = "E");

}  // namespace homlab
