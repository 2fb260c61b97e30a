#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "homlab/formula.hpp"
#include "homlab/structure.hpp"

namespace homlab {

struct GameLimits {
  std::size_t max_size = 8;
  std::size_t max_positions = 5000000;
};

/// Bijective pebble game. With a width, positions hold at most `width`
/// pebble pairs and Spoiler may lift a pebble before each round; without
/// one, every round adds a pebble (so depth n gives C_n). A missing depth
/// asks for the greatest fixpoint (C^k); it needs a width.
bool equiv_counting(const RelStructure& a, const RelStructure& b, std::optional<int> depth,
                    std::optional<int> width = {}, GameLimits limits = {});

/// A formula of depth <= `depth` (and at most `width` variables when given)
/// true in `a` and false in `b`, or nullopt when the structures are
/// equivalent. Variables are named x1, x2, ...
std::optional<CountingFormula> distinguishing_formula(const RelStructure& a, const RelStructure& b,
                                                      std::optional<int> depth, std::optional<int> width = {},
                                                      GameLimits limits = {});

/// Stable colours of k-tuples (encoded base |A|, first coordinate most
/// significant) after refinement.
struct WLColoring {
  int dimension = 1;
  std::vector<int> colors;
  int rounds = 0;

  /// Sorted colour multiset.
  std::vector<int> histogram() const;
};

struct WLResult {
  WLColoring first;
  WLColoring second;
  bool equivalent = false;
};

/// k = 1: colour refinement on elements. k >= 2: k-dimensional WL on
/// k-tuples in the variant matching C^{k+1}. Colours come from one
/// dictionary shared by both structures. Arities must be at most two.
WLResult kwl_refine(const RelStructure& g1, const RelStructure& g2, int k);

/// Interns graded modal types so that ids are comparable across structures.
class ModalTypeDictionary {
 public:
  int intern(const std::vector<int>& key);
  std::size_t size() const { return ids_.size(); }

 private:
  std::map<std::vector<int>, int> ids_;
};

/// Graded modal type of depth k of every element.
std::vector<int> modal_types(const RelStructure& a, int k, ModalTypeDictionary& dictionary);

/// type_k(a) = type_k(b).
bool modal_equiv(const PointedStructure& a, const PointedStructure& b, int k);

}  // namespace homlab
