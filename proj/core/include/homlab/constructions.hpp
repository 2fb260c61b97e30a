#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "homlab/structure.hpp"

namespace homlab {

/// Gaifman graph: a loop-free symmetric binary relation E joining distinct
/// elements that occur together in some tuple.
RelStructure gaifman(const RelStructure& a);

/// Adjacency lists of the Gaifman graph (sorted, no loops).
std::vector<std::vector<Element>> gaifman_adjacency(const RelStructure& a);

/// Connected components of the Gaifman graph, each sorted, ordered by their
/// least element.
std::vector<std::vector<Element>> gaifman_components(const RelStructure& a);

struct DisjointUnion {
  RelStructure sum;
  Homomorphism left;
  Homomorphism right;
};

/// A ⊎ B with B's elements shifted by |A|.
DisjointUnion disjoint_union(const RelStructure& a, const RelStructure& b);

struct Pushout {
  RelStructure object;
  Homomorphism from_left;   // B -> D
  Homomorphism from_right;  // C -> D
};

/// Pushout of f: A -> B and g: A -> C, computed as (B ⊎ C)/~ where ~ is
/// generated by f(a) ~ g(a). Blocks are numbered by their least element in
/// B ⊎ C.
Pushout pushout(const Homomorphism& f, const Homomorphism& g);

struct Factorization {
  Homomorphism surjection;  // onto the image
  Homomorphism embedding;   // induced embedding of the image
};

/// Factors f through its set-image carrying the structure induced from the
/// target. The image keeps the target's element order.
Factorization epi_mono_factorize(const Homomorphism& f);

/// A surjection out of `base`, taken up to isomorphism commuting with the
/// surjection. Blocks are listed by least element; block i is element i of
/// the codomain.
struct QuotientObject {
  RelStructure base;
  std::vector<std::vector<Element>> partition;
  RelStructure codomain;
  Homomorphism surjection;
  bool strict = false;
};

struct QuotientLimits {
  std::size_t max_base_size = 5;
  std::size_t max_objects = 200000;
};

/// Every quotient object of `c`: one per (set partition, codomain relations
/// containing the pushforward). Throws CapExceeded when |c| or the number of
/// objects is above the limits.
std::vector<QuotientObject> enumerate_quotient_objects(const RelStructure& c,
                                                       QuotientLimits limits = {});

/// Adds the equality witness I interpreted as the diagonal.
RelStructure functor_J(const RelStructure& a);

struct Collapse {
  RelStructure structure;
  std::vector<Element> quotient_map;
};

/// Quotient by the equivalence generated by I, with I dropped.
Collapse functor_H(const RelStructure& d);

/// Union-find based canonical labelling: given n elements and a list of
/// identified pairs, returns the block index of each element with blocks
/// numbered by least member.
std::vector<Element> canonical_blocks(std::size_t n,
                                      const std::vector<std::pair<Element, Element>>& pairs);

}  // namespace homlab
