#pragma once

// Random instances for property tests.

#include <algorithm>
#include <numeric>
#include <random>

#include "homlab/covers.hpp"
#include "homlab/hom_count.hpp"
#include "homlab/structure.hpp"

namespace gen {

using homlab::Element;
using homlab::ForestCover;
using homlab::PebbleForestCover;
using homlab::RelStructure;
using homlab::Signature;

/// Random forest on n nodes, relabelled by a random permutation.
inline std::vector<int> random_forest(std::mt19937& rng, std::size_t n) {
  std::vector<int> shape(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> d(-1, static_cast<int>(i) - 1);
    shape[i] = i == 0 ? -1 : d(rng);
  }
  std::vector<Element> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[perm[i]] = shape[i] < 0 ? -1 : static_cast<int>(perm[shape[i]]);
  return parent;
}

struct QuotientInstance {
  RelStructure structure;  // over E, P and I
  PebbleForestCover cover;
  Element u = 0, v = 0;    // (u,v) or (v,u) in I, u strictly below v
  int n = 0;               // height the cover validates at
};

/// A structure over {E/2, P/1, I/2} with a valid pebble cover, and one
/// non-diagonal I pair, oriented upwards in the forest.
inline QuotientInstance random_quotient_instance(std::mt19937& rng, std::size_t max_size = 7, int max_k = 3) {
  const Signature sig({{"E", 2}, {"P", 1}, {"I", 2}});
  std::uniform_int_distribution<std::size_t> size_d(2, max_size);
  std::uniform_int_distribution<int> k_d(1, max_k);
  std::bernoulli_distribution edge(0.4), eq(0.3), unary(0.4);
  while (true) {
    const auto n = size_d(rng);
    const int k = k_d(rng);
    auto cover = ForestCover::make(RelStructure(sig, n), random_forest(rng, n));
    std::uniform_int_distribution<int> peb(1, k);
    std::vector<int> pebbles(n);
    for (auto& p : pebbles) p = peb(rng);
    PebbleForestCover pc{cover, pebbles, k};

    std::vector<std::vector<homlab::Tuple>> rels(3);
    std::vector<std::pair<Element, Element>> eq_pairs;
    for (Element x = 0; x < n; ++x) {
      if (unary(rng)) rels[1].push_back({x});
      if (edge(rng)) rels[0].push_back({x, x});
      if (eq(rng)) rels[2].push_back({x, x});
      for (Element y = 0; y < n; ++y) {
        if (x == y || !homlab::sees(pc, x, y)) continue;
        if (edge(rng)) rels[0].push_back({x, y});
        if (eq(rng)) {
          rels[2].push_back({x, y});
          eq_pairs.emplace_back(x, y);
        }
      }
    }
    if (eq_pairs.empty()) continue;
    RelStructure a(sig, n, std::move(rels));
    pc.cover = ForestCover::make(a, pc.cover.parent);
    std::uniform_int_distribution<std::size_t> pick(0, eq_pairs.size() - 1);
    auto [x, y] = eq_pairs[pick(rng)];
    if (pc.cover.leq(y, x)) std::swap(x, y);
    return {a, pc, x, y, pc.cover.height};
  }
}

/// Up to `keep` homomorphisms c -> a, uniformly from the first `visit_cap`
/// visited (all of them when there are few). Maps failing `accept` are
/// visited but not kept.
template <class Accept>
std::vector<std::vector<Element>> sample_homs(std::mt19937& rng, const RelStructure& c, const RelStructure& a,
                                              std::size_t keep, Accept accept, std::size_t visit_cap = 20000) {
  std::vector<std::vector<Element>> out;
  std::size_t seen = 0, visited = 0;
  homlab::for_each_hom(c, a, [&](const std::vector<Element>& m) {
    if (!accept(m)) return ++visited < visit_cap;
    ++visited;
    ++seen;
    if (out.size() < keep) {
      out.push_back(m);
    } else {
      std::uniform_int_distribution<std::size_t> d(0, seen - 1);
      if (auto j = d(rng); j < keep) out[j] = m;
    }
    return visited < visit_cap;
  });
  return out;
}

inline std::vector<std::vector<Element>> sample_homs(std::mt19937& rng, const RelStructure& c, const RelStructure& a,
                                                     std::size_t keep) {
  return sample_homs(rng, c, a, keep, [](const std::vector<Element>&) { return true; });
}

}  // namespace gen
