#pragma once

// Brute-force reference implementations. Nothing here reuses the library's
// search code: maps are enumerated exhaustively and isomorphism is decided by
// minimising over all permutations.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "homlab/comonads.hpp"
#include "homlab/covers.hpp"
#include "homlab/structure.hpp"

namespace oracle {

using homlab::Element;
using homlab::RelStructure;
using homlab::Signature;
using homlab::Tuple;

inline bool preserves(const RelStructure& c, const RelStructure& a, const std::vector<Element>& map) {
  for (std::size_t s = 0; s < c.signature().size(); ++s) {
    for (const auto& t : c.tuples(s)) {
      Tuple image;
      for (auto e : t) image.push_back(map[e]);
      if (!a.holds(s, image)) return false;
    }
  }
  return true;
}

/// Calls `f` on every map {0..n-1} -> {0..m-1}.
inline void for_each_map(std::size_t n, std::size_t m, const std::function<void(const std::vector<Element>&)>& f) {
  if (n > 0 && m == 0) return;
  std::vector<Element> map(n, 0);
  while (true) {
    f(map);
    std::size_t i = 0;
    while (i < n && ++map[i] == m) map[i++] = 0;
    if (i == n) return;
  }
}

inline std::uint64_t hom_count(const RelStructure& c, const RelStructure& a) {
  std::uint64_t total = 0;
  for_each_map(c.size(), a.size(), [&](const std::vector<Element>& m) { total += preserves(c, a, m); });
  return total;
}

inline std::uint64_t pointed_hom_count(const RelStructure& c, Element pc, const RelStructure& a, Element pa) {
  std::uint64_t total = 0;
  for_each_map(c.size(), a.size(), [&](const std::vector<Element>& m) { total += m[pc] == pa && preserves(c, a, m); });
  return total;
}

/// Injective maps that preserve and reflect every relation.
inline std::uint64_t strong_emb_count(const RelStructure& c, const RelStructure& a) {
  std::uint64_t total = 0;
  for_each_map(c.size(), a.size(), [&](const std::vector<Element>& m) {
    std::set<Element> image(m.begin(), m.end());
    if (image.size() != m.size() || !preserves(c, a, m)) return;
    std::vector<int> back(a.size(), -1);
    for (std::size_t i = 0; i < m.size(); ++i) back[m[i]] = static_cast<int>(i);
    for (std::size_t s = 0; s < a.signature().size(); ++s) {
      for (const auto& t : a.tuples(s)) {
        Tuple pre;
        for (auto e : t) {
          if (back[e] < 0) break;
          pre.push_back(static_cast<Element>(back[e]));
        }
        if (pre.size() == t.size() && !c.holds(s, pre)) return;
      }
    }
    ++total;
  });
  return total;
}

/// Relations under the relabelling `perm`, flattened and sorted.
inline std::vector<std::vector<Tuple>> relabel(const RelStructure& a, const std::vector<Element>& perm) {
  std::vector<std::vector<Tuple>> rels(a.signature().size());
  for (std::size_t s = 0; s < rels.size(); ++s) {
    for (const auto& t : a.tuples(s)) {
      Tuple u;
      for (auto e : t) u.push_back(perm[e]);
      rels[s].push_back(u);
    }
    std::sort(rels[s].begin(), rels[s].end());
  }
  return rels;
}

/// Isomorphism-invariant key: the least relabelled relation list. With a
/// point, only relabellings sending the point to 0 are used.
inline std::vector<std::vector<Tuple>> canonical_form(const RelStructure& a, std::optional<Element> point = {}) {
  std::vector<Element> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::optional<std::vector<std::vector<Tuple>>> best;
  do {
    std::vector<Element> perm(a.size());
    for (std::size_t i = 0; i < order.size(); ++i) perm[order[i]] = static_cast<Element>(i);
    if (point && perm[*point] != 0) continue;
    auto r = relabel(a, perm);
    if (!best || r < *best) best = std::move(r);
  } while (std::next_permutation(order.begin(), order.end()));
  return best.value_or(std::vector<std::vector<Tuple>>{});
}

inline bool isomorphic(const RelStructure& a, const RelStructure& b) {
  return a.size() == b.size() && a.signature() == b.signature() && canonical_form(a) == canonical_form(b);
}

/// Every possible tuple over the signature on n elements.
inline std::vector<std::pair<std::size_t, Tuple>> all_tuples(const Signature& sig, std::size_t n) {
  std::vector<std::pair<std::size_t, Tuple>> out;
  for (std::size_t s = 0; s < sig.size(); ++s) {
    for_each_map(static_cast<std::size_t>(sig[s].arity), n, [&](const std::vector<Element>& t) { out.emplace_back(s, t); });
  }
  return out;
}

/// All labelled structures on n elements (2^(#tuples) of them).
inline void for_each_labelled(const Signature& sig, std::size_t n, const std::function<void(const RelStructure&)>& f) {
  const auto tuples = all_tuples(sig, n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << tuples.size()); ++mask) {
    std::vector<std::vector<Tuple>> rels(sig.size());
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      if (mask >> i & 1) rels[tuples[i].first].push_back(tuples[i].second);
    }
    f(RelStructure(sig, n, std::move(rels)));
  }
}

/// One structure per isomorphism class on exactly n elements.
inline std::vector<RelStructure> iso_classes(const Signature& sig, std::size_t n,
                                             const std::function<bool(const RelStructure&)>& keep = {}) {
  std::set<std::vector<std::vector<Tuple>>> seen;
  std::vector<RelStructure> out;
  for_each_labelled(sig, n, [&](const RelStructure& a) {
    if (keep && !keep(a)) return;
    if (seen.insert(canonical_form(a)).second) out.push_back(a);
  });
  return out;
}

inline std::vector<RelStructure> iso_classes_up_to(const Signature& sig, std::size_t min_n, std::size_t max_n,
                                                   const std::function<bool(const RelStructure&)>& keep = {}) {
  std::vector<RelStructure> out;
  for (std::size_t n = min_n; n <= max_n; ++n) {
    auto c = iso_classes(sig, n, keep);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

inline bool is_simple_graph(const RelStructure& g) {
  for (const auto& t : g.tuples(0)) {
    if (t[0] == t[1] || !g.holds(0, Tuple{t[1], t[0]})) return false;
  }
  return true;
}

/// Loop-free undirected graphs, enumerated over edge subsets.
inline std::vector<RelStructure> simple_graphs(std::size_t n) {
  std::vector<std::pair<Element, Element>> pairs;
  for (Element u = 0; u < n; ++u) {
    for (Element v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  }
  std::set<std::vector<std::vector<Tuple>>> seen;
  std::vector<RelStructure> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
    RelStructure g(Signature::graph(), n);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (mask >> i & 1) g.add_symmetric("E", pairs[i].first, pairs[i].second);
    }
    if (seen.insert(canonical_form(g)).second) out.push_back(g);
  }
  return out;
}

inline std::vector<RelStructure> simple_graphs_up_to(std::size_t min_n, std::size_t max_n) {
  std::vector<RelStructure> out;
  for (std::size_t n = min_n; n <= max_n; ++n) {
    auto c = simple_graphs(n);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

inline RelStructure random_structure(std::mt19937& rng, const Signature& sig, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<std::vector<Tuple>> rels(sig.size());
  for (const auto& [s, t] : all_tuples(sig, n)) {
    if (coin(rng)) rels[s].push_back(t);
  }
  return RelStructure(sig, n, std::move(rels));
}

inline std::vector<std::vector<Element>> gaifman_pairs(const RelStructure& a) {
  std::vector<std::vector<Element>> adj(a.size());
  for (std::size_t s = 0; s < a.signature().size(); ++s) {
    for (const auto& t : a.tuples(s)) {
      for (auto x : t) {
        for (auto y : t) {
          if (x != y) adj[x].push_back(y);
        }
      }
    }
  }
  return adj;
}

/// Forest given by a parent array: ancestor test and height, or nullopt on
/// a cycle.
struct Forest {
  std::vector<int> parent;
  std::vector<int> depth;
  int height = 0;

  bool leq(Element a, Element b) const {
    for (int x = static_cast<int>(b); x >= 0; x = parent[x]) {
      if (x == static_cast<int>(a)) return true;
    }
    return false;
  }
};

inline std::optional<Forest> make_forest(const std::vector<int>& parent) {
  Forest f{parent, std::vector<int>(parent.size(), 0), 0};
  for (std::size_t a = 0; a < parent.size(); ++a) {
    int d = 0;
    for (int x = static_cast<int>(a); x >= 0; x = parent[x]) {
      if (++d > static_cast<int>(parent.size())) return std::nullopt;
    }
    f.depth[a] = d;
    f.height = std::max(f.height, d);
  }
  return f;
}

/// Every parent array on n nodes that is a forest (entries -1..n-1).
inline void for_each_forest(std::size_t n, const std::function<void(const Forest&)>& f) {
  for_each_map(n, n + 1, [&](const std::vector<Element>& m) {
    std::vector<int> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(m[i]) - 1;
    if (auto forest = make_forest(parent)) f(*forest);
  });
}

inline bool compatible(const RelStructure& a, const Forest& f) {
  const auto adj = gaifman_pairs(a);
  for (Element x = 0; x < a.size(); ++x) {
    for (auto y : adj[x]) {
      if (!f.leq(x, y) && !f.leq(y, x)) return false;
    }
  }
  return true;
}

/// Least height of a compatible forest cover, by exhausting parent arrays.
inline int tree_depth(const RelStructure& a) {
  int best = static_cast<int>(a.size());
  for_each_forest(a.size(), [&](const Forest& f) {
    if (f.height < best && compatible(a, f)) best = f.height;
  });
  return best;
}

inline bool sees(const Forest& f, const std::vector<int>& pebbles, Element a, Element b) {
  if (f.leq(b, a)) std::swap(a, b);
  if (!f.leq(a, b)) return false;
  for (int z = static_cast<int>(b); z != static_cast<int>(a); z = f.parent[z]) {
    if (pebbles[z] == pebbles[a]) return false;
  }
  return true;
}

/// Existence of a k-pebble forest cover of height <= n, by exhausting parent
/// arrays and pebblings.
inline bool has_pebble_cover(const RelStructure& a, int k, int n) {
  const auto adj = gaifman_pairs(a);
  bool found = false;
  for_each_forest(a.size(), [&](const Forest& f) {
    if (found || f.height > n || !compatible(a, f)) return;
    for_each_map(a.size(), static_cast<std::size_t>(k), [&](const std::vector<Element>& m) {
      if (found) return;
      std::vector<int> pebbles(m.begin(), m.end());
      for (Element x = 0; x < a.size(); ++x) {
        for (auto y : adj[x]) {
          if (!sees(f, pebbles, x, y)) return;
        }
      }
      found = true;
    });
  });
  return found;
}

/// Backtracking search for a coalgebra alpha: A -> C(A). Candidates for
/// alpha(a) are the plays ending in a; every proper prefix of alpha(a) ending
/// in b must equal alpha(b). The result is then confirmed by check_coalgebra.
inline std::optional<std::vector<Element>> find_coalgebra(const homlab::ComonadStructure& cs) {
  const auto& a = cs.base;
  std::vector<std::vector<Element>> candidates(a.size());
  for (Element s = 0; s < cs.plays.size(); ++s) candidates[cs.counit[s]].push_back(s);
  std::vector<std::optional<Element>> alpha(a.size());

  auto consistent = [&](Element x) {
    const Element s = *alpha[x];
    const auto len = cs.plays[s].size();
    for (std::size_t l = 1; l <= len; ++l) {
      const Element p = cs.prefix(s, l);
      const Element b = cs.counit[p];
      if (l < len && b == x) return false;
      if (alpha[b] && *alpha[b] != p) return false;
    }
    // Elements whose assigned plays pass through x.
    for (Element y = 0; y < a.size(); ++y) {
      if (!alpha[y] || y == x) continue;
      const auto ly = cs.plays[*alpha[y]].size();
      for (std::size_t l = 1; l < ly; ++l) {
        const Element p = cs.prefix(*alpha[y], l);
        if (cs.counit[p] == x && p != s) return false;
      }
    }
    return true;
  };
  std::function<bool(Element)> go = [&](Element x) {
    if (x == a.size()) {
      std::vector<Element> map;
      for (auto& v : alpha) map.push_back(*v);
      homlab::Coalgebra c{cs, homlab::Homomorphism{a, cs.carrier, map}};
      return homlab::check_coalgebra(c);
    }
    for (auto s : candidates[x]) {
      if (cs.point && x == *cs.point && cs.plays[s].size() != 1) continue;
      alpha[x] = s;
      if (consistent(x) && go(x + 1)) return true;
    }
    alpha[x].reset();
    return false;
  };
  if (!go(0)) return std::nullopt;
  std::vector<Element> out;
  for (auto& v : alpha) out.push_back(*v);
  return out;
}

/// All homomorphisms as maps, collected.
inline std::vector<std::vector<Element>> all_homs(const RelStructure& c, const RelStructure& a) {
  std::vector<std::vector<Element>> out;
  for_each_map(c.size(), a.size(), [&](const std::vector<Element>& m) {
    if (preserves(c, a, m)) out.push_back(m);
  });
  return out;
}

/// Naive bijective pebble game. `width` pebble pairs (0 means one fresh pair
/// per round), `rounds` rounds. Spoiler chooses a pebble, Duplicator a
/// bijection, Spoiler an element; placed pairs must form a partial
/// isomorphism throughout.
inline bool game_equiv(const RelStructure& a, const RelStructure& b, int rounds, int width = 0) {
  using Pos = std::vector<std::pair<int, int>>;  // (-1,-1) for an unplaced pebble
  auto partial_iso = [&](const Pos& pos) {
    std::vector<std::pair<Element, Element>> pairs;
    for (auto [x, y] : pos)
      if (x >= 0) pairs.emplace_back(x, y);
    for (auto [x1, y1] : pairs)
      for (auto [x2, y2] : pairs)
        if ((x1 == x2) != (y1 == y2)) return false;
    for (std::size_t s = 0; s < a.signature().size(); ++s) {
      const auto ar = static_cast<std::size_t>(a.signature()[s].arity);
      std::vector<std::size_t> idx(ar, 0);
      if (pairs.empty()) continue;
      while (true) {
        Tuple ta, tb;
        for (auto i : idx) {
          ta.push_back(pairs[i].first);
          tb.push_back(pairs[i].second);
        }
        if (a.holds(s, ta) != b.holds(s, tb)) return false;
        std::size_t j = 0;
        while (j < ar && ++idx[j] == pairs.size()) idx[j++] = 0;
        if (j == ar) break;
      }
    }
    return true;
  };
  std::map<std::pair<Pos, int>, bool> memo;
  std::function<bool(const Pos&, int)> win = [&](const Pos& pos, int left) -> bool {
    if (!partial_iso(pos)) return false;
    if (left == 0) return true;
    if (a.size() != b.size()) return false;
    auto key = std::make_pair(pos, left);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const int slots = width == 0 ? 1 : width;
    bool ok = true;
    for (int i = 0; i < slots && ok; ++i) {
      std::vector<Element> f(a.size());
      std::iota(f.begin(), f.end(), 0);
      bool found = false;
      do {
        bool all = true;
        for (Element x = 0; x < a.size() && all; ++x) {
          Pos next = pos;
          if (width == 0) next.emplace_back(x, f[x]);
          else next[i] = {static_cast<int>(x), static_cast<int>(f[x])};
          all = win(next, left - 1);
        }
        found = all;
      } while (!found && std::next_permutation(f.begin(), f.end()));
      ok = found;
    }
    memo[key] = ok;
    return ok;
  };
  return win(width == 0 ? Pos{} : Pos(width, {-1, -1}), rounds);
}

}  // namespace oracle
