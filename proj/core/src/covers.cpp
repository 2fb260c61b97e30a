#include "homlab/covers.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "homlab/constructions.hpp"
#include "homlab/error.hpp"

namespace homlab {

namespace {

using Mask = std::uint32_t;
constexpr std::size_t kMaxMaskSize = 30;

std::vector<Mask> adjacency_masks(const RelStructure& a) {
  auto adj = gaifman_adjacency(a);
  std::vector<Mask> masks(a.size(), 0);
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (auto y : adj[x]) masks[x] |= Mask{1} << y;
  }
  return masks;
}

std::vector<Mask> components(Mask set, const std::vector<Mask>& adj) {
  std::vector<Mask> out;
  while (set != 0) {
    Mask comp = set & (~set + 1);
    Mask frontier = comp;
    while (frontier != 0) {
      Mask next = 0;
      for (Mask f = frontier; f != 0; f &= f - 1) next |= adj[std::countr_zero(f)];
      next &= set & ~comp;
      comp |= next;
      frontier = next;
    }
    out.push_back(comp);
    set &= ~comp;
  }
  return out;
}

Mask neighbourhood(Mask set, const std::vector<Mask>& adj) {
  Mask n = 0;
  for (Mask s = set; s != 0; s &= s - 1) n |= adj[std::countr_zero(s)];
  return n & ~set;
}

void check_cap(const RelStructure& a, const CoverLimits& limits, const char* what) {
  if (a.size() > limits.max_size || a.size() > kMaxMaskSize) {
    throw CapExceeded(std::string(what) + ": structure larger than cap");
  }
}

bool parent_array_ok(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size());
  for (int x = 0; x < n; ++x) {
    if (parent[x] < kNoParent || parent[x] >= n) return false;
    int steps = 0;
    for (int y = x; y != kNoParent; y = parent[y]) {
      if (++steps > n) return false;
    }
  }
  return true;
}

}  // namespace

ForestCover ForestCover::make(RelStructure base, std::vector<int> parent) {
  if (parent.size() != base.size()) throw MalformedInput("parent array length differs from universe size");
  if (!parent_array_ok(parent)) throw MalformedInput("parent array is not a forest");
  ForestCover cover{std::move(base), std::move(parent), 0};
  for (Element x = 0; x < cover.size(); ++x) cover.height = std::max(cover.height, cover.depth(x));
  return cover;
}

int ForestCover::depth(Element a) const {
  int d = 0;
  for (int y = static_cast<int>(a); y != kNoParent; y = parent[y]) ++d;
  return d;
}

bool ForestCover::leq(Element a, Element b) const {
  for (int y = static_cast<int>(b); y != kNoParent; y = parent[y]) {
    if (y == static_cast<int>(a)) return true;
  }
  return false;
}

std::vector<Element> ForestCover::root_path(Element a) const {
  std::vector<Element> path;
  for (int y = static_cast<int>(a); y != kNoParent; y = parent[y]) path.push_back(static_cast<Element>(y));
  std::reverse(path.begin(), path.end());
  return path;
}

bool validate_forest_cover(const RelStructure& a, const ForestCover& cover, int max_height) {
  if (cover.parent.size() != a.size() || !parent_array_ok(cover.parent)) return false;
  for (Element x = 0; x < a.size(); ++x) {
    if (cover.depth(x) > max_height) return false;
  }
  auto adj = gaifman_adjacency(a);
  for (Element x = 0; x < a.size(); ++x) {
    for (auto y : adj[x]) {
      if (!cover.comparable(x, y)) return false;
    }
  }
  return true;
}

bool sees(const PebbleForestCover& cover, Element a, Element b) {
  const auto& f = cover.cover;
  Element lo = a, hi = b;
  if (f.leq(b, a)) std::swap(lo, hi);
  else if (!f.leq(a, b)) return false;
  for (int z = static_cast<int>(hi); z != static_cast<int>(lo); z = f.parent[z]) {
    if (cover.pebbles[z] == cover.pebbles[lo]) return false;
  }
  return true;
}

bool validate_pebble_cover(const RelStructure& a, const PebbleForestCover& cover, int k, int n) {
  const auto& f = cover.cover;
  if (f.parent.size() != a.size() || cover.pebbles.size() != a.size()) return false;
  if (!parent_array_ok(f.parent)) return false;
  for (Element x = 0; x < a.size(); ++x) {
    if (f.depth(x) > n) return false;
    if (cover.pebbles[x] < 1 || cover.pebbles[x] > k) return false;
  }
  auto adj = gaifman_adjacency(a);
  for (Element x = 0; x < a.size(); ++x) {
    for (auto y : adj[x]) {
      if (x < y && !sees(cover, x, y)) return false;
    }
  }
  return true;
}

TreeDepth compute_tree_depth(const RelStructure& a, CoverLimits limits) {
  check_cap(a, limits, "compute_tree_depth");
  const auto adj = adjacency_masks(a);
  // For connected sets: (tree-depth, chosen root).
  std::unordered_map<Mask, std::pair<int, int>> memo;

  auto td = [&](auto&& self, Mask set) -> int {
    if (set == 0) return 0;
    auto comps = components(set, adj);
    if (comps.size() > 1) {
      int worst = 0;
      for (auto c : comps) worst = std::max(worst, self(self, c));
      return worst;
    }
    if (auto it = memo.find(set); it != memo.end()) return it->second.first;
    int best = std::numeric_limits<int>::max();
    int root = -1;
    const int size = std::popcount(set);
    for (Mask s = set; s != 0; s &= s - 1) {
      int v = std::countr_zero(s);
      int d = 1 + self(self, set & ~(Mask{1} << v));
      if (d < best) {
        best = d;
        root = v;
        if (best == 1 || (best == 2 && size > 1)) break;
      }
    }
    memo[set] = {best, root};
    return best;
  };

  const Mask all = a.size() == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << a.size()) - 1);
  const int depth = td(td, all);

  std::vector<int> parent(a.size(), kNoParent);
  auto build = [&](auto&& self, Mask set, int above) -> void {
    for (auto c : components(set, adj)) {
      td(td, c);
      int root = memo.at(c).second;
      parent[root] = above;
      self(self, c & ~(Mask{1} << root), root);
    }
  };
  build(build, all, kNoParent);
  return {depth, ForestCover::make(a, std::move(parent))};
}

std::optional<PebbleForestCover> find_pebble_forest_cover(const RelStructure& a, int k,
                                                          std::optional<int> max_height,
                                                          CoverLimits limits) {
  check_cap(a, limits, "find_pebble_forest_cover");
  if (k < 1) throw PreconditionViolation("find_pebble_forest_cover: k must be positive");
  const auto adj = adjacency_masks(a);
  const int n = static_cast<int>(a.size());
  const int height = max_height ? std::min(*max_height, n) : n;
  if (height < 0) return std::nullopt;

  // feasible(S, h) for Gaifman-connected S: S can be placed as one subtree
  // of height <= h below ancestors N(S), which all stay visible.
  std::unordered_map<std::uint64_t, int> memo;  // key -> chosen root, or -1
  auto key = [](Mask s, int h) { return (std::uint64_t{s} << 6) | static_cast<std::uint64_t>(h); };

  auto feasible = [&](auto&& self, Mask set, int h) -> bool {
    if (set == 0) return true;
    if (h <= 0) return false;
    auto k_set = key(set, h);
    if (auto it = memo.find(k_set); it != memo.end()) return it->second >= 0;
    int chosen = -1;
    if (std::popcount(neighbourhood(set, adj)) <= k - 1) {
      for (Mask s = set; s != 0 && chosen < 0; s &= s - 1) {
        int v = std::countr_zero(s);
        bool ok = true;
        for (auto c : components(set & ~(Mask{1} << v), adj)) {
          if (!self(self, c, h - 1)) {
            ok = false;
            break;
          }
        }
        if (ok) chosen = v;
      }
    }
    memo[k_set] = chosen;
    return chosen >= 0;
  };

  const Mask all = n == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << n) - 1);
  for (auto c : components(all, adj)) {
    if (!feasible(feasible, c, height)) return std::nullopt;
  }

  std::vector<int> parent(a.size(), kNoParent);
  std::vector<int> pebbles(a.size(), 0);
  auto build = [&](auto&& self, Mask set, int h, int above) -> void {
    for (auto c : components(set, adj)) {
      int v = memo.at(key(c, h));
      parent[v] = above;
      std::vector<bool> taken(static_cast<std::size_t>(k) + 1, false);
      for (Mask nb = neighbourhood(c, adj); nb != 0; nb &= nb - 1) taken[pebbles[std::countr_zero(nb)]] = true;
      int p = 1;
      while (taken[p]) ++p;
      pebbles[v] = p;
      self(self, c & ~(Mask{1} << v), h - 1, v);
    }
  };
  build(build, all, height, kNoParent);
  return PebbleForestCover{ForestCover::make(a, std::move(parent)), std::move(pebbles), k};
}

int tree_width(const RelStructure& a, CoverLimits limits) {
  for (int k = 1;; ++k) {
    if (find_pebble_forest_cover(a, k, std::nullopt, limits)) return k - 1;
  }
}

ForestCover quotient_forest_cover(const RelStructure& d, const ForestCover& cover) {
  if (!validate_forest_cover(d, cover, cover.height)) {
    throw PreconditionViolation("quotient_forest_cover: invalid forest cover");
  }
  auto collapse = functor_H(d);
  const std::size_t classes = collapse.structure.size();
  std::vector<int> rep(classes, -1);
  for (Element x = 0; x < d.size(); ++x) {
    int& r = rep[collapse.quotient_map[x]];
    if (r < 0 || cover.depth(x) < cover.depth(static_cast<Element>(r))) r = static_cast<int>(x);
  }
  for (Element x = 0; x < d.size(); ++x) {
    if (!cover.leq(static_cast<Element>(rep[collapse.quotient_map[x]]), x)) {
      throw PreconditionViolation("quotient_forest_cover: equivalence class has no least element");
    }
  }
  std::vector<int> class_of_rep(d.size(), -1);
  for (std::size_t c = 0; c < classes; ++c) class_of_rep[rep[c]] = static_cast<int>(c);
  std::vector<int> parent(classes, kNoParent);
  for (std::size_t c = 0; c < classes; ++c) {
    for (int z = cover.parent[rep[c]]; z != kNoParent; z = cover.parent[z]) {
      if (class_of_rep[z] >= 0) {
        parent[c] = class_of_rep[z];
        break;
      }
    }
  }
  return ForestCover::make(std::move(collapse.structure), std::move(parent));
}

OneStepQuotient one_step_quotient(const RelStructure& a, const PebbleForestCover& cover, Element u,
                                  Element v) {
  if (!a.signature().has_equality_witness()) {
    throw PreconditionViolation("one_step_quotient: signature has no binary symbol I");
  }
  const auto& f = cover.cover;
  if (!validate_pebble_cover(a, cover, cover.k, f.height)) {
    throw PreconditionViolation("one_step_quotient: invalid pebble forest cover");
  }
  if (u >= a.size() || v >= a.size() || u == v) {
    throw PreconditionViolation("one_step_quotient: need two distinct elements");
  }
  const auto eq = a.signature().index_of(kEqualitySymbol);
  if (!a.holds(eq, Tuple{u, v}) && !a.holds(eq, Tuple{v, u})) {
    throw PreconditionViolation("one_step_quotient: (u,v) is not in I");
  }
  if (!f.leq(u, v)) throw PreconditionViolation("one_step_quotient: u must lie strictly below v");

  const auto& p = cover.pebbles;
  std::vector<int> new_pebbles;
  new_pebbles.reserve(a.size() - 1);
  for (Element w = 0; w < a.size(); ++w) {
    if (w == v) continue;
    int pw = p[w];
    if (f.leq(v, w)) {
      // Closest element above v on the path to w carrying w's pebble.
      Element w_min = w;
      for (int z = static_cast<int>(w); z != static_cast<int>(v); z = f.parent[z]) {
        if (p[z] == p[w]) w_min = static_cast<Element>(z);
      }
      if (p[w] == p[v] && !sees(cover, u, w_min)) pw = p[u];
      else if (p[w] == p[u] && sees(cover, v, w_min)) pw = p[v];
    }
    new_pebbles.push_back(pw);
  }

  std::vector<Element> old_to_new(a.size());
  for (Element x = 0; x < a.size(); ++x) old_to_new[x] = x < v ? x : x - 1;
  old_to_new[v] = old_to_new[u];

  std::vector<int> new_parent;
  new_parent.reserve(a.size() - 1);
  for (Element w = 0; w < a.size(); ++w) {
    if (w == v) continue;
    int q = f.parent[w];
    if (q == static_cast<int>(v)) q = f.parent[v];
    new_parent.push_back(q == kNoParent ? kNoParent : static_cast<int>(old_to_new[q]));
  }

  RelStructure quotient = pushforward(a, old_to_new, a.size() - 1);
  PebbleForestCover new_cover{ForestCover::make(quotient, std::move(new_parent)), std::move(new_pebbles),
                              cover.k};
  return {std::move(quotient), std::move(new_cover), std::move(old_to_new)};
}

Elimination eliminate_equalities(const RelStructure& a, const PebbleForestCover& cover) {
  if (!a.signature().has_equality_witness()) {
    throw PreconditionViolation("eliminate_equalities: signature has no binary symbol I");
  }
  RelStructure current = a;
  PebbleForestCover current_cover = cover;
  std::vector<Element> map(a.size());
  for (Element x = 0; x < a.size(); ++x) map[x] = x;
  int steps = 0;
  const auto eq = a.signature().index_of(kEqualitySymbol);

  while (true) {
    std::optional<std::pair<Element, Element>> pick;
    for (const auto& t : current.tuples(eq)) {
      if (t[0] == t[1]) continue;
      Element u = t[0], w = t[1];
      if (current_cover.cover.leq(w, u)) std::swap(u, w);
      else if (!current_cover.cover.leq(u, w)) {
        throw PreconditionViolation("eliminate_equalities: I relates incomparable elements");
      }
      if (!pick || std::pair{u, w} < *pick) pick = std::pair{u, w};
    }
    if (!pick) break;
    auto step = one_step_quotient(current, current_cover, pick->first, pick->second);
    for (auto& m : map) m = step.old_to_new[m];
    current = std::move(step.structure);
    current_cover = std::move(step.cover);
    ++steps;
  }

  RelStructure reduct = drop_symbol(current, kEqualitySymbol);
  current_cover.cover.base = reduct;
  return {std::move(reduct), std::move(current_cover), std::move(map), steps};
}

}  // namespace homlab
