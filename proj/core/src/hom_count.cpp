#include "homlab/hom_count.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <unordered_set>

#include "homlab/constructions.hpp"
#include "homlab/error.hpp"

namespace homlab {

namespace {

/// Membership test for one relation of the target.
class TupleSet {
 public:
  TupleSet(const std::vector<Tuple>& tuples, std::size_t n, int arity) : tuples_(&tuples), n_(n) {
    double cells = 1;
    for (int i = 0; i < arity; ++i) cells *= static_cast<double>(n);
    if (cells <= double(1 << 22)) {
      dense_.assign(static_cast<std::size_t>(cells), false);
      for (const auto& t : tuples) dense_[encode(t.data(), t.size())] = true;
      mode_ = Mode::kDense;
    } else if (cells < 1.8e19) {
      for (const auto& t : tuples) hashed_.insert(encode(t.data(), t.size()));
      mode_ = Mode::kHashed;
    }
  }

  bool contains(const Element* t, std::size_t len) const {
    switch (mode_) {
      case Mode::kDense: return dense_[encode(t, len)];
      case Mode::kHashed: return hashed_.contains(encode(t, len));
      case Mode::kSorted: break;
    }
    return std::binary_search(tuples_->begin(), tuples_->end(), std::vector<Element>(t, t + len));
  }

 private:
  enum class Mode { kDense, kHashed, kSorted };

  std::uint64_t encode(const Element* t, std::size_t len) const {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < len; ++i) code = code * n_ + t[i];
    return code;
  }

  const std::vector<Tuple>* tuples_;
  std::size_t n_;
  Mode mode_ = Mode::kSorted;
  std::vector<bool> dense_;
  std::unordered_set<std::uint64_t> hashed_;
};

struct TargetIndex {
  explicit TargetIndex(const RelStructure& t) : target(t) {
    const auto& sig = t.signature();
    out.resize(sig.size());
    in.resize(sig.size());
    for (std::size_t s = 0; s < sig.size(); ++s) {
      sets.emplace_back(t.tuples(s), t.size(), sig[s].arity);
      if (sig[s].arity == 2) {
        out[s].resize(t.size());
        in[s].resize(t.size());
        for (const auto& tu : t.tuples(s)) {
          out[s][tu[0]].push_back(tu[1]);
          in[s][tu[1]].push_back(tu[0]);
        }
      }
    }
  }

  const RelStructure& target;
  std::vector<TupleSet> sets;
  std::vector<std::vector<std::vector<Element>>> out, in;
};

enum class Mode { kHom, kEmbedding };

/// Backtracking over source elements in a fixed order.
class Search {
 public:
  Search(const RelStructure& source, const TargetIndex& index, std::vector<Element> order,
         std::vector<std::optional<Element>> fixed, Mode mode)
      : source_(source), index_(index), order_(std::move(order)), fixed_(std::move(fixed)), mode_(mode) {
    const std::size_t n = source.size();
    position_.assign(n, -1);
    for (std::size_t i = 0; i < order_.size(); ++i) position_[order_[i]] = static_cast<int>(i);
    checks_.resize(order_.size());
    hints_.resize(order_.size());
    if (mode_ == Mode::kHom) {
      for (std::size_t s = 0; s < source.signature().size(); ++s) {
        for (const auto& t : source.tuples(s)) {
          int last = -1;
          for (auto e : t) last = std::max(last, position_[e]);
          if (position_[t[0]] < 0) continue;  // another component
          checks_[last].push_back({s, t, true});
        }
      }
    } else {
      for (std::size_t i = 0; i < order_.size(); ++i) add_embedding_checks(i);
    }
    for (std::size_t i = 0; i < order_.size(); ++i) {
      for (const auto& c : checks_[i]) {
        if (!c.expected || c.tuple.size() != 2 || c.tuple[0] == c.tuple[1]) continue;
        Element me = order_[i];
        if (c.tuple[1] == me && position_[c.tuple[0]] < static_cast<int>(i)) {
          hints_[i] = Hint{c.symbol, c.tuple[0], true};
          break;
        }
        if (c.tuple[0] == me && position_[c.tuple[1]] < static_cast<int>(i)) {
          hints_[i] = Hint{c.symbol, c.tuple[1], false};
          break;
        }
      }
    }
    value_.assign(n, 0);
    used_.assign(index_.target.size(), false);
  }

  Count count() {
    Count total = 0;
    run(0, [&] {
      total = checked_add(total, 1);
      return true;
    });
    return total;
  }

  template <typename Leaf>
  bool run(std::size_t i, Leaf&& leaf) {
    if (i == order_.size()) return leaf();
    const Element me = order_[i];
    auto try_value = [&](Element b) -> bool {
      if (mode_ == Mode::kEmbedding && used_[b]) return true;
      value_[me] = b;
      if (!consistent(i)) return true;
      if (mode_ == Mode::kEmbedding) used_[b] = true;
      bool go_on = run(i + 1, leaf);
      if (mode_ == Mode::kEmbedding) used_[b] = false;
      return go_on;
    };
    if (fixed_[me]) return try_value(*fixed_[me]);
    if (hints_[i]) {
      const auto& h = *hints_[i];
      const auto& list = h.forward ? index_.out[h.symbol][value_[h.other]] : index_.in[h.symbol][value_[h.other]];
      for (auto b : list) {
        if (!try_value(b)) return false;
      }
      return true;
    }
    for (Element b = 0; b < index_.target.size(); ++b) {
      if (!try_value(b)) return false;
    }
    return true;
  }

  const std::vector<Element>& values() const { return value_; }

 private:
  struct Check {
    std::size_t symbol;
    Tuple tuple;
    bool expected;
  };
  struct Hint {
    std::size_t symbol;
    Element other;
    bool forward;  // candidates are successors of other's image
  };

  void add_embedding_checks(std::size_t i) {
    // All tuples over the first i+1 elements of the order that use order_[i].
    for (std::size_t s = 0; s < source_.signature().size(); ++s) {
      const int arity = source_.signature()[s].arity;
      Tuple idx(static_cast<std::size_t>(arity), 0);
      while (true) {
        bool uses_me = std::find(idx.begin(), idx.end(), static_cast<Element>(i)) != idx.end();
        if (uses_me) {
          Tuple t(idx.size());
          for (std::size_t j = 0; j < idx.size(); ++j) t[j] = order_[idx[j]];
          bool expected = source_.holds(s, t);
          checks_[i].push_back({s, std::move(t), expected});
        }
        int j = arity - 1;
        while (j >= 0 && idx[j] == i) idx[j--] = 0;
        if (j < 0) break;
        ++idx[j];
      }
    }
  }

  bool consistent(std::size_t i) {
    for (const auto& c : checks_[i]) {
      scratch_.resize(c.tuple.size());
      for (std::size_t j = 0; j < c.tuple.size(); ++j) scratch_[j] = value_[c.tuple[j]];
      if (index_.sets[c.symbol].contains(scratch_.data(), scratch_.size()) != c.expected) return false;
    }
    return true;
  }

  const RelStructure& source_;
  const TargetIndex& index_;
  std::vector<Element> order_;
  std::vector<std::optional<Element>> fixed_;
  Mode mode_;
  std::vector<int> position_;
  std::vector<std::vector<Check>> checks_;
  std::vector<std::optional<Hint>> hints_;
  std::vector<Element> value_;
  std::vector<bool> used_;
  Tuple scratch_;
};

/// Connectivity-aware order: pinned elements first, then repeatedly the
/// element with most already-ordered neighbours (ties: degree, then index).
std::vector<Element> search_order(const RelStructure& source, const std::vector<Element>& elements,
                                  const std::vector<std::optional<Element>>& fixed) {
  auto adj = gaifman_adjacency(source);
  std::vector<Element> order;
  std::vector<bool> placed(source.size(), false);
  std::vector<int> placed_neighbours(source.size(), 0);
  auto place = [&](Element x) {
    order.push_back(x);
    placed[x] = true;
    for (auto y : adj[x]) ++placed_neighbours[y];
  };
  for (auto x : elements) {
    if (fixed[x]) place(x);
  }
  while (order.size() < elements.size()) {
    std::optional<Element> best;
    for (auto x : elements) {
      if (placed[x]) continue;
      if (!best || placed_neighbours[x] > placed_neighbours[*best] ||
          (placed_neighbours[x] == placed_neighbours[*best] && adj[x].size() > adj[*best].size())) {
        best = x;
      }
    }
    place(*best);
  }
  return order;
}

Count count_by_components(const RelStructure& source, const RelStructure& target,
                          const std::vector<std::optional<Element>>& fixed) {
  require_same_signature(source, target, "hom_count");
  TargetIndex index(target);
  Count total = 1;
  for (const auto& comp : gaifman_components(source)) {
    auto order = search_order(source, comp, fixed);
    Search search(source, index, order, fixed, Mode::kHom);
    Count c = search.count();
    if (c == 0) return 0;
    total = checked_mul(total, c);
  }
  return total;
}

/// Returns the parent/label of each element if the pointed source is a
/// synchronization tree: every non-root element has exactly one incoming
/// binary tuple, the root none, and everything is reachable.
struct TreeShape {
  std::vector<std::vector<std::pair<std::size_t, Element>>> children;  // (symbol, child)
};

std::optional<TreeShape> as_tree(const PointedStructure& p) {
  const auto& s = p.structure;
  std::vector<int> incoming(s.size(), 0);
  TreeShape shape;
  shape.children.resize(s.size());
  for (std::size_t sym = 0; sym < s.signature().size(); ++sym) {
    if (s.signature()[sym].arity != 2) continue;
    for (const auto& t : s.tuples(sym)) {
      ++incoming[t[1]];
      shape.children[t[0]].emplace_back(sym, t[1]);
    }
  }
  if (incoming[p.point] != 0) return std::nullopt;
  for (Element x = 0; x < s.size(); ++x) {
    if (x != p.point && incoming[x] != 1) return std::nullopt;
  }
  std::vector<Element> stack{p.point};
  std::size_t seen = 0;
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    ++seen;
    for (auto [sym, c] : shape.children[x]) stack.push_back(c);
    if (seen > s.size()) return std::nullopt;
  }
  if (seen != s.size()) return std::nullopt;
  return shape;
}

Count tree_pointed_count(const PointedStructure& source, const TreeShape& shape, const PointedStructure& target) {
  const auto& s = source.structure;
  const auto& t = target.structure;
  TargetIndex index(t);
  std::vector<std::size_t> unary;
  for (std::size_t sym = 0; sym < s.signature().size(); ++sym) {
    if (s.signature()[sym].arity == 1) unary.push_back(sym);
  }
  auto count = [&](auto&& self, Element node, Element image) -> Count {
    for (auto sym : unary) {
      if (s.holds(sym, Tuple{node}) && !t.holds(sym, Tuple{image})) return 0;
    }
    Count product = 1;
    for (auto [sym, child] : shape.children[node]) {
      Count sum = 0;
      for (auto next : index.out[sym][image]) sum = checked_add(sum, self(self, child, next));
      if (sum == 0) return 0;
      product = checked_mul(product, sum);
    }
    return product;
  };
  return count(count, source.point, target.point);
}

}  // namespace

Count hom_count(const RelStructure& source, const RelStructure& target) {
  return count_by_components(source, target, std::vector<std::optional<Element>>(source.size()));
}

Count strong_emb_count(const RelStructure& source, const RelStructure& target) {
  require_same_signature(source, target, "strong_emb_count");
  if (source.size() > target.size()) return 0;
  TargetIndex index(target);
  std::vector<Element> all(source.size());
  for (Element x = 0; x < source.size(); ++x) all[x] = x;
  std::vector<std::optional<Element>> fixed(source.size());
  Search search(source, index, search_order(source, all, fixed), fixed, Mode::kEmbedding);
  return search.count();
}

Count pointed_hom_count(const PointedStructure& source, const PointedStructure& target) {
  require_same_signature(source.structure, target.structure, "pointed_hom_count");
  if (auto shape = as_tree(source)) return tree_pointed_count(source, *shape, target);
  std::vector<std::optional<Element>> fixed(source.structure.size());
  fixed[source.point] = target.point;
  return count_by_components(source.structure, target.structure, fixed);
}

void for_each_hom(const RelStructure& source, const RelStructure& target,
                  const std::function<bool(const std::vector<Element>&)>& visit) {
  require_same_signature(source, target, "for_each_hom");
  TargetIndex index(target);
  std::vector<Element> order(source.size());
  for (Element x = 0; x < source.size(); ++x) order[x] = x;
  std::vector<std::optional<Element>> fixed(source.size());
  Search search(source, index, order, fixed, Mode::kHom);
  search.run(0, [&] { return visit(search.values()); });
}

Count hom_count_treedec(const RelStructure& source, const PebbleForestCover& cover,
                        const RelStructure& target) {
  require_same_signature(source, target, "hom_count_treedec");
  const auto& forest = cover.cover;
  if (!validate_pebble_cover(source, cover, cover.k, forest.height)) {
    throw PreconditionViolation("hom_count_treedec: invalid pebble forest cover");
  }
  const std::size_t n = source.size();
  TargetIndex index(target);

  std::vector<std::vector<Element>> children(n);
  std::vector<Element> roots;
  for (Element x = 0; x < n; ++x) {
    if (forest.parent[x] == kNoParent) roots.push_back(x);
    else children[forest.parent[x]].push_back(x);
  }

  // live_in[x]: elements still holding their pebble just above x.
  std::vector<std::vector<Element>> live_in(n), live_at(n);
  auto fill = [&](auto&& self, Element x, const std::vector<Element>& above) -> void {
    live_in[x] = above;
    live_at[x].push_back(x);
    for (auto y : above) {
      if (cover.pebbles[y] != cover.pebbles[x]) live_at[x].push_back(y);
    }
    for (auto c : children[x]) self(self, c, live_at[x]);
  };
  for (auto r : roots) fill(fill, r, {});

  // Each tuple is checked at its deepest element.
  struct Check {
    std::size_t symbol;
    const Tuple* tuple;
  };
  std::vector<std::vector<Check>> checks(n);
  for (std::size_t s = 0; s < source.signature().size(); ++s) {
    for (const auto& t : source.tuples(s)) {
      Element deepest = t[0];
      for (auto e : t) {
        if (forest.leq(deepest, e)) deepest = e;
      }
      checks[deepest].push_back({s, &t});
    }
  }

  std::vector<Element> value(n, 0);
  std::vector<std::map<std::vector<Element>, Count>> memo(n);
  Tuple scratch;
  auto solve = [&](auto&& self, Element x) -> Count {
    std::vector<Element> key;
    key.reserve(live_in[x].size());
    for (auto y : live_in[x]) key.push_back(value[y]);
    if (auto it = memo[x].find(key); it != memo[x].end()) return it->second;
    Count total = 0;
    for (Element b = 0; b < target.size(); ++b) {
      value[x] = b;
      bool ok = true;
      for (const auto& c : checks[x]) {
        scratch.resize(c.tuple->size());
        for (std::size_t i = 0; i < scratch.size(); ++i) scratch[i] = value[(*c.tuple)[i]];
        if (!index.sets[c.symbol].contains(scratch.data(), scratch.size())) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      Count product = 1;
      for (auto c : children[x]) {
        Count sub = self(self, c);
        if (sub == 0) {
          product = 0;
          break;
        }
        product = checked_mul(product, sub);
      }
      total = checked_add(total, product);
    }
    memo[x].emplace(std::move(key), total);
    return total;
  };

  Count total = 1;
  for (auto r : roots) {
    Count c = solve(solve, r);
    if (c == 0) return 0;
    total = checked_mul(total, c);
  }
  return total;
}

}  // namespace homlab
