#include "homlab/equivalence.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_map>

#include "homlab/error.hpp"

namespace homlab {

namespace {

int slots_for(std::optional<int> depth, std::optional<int> width) {
  if (depth && *depth < 0) throw PreconditionViolation("depth must be non-negative");
  if (width && *width < 1) throw PreconditionViolation("width must be at least 1");
  if (!depth && !width) throw PreconditionViolation("unbounded depth needs a width");
  // Depth-n formulas never need more than n variables.
  return width ? *width : *depth;
}

void check_inputs(const RelStructure& a, const RelStructure& b, const GameLimits& limits, const char* what) {
  require_same_signature(a, b, what);
  if (a.size() > limits.max_size || b.size() > limits.max_size) {
    throw CapExceeded(std::string(what) + ": structure larger than cap");
  }
}

/// Whether the pebbled pairs form a partial isomorphism (atomic types agree).
bool partial_iso(const RelStructure& a, const RelStructure& b, const std::vector<std::pair<Element, Element>>& pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      if ((pairs[i].first == pairs[j].first) != (pairs[i].second == pairs[j].second)) return false;
    }
  }
  Tuple ta, tb;
  for (std::size_t sym = 0; sym < a.signature().size(); ++sym) {
    const auto arity = static_cast<std::size_t>(a.signature()[sym].arity);
    std::vector<std::size_t> idx(arity, 0);
    ta.resize(arity);
    tb.resize(arity);
    if (pairs.empty()) continue;
    while (true) {
      for (std::size_t j = 0; j < arity; ++j) {
        ta[j] = pairs[idx[j]].first;
        tb[j] = pairs[idx[j]].second;
      }
      if (a.holds(sym, ta) != b.holds(sym, tb)) return false;
      std::size_t j = arity;
      while (j > 0 && idx[j - 1] + 1 == pairs.size()) idx[--j] = 0;
      if (j == 0) break;
      ++idx[j - 1];
    }
  }
  return true;
}

/// Perfect matching in a bipartite graph given as an n x n 0/1 matrix.
bool has_perfect_matching(const std::vector<char>& edge, std::size_t n) {
  std::vector<int> match_b(n, -1);
  std::vector<char> seen(n);
  auto augment = [&](auto&& self, std::size_t x) -> bool {
    for (std::size_t y = 0; y < n; ++y) {
      if (!edge[x * n + y] || seen[y]) continue;
      seen[y] = 1;
      if (match_b[y] < 0 || self(self, static_cast<std::size_t>(match_b[y]))) {
        match_b[y] = static_cast<int>(x);
        return true;
      }
    }
    return false;
  };
  for (std::size_t x = 0; x < n; ++x) {
    std::fill(seen.begin(), seen.end(), 0);
    if (!augment(augment, x)) return false;
  }
  return true;
}

/// Positions of the bijective k-pebble game between a and b: sets of at most
/// k pebbled pairs forming a partial isomorphism.
class PebbleGame {
 public:
  PebbleGame(const RelStructure& a, const RelStructure& b, int k, const GameLimits& limits)
      : a_(a), b_(b), n_(a.size()), k_(static_cast<std::size_t>(k)) {
    base_ = n_ * n_ + 1;
    double bound = 1;
    for (std::size_t i = 0; i < k_; ++i) bound *= static_cast<double>(base_);
    if (bound > 9e18) throw CapExceeded("equiv_counting: too many pebbles for this size");
    std::vector<std::pair<Element, Element>> current;
    enumerate(0, current, limits);
    // Extension table: position index x pair code -> index of position plus pair.
    if (positions_.size() * n_ * n_ > 40000000) throw CapExceeded("equiv_counting: game too large");
    extend_.assign(positions_.size() * n_ * n_, -1);
    for (std::size_t p = 0; p < positions_.size(); ++p) {
      for (std::size_t code = 0; code < n_ * n_; ++code) {
        auto set = positions_[p];
        if (std::find(set.begin(), set.end(), code) == set.end()) {
          set.insert(std::upper_bound(set.begin(), set.end(), code), code);
        }
        if (set.size() > k_) continue;
        auto it = index_.find(encode(set));
        if (it != index_.end()) extend_[p * n_ * n_ + code] = it->second;
      }
    }
    // Spoiler's choices: keep every pebble (if one is free) or lift one.
    choices_.resize(positions_.size());
    for (std::size_t p = 0; p < positions_.size(); ++p) {
      const auto& set = positions_[p];
      if (set.size() < k_) choices_[p].push_back(static_cast<int>(p));
      for (std::size_t i = 0; i < set.size(); ++i) {
        auto smaller = set;
        smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(i));
        choices_[p].push_back(index_.at(encode(smaller)));
      }
    }
  }

  /// Duplicator wins `rounds` rounds from the empty position (nullopt: forever).
  bool duplicator_wins(std::optional<int> rounds) {
    std::vector<char> win(positions_.size(), 1), ok(positions_.size());
    std::vector<char> edges(n_ * n_);
    for (int r = 0; !rounds || r < *rounds; ++r) {
      // ok[q]: from q with a pebble in hand, Duplicator has a good bijection.
      for (std::size_t q = 0; q < positions_.size(); ++q) {
        for (std::size_t code = 0; code < n_ * n_; ++code) {
          const int next = extend_[q * n_ * n_ + code];
          edges[code] = next >= 0 && win[static_cast<std::size_t>(next)];
        }
        ok[q] = has_perfect_matching(edges, n_);
      }
      bool changed = false;
      for (std::size_t p = 0; p < positions_.size(); ++p) {
        if (!win[p]) continue;
        for (int q : choices_[p]) {
          if (!ok[static_cast<std::size_t>(q)]) {
            win[p] = 0;
            changed = true;
            break;
          }
        }
      }
      if (!win[0]) return false;
      if (!changed) return true;
    }
    return win[0] != 0;
  }

 private:
  std::uint64_t encode(const std::vector<std::size_t>& set) const {
    std::uint64_t code = 0;
    for (auto c : set) code = code * base_ + c + 1;
    return code;
  }

  void enumerate(std::size_t from, std::vector<std::pair<Element, Element>>& current, const GameLimits& limits) {
    std::vector<std::size_t> set;
    for (auto [x, y] : current) set.push_back(x * n_ + y);
    index_.emplace(encode(set), static_cast<int>(positions_.size()));
    positions_.push_back(set);
    if (positions_.size() > limits.max_positions) throw CapExceeded("equiv_counting: too many positions");
    if (current.size() == k_) return;
    for (std::size_t code = from; code < n_ * n_; ++code) {
      current.emplace_back(static_cast<Element>(code / n_), static_cast<Element>(code % n_));
      if (partial_iso(a_, b_, current)) enumerate(code + 1, current, limits);
      current.pop_back();
    }
  }

  const RelStructure& a_;
  const RelStructure& b_;
  std::size_t n_, k_, base_;
  std::vector<std::vector<std::size_t>> positions_;  // sorted pair codes; index 0 is empty
  std::unordered_map<std::uint64_t, int> index_;
  std::vector<int> extend_;
  std::vector<std::vector<int>> choices_;
};

/// Types of k-slot assignments in two structures, refined round by round
/// through one shared dictionary. A slot value of -1 is empty.
class SlotTypes {
 public:
  SlotTypes(const RelStructure& a, const RelStructure& b, int k, std::optional<int> depth)
      : k_(static_cast<std::size_t>(k)) {
    structs_[0] = &a;
    structs_[1] = &b;
    for (int s = 0; s < 2; ++s) {
      count_[s] = 1;
      for (std::size_t i = 0; i < k_; ++i) count_[s] *= structs_[s]->size() + 1;
      if (count_[s] > 2000000) throw CapExceeded("distinguishing_formula: too many assignments");
    }
    for (int s = 0; s < 2; ++s) {
      std::vector<int> row(count_[s]);
      for (std::size_t c = 0; c < count_[s]; ++c) row[c] = intern(atomic_key(s, decode(s, c)), 0);
      types_[s].push_back(std::move(row));
    }
    std::size_t classes = distinct(0);
    for (int r = 1; !depth || r <= *depth; ++r) {
      for (int s = 0; s < 2; ++s) {
        std::vector<int> row(count_[s]);
        for (std::size_t c = 0; c < count_[s]; ++c) row[c] = intern(refine_key(s, c, r - 1), r);
        types_[s].push_back(std::move(row));
      }
      std::size_t now = distinct(r);
      if (!depth && now == classes) break;
      classes = now;
    }
  }

  int rounds() const { return static_cast<int>(types_[0].size()) - 1; }

  bool equivalent() const { return types_[0].back()[0] == types_[1].back()[0]; }

  CountingFormula distinguish() { return dist(0, 0, 1, 0, rounds()); }

 private:
  using Assignment = std::vector<std::int64_t>;

  Assignment decode(int s, std::size_t code) const {
    Assignment v(k_);
    const std::size_t base = structs_[s]->size() + 1;
    for (std::size_t i = k_; i > 0; --i) {
      v[i - 1] = static_cast<std::int64_t>(code % base) - 1;
      code /= base;
    }
    return v;
  }

  std::size_t encode(int s, const Assignment& v) const {
    std::size_t code = 0;
    const std::size_t base = structs_[s]->size() + 1;
    for (auto x : v) code = code * base + static_cast<std::size_t>(x + 1);
    return code;
  }

  int intern(std::vector<int> key, int round) {
    key.insert(key.begin(), round);
    return dictionary_.emplace(std::move(key), static_cast<int>(dictionary_.size())).first->second;
  }

  std::size_t distinct(int r) const {
    std::vector<int> all(types_[0][r]);
    all.insert(all.end(), types_[1][r].begin(), types_[1][r].end());
    std::sort(all.begin(), all.end());
    return static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
  }

  /// Occupancy, equalities and every atom over occupied slots.
  std::vector<int> atomic_key(int s, const Assignment& v) const {
    const auto& st = *structs_[s];
    std::vector<int> key;
    for (auto x : v) key.push_back(x >= 0);
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = i + 1; j < k_; ++j) key.push_back(v[i] >= 0 && v[i] == v[j]);
    }
    Tuple t;
    for (std::size_t sym = 0; sym < st.signature().size(); ++sym) {
      for_each_slot_tuple(sym, v, [&](const std::vector<std::size_t>& slots) {
        t.clear();
        for (auto i : slots) t.push_back(static_cast<Element>(v[i]));
        key.push_back(st.holds(sym, t));
      });
    }
    return key;
  }

  template <typename Visit>
  void for_each_slot_tuple(std::size_t sym, const Assignment& v, Visit&& visit) const {
    const auto arity = static_cast<std::size_t>(structs_[0]->signature()[sym].arity);
    std::vector<std::size_t> slots(arity, 0);
    while (true) {
      bool occupied = std::all_of(slots.begin(), slots.end(), [&](std::size_t i) { return v[i] >= 0; });
      if (occupied) visit(slots);
      std::size_t j = arity;
      while (j > 0 && slots[j - 1] + 1 == k_) slots[--j] = 0;
      if (j == 0) return;
      ++slots[j - 1];
    }
  }

  std::vector<int> extension_types(int s, std::size_t code, std::size_t slot, int r) const {
    auto v = decode(s, code);
    std::vector<int> out;
    for (Element x = 0; x < structs_[s]->size(); ++x) {
      v[slot] = x;
      out.push_back(types_[s][r][encode(s, v)]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<int> refine_key(int s, std::size_t code, int r) const {
    std::vector<int> key{types_[s][r][code]};
    for (std::size_t i = 0; i < k_; ++i) {
      key.push_back(-1);
      auto ext = extension_types(s, code, i, r);
      key.insert(key.end(), ext.begin(), ext.end());
    }
    return key;
  }

  std::string var(std::size_t slot) const { return "x" + std::to_string(slot + 1); }

  /// Formula of depth <= r with free variables among the occupied slots,
  /// true at (s, u) and false at (t, w).
  CountingFormula dist(int s, std::size_t u, int t, std::size_t w, int r) {
    int first = 0;
    while (first <= r && types_[s][first][u] == types_[t][first][w]) ++first;
    if (first > r) throw PreconditionViolation("distinguish: assignments are equivalent");
    const std::vector<std::size_t> key{static_cast<std::size_t>(s), u, static_cast<std::size_t>(t), w,
                                       static_cast<std::size_t>(first)};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    CountingFormula result = first == 0 ? literal(s, u, t, w) : quantified(s, u, t, w, first);
    memo_.emplace(key, result);
    return result;
  }

  CountingFormula literal(int s, std::size_t u, int t, std::size_t w) const {
    const auto vu = decode(s, u), vw = decode(t, w);
    auto signed_literal = [](CountingFormula f, bool positive) {
      return positive ? f : CountingFormula::negation(std::move(f));
    };
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = i + 1; j < k_; ++j) {
        if (vu[i] < 0 || vu[j] < 0) continue;
        const bool eu = vu[i] == vu[j], ew = vw[i] == vw[j];
        if (eu != ew) return signed_literal(CountingFormula::equal(var(i), var(j)), eu);
      }
    }
    for (std::size_t sym = 0; sym < structs_[0]->signature().size(); ++sym) {
      std::optional<CountingFormula> found;
      for_each_slot_tuple(sym, vu, [&](const std::vector<std::size_t>& slots) {
        if (found) return;
        Tuple tu, tw;
        std::vector<std::string> names;
        for (auto i : slots) {
          tu.push_back(static_cast<Element>(vu[i]));
          tw.push_back(static_cast<Element>(vw[i]));
          names.push_back(var(i));
        }
        const bool hu = structs_[s]->holds(sym, tu), hw = structs_[t]->holds(sym, tw);
        if (hu != hw) {
          found = signed_literal(CountingFormula::atom(structs_[0]->signature()[sym].name, names), hu);
        }
      });
      if (found) return *found;
    }
    throw PreconditionViolation("distinguish: atomic types agree");
  }

  CountingFormula quantified(int s, std::size_t u, int t, std::size_t w, int first) {
    const int r = first - 1;
    for (std::size_t slot = 0; slot < k_; ++slot) {
      auto eu = extension_types(s, u, slot, r), ew = extension_types(t, w, slot, r);
      if (eu == ew) continue;
      // Representatives of each extension type, from either side.
      std::map<int, std::pair<int, std::size_t>> rep;
      for (int side = 0; side < 2; ++side) {
        auto v = decode(side == 0 ? s : t, side == 0 ? u : w);
        const int st = side == 0 ? s : t;
        for (Element x = 0; x < structs_[st]->size(); ++x) {
          v[slot] = x;
          const auto c = encode(st, v);
          rep.emplace(types_[st][r][c], std::make_pair(st, c));
        }
      }
      int tau = -1;
      std::size_t cu = 0, cw = 0;
      for (const auto& [type, where] : rep) {
        cu = static_cast<std::size_t>(std::count(eu.begin(), eu.end(), type));
        cw = static_cast<std::size_t>(std::count(ew.begin(), ew.end(), type));
        if (cu != cw) {
          tau = type;
          break;
        }
      }
      std::vector<CountingFormula> parts;
      std::set<std::string> seen;
      const auto [ts, tc] = rep.at(tau);
      for (const auto& [type, where] : rep) {
        if (type == tau) continue;
        auto d = dist(ts, tc, where.first, where.second, r);
        if (seen.insert(to_sexp(d)).second) parts.push_back(std::move(d));
      }
      auto psi = parts.size() == 1 ? parts.front() : CountingFormula::conjunction(std::move(parts));
      return cu > cw ? CountingFormula::at_least(cu, var(slot), psi) : CountingFormula::at_most(cu, var(slot), psi);
    }
    throw PreconditionViolation("distinguish: refinement agrees");
  }

  std::size_t k_;
  const RelStructure* structs_[2];
  std::size_t count_[2];
  std::vector<std::vector<int>> types_[2];  // [round][assignment code]
  std::map<std::vector<int>, int> dictionary_;
  std::map<std::vector<std::size_t>, CountingFormula> memo_;
};

int intern(std::map<std::vector<int>, int>& dictionary, std::vector<int> key) {
  return dictionary.emplace(std::move(key), static_cast<int>(dictionary.size())).first->second;
}

void check_wl_signature(const RelStructure& g) {
  if (g.signature().max_arity() > 2) throw PreconditionViolation("kwl_refine: arities above two");
}

/// Atomic type of an ordered k-tuple: equalities, unary and binary atoms.
std::vector<int> tuple_atomic_type(const RelStructure& g, const Tuple& t) {
  std::vector<int> key;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) key.push_back(t[i] == t[j]);
  }
  for (std::size_t sym = 0; sym < g.signature().size(); ++sym) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (g.signature()[sym].arity == 1) {
        key.push_back(g.holds(sym, Tuple{t[i]}));
        continue;
      }
      for (std::size_t j = 0; j < t.size(); ++j) key.push_back(g.holds(sym, Tuple{t[i], t[j]}));
    }
  }
  return key;
}

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

Tuple decode_tuple(std::size_t code, std::size_t n, int k) {
  Tuple t(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    t[static_cast<std::size_t>(i)] = static_cast<Element>(code % n);
    code /= n;
  }
  return t;
}

}  // namespace

bool equiv_counting(const RelStructure& a, const RelStructure& b, std::optional<int> depth, std::optional<int> width,
                    GameLimits limits) {
  const int k = slots_for(depth, width);
  check_inputs(a, b, limits, "equiv_counting");
  if (depth && *depth == 0) return true;
  if (a.size() != b.size()) return false;
  PebbleGame game(a, b, k, limits);
  return game.duplicator_wins(depth);
}

std::optional<CountingFormula> distinguishing_formula(const RelStructure& a, const RelStructure& b,
                                                      std::optional<int> depth, std::optional<int> width,
                                                      GameLimits limits) {
  const int k = slots_for(depth, width);
  check_inputs(a, b, limits, "distinguishing_formula");
  if (depth && *depth == 0) return std::nullopt;
  if (a.size() != b.size()) {
    // ∃≥|A| x (x = x) separates when |A| > |B|; otherwise ∃≤|A| x.
    auto body = CountingFormula::equal("x1", "x1");
    return a.size() > b.size() ? CountingFormula::at_least(a.size(), "x1", body)
                               : CountingFormula::at_most(a.size(), "x1", body);
  }
  SlotTypes types(a, b, k, depth);
  if (types.equivalent()) return std::nullopt;
  return types.distinguish();
}

std::vector<int> WLColoring::histogram() const {
  auto h = colors;
  std::sort(h.begin(), h.end());
  return h;
}

WLResult kwl_refine(const RelStructure& g1, const RelStructure& g2, int k) {
  if (k < 1) throw PreconditionViolation("kwl_refine: k must be at least 1");
  require_same_signature(g1, g2, "kwl_refine");
  check_wl_signature(g1);
  const RelStructure* g[2] = {&g1, &g2};
  std::map<std::vector<int>, int> dictionary;
  std::vector<int> colors[2];
  for (int s = 0; s < 2; ++s) {
    const std::size_t n = g[s]->size(), count = ipow(n, k);
    if (count > 5000000) throw CapExceeded("kwl_refine: too many tuples");
    for (std::size_t c = 0; c < count; ++c) {
      auto key = tuple_atomic_type(*g[s], decode_tuple(c, n, k));
      key.insert(key.begin(), 0);
      colors[s].push_back(intern(dictionary, std::move(key)));
    }
  }
  auto classes = [&] {
    std::vector<int> all(colors[0]);
    all.insert(all.end(), colors[1].begin(), colors[1].end());
    std::sort(all.begin(), all.end());
    return std::unique(all.begin(), all.end()) - all.begin();
  };
  auto before = classes();
  int rounds = 0;
  while (true) {
    std::vector<int> next[2];
    for (int s = 0; s < 2; ++s) {
      const std::size_t n = g[s]->size();
      for (std::size_t c = 0; c < colors[s].size(); ++c) {
        const Tuple t = decode_tuple(c, n, k);
        std::vector<std::vector<int>> entries;
        for (Element u = 0; u < n; ++u) {
          if (k == 1) {
            // Colour refinement: the pair type of (v, u) with u's colour.
            auto pair = tuple_atomic_type(*g[s], Tuple{t[0], u});
            pair.push_back(colors[s][u]);
            entries.push_back(std::move(pair));
            continue;
          }
          std::vector<int> entry;
          for (int i = 0; i < k; ++i) {
            Tuple moved = t;
            moved[static_cast<std::size_t>(i)] = u;
            std::size_t code = 0;
            for (auto x : moved) code = code * n + x;
            entry.push_back(colors[s][code]);
          }
          entries.push_back(std::move(entry));
        }
        std::sort(entries.begin(), entries.end());
        std::vector<int> key{rounds + 1, colors[s][c]};
        for (const auto& e : entries) {
          key.push_back(-1);
          key.insert(key.end(), e.begin(), e.end());
        }
        next[s].push_back(intern(dictionary, std::move(key)));
      }
    }
    colors[0] = std::move(next[0]);
    colors[1] = std::move(next[1]);
    ++rounds;
    auto now = classes();
    if (now == before) break;
    before = now;
  }
  WLResult result;
  result.first = {k, colors[0], rounds};
  result.second = {k, colors[1], rounds};
  result.equivalent = g1.size() == g2.size() && result.first.histogram() == result.second.histogram();
  return result;
}

int ModalTypeDictionary::intern(const std::vector<int>& key) {
  return ids_.emplace(key, static_cast<int>(ids_.size())).first->second;
}

std::vector<int> modal_types(const RelStructure& a, int k, ModalTypeDictionary& dictionary) {
  if (k < 0) throw PreconditionViolation("modal depth must be non-negative");
  if (a.signature().max_arity() > 2) throw PreconditionViolation("modal types need arities at most two");
  const auto& sig = a.signature();
  std::vector<int> base(a.size()), types(a.size());
  for (Element x = 0; x < a.size(); ++x) {
    std::vector<int> key{0};
    for (std::size_t sym = 0; sym < sig.size(); ++sym) {
      if (sig[sym].arity == 1) key.push_back(a.holds(sym, Tuple{x}));
    }
    base[x] = types[x] = dictionary.intern(key);
  }
  for (int round = 1; round <= k; ++round) {
    std::vector<int> next(a.size());
    for (Element x = 0; x < a.size(); ++x) {
      std::vector<int> key{round, base[x]};
      for (std::size_t sym = 0; sym < sig.size(); ++sym) {
        if (sig[sym].arity != 2) continue;
        key.push_back(-1);
        std::vector<int> succ;
        auto lo = std::lower_bound(a.tuples(sym).begin(), a.tuples(sym).end(), Tuple{x});
        for (auto it = lo; it != a.tuples(sym).end() && (*it)[0] == x; ++it) succ.push_back(types[(*it)[1]]);
        std::sort(succ.begin(), succ.end());
        key.insert(key.end(), succ.begin(), succ.end());
      }
      next[x] = dictionary.intern(key);
    }
    types = std::move(next);
  }
  return types;
}

bool modal_equiv(const PointedStructure& a, const PointedStructure& b, int k) {
  require_same_signature(a.structure, b.structure, "modal_equiv");
  ModalTypeDictionary dictionary;
  auto ta = modal_types(a.structure, k, dictionary);
  auto tb = modal_types(b.structure, k, dictionary);
  return ta[a.point] == tb[b.point];
}

}  // namespace homlab
