#include "homlab/normal_forms.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "homlab/error.hpp"

namespace homlab {

namespace {

using Kind = CountingFormula::Kind;

void check_pp(const CountingFormula& f) {
  switch (f.kind()) {
    case Kind::kAtom: return;
    case Kind::kAnd:
      for (const auto& c : f.children()) check_pp(c);
      return;
    case Kind::kAtLeast:
      if (f.threshold() != 1) throw MalformedInput("primitive positive formulas use plain existentials only");
      check_pp(f.body());
      return;
    default: throw MalformedInput("primitive positive formulas use atoms, conjunction and existentials only");
  }
}

std::vector<CountingFormula> atoms_of(const RelStructure& a, const std::vector<std::vector<std::size_t>>& tuples_at,
                                      Element x, const std::vector<std::string>& var) {
  std::vector<CountingFormula> out;
  for (auto packed : tuples_at[x]) {
    const std::size_t sym = packed >> 32, idx = packed & 0xffffffffU;
    std::vector<std::string> names;
    for (auto e : a.tuples(sym)[idx]) names.push_back(var[e]);
    out.push_back(CountingFormula::atom(a.signature()[sym].name, std::move(names)));
  }
  return out;
}

/// Nests quantifiers along the forest; each tuple is asserted under its
/// deepest element.
PrimitivePositiveFormula along_forest(const RelStructure& a, const ForestCover& cover,
                                      const std::vector<std::string>& var) {
  const std::size_t n = a.size();
  std::vector<std::vector<std::size_t>> tuples_at(n);
  for (std::size_t sym = 0; sym < a.signature().size(); ++sym) {
    const auto& ts = a.tuples(sym);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      Element deepest = ts[i][0];
      for (auto e : ts[i]) {
        if (cover.leq(deepest, e)) deepest = e;
      }
      tuples_at[deepest].push_back(sym << 32 | i);
    }
  }
  std::vector<std::vector<Element>> children(n);
  std::vector<Element> roots;
  for (Element x = 0; x < n; ++x) {
    if (cover.parent[x] == kNoParent) roots.push_back(x);
    else children[static_cast<std::size_t>(cover.parent[x])].push_back(x);
  }
  auto build = [&](auto&& self, Element x) -> CountingFormula {
    auto parts = atoms_of(a, tuples_at, x, var);
    for (auto c : children[x]) parts.push_back(self(self, c));
    auto body = parts.size() == 1 ? parts.front() : CountingFormula::conjunction(std::move(parts));
    return CountingFormula::exists(var[x], std::move(body));
  };
  std::vector<CountingFormula> top;
  for (auto r : roots) top.push_back(build(build, r));
  return PrimitivePositiveFormula(top.size() == 1 ? top.front() : CountingFormula::conjunction(std::move(top)));
}

void require_nonempty(const RelStructure& a) {
  if (a.size() == 0) throw PreconditionViolation("canonical_conjunctive_query: empty structure");
}

/// Compiles variable names to slots once per evaluation.
class WitnessCounter {
 public:
  WitnessCounter(const RelStructure& b, const CountingFormula& f) : b_(b) {
    for (const auto& v : f.variables()) slot_.emplace(v, slot_.size());
    env_.assign(slot_.size(), -1);
  }

  void bind(const std::string& name, Element value) {
    if (value >= b_.size()) throw MalformedInput("environment value outside the universe");
    if (auto it = slot_.find(name); it != slot_.end()) env_[it->second] = value;
  }

  Count count(const CountingFormula& f) {
    switch (f.kind()) {
      case Kind::kAtom: {
        auto sym = b_.signature().find(f.symbol());
        if (!sym || static_cast<std::size_t>(b_.signature()[*sym].arity) != f.vars().size()) {
          throw MalformedInput("unknown relation symbol " + f.symbol());
        }
        Tuple t;
        for (const auto& v : f.vars()) {
          auto value = env_[slot_.at(v)];
          if (value < 0) throw PreconditionViolation("unbound variable " + v);
          t.push_back(static_cast<Element>(value));
        }
        return b_.holds(*sym, t) ? 1 : 0;
      }
      case Kind::kAnd: {
        Count product = 1;
        for (const auto& c : f.children()) {
          product = checked_mul(product, count(c));
          if (product == 0) return 0;
        }
        return product;
      }
      case Kind::kAtLeast: {
        const auto s = slot_.at(f.variable());
        const auto saved = env_[s];
        Count sum = 0;
        for (Element x = 0; x < b_.size(); ++x) {
          env_[s] = x;
          sum = checked_add(sum, count(f.body()));
        }
        env_[s] = saved;
        return sum;
      }
      default: throw MalformedInput("count_witnesses: not primitive positive");
    }
  }

 private:
  const RelStructure& b_;
  std::map<std::string, std::size_t> slot_;
  std::vector<std::int64_t> env_;
};

/// Integer partitions of t, parts in non-increasing order.
void partitions(std::size_t t, std::size_t max_part, std::vector<std::size_t>& current,
                std::vector<std::vector<std::size_t>>& out) {
  if (t == 0) {
    out.push_back(current);
    return;
  }
  for (std::size_t p = std::min(t, max_part); p >= 1; --p) {
    current.push_back(p);
    partitions(t - p, p, current, out);
    current.pop_back();
  }
}

CountingFormula any_of(std::vector<CountingFormula> parts) {
  if (parts.size() == 1) return parts.front();
  return CountingFormula::disjunction(std::move(parts));
}

CountingFormula all_of(std::vector<CountingFormula> parts) {
  for (const auto& p : parts) {
    if (p.is_bottom()) return CountingFormula::bottom();
  }
  if (parts.size() == 1) return parts.front();
  return CountingFormula::conjunction(std::move(parts));
}

class Lifter {
 public:
  CountingFormula lift(const CountingFormula& f, std::size_t t) {
    if (t <= 1) return f;
    const auto key = std::make_tuple(f.id(), std::size_t{0}, t);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    CountingFormula out = CountingFormula::bottom();
    switch (f.kind()) {
      case Kind::kAtom: break;  // an atom has at most one witness
      case Kind::kAnd: out = lift_conjunction(f, 0, t); break;
      case Kind::kAtLeast: out = lift_exists(f, t); break;
      default: throw MalformedInput("threshold_lift: not primitive positive");
    }
    memo_.emplace(key, out);
    return out;
  }

 private:
  /// Lift of the conjunction of children[from..]: the count is a product,
  /// so take minimal factorisations t1 * t2 >= t.
  CountingFormula lift_conjunction(const CountingFormula& f, std::size_t from, std::size_t t) {
    const auto& cs = f.children();
    const std::size_t remaining = cs.size() - from;
    if (remaining == 0) return t <= 1 ? CountingFormula::top() : CountingFormula::bottom();
    if (remaining == 1) return lift(cs[from], t);
    const auto key = std::make_tuple(f.id(), from + 1, t);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<CountingFormula> options;
    std::size_t last_t2 = 0;
    for (std::size_t t1 = 1; t1 <= t; ++t1) {
      const std::size_t t2 = (t + t1 - 1) / t1;
      if (t2 == last_t2) continue;  // (t1, t2) is not minimal
      last_t2 = t2;
      auto left = lift(cs[from], t1);
      if (left.is_bottom()) continue;
      auto right = t2 <= 1 ? rest(f, from + 1) : lift_conjunction(f, from + 1, t2);
      if (right.is_bottom()) continue;
      options.push_back(all_of({left, right}));
    }
    auto out = any_of(std::move(options));
    memo_.emplace(key, out);
    return out;
  }

  CountingFormula rest(const CountingFormula& f, std::size_t from) {
    const auto& cs = f.children();
    if (cs.size() - from == 1) return cs[from];
    return CountingFormula::conjunction(std::vector<CountingFormula>(cs.begin() + static_cast<std::ptrdiff_t>(from), cs.end()));
  }

  /// The count is a sum over witnesses. It reaches t iff for some partition
  /// λ of t and every part s, at least #{i : λ_i >= s} witnesses reach s.
  CountingFormula lift_exists(const CountingFormula& f, std::size_t t) {
    std::vector<std::vector<std::size_t>> parts;
    std::vector<std::size_t> current;
    partitions(t, t, current, parts);
    std::vector<CountingFormula> options;
    for (const auto& lambda : parts) {
      std::vector<CountingFormula> conjuncts;
      bool dead = false;
      for (std::size_t i = 0; i < lambda.size() && !dead; ++i) {
        if (i > 0 && lambda[i] == lambda[i - 1]) continue;
        const std::size_t s = lambda[i];
        const auto many = static_cast<std::size_t>(std::count_if(lambda.begin(), lambda.end(),
                                                                  [&](std::size_t p) { return p >= s; }));
        auto body = lift(f.body(), s);
        if (body.is_bottom()) {
          dead = true;
          break;
        }
        conjuncts.push_back(CountingFormula::at_least(many, f.variable(), body));
      }
      if (!dead) options.push_back(all_of(std::move(conjuncts)));
    }
    return any_of(std::move(options));
  }

  std::map<std::tuple<const void*, std::size_t, std::size_t>, CountingFormula> memo_;
};

}  // namespace

PrimitivePositiveFormula::PrimitivePositiveFormula(CountingFormula f) : formula_(std::move(f)) { check_pp(formula_); }

PrimitivePositiveFormula canonical_conjunctive_query(const RelStructure& a) {
  require_nonempty(a);
  std::vector<std::string> var;
  for (Element x = 0; x < a.size(); ++x) var.push_back("x" + std::to_string(x + 1));
  std::vector<CountingFormula> atoms;
  for (std::size_t sym = 0; sym < a.signature().size(); ++sym) {
    for (const auto& t : a.tuples(sym)) {
      std::vector<std::string> names;
      for (auto e : t) names.push_back(var[e]);
      atoms.push_back(CountingFormula::atom(a.signature()[sym].name, std::move(names)));
    }
  }
  CountingFormula f = atoms.size() == 1 ? atoms.front() : CountingFormula::conjunction(std::move(atoms));
  for (Element x = static_cast<Element>(a.size()); x-- > 0;) f = CountingFormula::exists(var[x], f);
  return PrimitivePositiveFormula(f);
}

PrimitivePositiveFormula canonical_conjunctive_query(const RelStructure& a, const ForestCover& cover) {
  require_nonempty(a);
  if (cover.size() != a.size() || !validate_forest_cover(a, cover, cover.height)) {
    throw PreconditionViolation("canonical_conjunctive_query: invalid forest cover");
  }
  std::vector<std::string> var;
  for (Element x = 0; x < a.size(); ++x) var.push_back("x" + std::to_string(x + 1));
  return along_forest(a, cover, var);
}

PrimitivePositiveFormula canonical_conjunctive_query(const RelStructure& a, const PebbleForestCover& cover) {
  require_nonempty(a);
  if (cover.cover.size() != a.size() || !validate_pebble_cover(a, cover, cover.k, cover.cover.height)) {
    throw PreconditionViolation("canonical_conjunctive_query: invalid pebble forest cover");
  }
  std::vector<std::string> var;
  for (Element x = 0; x < a.size(); ++x) var.push_back("x" + std::to_string(cover.pebbles[x]));
  return along_forest(a, cover.cover, var);
}

Count count_witnesses(const RelStructure& b, const PrimitivePositiveFormula& gamma, const Environment& env) {
  WitnessCounter counter(b, gamma.formula());
  for (const auto& [name, value] : env) counter.bind(name, value);
  return counter.count(gamma.formula());
}

CountingFormula threshold_lift(const PrimitivePositiveFormula& gamma, std::size_t t) {
  if (t < 1) throw PreconditionViolation("threshold_lift: t must be at least 1");
  Lifter lifter;
  return lifter.lift(gamma.formula(), t);
}

CountingFormula distinct_edge_sentence(std::size_t bound, const std::string& symbol) {
  if (bound < 1) throw PreconditionViolation("distinct_edge_sentence: bound must be at least 1");
  const PrimitivePositiveFormula pairs(
      CountingFormula::exists("x", CountingFormula::exists("y", CountingFormula::atom(symbol, {"x", "y"}))));
  const auto loop = CountingFormula::atom(symbol, {"x", "x"});
  std::vector<CountingFormula> options;
  Lifter lifter;
  for (std::size_t i = 1; i <= bound; ++i) {
    options.push_back(CountingFormula::conjunction(
        {lifter.lift(pairs.formula(), i), CountingFormula::at_most(i - 1, "x", loop)}));
  }
  return any_of(std::move(options));
}

CountingFormula distinct_edge_reference(const std::string& symbol) {
  return CountingFormula::exists(
      "x", CountingFormula::exists("y", CountingFormula::conjunction(
                                            {CountingFormula::negation(CountingFormula::equal("x", "y")),
                                             CountingFormula::atom(symbol, {"x", "y"})})));
}

}  // namespace homlab
