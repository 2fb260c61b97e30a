#include "homlab/structure.hpp"

#include <algorithm>
#include <set>

#include "homlab/error.hpp"

namespace homlab {

Signature::Signature(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (s.name.empty()) throw MalformedInput("symbol with empty name");
    if (s.arity < 1) throw MalformedInput("symbol " + s.name + " has arity < 1");
    if (!seen.insert(s.name).second) throw MalformedInput("duplicate symbol " + s.name);
  }
}

Signature Signature::graph(std::string name) { return Signature({{std::move(name), 2}}); }

std::optional<std::size_t> Signature::find(std::string_view name) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Signature::index_of(std::string_view name) const {
  auto i = find(name);
  if (!i) throw MalformedInput("unknown symbol " + std::string(name));
  return *i;
}

bool Signature::has_equality_witness() const {
  auto i = find(kEqualitySymbol);
  return i && symbols_[*i].arity == 2;
}

int Signature::max_arity() const {
  int m = 0;
  for (const auto& s : symbols_) m = std::max(m, s.arity);
  return m;
}

Signature Signature::with(Symbol symbol) const {
  auto copy = symbols_;
  copy.push_back(std::move(symbol));
  return Signature(std::move(copy));
}

Signature Signature::without(std::string_view name) const {
  std::vector<Symbol> copy;
  for (const auto& s : symbols_) {
    if (s.name != name) copy.push_back(s);
  }
  return Signature(std::move(copy));
}

RelStructure::RelStructure(Signature signature, std::size_t size)
    : signature_(std::move(signature)), size_(size), relations_(signature_.size()) {}

RelStructure::RelStructure(Signature signature, std::size_t size,
                           std::vector<std::vector<Tuple>> relations)
    : signature_(std::move(signature)), size_(size), relations_(std::move(relations)) {
  if (relations_.size() != signature_.size()) {
    throw MalformedInput("relation list does not match signature length");
  }
  for (std::size_t s = 0; s < relations_.size(); ++s) {
    for (const auto& t : relations_[s]) check_tuple(s, t);
    auto& rel = relations_[s];
    std::sort(rel.begin(), rel.end());
    rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
  }
}

const std::vector<Tuple>& RelStructure::tuples(std::string_view name) const {
  return relations_[signature_.index_of(name)];
}

std::size_t RelStructure::tuple_count() const {
  std::size_t n = 0;
  for (const auto& r : relations_) n += r.size();
  return n;
}

bool RelStructure::holds(std::size_t symbol, std::span<const Element> tuple) const {
  const auto& rel = relations_[symbol];
  return std::binary_search(rel.begin(), rel.end(), tuple,
                            [](const auto& x, const auto& y) {
                              return std::lexicographical_compare(x.begin(), x.end(), y.begin(),
                                                                  y.end());
                            });
}

bool RelStructure::holds(std::string_view name, std::span<const Element> tuple) const {
  return holds(signature_.index_of(name), tuple);
}

void RelStructure::check_tuple(std::size_t symbol, const Tuple& tuple) const {
  const auto& sym = signature_[symbol];
  if (tuple.size() != static_cast<std::size_t>(sym.arity)) {
    throw MalformedInput("tuple of wrong length for symbol " + sym.name);
  }
  for (auto e : tuple) {
    if (e >= size_) throw MalformedInput("tuple entry out of range for symbol " + sym.name);
  }
}

void RelStructure::add_tuple(std::size_t symbol, Tuple tuple) {
  if (symbol >= relations_.size()) throw MalformedInput("symbol index out of range");
  check_tuple(symbol, tuple);
  auto& rel = relations_[symbol];
  auto it = std::lower_bound(rel.begin(), rel.end(), tuple);
  if (it == rel.end() || *it != tuple) rel.insert(it, std::move(tuple));
}

void RelStructure::add_tuple(std::string_view name, Tuple tuple) {
  add_tuple(signature_.index_of(name), std::move(tuple));
}

void RelStructure::add_symmetric(std::string_view name, Element u, Element v) {
  add_tuple(name, {u, v});
  add_tuple(name, {v, u});
}

PointedStructure::PointedStructure(RelStructure s, Element p) : structure(std::move(s)), point(p) {
  if (point >= structure.size()) throw MalformedInput("point outside the universe");
  if (structure.signature().max_arity() > 2) {
    throw MalformedInput("pointed structures allow arities 1 and 2 only");
  }
}

void require_same_signature(const RelStructure& a, const RelStructure& b, std::string_view what) {
  if (a.signature() != b.signature()) {
    throw SignatureMismatch(std::string(what) + ": structures have different signatures");
  }
}

bool validate_hom(const Homomorphism& f) {
  require_same_signature(f.source, f.target, "validate_hom");
  if (f.map.size() != f.source.size()) throw MalformedInput("map length differs from source size");
  for (auto e : f.map) {
    if (e >= f.target.size()) throw MalformedInput("map entry outside target universe");
  }
  Tuple image;
  for (std::size_t s = 0; s < f.source.signature().size(); ++s) {
    for (const auto& t : f.source.tuples(s)) {
      image.resize(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) image[i] = f.map[t[i]];
      if (!f.target.holds(s, image)) return false;
    }
  }
  return true;
}

Homomorphism identity_hom(const RelStructure& a) {
  std::vector<Element> map(a.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = static_cast<Element>(i);
  return {a, a, std::move(map)};
}

Homomorphism compose(const Homomorphism& g, const Homomorphism& f) {
  if (!(f.target == g.source)) throw PreconditionViolation("compose: f.target != g.source");
  std::vector<Element> map(f.map.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = g.map.at(f.map[i]);
  return {f.source, g.target, std::move(map)};
}

bool is_injective(std::span<const Element> map, std::size_t target_size) {
  std::vector<bool> hit(target_size, false);
  for (auto e : map) {
    if (e >= target_size || hit[e]) return false;
    hit[e] = true;
  }
  return true;
}

bool is_surjective(std::span<const Element> map, std::size_t target_size) {
  std::vector<bool> hit(target_size, false);
  for (auto e : map) {
    if (e < target_size) hit[e] = true;
  }
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

RelStructure pushforward(const RelStructure& a, std::span<const Element> map,
                         std::size_t target_size) {
  std::vector<std::vector<Tuple>> rels(a.signature().size());
  for (std::size_t s = 0; s < rels.size(); ++s) {
    for (const auto& t : a.tuples(s)) {
      Tuple image(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) image[i] = map[t[i]];
      rels[s].push_back(std::move(image));
    }
  }
  return RelStructure(a.signature(), target_size, std::move(rels));
}

RelStructure induced_substructure(const RelStructure& a, std::span<const Element> elements) {
  std::vector<std::int64_t> index(a.size(), -1);
  for (std::size_t i = 0; i < elements.size(); ++i) index[elements[i]] = static_cast<std::int64_t>(i);
  std::vector<std::vector<Tuple>> rels(a.signature().size());
  for (std::size_t s = 0; s < rels.size(); ++s) {
    for (const auto& t : a.tuples(s)) {
      Tuple image(t.size());
      bool inside = true;
      for (std::size_t i = 0; i < t.size() && inside; ++i) {
        if (index[t[i]] < 0) inside = false;
        else image[i] = static_cast<Element>(index[t[i]]);
      }
      if (inside) rels[s].push_back(std::move(image));
    }
  }
  return RelStructure(a.signature(), elements.size(), std::move(rels));
}

RelStructure drop_symbol(const RelStructure& a, std::string_view name) {
  auto idx = a.signature().find(name);
  if (!idx) return a;
  std::vector<std::vector<Tuple>> rels;
  for (std::size_t s = 0; s < a.signature().size(); ++s) {
    if (s != *idx) rels.push_back(a.tuples(s));
  }
  return RelStructure(a.signature().without(name), a.size(), std::move(rels));
}

}  // namespace homlab
