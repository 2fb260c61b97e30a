#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace homlab {

/// Elements of a structure are dense indices 0..size-1.
using Element = std::uint32_t;
using Tuple = std::vector<Element>;

/// Name of the binary symbol that witnesses equality in extended signatures.
inline constexpr std::string_view kEqualitySymbol = "I";

struct Symbol {
  std::string name;
  int arity = 0;

  bool operator==(const Symbol&) const = default;
  auto operator<=>(const Symbol&) const = default;
};

/// Ordered list of relation symbols. Names are distinct and arities positive.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<Symbol> symbols);

  /// Convenience: a signature with one binary symbol named `name`.
  static Signature graph(std::string name = "E");

  const std::vector<Symbol>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  const Symbol& operator[](std::size_t i) const { return symbols_[i]; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Index of `name`; throws MalformedInput if absent.
  std::size_t index_of(std::string_view name) const;

  bool has_equality_witness() const;
  int max_arity() const;

  /// Copy with `symbol` appended (throws on a name clash).
  Signature with(Symbol symbol) const;
  /// Copy with the named symbol removed (no-op if absent).
  Signature without(std::string_view name) const;

  bool operator==(const Signature&) const = default;

 private:
  std::vector<Symbol> symbols_;
};

/// A finite relational structure. Each relation is stored as a sorted,
/// duplicate-free list of tuples.
class RelStructure {
 public:
  RelStructure() = default;
  RelStructure(Signature signature, std::size_t size);
  /// `relations[i]` holds the tuples of symbol i. Tuples are validated, then
  /// sorted and deduplicated.
  RelStructure(Signature signature, std::size_t size, std::vector<std::vector<Tuple>> relations);

  const Signature& signature() const { return signature_; }
  std::size_t size() const { return size_; }

  const std::vector<Tuple>& tuples(std::size_t symbol) const { return relations_.at(symbol); }
  const std::vector<Tuple>& tuples(std::string_view name) const;
  const std::vector<std::vector<Tuple>>& relations() const { return relations_; }
  std::size_t tuple_count() const;

  bool holds(std::size_t symbol, std::span<const Element> tuple) const;
  bool holds(std::string_view name, std::span<const Element> tuple) const;

  void add_tuple(std::size_t symbol, Tuple tuple);
  void add_tuple(std::string_view name, Tuple tuple);
  /// Adds (u,v) and (v,u) to a binary relation.
  void add_symmetric(std::string_view name, Element u, Element v);

  bool operator==(const RelStructure&) const = default;

 private:
  void check_tuple(std::size_t symbol, const Tuple& tuple) const;

  Signature signature_;
  std::size_t size_ = 0;
  std::vector<std::vector<Tuple>> relations_;
};

/// A structure with a distinguished element, all arities at most two
/// (a pointed Kripke structure).
struct PointedStructure {
  RelStructure structure;
  Element point = 0;

  PointedStructure() = default;
  PointedStructure(RelStructure s, Element p);

  bool operator==(const PointedStructure&) const = default;
};

/// A map between universes together with its endpoints. Validity (tuple
/// preservation) is checked by validate_hom, not on construction.
struct Homomorphism {
  RelStructure source;
  RelStructure target;
  std::vector<Element> map;

  Element operator()(Element a) const { return map[a]; }
};

/// True iff every tuple of every relation of `f.source` maps into the
/// corresponding relation of `f.target`. Throws MalformedInput when the map
/// has the wrong length or points outside the target, and SignatureMismatch
/// when the endpoints disagree on the signature.
bool validate_hom(const Homomorphism& f);

Homomorphism identity_hom(const RelStructure& a);
/// g after f. Requires f.target == g.source.
Homomorphism compose(const Homomorphism& g, const Homomorphism& f);

bool is_injective(std::span<const Element> map, std::size_t target_size);
bool is_surjective(std::span<const Element> map, std::size_t target_size);

/// Image of `a` under `map` into a universe of `target_size` elements.
RelStructure pushforward(const RelStructure& a, std::span<const Element> map,
                         std::size_t target_size);
/// Substructure induced on `elements` (renumbered in the given order).
RelStructure induced_substructure(const RelStructure& a, std::span<const Element> elements);

/// Reduct: drops the named symbol.
RelStructure drop_symbol(const RelStructure& a, std::string_view name);

void require_same_signature(const RelStructure& a, const RelStructure& b, std::string_view what);

}  // namespace homlab
