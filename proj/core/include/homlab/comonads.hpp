#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "homlab/covers.hpp"
#include "homlab/structure.hpp"

namespace homlab {

enum class ComonadTag { kEF, kPebble, kModal };

struct ComonadKind {
  ComonadTag tag = ComonadTag::kEF;
  int n = 1;  // play length (EF, PEBBLE)
  int k = 1;  // pebbles (PEBBLE) or path length (MODAL)

  static ComonadKind ef(int n);
  static ComonadKind pebble(int k, int n);
  static ComonadKind modal(int k);

  std::string name() const;  // "EF(2)", "PEBBLE(2,3)", "MODAL(1)"
  bool operator==(const ComonadKind&) const = default;
};

/// One move of a play. `label` is 0 for EF, the pebble index (1..k) for
/// PEBBLE, and for MODAL the index of the binary symbol followed to reach
/// `element` (-1 for the starting point).
struct Move {
  int label = 0;
  Element element = 0;

  bool operator==(const Move&) const = default;
  auto operator<=>(const Move&) const = default;
};
using Play = std::vector<Move>;

struct ComonadLimits {
  std::size_t max_carrier = 1000000;
};

/// C(A) materialised: the carrier is a structure over A's signature whose
/// elements are plays, ordered by length then lexicographically.
struct ComonadStructure {
  ComonadKind kind;
  RelStructure base;
  std::optional<Element> point;  // MODAL only
  RelStructure carrier;
  std::vector<Play> plays;
  std::vector<Element> counit;  // last element of each play
  std::vector<int> up;          // index of the play minus its last move, -1 at length 1

  std::optional<Element> index_of(const Play& play) const;
  /// Index of the i-th prefix (1-based length) of the play at `s`.
  Element prefix(Element s, std::size_t length) const;
  Homomorphism counit_hom() const;
  /// For MODAL, the carrier pointed at the trivial path.
  PointedStructure pointed_carrier() const;

  std::map<Play, Element> modal_index;
};

/// Carrier size of C(A) without building it (saturates at SIZE_MAX).
std::size_t comonad_carrier_size(ComonadKind kind, const RelStructure& a, std::optional<Element> point = {});

/// EF(n) or PEBBLE(k,n) applied to `a`. Throws CapExceeded above the limit
/// and PreconditionViolation for MODAL.
ComonadStructure build_comonad(ComonadKind kind, const RelStructure& a, ComonadLimits limits = {});
/// MODAL(k) applied to a pointed structure.
ComonadStructure build_comonad(ComonadKind kind, const PointedStructure& a, ComonadLimits limits = {});

/// f*: C(A) -> C(B), given f: C(A) -> B and C(B) already built. For MODAL
/// `target` must be pointed at the image of the trivial path.
Homomorphism coextension(const ComonadStructure& cs, const Homomorphism& f, const ComonadStructure& target);

using Coextender =
    std::function<Homomorphism(const ComonadStructure&, const Homomorphism&, const ComonadStructure&)>;

/// Checks eps* = id, eps o f* = f and (g o f*)* = g* o f* pointwise for
/// f: C(A) -> B and g: C(B) -> C. `coextend` replaces the built-in
/// coextension (for negative controls).
bool check_comonad_laws(const ComonadStructure& ca, const ComonadStructure& cb, const ComonadStructure& cc,
                        const Homomorphism& f, const Homomorphism& g, const Coextender& coextend = coextension);

/// C(f) = (f o eps)* for f: A -> B.
Homomorphism comonad_map(const ComonadStructure& ca, const Homomorphism& f, const ComonadStructure& cb);

/// alpha: A -> C(A).
struct Coalgebra {
  ComonadStructure comonad;
  Homomorphism alpha;
};

/// alpha is a homomorphism (preserving the point for MODAL), eps o alpha = id
/// and delta o alpha = C(alpha) o alpha.
bool check_coalgebra(const Coalgebra& c);

/// EF(n) coalgebra from a forest cover of height <= n: alpha(a) = root path.
Coalgebra cover_to_coalgebra(const RelStructure& a, const ForestCover& cover, int n);
/// PEBBLE(k,n) coalgebra: root path decorated with pebbles.
Coalgebra cover_to_coalgebra(const RelStructure& a, const PebbleForestCover& cover, int n);
/// MODAL(k) coalgebra of a synchronization tree of height <= k.
Coalgebra cover_to_coalgebra(const PointedStructure& a, int k);

/// Unique point-paths of a synchronization tree: parent and the symbol of
/// the edge reaching each element, depth in edges.
struct SyncTreeCertificate {
  Element point = 0;
  std::vector<int> parent;
  std::vector<int> label;
  std::vector<int> depth;
  int height = 0;  // longest path, in edges
};

/// Certificate if every element is reached from the point by exactly one
/// path (and, when given, no path is longer than `max_height`).
std::optional<SyncTreeCertificate> is_synchronization_tree(const PointedStructure& a,
                                                           std::optional<int> max_height = {});

using CoverFromCoalgebra = std::variant<ForestCover, PebbleForestCover, SyncTreeCertificate>;

/// Reads the order (prefix order of alpha) and, for PEBBLE, the pebble of
/// the last move. Throws PreconditionViolation if `c` is not a coalgebra.
CoverFromCoalgebra coalgebra_to_cover(const Coalgebra& c);

}  // namespace homlab
