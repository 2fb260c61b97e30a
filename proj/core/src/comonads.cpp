#include "homlab/comonads.hpp"

#include <algorithm>
#include <limits>

#include "homlab/error.hpp"

namespace homlab {

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t sat_mul(std::size_t a, std::size_t b) {
  std::size_t r = 0;
  return __builtin_mul_overflow(a, b, &r) ? kSaturated : r;
}

std::size_t sat_add(std::size_t a, std::size_t b) {
  std::size_t r = 0;
  return __builtin_add_overflow(a, b, &r) ? kSaturated : r;
}

void check_params(ComonadKind kind) {
  if (kind.n < 1 || kind.k < 1) throw PreconditionViolation("comonad parameters must be at least 1");
}

/// Alphabet size of a play position for EF and PEBBLE.
std::size_t alphabet(ComonadKind kind, std::size_t base_size) {
  return kind.tag == ComonadTag::kPebble ? sat_mul(static_cast<std::size_t>(kind.k), base_size) : base_size;
}

std::size_t digit(ComonadKind kind, std::size_t base_size, const Move& m) {
  return kind.tag == ComonadTag::kPebble ? static_cast<std::size_t>(m.label - 1) * base_size + m.element
                                         : m.element;
}

/// Enumerates the tuples of one symbol for EF and PEBBLE: every tuple is a
/// chain of prefixes of its longest play.
void add_play_tuples(ComonadStructure& cs, std::vector<std::vector<Tuple>>& rels) {
  const auto& sig = cs.base.signature();
  const bool pebble = cs.kind.tag == ComonadTag::kPebble;
  std::vector<Element> chain;
  Tuple lengths, tuple, image;
  for (Element s = 0; s < cs.plays.size(); ++s) {
    const auto& play = cs.plays[s];
    const std::size_t len = play.size();
    chain.assign(len, 0);
    chain[len - 1] = s;
    for (std::size_t i = len - 1; i > 0; --i) chain[i - 1] = static_cast<Element>(cs.up[chain[i]]);
    for (std::size_t sym = 0; sym < sig.size(); ++sym) {
      const auto arity = static_cast<std::size_t>(sig[sym].arity);
      lengths.assign(arity, 1);
      tuple.resize(arity);
      image.resize(arity);
      while (true) {
        const bool uses_s = std::find(lengths.begin(), lengths.end(), len) != lengths.end();
        if (uses_s) {
          for (std::size_t j = 0; j < arity; ++j) {
            tuple[j] = chain[lengths[j] - 1];
            image[j] = cs.counit[tuple[j]];
          }
          bool ok = cs.base.holds(sym, image);
          if (ok && pebble) {
            // The last pebble of a shorter play is not reused before the longer one ends.
            for (std::size_t a = 0; a < arity && ok; ++a) {
              for (std::size_t b = 0; b < arity && ok; ++b) {
                if (lengths[a] >= lengths[b]) continue;
                const int peb = play[lengths[a] - 1].label;
                for (std::size_t z = lengths[a]; z < lengths[b]; ++z) {
                  if (play[z].label == peb) {
                    ok = false;
                    break;
                  }
                }
              }
            }
          }
          if (ok) rels[sym].push_back(tuple);
        }
        std::size_t j = arity;
        while (j > 0 && lengths[j - 1] == len) lengths[--j] = 1;
        if (j == 0) break;
        ++lengths[j - 1];
      }
    }
  }
}

}  // namespace

ComonadKind ComonadKind::ef(int n) { return {ComonadTag::kEF, n, 1}; }
ComonadKind ComonadKind::pebble(int k, int n) { return {ComonadTag::kPebble, n, k}; }
ComonadKind ComonadKind::modal(int k) { return {ComonadTag::kModal, 1, k}; }

std::string ComonadKind::name() const {
  switch (tag) {
    case ComonadTag::kEF: return "EF(" + std::to_string(n) + ")";
    case ComonadTag::kPebble: return "PEBBLE(" + std::to_string(k) + "," + std::to_string(n) + ")";
    case ComonadTag::kModal: return "MODAL(" + std::to_string(k) + ")";
  }
  return "?";
}

std::optional<Element> ComonadStructure::index_of(const Play& play) const {
  if (play.empty()) return std::nullopt;
  if (kind.tag == ComonadTag::kModal) {
    auto it = modal_index.find(play);
    if (it == modal_index.end()) return std::nullopt;
    return it->second;
  }
  if (play.size() > static_cast<std::size_t>(kind.n)) return std::nullopt;
  const std::size_t m = alphabet(kind, base.size());
  std::size_t offset = 0, power = 1, code = 0;
  for (std::size_t len = 1; len < play.size(); ++len) {
    power *= m;
    offset += power;
  }
  for (const auto& mv : play) {
    if (mv.element >= base.size()) return std::nullopt;
    if (kind.tag == ComonadTag::kPebble ? (mv.label < 1 || mv.label > kind.k) : mv.label != 0) return std::nullopt;
    code = code * m + digit(kind, base.size(), mv);
  }
  return static_cast<Element>(offset + code);
}

Element ComonadStructure::prefix(Element s, std::size_t length) const {
  for (std::size_t len = plays[s].size(); len > length; --len) s = static_cast<Element>(up[s]);
  return s;
}

Homomorphism ComonadStructure::counit_hom() const { return {carrier, base, counit}; }

PointedStructure ComonadStructure::pointed_carrier() const { return {carrier, 0}; }

std::size_t comonad_carrier_size(ComonadKind kind, const RelStructure& a, std::optional<Element> point) {
  check_params(kind);
  if (kind.tag != ComonadTag::kModal) {
    const std::size_t m = alphabet(kind, a.size());
    std::size_t total = 0, power = 1;
    for (int i = 1; i <= kind.n; ++i) {
      power = sat_mul(power, m);
      total = sat_add(total, power);
    }
    return total;
  }
  if (!point) throw PreconditionViolation("MODAL needs a pointed structure");
  // Paths by length, counted per endpoint.
  std::vector<std::size_t> ending(a.size(), 0);
  ending[*point] = 1;
  std::size_t total = 1;
  for (int len = 1; len <= kind.k; ++len) {
    std::vector<std::size_t> next(a.size(), 0);
    for (std::size_t sym = 0; sym < a.signature().size(); ++sym) {
      if (a.signature()[sym].arity != 2) continue;
      for (const auto& t : a.tuples(sym)) next[t[1]] = sat_add(next[t[1]], ending[t[0]]);
    }
    ending = std::move(next);
    for (auto c : ending) total = sat_add(total, c);
  }
  return total;
}

ComonadStructure build_comonad(ComonadKind kind, const RelStructure& a, ComonadLimits limits) {
  check_params(kind);
  if (kind.tag == ComonadTag::kModal) throw PreconditionViolation("MODAL needs a pointed structure");
  const std::size_t size = comonad_carrier_size(kind, a);
  if (size > limits.max_carrier) throw CapExceeded("build_comonad: carrier of " + kind.name() + " too large");

  ComonadStructure cs;
  cs.kind = kind;
  cs.base = a;
  cs.plays.reserve(size);
  const std::size_t m = alphabet(kind, a.size());
  std::size_t previous_offset = 0, previous_count = 0;
  for (int len = 1; len <= kind.n && m > 0; ++len) {
    const std::size_t offset = cs.plays.size();
    // Length-len plays in lexicographic order: extend each shorter play.
    if (len == 1) {
      for (std::size_t d = 0; d < m; ++d) {
        Move mv = kind.tag == ComonadTag::kPebble
                      ? Move{static_cast<int>(d / a.size()) + 1, static_cast<Element>(d % a.size())}
                      : Move{0, static_cast<Element>(d)};
        cs.plays.push_back({mv});
        cs.up.push_back(-1);
      }
    } else {
      for (std::size_t p = previous_offset; p < previous_offset + previous_count; ++p) {
        for (std::size_t d = 0; d < m; ++d) {
          Play play = cs.plays[p];
          play.push_back(kind.tag == ComonadTag::kPebble
                             ? Move{static_cast<int>(d / a.size()) + 1, static_cast<Element>(d % a.size())}
                             : Move{0, static_cast<Element>(d)});
          cs.plays.push_back(std::move(play));
          cs.up.push_back(static_cast<int>(p));
        }
      }
    }
    previous_offset = offset;
    previous_count = cs.plays.size() - offset;
  }
  for (const auto& p : cs.plays) cs.counit.push_back(p.back().element);
  std::vector<std::vector<Tuple>> rels(a.signature().size());
  add_play_tuples(cs, rels);
  cs.carrier = RelStructure(a.signature(), cs.plays.size(), std::move(rels));
  return cs;
}

ComonadStructure build_comonad(ComonadKind kind, const PointedStructure& a, ComonadLimits limits) {
  check_params(kind);
  if (kind.tag != ComonadTag::kModal) return build_comonad(kind, a.structure, limits);
  const auto& base = a.structure;
  const std::size_t size = comonad_carrier_size(kind, base, a.point);
  if (size > limits.max_carrier) throw CapExceeded("build_comonad: carrier of " + kind.name() + " too large");

  // Outgoing (symbol, target) pairs in lexicographic order.
  std::vector<std::vector<Move>> out(base.size());
  for (std::size_t sym = 0; sym < base.signature().size(); ++sym) {
    if (base.signature()[sym].arity != 2) continue;
    for (const auto& t : base.tuples(sym)) out[t[0]].push_back({static_cast<int>(sym), t[1]});
  }
  for (auto& o : out) std::sort(o.begin(), o.end());

  ComonadStructure cs;
  cs.kind = kind;
  cs.base = base;
  cs.point = a.point;
  cs.plays.push_back({Move{-1, a.point}});
  cs.up.push_back(-1);
  std::size_t level_begin = 0;
  for (int len = 1; len <= kind.k; ++len) {
    const std::size_t level_end = cs.plays.size();
    for (std::size_t p = level_begin; p < level_end; ++p) {
      for (const auto& mv : out[cs.plays[p].back().element]) {
        Play play = cs.plays[p];
        play.push_back(mv);
        cs.plays.push_back(std::move(play));
        cs.up.push_back(static_cast<int>(p));
      }
    }
    level_begin = level_end;
  }
  std::vector<std::vector<Tuple>> rels(base.signature().size());
  for (Element s = 0; s < cs.plays.size(); ++s) {
    cs.counit.push_back(cs.plays[s].back().element);
    cs.modal_index.emplace(cs.plays[s], s);
    for (std::size_t sym = 0; sym < base.signature().size(); ++sym) {
      if (base.signature()[sym].arity == 1 && base.holds(sym, Tuple{cs.counit[s]})) rels[sym].push_back({s});
    }
    if (cs.up[s] >= 0) {
      rels[static_cast<std::size_t>(cs.plays[s].back().label)].push_back({static_cast<Element>(cs.up[s]), s});
    }
  }
  cs.carrier = RelStructure(base.signature(), cs.plays.size(), std::move(rels));
  return cs;
}

Homomorphism coextension(const ComonadStructure& cs, const Homomorphism& f, const ComonadStructure& target) {
  if (f.map.size() != cs.plays.size()) throw PreconditionViolation("coextension: map is not defined on C(A)");
  require_same_signature(cs.carrier, f.target, "coextension");
  if (f.target.size() != target.base.size()) throw PreconditionViolation("coextension: target base mismatch");
  if (!validate_hom(f)) throw PreconditionViolation("coextension: f is not a homomorphism");
  if (cs.kind.tag == ComonadTag::kModal && (!target.point || *target.point != f.map[0])) {
    throw PreconditionViolation("coextension: target is not pointed at the image of the trivial path");
  }
  std::vector<Element> map(cs.plays.size());
  for (Element s = 0; s < cs.plays.size(); ++s) {
    // Plays are listed after their prefixes, so the prefix image is ready.
    const auto& last = cs.plays[s].back();
    Play image = cs.up[s] < 0 ? Play{} : target.plays[map[static_cast<std::size_t>(cs.up[s])]];
    image.push_back({last.label, f.map[s]});
    auto idx = target.index_of(image);
    if (!idx) throw PreconditionViolation("coextension: image play missing from the target carrier");
    map[s] = *idx;
  }
  return {cs.carrier, target.carrier, std::move(map)};
}

bool check_comonad_laws(const ComonadStructure& ca, const ComonadStructure& cb, const ComonadStructure& cc,
                        const Homomorphism& f, const Homomorphism& g, const Coextender& coextend) {
  auto in_range = [](const Homomorphism& h, std::size_t domain, std::size_t codomain) {
    return h.map.size() == domain &&
           std::all_of(h.map.begin(), h.map.end(), [&](Element x) { return x < codomain; });
  };
  try {
    const std::size_t na = ca.plays.size();
    auto eps_star = coextend(ca, ca.counit_hom(), ca);
    if (!in_range(eps_star, na, na)) return false;
    for (Element s = 0; s < na; ++s) {
      if (eps_star.map[s] != s) return false;
    }

    auto f_star = coextend(ca, f, cb);
    if (!in_range(f_star, na, cb.plays.size())) return false;
    for (Element s = 0; s < na; ++s) {
      if (cb.counit[f_star.map[s]] != f.map[s]) return false;
    }

    Homomorphism g_after_f_star{ca.carrier, g.target, std::vector<Element>(na)};
    for (Element s = 0; s < na; ++s) g_after_f_star.map[s] = g.map[f_star.map[s]];
    auto lhs = coextend(ca, g_after_f_star, cc);
    auto g_star = coextend(cb, g, cc);
    if (!in_range(lhs, na, cc.plays.size()) || !in_range(g_star, cb.plays.size(), cc.plays.size())) return false;
    for (Element s = 0; s < na; ++s) {
      if (lhs.map[s] != g_star.map[f_star.map[s]]) return false;
    }
  } catch (const Error&) {
    return false;
  }
  return true;
}

Homomorphism comonad_map(const ComonadStructure& ca, const Homomorphism& f, const ComonadStructure& cb) {
  Homomorphism f_eps{ca.carrier, f.target, std::vector<Element>(ca.plays.size())};
  for (Element s = 0; s < ca.plays.size(); ++s) f_eps.map[s] = f.map[ca.counit[s]];
  return coextension(ca, f_eps, cb);
}

bool check_coalgebra(const Coalgebra& c) {
  const auto& cs = c.comonad;
  const auto& alpha = c.alpha;
  if (!(alpha.source == cs.base) || alpha.target.size() != cs.plays.size()) return false;
  try {
    if (!validate_hom(alpha)) return false;
  } catch (const Error&) {
    return false;
  }
  if (cs.kind.tag == ComonadTag::kModal && alpha.map[*cs.point] != 0) return false;
  for (Element a = 0; a < alpha.map.size(); ++a) {
    const Element s = alpha.map[a];
    if (cs.counit[s] != a) return false;
    // delta(alpha(a)) = C(alpha)(alpha(a)): every prefix is alpha of its last element.
    const auto& play = cs.plays[s];
    for (std::size_t len = 1; len <= play.size(); ++len) {
      if (cs.prefix(s, len) != alpha.map[play[len - 1].element]) return false;
    }
  }
  return true;
}

Coalgebra cover_to_coalgebra(const RelStructure& a, const ForestCover& cover, int n) {
  if (cover.size() != a.size() || !validate_forest_cover(a, cover, n)) {
    throw PreconditionViolation("cover_to_coalgebra: not a forest cover of height at most n");
  }
  auto cs = build_comonad(ComonadKind::ef(n), a);
  std::vector<Element> map(a.size());
  for (Element x = 0; x < a.size(); ++x) {
    Play play;
    for (auto y : cover.root_path(x)) play.push_back({0, y});
    map[x] = *cs.index_of(play);
  }
  Homomorphism alpha{a, cs.carrier, std::move(map)};
  return {std::move(cs), std::move(alpha)};
}

Coalgebra cover_to_coalgebra(const RelStructure& a, const PebbleForestCover& cover, int n) {
  if (cover.cover.size() != a.size() || !validate_pebble_cover(a, cover, cover.k, n)) {
    throw PreconditionViolation("cover_to_coalgebra: not a pebble forest cover at (k, n)");
  }
  auto cs = build_comonad(ComonadKind::pebble(cover.k, n), a);
  std::vector<Element> map(a.size());
  for (Element x = 0; x < a.size(); ++x) {
    Play play;
    for (auto y : cover.cover.root_path(x)) play.push_back({cover.pebbles[y], y});
    map[x] = *cs.index_of(play);
  }
  Homomorphism alpha{a, cs.carrier, std::move(map)};
  return {std::move(cs), std::move(alpha)};
}

Coalgebra cover_to_coalgebra(const PointedStructure& a, int k) {
  auto cert = is_synchronization_tree(a, k);
  if (!cert) throw PreconditionViolation("cover_to_coalgebra: not a synchronization tree of bounded height");
  auto cs = build_comonad(ComonadKind::modal(k), a);
  std::vector<Element> map(a.structure.size());
  for (Element x = 0; x < map.size(); ++x) {
    Play play;
    for (int y = static_cast<int>(x); y != kNoParent; y = cert->parent[y]) {
      play.push_back({cert->label[y], static_cast<Element>(y)});
    }
    std::reverse(play.begin(), play.end());
    map[x] = *cs.index_of(play);
  }
  Homomorphism alpha{a.structure, cs.carrier, std::move(map)};
  return {std::move(cs), std::move(alpha)};
}

std::optional<SyncTreeCertificate> is_synchronization_tree(const PointedStructure& a, std::optional<int> max_height) {
  const auto& s = a.structure;
  const std::size_t n = s.size();
  SyncTreeCertificate cert;
  cert.point = a.point;
  cert.parent.assign(n, kNoParent);
  cert.label.assign(n, -1);
  cert.depth.assign(n, -1);
  std::vector<int> incoming(n, 0);
  std::vector<std::vector<Element>> children(n);
  for (std::size_t sym = 0; sym < s.signature().size(); ++sym) {
    if (s.signature()[sym].arity != 2) continue;
    for (const auto& t : s.tuples(sym)) {
      if (++incoming[t[1]] > 1) return std::nullopt;
      cert.parent[t[1]] = static_cast<int>(t[0]);
      cert.label[t[1]] = static_cast<int>(sym);
      children[t[0]].push_back(t[1]);
    }
  }
  if (incoming[a.point] != 0) return std::nullopt;
  cert.depth[a.point] = 0;
  std::vector<Element> queue{a.point};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (auto c : children[queue[i]]) {
      cert.depth[c] = cert.depth[queue[i]] + 1;
      cert.height = std::max(cert.height, cert.depth[c]);
      queue.push_back(c);
    }
  }
  if (queue.size() != n) return std::nullopt;
  if (max_height && cert.height > *max_height) return std::nullopt;
  return cert;
}

CoverFromCoalgebra coalgebra_to_cover(const Coalgebra& c) {
  if (!check_coalgebra(c)) throw PreconditionViolation("coalgebra_to_cover: not a coalgebra");
  const auto& cs = c.comonad;
  const std::size_t n = cs.base.size();
  std::vector<int> parent(n, kNoParent);
  for (Element a = 0; a < n; ++a) {
    const auto& play = cs.plays[c.alpha.map[a]];
    if (play.size() >= 2) parent[a] = static_cast<int>(play[play.size() - 2].element);
  }
  switch (cs.kind.tag) {
    case ComonadTag::kEF: return ForestCover::make(cs.base, std::move(parent));
    case ComonadTag::kPebble: {
      std::vector<int> pebbles(n);
      for (Element a = 0; a < n; ++a) pebbles[a] = cs.plays[c.alpha.map[a]].back().label;
      return PebbleForestCover{ForestCover::make(cs.base, std::move(parent)), std::move(pebbles), cs.kind.k};
    }
    case ComonadTag::kModal: break;
  }
  SyncTreeCertificate cert;
  cert.point = *cs.point;
  cert.parent = std::move(parent);
  cert.label.assign(n, -1);
  cert.depth.assign(n, 0);
  for (Element a = 0; a < n; ++a) {
    const auto& play = cs.plays[c.alpha.map[a]];
    cert.label[a] = play.back().label;
    cert.depth[a] = static_cast<int>(play.size()) - 1;
    cert.height = std::max(cert.height, cert.depth[a]);
  }
  return cert;
}

}  // namespace homlab
