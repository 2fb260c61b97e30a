#include "homlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <map>
#include <thread>

#include "homlab/comonads.hpp"
#include "homlab/covers.hpp"
#include "homlab/equivalence.hpp"
#include "homlab/error.hpp"
#include "homlab/graphs.hpp"
#include "homlab/hom_count.hpp"
#include "homlab/iso.hpp"

namespace homlab {

namespace {

constexpr std::string_view kPointMark = "@";

RelStructure mark_point(const RelStructure& a, Element p) {
  auto rels = a.relations();
  rels.push_back({Tuple{p}});
  return RelStructure(a.signature().with({std::string(kPointMark), 1}), a.size(), std::move(rels));
}

bool same_pointed(const RelStructure& a, Element pa, const RelStructure& b, Element pb) {
  return isomorphic(mark_point(a, pa), mark_point(b, pb));
}

/// Tuples that mention the newest element `v` of a structure on v+1 elements.
std::vector<std::pair<std::size_t, Tuple>> new_tuples(const ClassSpec& spec, Element v) {
  std::vector<std::pair<std::size_t, Tuple>> out;
  if (spec.universe == Universe::kGraph) {
    for (Element u = 0; u < v; ++u) out.emplace_back(0, Tuple{u, v});
    return out;
  }
  const auto& sig = spec.signature;
  for (std::size_t sym = 0; sym < sig.size(); ++sym) {
    const auto arity = static_cast<std::size_t>(sig[sym].arity);
    Tuple t(arity, 0);
    while (true) {
      if (std::find(t.begin(), t.end(), v) != t.end()) out.emplace_back(sym, t);
      std::size_t j = arity;
      while (j > 0 && t[j - 1] == v) t[--j] = 0;
      if (j == 0) break;
      ++t[j - 1];
    }
  }
  return out;
}

/// Iso classes of every size up to spec.max_size, by one-vertex extension.
std::vector<std::vector<RelStructure>> iso_classes(const ClassSpec& spec) {
  const Signature sig = spec.universe == Universe::kGraph ? Signature::graph() : spec.signature;
  std::vector<std::vector<RelStructure>> by_size(spec.max_size + 1);
  by_size[0].push_back(RelStructure(sig, 0));
  for (std::size_t m = 1; m <= spec.max_size; ++m) {
    const Element v = static_cast<Element>(m - 1);
    auto fresh = new_tuples(spec, v);
    if (fresh.size() > 24) throw CapExceeded("enumerate_structures: too many tuples per new element");
    std::map<std::vector<std::uint64_t>, std::vector<std::size_t>> buckets;
    for (const auto& base : by_size[m - 1]) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << fresh.size()); ++mask) {
        auto rels = base.relations();
        for (std::size_t i = 0; i < fresh.size(); ++i) {
          if (!(mask >> i & 1U)) continue;
          rels[fresh[i].first].push_back(fresh[i].second);
          if (spec.universe == Universe::kGraph) rels[0].push_back({fresh[i].second[1], fresh[i].second[0]});
        }
        RelStructure candidate(sig, m, std::move(rels));
        auto& bucket = buckets[iso_invariant(candidate)];
        bool seen = false;
        for (auto idx : bucket) {
          if (isomorphic(by_size[m][idx], candidate)) {
            seen = true;
            break;
          }
        }
        if (!seen) {
          bucket.push_back(by_size[m].size());
          by_size[m].push_back(std::move(candidate));
        }
      }
    }
  }
  return by_size;
}

/// Rooted trees as (node labels, sorted (edge label, child)) interned to ids.
class TreeBank {
 public:
  TreeBank(int unary_labels, int edge_labels) : unary_(unary_labels), edges_(edge_labels) {}

  /// Trees with exactly m nodes and height at most h (edges), in a fixed order.
  const std::vector<int>& trees(std::size_t m, int h) {
    auto key = std::make_pair(m, h);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    std::vector<int> out;
    if (m == 1 || h > 0) {
      // Child kinds: (edge label, subtree) with subtree size < m.
      std::vector<std::pair<int, int>> kinds;
      std::vector<std::size_t> kind_size;
      for (std::size_t s = 1; s + 1 <= m && h > 0; ++s) {
        for (int sub : trees(s, h - 1)) {
          for (int e = 0; e < edges_; ++e) {
            kinds.emplace_back(e, sub);
            kind_size.push_back(s);
          }
        }
      }
      for (int label = 0; label < (1 << unary_); ++label) {
        std::vector<std::pair<int, int>> chosen;
        auto choose = [&](auto&& self, std::size_t remaining, std::size_t max_kind) -> void {
          if (remaining == 0) {
            out.push_back(intern(label, chosen));
            return;
          }
          for (std::size_t i = 0; i < max_kind; ++i) {
            if (kind_size[i] > remaining) continue;
            chosen.push_back(kinds[i]);
            self(self, remaining - kind_size[i], i + 1);
            chosen.pop_back();
          }
        };
        choose(choose, m - 1, kinds.size());
      }
    }
    return cache_.emplace(key, std::move(out)).first->second;
  }

  /// Root 0, breadth-first numbering.
  RelStructure to_structure(int id, const Signature& sig, const std::vector<std::size_t>& unary_syms,
                            const std::vector<std::size_t>& binary_syms) const {
    std::vector<std::vector<Tuple>> rels(sig.size());
    std::vector<int> queue{id};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const auto& node = nodes_[static_cast<std::size_t>(queue[i])];
      for (int b = 0; b < unary_; ++b) {
        if (node.first >> b & 1) rels[unary_syms[static_cast<std::size_t>(b)]].push_back({static_cast<Element>(i)});
      }
      for (const auto& [edge, child] : node.second) {
        rels[binary_syms[static_cast<std::size_t>(edge)]].push_back(
            {static_cast<Element>(i), static_cast<Element>(queue.size())});
        queue.push_back(child);
      }
    }
    return RelStructure(sig, queue.size(), std::move(rels));
  }

 private:
  int intern(int label, std::vector<std::pair<int, int>> children) {
    std::sort(children.begin(), children.end());
    auto key = std::make_pair(label, children);
    auto [it, fresh] = ids_.emplace(key, static_cast<int>(nodes_.size()));
    if (fresh) nodes_.push_back(std::move(key));
    return it->second;
  }

  int unary_, edges_;
  std::vector<std::pair<int, std::vector<std::pair<int, int>>>> nodes_;
  std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> ids_;
  std::map<std::pair<std::size_t, int>, std::vector<int>> cache_;
};

std::vector<Enumerated> sync_trees(const ClassSpec& spec) {
  std::vector<std::size_t> unary, binary;
  for (std::size_t s = 0; s < spec.signature.size(); ++s) {
    if (spec.signature[s].arity == 1) unary.push_back(s);
    else if (spec.signature[s].arity == 2) binary.push_back(s);
    else throw PreconditionViolation("synchronization trees need arities at most two");
  }
  if (unary.size() > 8) throw CapExceeded("enumerate_structures: too many unary symbols");
  TreeBank bank(static_cast<int>(unary.size()), static_cast<int>(binary.size()));
  std::vector<Enumerated> out;
  for (std::size_t m = std::max<std::size_t>(spec.min_size, 1); m <= spec.max_size; ++m) {
    std::size_t index = 0;
    for (int id : bank.trees(m, spec.n)) {
      out.push_back({"t" + std::to_string(m) + "." + std::to_string(index++),
                     bank.to_structure(id, spec.signature, unary, binary), Element{0}});
    }
  }
  return out;
}

}  // namespace

ClassSpec ClassSpec::all(Universe u, std::size_t max_size, Signature sig) {
  ClassSpec s;
  s.universe = u;
  s.signature = std::move(sig);
  s.max_size = max_size;
  return s;
}

ClassSpec ClassSpec::tree_depth(int n, std::size_t max_size, Universe u, Signature sig) {
  auto s = all(u, max_size, std::move(sig));
  s.kind = ClassKind::kTreeDepth;
  s.n = n;
  return s;
}

ClassSpec ClassSpec::tree_width(int k, std::size_t max_size, Universe u, Signature sig) {
  auto s = all(u, max_size, std::move(sig));
  s.kind = ClassKind::kTreeWidth;
  s.k = k;
  return s;
}

ClassSpec ClassSpec::pebble_height(int k, int n, std::size_t max_size, Universe u, Signature sig) {
  auto s = all(u, max_size, std::move(sig));
  s.kind = ClassKind::kPebbleHeight;
  s.k = k;
  s.n = n;
  return s;
}

ClassSpec ClassSpec::sync_tree(int k, std::size_t max_size, Signature sig) {
  auto s = all(Universe::kPointed, max_size, std::move(sig));
  s.kind = ClassKind::kSyncTree;
  s.n = k;
  return s;
}

std::string ClassSpec::name() const {
  switch (kind) {
    case ClassKind::kAll: return "ALL";
    case ClassKind::kTreeDepth: return "TREEDEPTH(" + std::to_string(n) + ")";
    case ClassKind::kTreeWidth: return "TREEWIDTH(" + std::to_string(k - 1) + ")";
    case ClassKind::kPebbleHeight: return "PEBBLE_HEIGHT(" + std::to_string(k) + "," + std::to_string(n) + ")";
    case ClassKind::kSyncTree: return "SYNC_TREE(" + std::to_string(n) + ")";
  }
  return "?";
}

bool in_class(const ClassSpec& spec, const RelStructure& a, std::optional<Element> point) {
  switch (spec.kind) {
    case ClassKind::kAll: return true;
    case ClassKind::kTreeDepth: return compute_tree_depth(a).depth <= spec.n;
    case ClassKind::kTreeWidth: return find_pebble_forest_cover(a, spec.k).has_value();
    case ClassKind::kPebbleHeight: return find_pebble_forest_cover(a, spec.k, spec.n).has_value();
    case ClassKind::kSyncTree:
      return point && is_synchronization_tree(PointedStructure(a, *point), spec.n).has_value();
  }
  return false;
}

std::vector<Enumerated> enumerate_structures(const ClassSpec& spec, EnumLimits limits) {
  if (spec.n < 1 || spec.k < 1) throw PreconditionViolation("class parameters must be at least 1");
  const std::size_t cap = spec.universe == Universe::kGraph || spec.kind == ClassKind::kSyncTree
                              ? limits.max_graph_size
                              : limits.max_structure_size;
  if (spec.max_size > cap) throw CapExceeded("enumerate_structures: max size above cap");
  if (spec.kind == ClassKind::kSyncTree) return sync_trees(spec);
  if (spec.universe == Universe::kPointed && spec.signature.max_arity() > 2) {
    throw PreconditionViolation("pointed structures need arities at most two");
  }

  auto classes = iso_classes(spec);
  const char prefix = spec.universe == Universe::kGraph ? 'g' : 's';
  std::vector<Enumerated> out;
  for (std::size_t m = spec.min_size; m <= spec.max_size; ++m) {
    for (std::size_t i = 0; i < classes[m].size(); ++i) {
      const auto& a = classes[m][i];
      const std::string id = prefix + std::to_string(m) + "." + std::to_string(i);
      if (spec.universe != Universe::kPointed) {
        if (in_class(spec, a)) out.push_back({id, a, std::nullopt});
        continue;
      }
      std::vector<Element> points;
      for (Element p = 0; p < m; ++p) {
        bool repeat = std::any_of(points.begin(), points.end(), [&](Element q) { return same_pointed(a, q, a, p); });
        if (!repeat) points.push_back(p);
      }
      for (auto p : points) {
        if (in_class(spec, a, p)) out.push_back({id + "@" + std::to_string(p), a, p});
      }
    }
  }
  return out;
}

std::string theorem_name(Theorem t) {
  switch (t) {
    case Theorem::kLovasz: return "lovasz";
    case Theorem::kGrohe: return "grohe";
    case Theorem::kDvorak: return "dvorak";
    case Theorem::kCkn: return "ckn";
    case Theorem::kModal: return "modal";
  }
  return "?";
}

Theorem parse_theorem(const std::string& name) {
  for (auto t : {Theorem::kLovasz, Theorem::kGrohe, Theorem::kDvorak, Theorem::kCkn, Theorem::kModal}) {
    if (theorem_name(t) == name) return t;
  }
  throw MalformedInput("unknown theorem " + name);
}

ClassSpec witness_class(Theorem t, const TheoremParams& params, Universe universe, const Signature& sig,
                        std::size_t witness_cap) {
  switch (t) {
    case Theorem::kLovasz: return ClassSpec::all(universe, witness_cap, sig);
    case Theorem::kGrohe: return ClassSpec::tree_depth(params.n, witness_cap, universe, sig);
    case Theorem::kDvorak: return ClassSpec::tree_width(params.k, witness_cap, universe, sig);
    case Theorem::kCkn: return ClassSpec::pebble_height(params.k, params.n, witness_cap, universe, sig);
    case Theorem::kModal: return ClassSpec::sync_tree(params.k, witness_cap, sig);
  }
  throw PreconditionViolation("unknown theorem");
}

bool logic_verdict(Theorem t, const TheoremParams& params, const Enumerated& a, const Enumerated& b) {
  const bool pointed = a.point && b.point;
  switch (t) {
    case Theorem::kLovasz:
      return pointed ? same_pointed(a.structure, *a.point, b.structure, *b.point)
                     : isomorphic(a.structure, b.structure);
    case Theorem::kModal:
      if (!pointed) throw PreconditionViolation("the modal theorem compares pointed structures");
      return modal_equiv({a.structure, *a.point}, {b.structure, *b.point}, params.k);
    default: break;
  }
  if (pointed) throw PreconditionViolation(theorem_name(t) + " compares unpointed structures");
  switch (t) {
    case Theorem::kGrohe: return equiv_counting(a.structure, b.structure, params.n);
    case Theorem::kDvorak: return equiv_counting(a.structure, b.structure, std::nullopt, params.k);
    case Theorem::kCkn: return equiv_counting(a.structure, b.structure, params.n, params.k);
    default: return false;
  }
}

Count witness_count(const Enumerated& witness, const Enumerated& target) {
  if (witness.point && target.point) {
    return pointed_hom_count({witness.structure, *witness.point}, {target.structure, *target.point});
  }
  return hom_count(witness.structure, target.structure);
}

namespace {

Signature universe_signature(Universe u, const Signature& sig) {
  return u == Universe::kGraph ? Signature::graph() : sig;
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

VerificationReport verify_theorem(Theorem t, const Enumerated& a, const Enumerated& b, const TheoremParams& params,
                                  std::size_t witness_cap, Universe universe) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport r;
  r.a_id = a.id;
  r.b_id = b.id;
  r.logic_verdict = logic_verdict(t, params, a, b);
  r.hom_vectors_agree = true;
  auto spec = witness_class(t, params, universe, universe_signature(universe, a.structure.signature()), witness_cap);
  for (const auto& w : enumerate_structures(spec)) {
    const Count ca = witness_count(w, a), cb = witness_count(w, b);
    if (ca != cb) {
      r.hom_vectors_agree = false;
      r.witness = Witness{w.id, w.structure, w.point, ca, cb};
      break;
    }
  }
  r.exhausted = !r.logic_verdict && r.hom_vectors_agree;
  r.exhausted_at = witness_cap;
  r.seconds = elapsed(start);
  return r;
}

SweepReport sweep(Theorem t, const ClassSpec& pair_spec, const TheoremParams& params, std::size_t witness_cap,
                  SweepOptions options) {
  const auto start = std::chrono::steady_clock::now();
  SweepReport report;
  report.theorem = t;
  report.params = params;
  report.pair_spec = pair_spec;
  report.witness_cap = witness_cap;
  report.witness_spec = witness_class(t, params, pair_spec.universe,
                                      universe_signature(pair_spec.universe, pair_spec.signature), witness_cap);

  const auto items = enumerate_structures(pair_spec);
  const auto witnesses = enumerate_structures(report.witness_spec);
  const std::size_t n = items.size();
  report.summary.structures = n;
  report.summary.witnesses = witnesses.size();

  // Hom vectors, computed in parallel into fixed slots.
  std::vector<std::vector<Count>> vectors(n);
  unsigned threads = options.threads ? options.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned id) {
    try {
      for (std::size_t i = id; i < n; i += threads) {
        vectors[i].reserve(witnesses.size());
        for (const auto& w : witnesses) vectors[i].push_back(witness_count(w, items[i]));
      }
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::map<std::vector<Count>, int> vector_ids;
  std::vector<int> hom_class(n);
  for (std::size_t i = 0; i < n; ++i) {
    hom_class[i] = vector_ids.emplace(vectors[i], static_cast<int>(vector_ids.size())).first->second;
  }

  // Logic classes: the logics are equivalence relations, so comparing with
  // one representative per class suffices.
  std::vector<int> logic_class(n);
  if (t == Theorem::kLovasz) {
    for (std::size_t i = 0; i < n; ++i) logic_class[i] = static_cast<int>(i);
  } else if (t == Theorem::kModal) {
    ModalTypeDictionary dictionary;
    for (std::size_t i = 0; i < n; ++i) {
      if (!items[i].point) throw PreconditionViolation("the modal theorem compares pointed structures");
      logic_class[i] = modal_types(items[i].structure, params.k, dictionary)[*items[i].point];
    }
  } else {
    std::vector<std::size_t> reps;
    for (std::size_t i = 0; i < n; ++i) {
      int found = -1;
      for (std::size_t c = 0; c < reps.size() && found < 0; ++c) {
        if (logic_verdict(t, params, items[reps[c]], items[i])) found = static_cast<int>(c);
      }
      if (found < 0) {
        found = static_cast<int>(reps.size());
        reps.push_back(i);
      }
      logic_class[i] = found;
    }
  }

  auto& s = report.summary;
  s.pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
  report.all_pairs_listed = s.pairs <= options.list_limit;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool logic = logic_class[i] == logic_class[j];
      const bool agree = hom_class[i] == hom_class[j];
      if (logic && agree) ++s.agree_equivalent;
      else if (!logic && !agree) ++s.agree_distinguished;
      else if (!logic) ++s.exhausted;
      else ++s.failures;
      if (!report.all_pairs_listed && logic == agree) continue;
      VerificationReport r;
      r.a_id = items[i].id;
      r.b_id = items[j].id;
      r.logic_verdict = logic;
      r.hom_vectors_agree = agree;
      r.exhausted = !logic && agree;
      r.exhausted_at = witness_cap;
      if (!agree) {
        std::size_t w = 0;
        while (vectors[i][w] == vectors[j][w]) ++w;
        r.witness = Witness{witnesses[w].id, witnesses[w].structure, witnesses[w].point, vectors[i][w], vectors[j][w]};
      }
      report.pairs.push_back(std::move(r));
    }
  }
  report.seconds = elapsed(start);
  return report;
}

}  // namespace homlab
