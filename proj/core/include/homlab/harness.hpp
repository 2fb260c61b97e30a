#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "homlab/count.hpp"
#include "homlab/structure.hpp"

namespace homlab {

/// Which structures are enumerated: loop-free undirected graphs on "E",
/// arbitrary structures over a signature, or pointed structures.
enum class Universe { kGraph, kStructure, kPointed };

enum class ClassKind { kAll, kTreeDepth, kTreeWidth, kPebbleHeight, kSyncTree };

struct ClassSpec {
  ClassKind kind = ClassKind::kAll;
  int n = 1;  // tree-depth, cover height, or sync-tree height
  int k = 1;  // pebbles: TREEWIDTH means tree-width at most k-1
  Universe universe = Universe::kGraph;
  Signature signature = Signature::graph();
  std::size_t min_size = 1;
  std::size_t max_size = 4;

  static ClassSpec all(Universe u, std::size_t max_size, Signature sig = Signature::graph());
  static ClassSpec tree_depth(int n, std::size_t max_size, Universe u = Universe::kGraph,
                              Signature sig = Signature::graph());
  static ClassSpec tree_width(int k, std::size_t max_size, Universe u = Universe::kGraph,
                              Signature sig = Signature::graph());
  static ClassSpec pebble_height(int k, int n, std::size_t max_size, Universe u = Universe::kGraph,
                                 Signature sig = Signature::graph());
  static ClassSpec sync_tree(int k, std::size_t max_size, Signature sig);

  std::string name() const;
};

struct EnumLimits {
  std::size_t max_graph_size = 7;
  std::size_t max_structure_size = 5;
};

struct Enumerated {
  std::string id;
  RelStructure structure;
  std::optional<Element> point;
};

/// One representative per isomorphism class (pointed isomorphism for
/// pointed universes), ordered by size and then by discovery.
std::vector<Enumerated> enumerate_structures(const ClassSpec& spec, EnumLimits limits = {});

/// Membership of a single structure in the class (ignores size bounds).
bool in_class(const ClassSpec& spec, const RelStructure& a, std::optional<Element> point = {});

enum class Theorem { kLovasz, kGrohe, kDvorak, kCkn, kModal };

std::string theorem_name(Theorem t);
Theorem parse_theorem(const std::string& name);

struct TheoremParams {
  int n = 1;  // depth (grohe, ckn)
  int k = 1;  // width (dvorak, ckn) or modal depth (modal)
};

/// Witness class used for a theorem over a given pair universe.
ClassSpec witness_class(Theorem t, const TheoremParams& params, Universe universe, const Signature& sig,
                        std::size_t witness_cap);

struct Witness {
  std::string id;
  RelStructure structure;
  std::optional<Element> point;
  Count count_a = 0;
  Count count_b = 0;
};

struct VerificationReport {
  std::string a_id;
  std::string b_id;
  bool logic_verdict = false;
  bool hom_vectors_agree = false;
  std::optional<Witness> witness;
  bool exhausted = false;       // distinguished logically, no witness up to the cap
  std::size_t exhausted_at = 0;  // the witness cap scanned
  double seconds = 0;

  bool failure() const { return logic_verdict && !hom_vectors_agree; }
};

/// Logic side of a theorem for one pair.
bool logic_verdict(Theorem t, const TheoremParams& params, const Enumerated& a, const Enumerated& b);

/// Hom count from a witness into a pair member (pointed when both are).
Count witness_count(const Enumerated& witness, const Enumerated& target);

/// Compares the logic verdict with hom counts from the witness class, up to
/// `witness_cap` elements, and reports the first distinguishing witness.
VerificationReport verify_theorem(Theorem t, const Enumerated& a, const Enumerated& b, const TheoremParams& params,
                                  std::size_t witness_cap, Universe universe);

struct SweepSummary {
  std::size_t structures = 0;
  std::size_t witnesses = 0;
  std::size_t pairs = 0;
  std::size_t agree_equivalent = 0;
  std::size_t agree_distinguished = 0;
  std::size_t exhausted = 0;
  std::size_t failures = 0;
};

struct SweepReport {
  Theorem theorem = Theorem::kLovasz;
  TheoremParams params;
  ClassSpec pair_spec;
  ClassSpec witness_spec;
  std::size_t witness_cap = 0;
  /// Every pair when there are at most `list_limit` of them, otherwise only
  /// exhausted and failing pairs.
  bool all_pairs_listed = true;
  std::vector<VerificationReport> pairs;
  SweepSummary summary;
  double seconds = 0;
};

struct SweepOptions {
  std::size_t list_limit = 2000;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// verify_theorem over all unordered pairs of distinct structures of the
/// pair universe, aggregated.
SweepReport sweep(Theorem t, const ClassSpec& pair_spec, const TheoremParams& params, std::size_t witness_cap,
                  SweepOptions options = {});

}  // namespace homlab
