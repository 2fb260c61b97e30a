#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "homlab/comonads.hpp"
#include "homlab/constructions.hpp"
#include "homlab/covers.hpp"
#include "homlab/equivalence.hpp"
#include "homlab/error.hpp"
#include "homlab/formula.hpp"
#include "homlab/graphs.hpp"
#include "homlab/harness.hpp"
#include "homlab/hom_count.hpp"
#include "homlab/io.hpp"
#include "homlab/normal_forms.hpp"

namespace fs = std::filesystem;
using namespace homlab;

namespace {

// "E:2,P:1"
Signature parse_signature(const std::string& text) {
  std::vector<Symbol> symbols;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw MalformedInput("signature entry '" + item + "' lacks ':arity'");
    symbols.push_back({item.substr(0, colon), std::stoi(item.substr(colon + 1))});
  }
  return Signature(symbols);
}

Universe parse_universe(const std::string& name) {
  if (name == "graph") return Universe::kGraph;
  if (name == "structure") return Universe::kStructure;
  if (name == "pointed") return Universe::kPointed;
  throw MalformedInput("unknown universe " + name);
}

Enumerated load_enumerated(const std::string& path) {
  auto loaded = load_structure(path);
  return {fs::path(path).stem().string(), std::move(loaded.structure), loaded.point};
}

Universe infer_universe(const std::vector<Enumerated>& items) {
  bool pointed = !items.empty(), graph = true;
  for (const auto& e : items) {
    pointed = pointed && e.point.has_value();
    graph = graph && graphs::is_simple_graph(e.structure);
  }
  return pointed ? Universe::kPointed : graph ? Universe::kGraph : Universe::kStructure;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw MalformedInput("cannot write " + out);
  f << text << "\n";
}

std::string verdict(bool equivalent) { return equivalent ? "equivalent" : "distinguished"; }

struct HarnessArgs {
  std::string theorem = "lovasz";
  int k = 1;
  int depth = 1;
  std::size_t max_size = 4;
  std::size_t witness_cap = 5;
  std::string universe;
  std::string signature;
  std::string out;
  unsigned threads = 0;
};

void add_harness_options(CLI::App* cmd, HarnessArgs& h) {
  cmd->add_option("--theorem", h.theorem, "lovasz | grohe | dvorak | ckn | modal")->required();
  cmd->add_option("--k", h.k, "pebbles (dvorak, ckn) or modal depth");
  cmd->add_option("--depth,--n", h.depth, "quantifier depth (grohe, ckn)");
  cmd->add_option("--max-size", h.max_size, "largest structure in the pair universe");
  cmd->add_option("--witness-cap", h.witness_cap, "largest witness scanned");
  cmd->add_option("--universe", h.universe, "graph | structure | pointed");
  cmd->add_option("--signature", h.signature, "symbols for structure universes, e.g. E:2,P:1");
  cmd->add_option("--out", h.out, "write the JSON report here");
  cmd->add_option("--threads", h.threads, "worker threads (0: all cores)");
}

TheoremParams theorem_params(const HarnessArgs& h) { return {h.depth, h.k}; }

ClassSpec pair_universe(const HarnessArgs& h, Theorem t) {
  Universe u = t == Theorem::kModal ? Universe::kPointed : Universe::kGraph;
  if (!h.universe.empty()) u = parse_universe(h.universe);
  Signature sig = u == Universe::kGraph ? Signature::graph() : parse_signature(h.signature.empty() ? "E:2,P:1" : h.signature);
  if (u == Universe::kGraph && !h.signature.empty()) throw MalformedInput("--signature needs a non-graph universe");
  return ClassSpec::all(u, h.max_size, sig);
}

int run_sweep(const HarnessArgs& h) {
  const auto t = parse_theorem(h.theorem);
  SweepOptions options;
  options.threads = h.threads;
  auto report = sweep(t, pair_universe(h, t), theorem_params(h), h.witness_cap, options);
  emit(sweep_to_json(report), h.out);
  std::cerr << report.summary.pairs << " pairs, " << report.summary.failures << " failures, "
            << report.summary.exhausted << " exhausted (" << report.seconds << " s)\n";
  return report.summary.failures == 0 ? 0 : 1;
}

int run_verify(const HarnessArgs& h, const std::string& pairs_dir, const std::vector<std::string>& files) {
  const auto t = parse_theorem(h.theorem);
  if (pairs_dir.empty() && files.empty()) return run_sweep(h);

  std::vector<std::string> paths = files;
  if (!pairs_dir.empty()) {
    for (const auto& entry : fs::directory_iterator(pairs_dir)) {
      if (entry.is_regular_file()) paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
  }
  std::vector<Enumerated> items;
  for (const auto& p : paths) items.push_back(load_enumerated(p));
  if (items.size() < 2) throw MalformedInput("verify needs at least two structures");
  for (const auto& e : items) {
    if (e.structure.size() > h.max_size) {
      throw CapExceeded(e.id + " has " + std::to_string(e.structure.size()) + " elements, above --max-size");
    }
  }

  SweepReport report;
  report.theorem = t;
  report.params = theorem_params(h);
  report.witness_cap = h.witness_cap;
  const Universe u = h.universe.empty() ? infer_universe(items) : parse_universe(h.universe);
  report.pair_spec = ClassSpec::all(u, h.max_size, items.front().structure.signature());
  report.witness_spec = witness_class(t, report.params, u, report.pair_spec.signature, h.witness_cap);
  auto& s = report.summary;
  s.structures = items.size();
  s.witnesses = enumerate_structures(report.witness_spec).size();
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      auto r = verify_theorem(t, items[i], items[j], report.params, h.witness_cap, u);
      ++s.pairs;
      if (r.failure()) ++s.failures;
      else if (r.exhausted) ++s.exhausted;
      else if (r.logic_verdict) ++s.agree_equivalent;
      else ++s.agree_distinguished;
      report.pairs.push_back(std::move(r));
    }
  }
  emit(sweep_to_json(report), h.out);
  return s.failures == 0 ? 0 : 1;
}

PebbleForestCover as_pebble_cover(const std::variant<ForestCover, PebbleForestCover>& cover) {
  if (const auto* p = std::get_if<PebbleForestCover>(&cover)) return *p;
  const auto& f = std::get<ForestCover>(cover);
  // Distinct pebbles along every root path: use the depth.
  std::vector<int> pebbles(f.size());
  for (Element a = 0; a < f.size(); ++a) pebbles[a] = f.depth(a);
  return {f, pebbles, f.height};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homomorphism counts, game comonads and counting logics on finite structures"};
  app.require_subcommand(1);

  std::string source, target, treedec, out, a_path, b_path, formula_path, cover_path;
  bool strong = false;

  auto* hom = app.add_subcommand("hom-count", "number of homomorphisms source -> target");
  hom->add_option("--source", source)->required();
  hom->add_option("--target", target)->required();
  hom->add_flag("--strong-emb", strong, "count strong embeddings instead");
  hom->add_option("--treedec", treedec, "pebble forest cover of the source for the DP");

  auto* td = app.add_subcommand("treedepth", "exact tree-depth and an optimal forest cover");
  td->add_option("structure", a_path)->required();

  auto* tw = app.add_subcommand("treewidth", "exact tree-width and a matching pebble cover");
  tw->add_option("structure", a_path)->required();

  int k = 0, height = 0;
  auto* cover = app.add_subcommand("cover", "search for a k-pebble forest cover of bounded height");
  cover->add_option("structure", a_path)->required();
  cover->add_option("--k", k, "pebbles")->required();
  cover->add_option("--height", height, "height bound");

  auto* elim = app.add_subcommand("eliminate", "quotient away the equality symbol I along a pebble cover");
  elim->add_option("structure", a_path)->required();
  elim->add_option("cover", cover_path)->required();

  std::string kind = "ef";
  int n = 1;
  auto* comonad = app.add_subcommand("comonad", "carrier of E_n, P_{k,n} or M_k");
  comonad->add_option("structure", a_path)->required();
  comonad->add_option("--kind", kind, "ef | pebble | modal");
  comonad->add_option("--n", n, "play length");
  comonad->add_option("--k", k, "pebbles or modal depth");
  comonad->add_option("--out", out, "write <out>.json and <out>.sidecar.json");

  std::string logic = "cn";
  std::optional<int> depth, width;
  auto* equiv = app.add_subcommand("equiv", "decide equivalence in C_n, C^k, C^k_n or graded modal logic");
  equiv->add_option("a", a_path)->required();
  equiv->add_option("b", b_path)->required();
  equiv->add_option("--logic", logic, "cn | ck | ckn | modal");
  equiv->add_option("--depth", depth);
  equiv->add_option("--width", width);

  int wl_k = 1;
  auto* wl = app.add_subcommand("wl", "k-dimensional Weisfeiler-Leman refinement of two graphs");
  wl->add_option("a", a_path)->required();
  wl->add_option("b", b_path)->required();
  wl->add_option("--k", wl_k);

  std::vector<std::string> assignments;
  auto* eval = app.add_subcommand("eval", "evaluate a counting or modal formula");
  eval->add_option("structure", a_path)->required();
  eval->add_option("formula", formula_path)->required();
  eval->add_option("--let", assignments, "free variable binding x=3");

  auto* ccq = app.add_subcommand("ccq", "canonical conjunctive query of a structure");
  ccq->add_option("structure", a_path)->required();
  ccq->add_option("--cover", cover_path);

  std::size_t t = 1;
  auto* lift = app.add_subcommand("lift", "counting lift of a primitive positive formula");
  lift->add_option("formula", formula_path)->required();
  lift->add_option("--t", t)->required();

  std::size_t bound = 1;
  bool print_sentence = false;
  auto* demo = app.add_subcommand("demo", "worked examples");
  demo->require_subcommand(1);
  auto* distinct = demo->add_subcommand("distinct-edge", "equality-free edge sentence against the reference");
  distinct->add_option("structure", a_path)->required();
  distinct->add_option("--bound", bound);
  distinct->add_flag("--print", print_sentence, "print the sentence");

  HarnessArgs hv, hs;
  std::string pairs_dir;
  std::vector<std::string> pair_files;
  auto* verify = app.add_subcommand("verify", "check a theorem on given pairs or on an enumerated universe");
  add_harness_options(verify, hv);
  verify->add_option("--pairs", pairs_dir, "directory of structure files; all pairs are checked");
  verify->add_option("files", pair_files, "structure files; all pairs are checked");

  auto* sw = app.add_subcommand("sweep", "check a theorem over all pairs of an enumerated universe");
  add_harness_options(sw, hs);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*hom) {
      auto c = load_structure(source).structure;
      auto a = load_structure(target).structure;
      if (strong) {
        std::cout << strong_emb_count(c, a) << "\n";
      } else if (!treedec.empty()) {
        std::cout << hom_count_treedec(c, as_pebble_cover(load_cover(treedec, c)), a) << "\n";
      } else {
        std::cout << hom_count(c, a) << "\n";
      }
    } else if (*td) {
      auto a = load_structure(a_path).structure;
      auto r = compute_tree_depth(a);
      std::cout << r.depth << "\n" << cover_to_json(r.cover) << "\n";
    } else if (*tw) {
      auto a = load_structure(a_path).structure;
      const int w = tree_width(a);
      std::cout << w << "\n";
      if (auto c = find_pebble_forest_cover(a, w + 1)) std::cout << cover_to_json(*c) << "\n";
    } else if (*cover) {
      auto a = load_structure(a_path).structure;
      auto c = find_pebble_forest_cover(a, k, height > 0 ? std::optional<int>(height) : std::nullopt);
      if (!c) {
        std::cout << "null\n";
        return 1;
      }
      std::cout << cover_to_json(*c) << "\n";
    } else if (*elim) {
      auto a = load_structure(a_path).structure;
      auto e = eliminate_equalities(a, as_pebble_cover(load_cover(cover_path, a)));
      std::cout << structure_to_json(e.structure) << "\n" << cover_to_json(e.cover) << "\n";
      for (std::size_t i = 0; i < e.quotient_map.size(); ++i) std::cout << (i ? " " : "") << e.quotient_map[i];
      std::cout << "\n";
    } else if (*comonad) {
      auto loaded = load_structure(a_path);
      ComonadKind ck = kind == "ef"       ? ComonadKind::ef(n)
                       : kind == "pebble" ? ComonadKind::pebble(k, n)
                       : kind == "modal"  ? ComonadKind::modal(k)
                                          : throw MalformedInput("unknown comonad " + kind);
      auto cs = ck.tag == ComonadTag::kModal ? build_comonad(ck, loaded.pointed()) : build_comonad(ck, loaded.structure);
      if (out.empty()) {
        std::cout << comonad_to_json(cs) << "\n";
      } else {
        emit(comonad_carrier_json(cs), out + ".json");
        emit(comonad_sidecar_json(cs), out + ".sidecar.json");
      }
    } else if (*equiv) {
      auto a = load_structure(a_path), b = load_structure(b_path);
      if (logic == "modal") {
        std::cout << verdict(modal_equiv(a.pointed(), b.pointed(), depth.value_or(1))) << "\n";
        return 0;
      }
      if (logic == "cn" && !depth) throw MalformedInput("--logic cn needs --depth");
      if (logic == "ck" && !width) throw MalformedInput("--logic ck needs --width");
      if (logic == "ckn" && !(depth && width)) throw MalformedInput("--logic ckn needs --depth and --width");
      if (logic != "cn" && logic != "ck" && logic != "ckn") throw MalformedInput("unknown logic " + logic);
      const auto d = logic == "ck" ? std::nullopt : depth;
      const auto w = logic == "cn" ? std::nullopt : width;
      auto phi = distinguishing_formula(a.structure, b.structure, d, w);
      std::cout << verdict(!phi) << "\n";
      if (phi) std::cout << to_sexp(*phi) << "\n";
    } else if (*wl) {
      auto r = kwl_refine(load_structure(a_path).structure, load_structure(b_path).structure, wl_k);
      std::cout << verdict(r.equivalent) << "\nrounds " << r.first.rounds << "\n";
    } else if (*eval) {
      auto a = load_structure(a_path);
      const auto text = read_text_file(formula_path);
      const std::regex modal_head(R"(\(\s*(diamond|box|prop)\s)");
      if (std::regex_search(text, modal_head)) {
        std::cout << (eval_modal(a.pointed(), parse_modal(text)) ? "true" : "false") << "\n";
        return 0;
      }
      std::optional<CountingFormula> phi = parse_counting(text);
      Environment env;
      for (const auto& kv : assignments) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw MalformedInput("--let expects x=element");
        env[kv.substr(0, eq)] = static_cast<Element>(std::stoul(kv.substr(eq + 1)));
      }
      std::cout << (eval_formula(a.structure, *phi, env) ? "true" : "false") << "\n";
    } else if (*ccq) {
      auto a = load_structure(a_path).structure;
      if (cover_path.empty()) {
        std::cout << to_sexp(canonical_conjunctive_query(a).formula()) << "\n";
      } else {
        auto c = load_cover(cover_path, a);
        auto gamma = std::holds_alternative<ForestCover>(c)
                         ? canonical_conjunctive_query(a, std::get<ForestCover>(c))
                         : canonical_conjunctive_query(a, std::get<PebbleForestCover>(c));
        std::cout << to_sexp(gamma.formula()) << "\n";
      }
    } else if (*lift) {
      PrimitivePositiveFormula gamma(parse_counting(read_text_file(formula_path)));
      std::cout << to_sexp(threshold_lift(gamma, t)) << "\n";
    } else if (*distinct) {
      auto b = load_structure(a_path).structure;
      auto sentence = distinct_edge_sentence(bound);
      if (print_sentence) std::cout << to_sexp(sentence) << "\n";
      const bool lifted = eval_formula(b, sentence), reference = eval_formula(b, distinct_edge_reference());
      std::cout << "equality-free " << (lifted ? "true" : "false") << "\nreference " << (reference ? "true" : "false")
                << "\n";
      if (b.size() * b.size() > bound) std::cerr << "note: |B|^2 exceeds --bound; agreement is not guaranteed\n";
      return lifted == reference ? 0 : 1;
    } else if (*verify) {
      return run_verify(hv, pairs_dir, pair_files);
    } else if (*sw) {
      return run_sweep(hs);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
