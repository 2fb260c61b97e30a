#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "homlab/structure.hpp"

namespace homlab {

/// First-order formula with counting quantifiers. Immutable; subformulas are
/// shared, so formulas built by lifting are DAGs. true is the empty
/// conjunction and false the empty disjunction.
class CountingFormula {
 public:
  enum class Kind { kAtom, kEqual, kNot, kAnd, kOr, kAtLeast, kAtMost };

  static CountingFormula atom(std::string symbol, std::vector<std::string> vars);
  static CountingFormula equal(std::string x, std::string y);
  static CountingFormula negation(CountingFormula body);
  static CountingFormula conjunction(std::vector<CountingFormula> parts);
  static CountingFormula disjunction(std::vector<CountingFormula> parts);
  /// ∃≥i x. body
  static CountingFormula at_least(std::size_t i, std::string x, CountingFormula body);
  /// ∃≤i x. body
  static CountingFormula at_most(std::size_t i, std::string x, CountingFormula body);
  static CountingFormula exists(std::string x, CountingFormula body) { return at_least(1, std::move(x), std::move(body)); }
  static CountingFormula top() { return conjunction({}); }
  static CountingFormula bottom() { return disjunction({}); }

  Kind kind() const { return node_->kind; }
  const std::string& symbol() const { return node_->symbol; }
  /// Atom and equality arguments; the bound variable (single entry) for quantifiers.
  const std::vector<std::string>& vars() const { return node_->vars; }
  const std::string& variable() const { return node_->vars.front(); }
  const std::vector<CountingFormula>& children() const { return node_->children; }
  const CountingFormula& body() const { return node_->children.front(); }
  std::size_t threshold() const { return node_->threshold; }

  bool is_top() const { return kind() == Kind::kAnd && children().empty(); }
  bool is_bottom() const { return kind() == Kind::kOr && children().empty(); }

  int depth() const { return node_->depth; }
  /// Distinct variable names, bound or free.
  int width() const { return static_cast<int>(node_->variables.size()); }
  const std::set<std::string>& variables() const { return node_->variables; }
  const std::set<std::string>& free_variables() const { return node_->free; }
  bool equality_free() const { return node_->equality_free; }
  bool negation_free() const { return node_->negation_free; }
  bool uses_at_most() const { return node_->uses_at_most; }

  /// Identity of the shared node (stable while the formula is alive).
  const void* id() const { return node_.get(); }
  /// Number of distinct nodes in the DAG.
  std::size_t dag_size() const;

 private:
  struct Node {
    Kind kind = Kind::kAnd;
    std::string symbol;
    std::vector<std::string> vars;
    std::vector<CountingFormula> children;
    std::size_t threshold = 0;
    int depth = 0;
    std::set<std::string> variables, free;
    bool equality_free = true, negation_free = true, uses_at_most = false;
  };
  explicit CountingFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static CountingFormula make(Node node);

  std::shared_ptr<const Node> node_;
};

/// Graded modal formula over unary (propositions) and binary (modalities)
/// symbols. Box^n φ abbreviates ¬Diamond^n ¬φ.
class ModalFormula {
 public:
  enum class Kind { kProp, kNot, kAnd, kOr, kDiamond, kBox };

  static ModalFormula prop(std::string p);
  static ModalFormula negation(ModalFormula body);
  static ModalFormula conjunction(std::vector<ModalFormula> parts);
  static ModalFormula disjunction(std::vector<ModalFormula> parts);
  static ModalFormula diamond(std::string alpha, std::size_t n, ModalFormula body);
  static ModalFormula box(std::string alpha, std::size_t n, ModalFormula body);
  static ModalFormula top() { return conjunction({}); }

  Kind kind() const { return node_->kind; }
  const std::string& symbol() const { return node_->symbol; }
  std::size_t grade() const { return node_->grade; }
  const std::vector<ModalFormula>& children() const { return node_->children; }
  const ModalFormula& body() const { return node_->children.front(); }
  int depth() const { return node_->depth; }
  const void* id() const { return node_.get(); }

 private:
  struct Node {
    Kind kind = Kind::kAnd;
    std::string symbol;
    std::size_t grade = 0;
    std::vector<ModalFormula> children;
    int depth = 0;
  };
  explicit ModalFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static ModalFormula make(Node node);

  std::shared_ptr<const Node> node_;
};

using Environment = std::map<std::string, Element>;

/// Truth of φ in `a` under `env`. Throws PreconditionViolation for a free
/// variable missing from env and MalformedInput for an unknown symbol or a
/// wrong arity.
bool eval_formula(const RelStructure& a, const CountingFormula& phi, const Environment& env = {});

/// Kripke semantics with graded modalities at the point.
bool eval_modal(const PointedStructure& a, const ModalFormula& phi);
/// Truth of φ at every element.
std::vector<bool> eval_modal_all(const RelStructure& a, const ModalFormula& phi);

/// tr(φ) in the free variable `x`; nested modalities alternate between `x`
/// and `y`, so the result uses at most two variables.
CountingFormula standard_translation(const ModalFormula& phi, const std::string& x = "x",
                                     const std::string& y = "y");

/// Prefix S-expressions:
///   (geq 3 x φ) (leq 1 x φ) (exists x φ) (and φ...) (or φ...) (not φ)
///   (= x y) (R x y ...) true false
///   (diamond alpha 2 φ) (box alpha 1 φ) (prop p)
CountingFormula parse_counting(const std::string& text);
ModalFormula parse_modal(const std::string& text);
std::string to_sexp(const CountingFormula& phi);
std::string to_sexp(const ModalFormula& phi);

}  // namespace homlab
