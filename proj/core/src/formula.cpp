#include "homlab/formula.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "homlab/error.hpp"

namespace homlab {

// ---------------------------------------------------------------- builders

CountingFormula CountingFormula::make(Node node) {
  for (const auto& c : node.children) {
    node.depth = std::max(node.depth, c.depth());
    node.variables.insert(c.variables().begin(), c.variables().end());
    node.free.insert(c.free_variables().begin(), c.free_variables().end());
    node.equality_free = node.equality_free && c.equality_free();
    node.negation_free = node.negation_free && c.negation_free();
    node.uses_at_most = node.uses_at_most || c.uses_at_most();
  }
  switch (node.kind) {
    case Kind::kAtom:
    case Kind::kEqual:
      node.variables.insert(node.vars.begin(), node.vars.end());
      node.free.insert(node.vars.begin(), node.vars.end());
      if (node.kind == Kind::kEqual) node.equality_free = false;
      break;
    case Kind::kNot: node.negation_free = false; break;
    case Kind::kAtLeast:
    case Kind::kAtMost:
      node.depth += 1;
      node.variables.insert(node.vars.front());
      node.free.erase(node.vars.front());
      if (node.kind == Kind::kAtMost) node.uses_at_most = true;
      break;
    default: break;
  }
  return CountingFormula(std::make_shared<const Node>(std::move(node)));
}

CountingFormula CountingFormula::atom(std::string symbol, std::vector<std::string> vars) {
  if (vars.empty()) throw MalformedInput("atom needs at least one argument");
  Node n;
  n.kind = Kind::kAtom;
  n.symbol = std::move(symbol);
  n.vars = std::move(vars);
  return make(std::move(n));
}

CountingFormula CountingFormula::equal(std::string x, std::string y) {
  Node n;
  n.kind = Kind::kEqual;
  n.vars = {std::move(x), std::move(y)};
  return make(std::move(n));
}

CountingFormula CountingFormula::negation(CountingFormula body) {
  Node n;
  n.kind = Kind::kNot;
  n.children.push_back(std::move(body));
  return make(std::move(n));
}

CountingFormula CountingFormula::conjunction(std::vector<CountingFormula> parts) {
  Node n;
  n.kind = Kind::kAnd;
  n.children = std::move(parts);
  return make(std::move(n));
}

CountingFormula CountingFormula::disjunction(std::vector<CountingFormula> parts) {
  Node n;
  n.kind = Kind::kOr;
  n.children = std::move(parts);
  return make(std::move(n));
}

CountingFormula CountingFormula::at_least(std::size_t i, std::string x, CountingFormula body) {
  Node n;
  n.kind = Kind::kAtLeast;
  n.threshold = i;
  n.vars = {std::move(x)};
  n.children.push_back(std::move(body));
  return make(std::move(n));
}

CountingFormula CountingFormula::at_most(std::size_t i, std::string x, CountingFormula body) {
  Node n;
  n.kind = Kind::kAtMost;
  n.threshold = i;
  n.vars = {std::move(x)};
  n.children.push_back(std::move(body));
  return make(std::move(n));
}

std::size_t CountingFormula::dag_size() const {
  std::unordered_set<const void*> seen;
  std::vector<const CountingFormula*> stack{this};
  while (!stack.empty()) {
    const auto* f = stack.back();
    stack.pop_back();
    if (!seen.insert(f->id()).second) continue;
    for (const auto& c : f->children()) stack.push_back(&c);
  }
  return seen.size();
}

ModalFormula ModalFormula::make(Node node) {
  for (const auto& c : node.children) node.depth = std::max(node.depth, c.depth());
  if (node.kind == Kind::kDiamond || node.kind == Kind::kBox) {
    if (node.grade < 1) throw MalformedInput("graded modality needs grade at least 1");
    node.depth += 1;
  }
  return ModalFormula(std::make_shared<const Node>(std::move(node)));
}

ModalFormula ModalFormula::prop(std::string p) {
  Node n;
  n.kind = Kind::kProp;
  n.symbol = std::move(p);
  return make(std::move(n));
}

ModalFormula ModalFormula::negation(ModalFormula body) {
  Node n;
  n.kind = Kind::kNot;
  n.children.push_back(std::move(body));
  return make(std::move(n));
}

ModalFormula ModalFormula::conjunction(std::vector<ModalFormula> parts) {
  Node n;
  n.kind = Kind::kAnd;
  n.children = std::move(parts);
  return make(std::move(n));
}

ModalFormula ModalFormula::disjunction(std::vector<ModalFormula> parts) {
  Node n;
  n.kind = Kind::kOr;
  n.children = std::move(parts);
  return make(std::move(n));
}

ModalFormula ModalFormula::diamond(std::string alpha, std::size_t grade, ModalFormula body) {
  Node n;
  n.kind = Kind::kDiamond;
  n.symbol = std::move(alpha);
  n.grade = grade;
  n.children.push_back(std::move(body));
  return make(std::move(n));
}

ModalFormula ModalFormula::box(std::string alpha, std::size_t grade, ModalFormula body) {
  Node n;
  n.kind = Kind::kBox;
  n.symbol = std::move(alpha);
  n.grade = grade;
  n.children.push_back(std::move(body));
  return make(std::move(n));
}

// -------------------------------------------------------------- evaluation

namespace {

using Kind = CountingFormula::Kind;

/// Evaluates with variables compiled to slots and results memoised per node
/// and values of the node's free variables.
class Evaluator {
 public:
  Evaluator(const RelStructure& a, const CountingFormula& phi) : a_(a) {
    for (const auto& v : phi.variables()) slot_.emplace(v, slot_.size());
    env_.assign(slot_.size(), -1);
  }

  void bind(const std::string& name, Element value) {
    if (value >= a_.size()) throw MalformedInput("environment value outside the universe");
    auto it = slot_.find(name);
    if (it != slot_.end()) env_[it->second] = static_cast<std::int64_t>(value);
  }

  bool eval(const CountingFormula& f) {
    auto& in = info(f);
    switch (f.kind()) {
      case Kind::kAtom: {
        scratch_.clear();
        for (auto s : in.slots) scratch_.push_back(value(s));
        return a_.holds(in.symbol, scratch_);
      }
      case Kind::kEqual: return value(in.slots[0]) == value(in.slots[1]);
      default: break;
    }
    auto key = memo_key(f, in);
    if (!key) return eval_compound(f, in);
    if (!in.table.empty()) {
      auto& cell = in.table[key->code];
      if (cell < 0) cell = eval_compound(f, in) ? 1 : 0;
      return cell == 1;
    }
    auto it = memo_.find(*key);
    if (it != memo_.end()) return it->second;
    bool result = eval_compound(f, in);
    memo_.emplace(*key, result);
    return result;
  }

 private:
  struct Key {
    const void* node;
    std::uint64_t code;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<const void*>()(k.node) ^ (std::hash<std::uint64_t>()(k.code) * 0x9e3779b97f4a7c15ULL);
    }
  };

  // Per node: argument slots (atoms, equalities), the bound slot
  // (quantifiers), the free-variable slots used as memo key, and a dense
  // memo table when the key space is small.
  struct Info {
    std::vector<std::size_t> slots;
    std::vector<std::size_t> free;
    std::size_t symbol = 0;
    std::vector<std::int8_t> table;
  };

  static constexpr std::uint64_t kDenseLimit = 4096;

  Info& info(const CountingFormula& f) {
    auto it = info_.find(f.id());
    if (it != info_.end()) return it->second;
    Info in;
    switch (f.kind()) {
      case Kind::kAtom:
        in.symbol = symbol(f);
        [[fallthrough]];
      case Kind::kEqual:
        for (const auto& v : f.vars()) in.slots.push_back(slot_.at(v));
        break;
      case Kind::kAtLeast:
      case Kind::kAtMost: in.slots.push_back(slot_.at(f.variable())); break;
      default: break;
    }
    for (const auto& v : f.free_variables()) in.free.push_back(slot_.at(v));
    if (f.kind() != Kind::kAtom && f.kind() != Kind::kEqual) {
      std::uint64_t cells = 1;
      for (std::size_t i = 0; i < in.free.size() && cells <= kDenseLimit; ++i) cells *= a_.size() + 1;
      if (cells <= kDenseLimit) in.table.assign(cells, -1);
    }
    return info_.emplace(f.id(), std::move(in)).first->second;
  }

  bool eval_compound(const CountingFormula& f, Info& in) {
    switch (f.kind()) {
      case Kind::kNot: return !eval(f.body());
      case Kind::kAnd:
        for (const auto& c : f.children()) {
          if (!eval(c)) return false;
        }
        return true;
      case Kind::kOr:
        for (const auto& c : f.children()) {
          if (eval(c)) return true;
        }
        return false;
      case Kind::kAtLeast:
      case Kind::kAtMost: {
        const bool at_least = f.kind() == Kind::kAtLeast;
        const std::size_t t = f.threshold();
        if (at_least && t == 0) return true;
        if (at_least && t > a_.size()) return false;
        if (!at_least && t >= a_.size()) return true;
        const std::size_t s = in.slots[0];
        const auto saved = env_[s];
        std::size_t count = 0;
        bool decided = false, result = !at_least;
        for (Element x = 0; x < a_.size() && !decided; ++x) {
          env_[s] = x;
          if (eval(f.body())) ++count;
          if (at_least && count >= t) decided = result = true;
          if (!at_least && count > t) {
            decided = true;
            result = false;
          }
        }
        env_[s] = saved;
        return result;
      }
      default: return false;
    }
  }

  std::optional<Key> memo_key(const CountingFormula& f, const Info& in) {
    std::uint64_t code = 0;
    const std::uint64_t base = a_.size() + 1;
    for (auto s : in.free) {
      if (code > (std::numeric_limits<std::uint64_t>::max() - base) / base) return std::nullopt;
      code = code * base + static_cast<std::uint64_t>(env_[s] + 1);
    }
    return Key{f.id(), code};
  }

  std::size_t symbol(const CountingFormula& f) {
    auto it = symbols_.find(f.symbol());
    if (it != symbols_.end()) return it->second;
    auto idx = a_.signature().find(f.symbol());
    if (!idx) throw MalformedInput("unknown relation symbol " + f.symbol());
    if (static_cast<std::size_t>(a_.signature()[*idx].arity) != f.vars().size()) {
      throw MalformedInput("wrong number of arguments for " + f.symbol());
    }
    symbols_.emplace(f.symbol(), *idx);
    return *idx;
  }

  Element value(std::size_t slot) {
    auto s = env_[slot];
    if (s < 0) {
      for (const auto& [name, i] : slot_)
        if (i == slot) throw PreconditionViolation("unbound variable " + name);
    }
    return static_cast<Element>(s);
  }

  const RelStructure& a_;
  std::map<std::string, std::size_t> slot_;
  std::vector<std::int64_t> env_;
  std::unordered_map<Key, bool, KeyHash> memo_;
  std::unordered_map<const void*, Info> info_;
  std::unordered_map<std::string, std::size_t> symbols_;
  std::vector<Element> scratch_;
};

}  // namespace

bool eval_formula(const RelStructure& a, const CountingFormula& phi, const Environment& env) {
  Evaluator ev(a, phi);
  for (const auto& [name, value] : env) ev.bind(name, value);
  return ev.eval(phi);
}

std::vector<bool> eval_modal_all(const RelStructure& a, const ModalFormula& phi) {
  std::unordered_map<const void*, std::vector<bool>> memo;
  auto lookup = [&](const std::string& name, int arity) {
    auto idx = a.signature().find(name);
    if (!idx || a.signature()[*idx].arity != arity) {
      throw MalformedInput("no " + std::string(arity == 1 ? "unary" : "binary") + " symbol named " + name);
    }
    return *idx;
  };
  auto eval = [&](auto&& self, const ModalFormula& f) -> const std::vector<bool>& {
    if (auto it = memo.find(f.id()); it != memo.end()) return it->second;
    std::vector<bool> out(a.size(), false);
    using MK = ModalFormula::Kind;
    switch (f.kind()) {
      case MK::kProp: {
        auto sym = lookup(f.symbol(), 1);
        for (const auto& t : a.tuples(sym)) out[t[0]] = true;
        break;
      }
      case MK::kNot: {
        const auto& b = self(self, f.body());
        for (Element x = 0; x < a.size(); ++x) out[x] = !b[x];
        break;
      }
      case MK::kAnd:
      case MK::kOr: {
        const bool conj = f.kind() == MK::kAnd;
        out.assign(a.size(), conj);
        for (const auto& c : f.children()) {
          const auto& b = self(self, c);
          for (Element x = 0; x < a.size(); ++x) out[x] = conj ? (out[x] && b[x]) : (out[x] || b[x]);
        }
        break;
      }
      case MK::kDiamond:
      case MK::kBox: {
        auto sym = lookup(f.symbol(), 2);
        const auto& b = self(self, f.body());
        const bool diamond = f.kind() == MK::kDiamond;
        std::vector<std::size_t> count(a.size(), 0);
        for (const auto& t : a.tuples(sym)) {
          // Box counts successors refuting the body.
          if (b[t[1]] == diamond) ++count[t[0]];
        }
        for (Element x = 0; x < a.size(); ++x) out[x] = diamond ? count[x] >= f.grade() : count[x] < f.grade();
        break;
      }
    }
    return memo.emplace(f.id(), std::move(out)).first->second;
  };
  return eval(eval, phi);
}

bool eval_modal(const PointedStructure& a, const ModalFormula& phi) {
  return eval_modal_all(a.structure, phi)[a.point];
}

CountingFormula standard_translation(const ModalFormula& phi, const std::string& x, const std::string& y) {
  using MK = ModalFormula::Kind;
  switch (phi.kind()) {
    case MK::kProp: return CountingFormula::atom(phi.symbol(), {x});
    case MK::kNot: return CountingFormula::negation(standard_translation(phi.body(), x, y));
    case MK::kAnd:
    case MK::kOr: {
      std::vector<CountingFormula> parts;
      for (const auto& c : phi.children()) parts.push_back(standard_translation(c, x, y));
      return phi.kind() == MK::kAnd ? CountingFormula::conjunction(std::move(parts))
                                    : CountingFormula::disjunction(std::move(parts));
    }
    case MK::kDiamond:
      return CountingFormula::at_least(
          phi.grade(), y,
          CountingFormula::conjunction({CountingFormula::atom(phi.symbol(), {x, y}),
                                        standard_translation(phi.body(), y, x)}));
    case MK::kBox:
      return CountingFormula::negation(CountingFormula::at_least(
          phi.grade(), y,
          CountingFormula::conjunction({CountingFormula::atom(phi.symbol(), {x, y}),
                                        CountingFormula::negation(standard_translation(phi.body(), y, x))})));
  }
  throw MalformedInput("unknown modal node");
}

// ------------------------------------------------------------ s-expressions

namespace {

struct SExp {
  std::string atom;
  std::vector<SExp> list;
  bool is_list = false;
};

SExp read_sexp(const std::string& text) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
      } else if (text[pos] == ';') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto read = [&](auto&& self) -> SExp {
    skip();
    if (pos >= text.size()) throw ParseError("unexpected end of input");
    if (text[pos] == ')') throw ParseError("unexpected ')' at offset " + std::to_string(pos));
    SExp e;
    if (text[pos] == '(') {
      ++pos;
      e.is_list = true;
      while (true) {
        skip();
        if (pos >= text.size()) throw ParseError("missing ')'");
        if (text[pos] == ')') {
          ++pos;
          return e;
        }
        e.list.push_back(self(self));
      }
    }
    const auto start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '(' &&
           text[pos] != ')') {
      ++pos;
    }
    e.atom = text.substr(start, pos - start);
    return e;
  };
  SExp e = read(read);
  skip();
  if (pos != text.size()) throw ParseError("trailing input at offset " + std::to_string(pos));
  return e;
}

const std::string& word(const SExp& e, const char* what) {
  if (e.is_list) throw ParseError(std::string("expected ") + what + ", found a list");
  return e.atom;
}

std::size_t number(const SExp& e) {
  const auto& w = word(e, "a number");
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), n);
  if (ec != std::errc() || ptr != w.data() + w.size()) throw ParseError("expected a number, found " + w);
  return n;
}

void expect_args(const SExp& e, std::size_t n) {
  if (e.list.size() != n + 1) {
    throw ParseError("'" + e.list[0].atom + "' takes " + std::to_string(n) + " argument(s)");
  }
}

CountingFormula to_counting(const SExp& e) {
  if (!e.is_list) {
    if (e.atom == "true") return CountingFormula::top();
    if (e.atom == "false") return CountingFormula::bottom();
    throw ParseError("unexpected token " + e.atom);
  }
  if (e.list.empty()) throw ParseError("empty list");
  const auto& head = word(e.list[0], "an operator");
  if (head == "geq" || head == "leq") {
    expect_args(e, 3);
    auto i = number(e.list[1]);
    auto x = word(e.list[2], "a variable");
    auto body = to_counting(e.list[3]);
    return head == "geq" ? CountingFormula::at_least(i, x, body) : CountingFormula::at_most(i, x, body);
  }
  if (head == "exists") {
    expect_args(e, 2);
    return CountingFormula::exists(word(e.list[1], "a variable"), to_counting(e.list[2]));
  }
  if (head == "and" || head == "or") {
    std::vector<CountingFormula> parts;
    for (std::size_t i = 1; i < e.list.size(); ++i) parts.push_back(to_counting(e.list[i]));
    return head == "and" ? CountingFormula::conjunction(std::move(parts))
                         : CountingFormula::disjunction(std::move(parts));
  }
  if (head == "not") {
    expect_args(e, 1);
    return CountingFormula::negation(to_counting(e.list[1]));
  }
  if (head == "=") {
    expect_args(e, 2);
    return CountingFormula::equal(word(e.list[1], "a variable"), word(e.list[2], "a variable"));
  }
  if (e.list.size() < 2) throw ParseError("atom " + head + " needs arguments");
  std::vector<std::string> vars;
  for (std::size_t i = 1; i < e.list.size(); ++i) vars.push_back(word(e.list[i], "a variable"));
  return CountingFormula::atom(head, std::move(vars));
}

ModalFormula to_modal(const SExp& e) {
  if (!e.is_list) {
    if (e.atom == "true") return ModalFormula::top();
    if (e.atom == "false") return ModalFormula::disjunction({});
    throw ParseError("unexpected token " + e.atom);
  }
  if (e.list.empty()) throw ParseError("empty list");
  const auto& head = word(e.list[0], "an operator");
  if (head == "prop") {
    expect_args(e, 1);
    return ModalFormula::prop(word(e.list[1], "a proposition"));
  }
  if (head == "not") {
    expect_args(e, 1);
    return ModalFormula::negation(to_modal(e.list[1]));
  }
  if (head == "and" || head == "or") {
    std::vector<ModalFormula> parts;
    for (std::size_t i = 1; i < e.list.size(); ++i) parts.push_back(to_modal(e.list[i]));
    return head == "and" ? ModalFormula::conjunction(std::move(parts)) : ModalFormula::disjunction(std::move(parts));
  }
  if (head == "diamond" || head == "box") {
    expect_args(e, 3);
    auto alpha = word(e.list[1], "a relation");
    auto n = number(e.list[2]);
    if (n < 1) throw ParseError("grade must be at least 1");
    auto body = to_modal(e.list[3]);
    return head == "diamond" ? ModalFormula::diamond(alpha, n, body) : ModalFormula::box(alpha, n, body);
  }
  throw ParseError("unknown modal operator " + head);
}

void print(const CountingFormula& f, std::string& out) {
  switch (f.kind()) {
    case Kind::kAtom:
      out += "(" + f.symbol();
      for (const auto& v : f.vars()) out += " " + v;
      out += ")";
      return;
    case Kind::kEqual: out += "(= " + f.vars()[0] + " " + f.vars()[1] + ")"; return;
    case Kind::kNot:
      out += "(not ";
      print(f.body(), out);
      out += ")";
      return;
    case Kind::kAnd:
    case Kind::kOr:
      if (f.children().empty()) {
        out += f.kind() == Kind::kAnd ? "true" : "false";
        return;
      }
      out += f.kind() == Kind::kAnd ? "(and" : "(or";
      for (const auto& c : f.children()) {
        out += " ";
        print(c, out);
      }
      out += ")";
      return;
    case Kind::kAtLeast:
    case Kind::kAtMost:
      out += f.kind() == Kind::kAtLeast ? "(geq " : "(leq ";
      out += std::to_string(f.threshold()) + " " + f.variable() + " ";
      print(f.body(), out);
      out += ")";
      return;
  }
}

void print(const ModalFormula& f, std::string& out) {
  using MK = ModalFormula::Kind;
  switch (f.kind()) {
    case MK::kProp: out += "(prop " + f.symbol() + ")"; return;
    case MK::kNot:
      out += "(not ";
      print(f.body(), out);
      out += ")";
      return;
    case MK::kAnd:
    case MK::kOr:
      if (f.children().empty()) {
        out += f.kind() == MK::kAnd ? "true" : "false";
        return;
      }
      out += f.kind() == MK::kAnd ? "(and" : "(or";
      for (const auto& c : f.children()) {
        out += " ";
        print(c, out);
      }
      out += ")";
      return;
    case MK::kDiamond:
    case MK::kBox:
      out += f.kind() == MK::kDiamond ? "(diamond " : "(box ";
      out += f.symbol() + " " + std::to_string(f.grade()) + " ";
      print(f.body(), out);
      out += ")";
      return;
  }
}

}  // namespace

CountingFormula parse_counting(const std::string& text) { return to_counting(read_sexp(text)); }
ModalFormula parse_modal(const std::string& text) { return to_modal(read_sexp(text)); }

std::string to_sexp(const CountingFormula& phi) {
  std::string out;
  print(phi, out);
  return out;
}

std::string to_sexp(const ModalFormula& phi) {
  std::string out;
  print(phi, out);
  return out;
}

}  // namespace homlab
