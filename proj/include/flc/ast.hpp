#pragma once

// Abstract syntax for FLC, a small lazy functional-logic language:
// data declarations, first-order patterns/expressions (including functional
// patterns), guarded rules with free variables, and the syntactic analyses
// (occurrence counting, extra variables, linearity) the transformer needs.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace flc {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// ------------------------------
// types (used by data decls and optional signatures)
// ------------------------------

// A type expression: head applied to arguments. The head is a declared type
// name, a lowercase type variable, or "->" for function types (documentation
// only; FLC itself is untyped).
struct TypeExpr {
  std::string head;
  std::vector<TypeExpr> args;
};

inline bool operator==(const TypeExpr& a, const TypeExpr& b) {
  return a.head == b.head && a.args == b.args;
}
inline bool operator!=(const TypeExpr& a, const TypeExpr& b) { return !(a == b); }

inline bool isTypeVar(const TypeExpr& t) {
  return t.args.empty() && !t.head.empty() && (std::islower(static_cast<unsigned char>(t.head[0])) != 0);
}

// Substitutes every type variable by `ground` (used to pick enumeration
// domains for polymorphic signatures).
inline TypeExpr instantiateTypeVars(const TypeExpr& t, const TypeExpr& ground) {
  if (isTypeVar(t)) return ground;
  TypeExpr out{t.head, {}};
  out.args.reserve(t.args.size());
  for (const auto& a : t.args) out.args.push_back(instantiateTypeVars(a, ground));
  return out;
}

// ------------------------------
// data declarations
// ------------------------------

struct CtorDecl {
  std::string name;
  std::vector<TypeExpr> argTypes;

  std::size_t arity() const { return argTypes.size(); }
};

struct DataDecl {
  std::string typeName;
  std::vector<std::string> params;
  std::vector<CtorDecl> ctors;
  bool fromPrelude = false;
};

inline bool operator==(const CtorDecl& a, const CtorDecl& b) {
  return a.name == b.name && a.argTypes == b.argTypes;
}
inline bool operator==(const DataDecl& a, const DataDecl& b) {
  return a.typeName == b.typeName && a.params == b.params && a.ctors == b.ctors &&
         a.fromPrelude == b.fromPrelude;
}

// ------------------------------
// patterns
// ------------------------------

struct Pattern;

struct PVar {
  std::string name;
};
struct PCtor {
  std::string ctor;
  std::vector<Pattern> args;
};
// A function symbol inside a pattern; a pattern containing one anywhere is a
// functional pattern and must be elaborated before evaluation.
struct PFun {
  std::string fn;
  std::vector<Pattern> args;
};

struct Pattern {
  std::variant<PVar, PCtor, PFun> node;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

inline Pattern pVar(std::string n) { return Pattern{PVar{std::move(n)}}; }
inline Pattern pCtor(std::string c, std::vector<Pattern> args = {}) {
  return Pattern{PCtor{std::move(c), std::move(args)}};
}
inline Pattern pFun(std::string f, std::vector<Pattern> args = {}) {
  return Pattern{PFun{std::move(f), std::move(args)}};
}

// ------------------------------
// expressions
// ------------------------------

struct Expr;
struct Constraint;

struct EVar {
  std::string name;
};
struct ECtor {
  std::string ctor;
  std::vector<Expr> args;
};
// First-order application of a named function. `fnIsVar` marks the lenient
// representation of a variable in function position (higher-order source,
// accepted only so the classifier can reject it).
struct EApp {
  std::string fn;
  std::vector<Expr> args;
  bool fnIsVar = false;
};
struct CaseBranch {
  Pattern pat;  // constructor-rooted, linear, flat (variable children only)
  std::vector<Constraint> guards;
  std::shared_ptr<const Expr> body;
};
struct ECase {
  std::shared_ptr<const Expr> scrutinee;
  std::vector<CaseBranch> branches;
};
struct EFail {};

struct Expr {
  std::variant<EVar, ECtor, EApp, ECase, EFail> node;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

enum class UnifyMode { Strict, NonStrict };

// A unification guard `lhs =:= rhs` (Strict) or `lhs =:<= rhs` (NonStrict).
// Non-strict constraints require a linear lhs.
struct Constraint {
  UnifyMode mode;
  Expr lhs;
  Expr rhs;
};

inline Expr eVar(std::string n) { return Expr{EVar{std::move(n)}}; }
inline Expr eCtor(std::string c, std::vector<Expr> args = {}) {
  return Expr{ECtor{std::move(c), std::move(args)}};
}
inline Expr eApp(std::string f, std::vector<Expr> args = {}, bool fnIsVar = false) {
  return Expr{EApp{std::move(f), std::move(args), fnIsVar}};
}
inline Expr eCase(Expr scrut, std::vector<CaseBranch> branches) {
  return Expr{ECase{std::make_shared<const Expr>(std::move(scrut)), std::move(branches)}};
}
inline Expr eFail() { return Expr{EFail{}}; }
inline CaseBranch branch(Pattern p, Expr body, std::vector<Constraint> guards = {}) {
  return CaseBranch{std::move(p), std::move(guards), std::make_shared<const Expr>(std::move(body))};
}

// ------------------------------
// rules, functions, programs
// ------------------------------

enum class Origin { UserWritten, Synthesized };

struct Rule {
  std::vector<Pattern> params;
  std::vector<Constraint> guards;
  Expr body;
  std::vector<std::string> freeVars;  // `where ... free`, declaration order
};

struct Signature {
  std::vector<TypeExpr> argTypes;
  TypeExpr result;
};

struct FuncDef {
  std::string name;
  std::size_t arity = 0;
  std::vector<Rule> rules;
  Origin origin = Origin::UserWritten;
  std::optional<Signature> signature;  // documentation only
};

struct Program {
  std::vector<DataDecl> dataDecls;
  std::vector<FuncDef> funcs;

  const FuncDef* func(const std::string& name) const {
    for (const auto& f : funcs)
      if (f.name == name) return &f;
    return nullptr;
  }
  FuncDef* func(const std::string& name) {
    for (auto& f : funcs)
      if (f.name == name) return &f;
    return nullptr;
  }
  const DataDecl* dataDecl(const std::string& typeName) const {
    for (const auto& d : dataDecls)
      if (d.typeName == typeName) return &d;
    return nullptr;
  }
  // Declaration site of a constructor, or (nullptr, nullptr).
  std::pair<const DataDecl*, const CtorDecl*> ctor(const std::string& name) const {
    for (const auto& d : dataDecls)
      for (const auto& c : d.ctors)
        if (c.name == name) return {&d, &c};
    return {nullptr, nullptr};
  }
};

// ------------------------------
// structural equality
// ------------------------------

bool equal(const Expr& a, const Expr& b);

inline bool equal(const Pattern& a, const Pattern& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      Overloaded{
          [&](const PVar& x) { return x.name == b.as<PVar>()->name; },
          [&](const PCtor& x) {
            const auto* y = b.as<PCtor>();
            if (x.ctor != y->ctor || x.args.size() != y->args.size()) return false;
            for (std::size_t i = 0; i < x.args.size(); ++i)
              if (!equal(x.args[i], y->args[i])) return false;
            return true;
          },
          [&](const PFun& x) {
            const auto* y = b.as<PFun>();
            if (x.fn != y->fn || x.args.size() != y->args.size()) return false;
            for (std::size_t i = 0; i < x.args.size(); ++i)
              if (!equal(x.args[i], y->args[i])) return false;
            return true;
          },
      },
      a.node);
}

inline bool equal(const Constraint& a, const Constraint& b) {
  return a.mode == b.mode && equal(a.lhs, b.lhs) && equal(a.rhs, b.rhs);
}

inline bool equalConstraints(const std::vector<Constraint>& a, const std::vector<Constraint>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

inline bool equal(const CaseBranch& a, const CaseBranch& b) {
  return equal(a.pat, b.pat) && equalConstraints(a.guards, b.guards) && equal(*a.body, *b.body);
}

inline bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      Overloaded{
          [&](const EVar& x) { return x.name == b.as<EVar>()->name; },
          [&](const ECtor& x) {
            const auto* y = b.as<ECtor>();
            if (x.ctor != y->ctor || x.args.size() != y->args.size()) return false;
            for (std::size_t i = 0; i < x.args.size(); ++i)
              if (!equal(x.args[i], y->args[i])) return false;
            return true;
          },
          [&](const EApp& x) {
            const auto* y = b.as<EApp>();
            if (x.fn != y->fn || x.fnIsVar != y->fnIsVar || x.args.size() != y->args.size())
              return false;
            for (std::size_t i = 0; i < x.args.size(); ++i)
              if (!equal(x.args[i], y->args[i])) return false;
            return true;
          },
          [&](const ECase& x) {
            const auto* y = b.as<ECase>();
            if (!equal(*x.scrutinee, *y->scrutinee)) return false;
            if (x.branches.size() != y->branches.size()) return false;
            for (std::size_t i = 0; i < x.branches.size(); ++i)
              if (!equal(x.branches[i], y->branches[i])) return false;
            return true;
          },
          [&](const EFail&) { return true; },
      },
      a.node);
}

inline bool equal(const Rule& a, const Rule& b) {
  if (a.params.size() != b.params.size() || a.freeVars != b.freeVars) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (!equal(a.params[i], b.params[i])) return false;
  return equalConstraints(a.guards, b.guards) && equal(a.body, b.body);
}

// Signature and origin are metadata and do not take part in equality.
inline bool equal(const FuncDef& a, const FuncDef& b) {
  if (a.name != b.name || a.arity != b.arity || a.rules.size() != b.rules.size()) return false;
  for (std::size_t i = 0; i < a.rules.size(); ++i)
    if (!equal(a.rules[i], b.rules[i])) return false;
  return true;
}

inline bool equal(const Program& a, const Program& b) {
  if (!(a.dataDecls == b.dataDecls) || a.funcs.size() != b.funcs.size()) return false;
  for (std::size_t i = 0; i < a.funcs.size(); ++i)
    if (!equal(a.funcs[i], b.funcs[i])) return false;
  return true;
}

// ------------------------------
// syntactic analyses
// ------------------------------

using OccurrenceMap = std::map<std::string, int>;

inline void countVars(const Pattern& p, OccurrenceMap& out) {
  std::visit(Overloaded{
                 [&](const PVar& v) { ++out[v.name]; },
                 [&](const PCtor& c) {
                   for (const auto& a : c.args) countVars(a, out);
                 },
                 [&](const PFun& f) {
                   for (const auto& a : f.args) countVars(a, out);
                 },
             },
             p.node);
}

// Counts every variable occurrence; case-branch pattern variables are binders,
// not occurrences, and are not counted.
inline void countVars(const Expr& e, OccurrenceMap& out) {
  std::visit(Overloaded{
                 [&](const EVar& v) { ++out[v.name]; },
                 [&](const ECtor& c) {
                   for (const auto& a : c.args) countVars(a, out);
                 },
                 [&](const EApp& a) {
                   if (a.fnIsVar) ++out[a.fn];
                   for (const auto& x : a.args) countVars(x, out);
                 },
                 [&](const ECase& c) {
                   countVars(*c.scrutinee, out);
                   for (const auto& br : c.branches) {
                     for (const auto& g : br.guards) {
                       countVars(g.lhs, out);
                       countVars(g.rhs, out);
                     }
                     countVars(*br.body, out);
                   }
                 },
                 [&](const EFail&) {},
             },
             e.node);
}

inline OccurrenceMap varOccurrences(const Pattern& p) {
  OccurrenceMap m;
  countVars(p, m);
  return m;
}
inline OccurrenceMap varOccurrences(const Expr& e) {
  OccurrenceMap m;
  countVars(e, m);
  return m;
}

inline bool isLinear(const Pattern& p) {
  auto occ = varOccurrences(p);
  return std::all_of(occ.begin(), occ.end(), [](const auto& kv) { return kv.second <= 1; });
}
inline bool isLinear(const Expr& e) {
  auto occ = varOccurrences(e);
  return std::all_of(occ.begin(), occ.end(), [](const auto& kv) { return kv.second <= 1; });
}

inline std::set<std::string> patternVars(const Pattern& p) {
  auto occ = varOccurrences(p);
  std::set<std::string> out;
  for (const auto& [k, v] : occ) out.insert(k);
  return out;
}

struct ExtraVars {
  std::set<std::string> unusedLhs;   // lhs pattern variables never used on the rhs
  std::set<std::string> whereFree;   // `where ... free` variables
};

inline ExtraVars extraVars(const Rule& r) {
  OccurrenceMap used;
  for (const auto& g : r.guards) {
    countVars(g.lhs, used);
    countVars(g.rhs, used);
  }
  countVars(r.body, used);

  ExtraVars out;
  for (const auto& p : r.params)
    for (const auto& v : patternVars(p))
      if (used.find(v) == used.end()) out.unusedLhs.insert(v);
  out.whereFree.insert(r.freeVars.begin(), r.freeVars.end());
  return out;
}

// Deterministic fresh-name supply: base, then base with the smallest numeric
// suffix not in `avoid`.
inline std::string freshName(const std::string& base, const std::set<std::string>& avoid) {
  if (avoid.find(base) == avoid.end()) return base;
  for (int i = 1;; ++i) {
    std::string cand = base + std::to_string(i);
    if (avoid.find(cand) == avoid.end()) return cand;
  }
}

// ------------------------------
// pattern/expression conversions
// ------------------------------

inline bool containsFunCall(const Pattern& p) {
  return std::visit(Overloaded{
                        [](const PVar&) { return false; },
                        [](const PCtor& c) {
                          return std::any_of(c.args.begin(), c.args.end(),
                                             [](const Pattern& a) { return containsFunCall(a); });
                        },
                        [](const PFun&) { return true; },
                    },
                    p.node);
}

inline bool isFunctionalPattern(const Pattern& p) { return containsFunCall(p); }

inline Expr exprOfPattern(const Pattern& p) {
  return std::visit(Overloaded{
                        [](const PVar& v) { return eVar(v.name); },
                        [](const PCtor& c) {
                          std::vector<Expr> args;
                          args.reserve(c.args.size());
                          for (const auto& a : c.args) args.push_back(exprOfPattern(a));
                          return eCtor(c.ctor, std::move(args));
                        },
                        [](const PFun& f) {
                          std::vector<Expr> args;
                          args.reserve(f.args.size());
                          for (const auto& a : f.args) args.push_back(exprOfPattern(a));
                          return eApp(f.fn, std::move(args));
                        },
                    },
                    p.node);
}

// Reads an equation body as a pattern (App becomes FunCall). Throws on Case
// or `failed`, which have no pattern form.
inline Pattern patternOfExpr(const Expr& e) {
  return std::visit(
      Overloaded{
          [](const EVar& v) { return pVar(v.name); },
          [](const ECtor& c) {
            std::vector<Pattern> args;
            args.reserve(c.args.size());
            for (const auto& a : c.args) args.push_back(patternOfExpr(a));
            return pCtor(c.ctor, std::move(args));
          },
          [](const EApp& a) {
            if (a.fnIsVar) throw std::logic_error("patternOfExpr: variable in function position");
            std::vector<Pattern> args;
            args.reserve(a.args.size());
            for (const auto& x : a.args) args.push_back(patternOfExpr(x));
            return pFun(a.fn, std::move(args));
          },
          [](const ECase&) -> Pattern { throw std::logic_error("patternOfExpr: case expression"); },
          [](const EFail&) -> Pattern { throw std::logic_error("patternOfExpr: failed"); },
      },
      e.node);
}

// A pattern is flat if it is a variable or a constructor applied to variables.
inline bool isFlat(const Pattern& p) {
  if (p.as<PVar>()) return true;
  if (const auto* c = p.as<PCtor>())
    return std::all_of(c->args.begin(), c->args.end(),
                       [](const Pattern& a) { return a.as<PVar>() != nullptr; });
  return false;
}

// Rewrites a constructor pattern to depth one, pushing nested structure into
// case expressions wrapped around `body`. The leftmost nested child ends up
// in the outermost case. Fresh variables are drawn from `avoid`, which grows.
inline std::pair<Pattern, Expr> flattenPattern(const Pattern& pat, Expr body,
                                               std::set<std::string>& avoid) {
  if (pat.as<PVar>()) return {pat, std::move(body)};
  const auto* c = pat.as<PCtor>();
  if (c == nullptr) throw std::logic_error("flattenPattern: functional pattern");

  std::vector<Pattern> flatArgs;
  std::vector<std::pair<std::string, Pattern>> nested;  // fresh var -> subpattern
  for (const auto& a : c->args) {
    if (a.as<PVar>()) {
      flatArgs.push_back(a);
    } else {
      std::string z = freshName("z", avoid);
      avoid.insert(z);
      flatArgs.push_back(pVar(z));
      nested.emplace_back(z, a);
    }
  }
  for (auto it = nested.rbegin(); it != nested.rend(); ++it) {
    auto [sub, inner] = flattenPattern(it->second, std::move(body), avoid);
    body = eCase(eVar(it->first), {branch(std::move(sub), std::move(inner))});
  }
  return {pCtor(c->ctor, std::move(flatArgs)), std::move(body)};
}

// ------------------------------
// scans over definitions (standard-code checks)
// ------------------------------

inline void forEachExpr(const Expr& e, const std::function<void(const Expr&)>& f);

inline void forEachExpr(const Expr& e, const std::function<void(const Expr&)>& f) {
  f(e);
  std::visit(Overloaded{
                 [&](const EVar&) {},
                 [&](const ECtor& c) {
                   for (const auto& a : c.args) forEachExpr(a, f);
                 },
                 [&](const EApp& a) {
                   for (const auto& x : a.args) forEachExpr(x, f);
                 },
                 [&](const ECase& c) {
                   forEachExpr(*c.scrutinee, f);
                   for (const auto& br : c.branches) {
                     for (const auto& g : br.guards) {
                       forEachExpr(g.lhs, f);
                       forEachExpr(g.rhs, f);
                     }
                     forEachExpr(*br.body, f);
                   }
                 },
                 [&](const EFail&) {},
             },
             e.node);
}

// Visits every constraint of a rule including case-branch guards.
inline void forEachConstraint(const Rule& r, const std::function<void(const Constraint&)>& f) {
  for (const auto& g : r.guards) f(g);
  forEachExpr(r.body, [&](const Expr& e) {
    if (const auto* c = e.as<ECase>())
      for (const auto& br : c->branches)
        for (const auto& g : br.guards) f(g);
  });
}

// Visits every pattern of a rule: lhs parameters and case-branch patterns.
inline void forEachPattern(const Rule& r, const std::function<void(const Pattern&)>& f) {
  for (const auto& p : r.params) f(p);
  forEachExpr(r.body, [&](const Expr& e) {
    if (const auto* c = e.as<ECase>())
      for (const auto& br : c->branches) f(br.pat);
  });
}

inline bool hasFunctionalPatterns(const FuncDef& fd) {
  bool found = false;
  for (const auto& r : fd.rules)
    forEachPattern(r, [&](const Pattern& p) { found = found || containsFunCall(p); });
  return found;
}

inline std::size_t nonStrictCount(const FuncDef& fd) {
  std::size_t n = 0;
  for (const auto& r : fd.rules)
    forEachConstraint(r, [&](const Constraint& c) {
      if (c.mode == UnifyMode::NonStrict) ++n;
    });
  return n;
}

// ------------------------------
// naming conventions and the prelude
// ------------------------------

inline std::string inverseName(const std::string& fn) { return fn + "_inv"; }

inline const char* listType = "List";
inline const char* nilCtor = "Nil";
inline const char* consCtor = "Cons";
inline constexpr std::size_t maxTupleWidth = 8;

inline std::string tupleCtor(std::size_t width) { return "Tuple" + std::to_string(width); }

inline bool isTupleCtor(const std::string& name, std::size_t* width = nullptr) {
  if (name.rfind("Tuple", 0) != 0 || name.size() <= 5) return false;
  std::size_t w = 0;
  for (std::size_t i = 5; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
    w = w * 10 + static_cast<std::size_t>(name[i] - '0');
  }
  if (w < 2 || w > maxTupleWidth) return false;
  if (width) *width = w;
  return true;
}

// Tuples the elements unless there is exactly one (inverse results follow the
// same convention: bare for arity 1, TupleN otherwise).
inline Expr tupleExpr(std::vector<Expr> parts) {
  if (parts.size() == 1) return std::move(parts[0]);
  std::string ctor = tupleCtor(parts.size());
  return eCtor(std::move(ctor), std::move(parts));
}
inline Pattern tuplePattern(std::vector<Pattern> parts) {
  if (parts.size() == 1) return std::move(parts[0]);
  std::string ctor = tupleCtor(parts.size());
  return pCtor(std::move(ctor), std::move(parts));
}

// Built-in declarations: Bool, polymorphic lists, and tuple constructors.
// These back the `[..]`, `:` and `(..,..)` sugar and are never printed.
inline Program prelude() {
  Program p;
  {
    DataDecl d{"Bool", {}, {{"True", {}}, {"False", {}}}, true};
    p.dataDecls.push_back(std::move(d));
  }
  {
    TypeExpr a{"a", {}};
    TypeExpr listA{listType, {a}};
    DataDecl d{listType, {"a"}, {{nilCtor, {}}, {consCtor, {a, listA}}}, true};
    p.dataDecls.push_back(std::move(d));
  }
  for (std::size_t w = 2; w <= maxTupleWidth; ++w) {
    DataDecl d;
    d.typeName = tupleCtor(w);
    d.fromPrelude = true;
    CtorDecl c;
    c.name = tupleCtor(w);
    for (std::size_t i = 0; i < w; ++i) {
      d.params.push_back(std::string(1, static_cast<char>('a' + i)));
      c.argTypes.push_back(TypeExpr{d.params.back(), {}});
    }
    d.ctors.push_back(std::move(c));
    p.dataDecls.push_back(std::move(d));
  }
  return p;
}

}  // namespace flc
