#pragma once

// Inverse synthesis.
//
// The direct route swaps each rule of f: the rule body (read as a pattern)
// becomes the inverse's parameter, and the tuple of the rule's parameters
// (read as expressions) becomes the inverse's body. Function calls that end
// up in the new parameter are eliminated by matching on a recursive call to
// the callee's inverse, and repeated pattern variables are linearized with
// strict equality guards. Left-hand-side variables that the original body
// never used come back as free variables of the inverse.
//
// Functions whose rules are not invertible this way get a one-rule fallback
// built from non-strict unification,
//
//   f_inv z | f x1 ... xn =:<= z = (x1, ..., xn)   where x1, ..., xn free
//
// which is complete but evaluates by search. Higher-order functions are
// rejected outright: an inverse would have to guess arbitrary functions.
//
// Classification is deliberately conservative about one hazard: a rule with
// a non-linear right-hand side together with extra variables (unused
// left-hand-side variables, `where free` variables, in the function or a
// transitive callee). The direct inverse of such a function forces values
// through strict linearization guards that the original never evaluated, so
// it can miss solutions on partial inputs; such functions default to the
// fallback and direct synthesis must be forced explicitly.

#include <deque>
#include <stdexcept>
#include <utility>

#include "flc/ast.hpp"

namespace flc {

enum class InverseStrategy { Direct, FallbackNSU, Rejected };

inline const char* strategyName(InverseStrategy s) {
  switch (s) {
    case InverseStrategy::Direct: return "Direct";
    case InverseStrategy::FallbackNSU: return "FallbackNSU";
    case InverseStrategy::Rejected: return "Rejected";
  }
  return "?";
}

struct InversionReport {
  std::string function;
  InverseStrategy strategy = InverseStrategy::Rejected;
  std::string inverse;                       // name the inverse gets (or would get)
  std::vector<std::string> reasons;          // why the strategy is not Direct
  std::vector<std::string> warnings;         // forced-direct and soundness caveats
  std::vector<std::string> calleeInverses;   // helpers synthesized transitively
};

struct InversionOptions {
  bool forceDirect = false;  // hazard override; shape and order limits are hard
};

struct InversionOutcome {
  Program program;  // input program plus the synthesized definitions
  InversionReport report;
};

enum class ElabMode { NonStrictUnify, InverseCalls };

namespace inv_detail {

// ---- call-graph scans ----

inline void patternCalls(const Pattern& p, std::set<std::string>& out) {
  if (const auto* c = p.as<PCtor>())
    for (const auto& a : c->args) patternCalls(a, out);
  if (const auto* f = p.as<PFun>()) {
    out.insert(f->fn);
    for (const auto& a : f->args) patternCalls(a, out);
  }
}

inline std::set<std::string> callees(const FuncDef& fd) {
  std::set<std::string> out;
  for (const auto& r : fd.rules) {
    forEachPattern(r, [&](const Pattern& p) { patternCalls(p, out); });
    auto fromExpr = [&](const Expr& e) {
      forEachExpr(e, [&](const Expr& sub) {
        if (const auto* a = sub.as<EApp>(); a != nullptr && !a->fnIsVar) out.insert(a->fn);
      });
    };
    fromExpr(r.body);
    forEachConstraint(r, [&](const Constraint& c) {
      fromExpr(c.lhs);
      fromExpr(c.rhs);
    });
  }
  return out;
}

// Collects the function itself and everything reachable from it.
inline std::vector<const FuncDef*> reachable(const Program& prog, const std::string& fn) {
  std::vector<const FuncDef*> out;
  std::set<std::string> visited;
  std::deque<std::string> todo{fn};
  while (!todo.empty()) {
    std::string name = todo.front();
    todo.pop_front();
    if (!visited.insert(name).second) continue;
    const FuncDef* fd = prog.func(name);
    if (fd == nullptr) continue;
    out.push_back(fd);
    for (const auto& c : callees(*fd)) todo.push_back(c);
  }
  return out;
}

// First higher-order use in a definition, if any.
inline std::optional<std::string> higherOrderUse(const Program& prog, const FuncDef& fd) {
  std::optional<std::string> found;
  auto scan = [&](const Expr& e) {
    forEachExpr(e, [&](const Expr& sub) {
      if (found) return;
      const auto* a = sub.as<EApp>();
      if (a == nullptr) return;
      if (a->fnIsVar) {
        found = "variable '" + a->fn + "' is applied in a rule of '" + fd.name + "'";
        return;
      }
      const FuncDef* callee = prog.func(a->fn);
      if (callee != nullptr && callee->arity != a->args.size())
        found = "partial application of '" + a->fn + "' in a rule of '" + fd.name + "'";
    });
  };
  for (const auto& r : fd.rules) {
    scan(r.body);
    forEachConstraint(r, [&](const Constraint& c) {
      scan(c.lhs);
      scan(c.rhs);
    });
    if (found) break;
  }
  return found;
}

inline bool containsCaseOrFail(const Expr& e) {
  bool found = false;
  forEachExpr(e, [&](const Expr& sub) {
    if (sub.as<ECase>() != nullptr || sub.as<EFail>() != nullptr) found = true;
  });
  return found;
}

// Every name that occurs anywhere in the rule; the fresh-name supply must
// avoid all of them.
inline std::set<std::string> ruleNames(const Rule& r) {
  std::set<std::string> out;
  forEachPattern(r, [&](const Pattern& p) {
    auto occ = varOccurrences(p);
    for (const auto& [k, v] : occ) out.insert(k);
  });
  auto fromExpr = [&](const Expr& e) {
    forEachExpr(e, [&](const Expr& sub) {
      if (const auto* v = sub.as<EVar>()) out.insert(v->name);
    });
  };
  fromExpr(r.body);
  forEachConstraint(r, [&](const Constraint& c) {
    fromExpr(c.lhs);
    fromExpr(c.rhs);
  });
  out.insert(r.freeVars.begin(), r.freeVars.end());
  return out;
}

// Pattern variables in left-to-right binding order.
inline void orderedVars(const Pattern& p, std::vector<std::string>& out) {
  if (const auto* v = p.as<PVar>()) {
    out.push_back(v->name);
    return;
  }
  if (const auto* c = p.as<PCtor>())
    for (const auto& a : c->args) orderedVars(a, out);
  if (const auto* f = p.as<PFun>())
    for (const auto& a : f->args) orderedVars(a, out);
}

}  // namespace inv_detail

// ------------------------------
// classification
// ------------------------------

// Decides how (and whether) a function can be inverted. The reasons explain
// every deviation from Direct.
inline InversionReport classify(const Program& prog, const std::string& fn) {
  InversionReport rep;
  rep.function = fn;
  const FuncDef* fd = prog.func(fn);
  if (fd == nullptr) {
    rep.strategy = InverseStrategy::Rejected;
    rep.reasons.push_back("unknown function '" + fn + "'");
    return rep;
  }
  rep.inverse = inverseName(fn);

  // Higher-order anywhere in the call graph is fatal: no inverse can guess
  // the functions that would have to flow through.
  auto reach = inv_detail::reachable(prog, fn);
  for (const FuncDef* def : reach)
    if (auto ho = inv_detail::higherOrderUse(prog, *def)) {
      rep.strategy = InverseStrategy::Rejected;
      rep.reasons.push_back("higher-order: " + *ho);
      return rep;
    }

  // Rule-shape limits of the swap construction (checked on fn itself; callee
  // inverses are synthesized independently and may fall back on their own).
  for (const auto& r : fd->rules) {
    if (!r.guards.empty()) {
      rep.strategy = InverseStrategy::FallbackNSU;
      rep.reasons.push_back("unsupported rule shape: a rule of '" + fn + "' has guards");
      return rep;
    }
    if (inv_detail::containsCaseOrFail(r.body)) {
      rep.strategy = InverseStrategy::FallbackNSU;
      rep.reasons.push_back("unsupported rule shape: a rule of '" + fn +
                            "' has a case expression or failure in its body");
      return rep;
    }
  }

  // The soundness hazard: a non-linear right-hand side turns into strict
  // linearization guards, and extra variables mean those guards can force
  // values the original function never evaluated.
  std::vector<std::string> nonLinear;
  for (const auto& r : fd->rules) {
    auto occ = varOccurrences(r.body);
    for (const auto& [name, count] : occ)
      if (count > 1) {
        nonLinear.push_back("non-linear right-hand side: variable '" + name +
                            "' occurs " + std::to_string(count) + " times in a rule of '" + fn +
                            "'");
        break;
      }
  }
  std::vector<std::string> extras;
  for (const FuncDef* def : reach)
    for (const auto& r : def->rules) {
      ExtraVars ev = extraVars(r);
      for (const auto& v : ev.whereFree)
        extras.push_back("extra variable: '" + v + "' is declared free in a rule of '" +
                         def->name + "'");
      for (const auto& v : ev.unusedLhs)
        extras.push_back("extra variable: '" + v + "' is unused on the right-hand side of '" +
                         def->name + "'");
      if (!extras.empty()) break;
    }
  if (!nonLinear.empty() && !extras.empty()) {
    rep.strategy = InverseStrategy::FallbackNSU;
    rep.reasons.push_back(nonLinear.front());
    rep.reasons.push_back(extras.front());
    return rep;
  }

  rep.strategy = InverseStrategy::Direct;
  return rep;
}

// ------------------------------
// the direct construction
// ------------------------------

// Swaps one rule: body becomes the single parameter, the parameter tuple
// becomes the body, unused left-hand-side variables become free variables.
// Pre: the body is built from variables, constructors, and applications only,
// and the rule has no guards.
inline Rule swapRule(const Rule& r) {
  Rule out;
  out.params.push_back(patternOfExpr(r.body));
  std::vector<Expr> parts;
  parts.reserve(r.params.size());
  for (const auto& p : r.params) parts.push_back(exprOfPattern(p));
  out.body = tupleExpr(std::move(parts));

  ExtraVars ev = extraVars(r);
  std::vector<std::string> ordered;
  for (const auto& p : r.params) inv_detail::orderedVars(p, ordered);
  for (const auto& v : ordered)
    if (ev.unusedLhs.count(v) != 0) out.freeVars.push_back(v);
  return out;
}

namespace inv_detail {

// Replaces every outermost FunCall in `pat` with a fresh variable and wraps
// `body` in a case on the callee's inverse; the leftmost call ends up in the
// outermost case. Nested calls inside a call's argument pattern are
// eliminated recursively inside the generated branch. Callee names are
// collected into `needed`.
inline Expr eliminateInPattern(Pattern& pat, Expr body, std::set<std::string>& avoid,
                               std::set<std::string>& needed) {
  struct Hoisted {
    std::string var;
    std::string fn;
    std::vector<Pattern> args;
  };
  std::vector<Hoisted> hoisted;

  auto hoist = [&](auto&& self, Pattern& p) -> void {
    if (std::get_if<PVar>(&p.node) != nullptr) return;
    if (auto* c = std::get_if<PCtor>(&p.node)) {
      for (auto& a : c->args) self(self, a);
      return;
    }
    auto* f = std::get_if<PFun>(&p.node);
    std::string z = freshName("z", avoid);
    avoid.insert(z);
    hoisted.push_back(Hoisted{z, f->fn, f->args});
    p = pVar(z);
  };
  hoist(hoist, pat);

  for (auto it = hoisted.rbegin(); it != hoisted.rend(); ++it) {
    needed.insert(it->fn);
    Pattern argPat = tuplePattern(std::move(it->args));
    Expr inner = eliminateInPattern(argPat, std::move(body), avoid, needed);
    body = eCase(eApp(inverseName(it->fn), {eVar(it->var)}),
                 {branch(std::move(argPat), std::move(inner))});
  }
  return body;
}

// Renames repeated binders; each repeat gets a strict equality guard in the
// scope where the renamed binder lives.
inline void renameRepeats(Pattern& p, std::set<std::string>& seen, std::set<std::string>& avoid,
                          std::vector<Constraint>& guardSink) {
  if (auto* v = std::get_if<PVar>(&p.node)) {
    if (!seen.insert(v->name).second) {
      std::string fresh = freshName(v->name, avoid);
      avoid.insert(fresh);
      guardSink.push_back(Constraint{UnifyMode::Strict, eVar(v->name), eVar(fresh)});
      p = pVar(fresh);
    }
    return;
  }
  if (auto* c = std::get_if<PCtor>(&p.node)) {
    for (auto& a : c->args) renameRepeats(a, seen, avoid, guardSink);
    return;
  }
  throw std::logic_error("linearize: functional pattern not eliminated");
}

inline Expr linearizeExpr(const Expr& e, std::set<std::string> seen, std::set<std::string>& avoid) {
  if (const auto* c = e.as<ECase>()) {
    Expr scrut = linearizeExpr(*c->scrutinee, seen, avoid);
    std::vector<CaseBranch> branches;
    branches.reserve(c->branches.size());
    for (const auto& br : c->branches) {
      std::set<std::string> branchSeen = seen;
      Pattern pat = br.pat;
      std::vector<Constraint> guards = br.guards;
      renameRepeats(pat, branchSeen, avoid, guards);
      Expr body = linearizeExpr(*br.body, std::move(branchSeen), avoid);
      branches.push_back(branch(std::move(pat), std::move(body), std::move(guards)));
    }
    return eCase(std::move(scrut), std::move(branches));
  }
  if (const auto* c = e.as<ECtor>()) {
    std::vector<Expr> args;
    args.reserve(c->args.size());
    for (const auto& a : c->args) args.push_back(linearizeExpr(a, seen, avoid));
    return eCtor(c->ctor, std::move(args));
  }
  if (const auto* a = e.as<EApp>()) {
    std::vector<Expr> args;
    args.reserve(a->args.size());
    for (const auto& x : a->args) args.push_back(linearizeExpr(x, seen, avoid));
    return eApp(a->fn, std::move(args), a->fnIsVar);
  }
  return e;
}

}  // namespace inv_detail

// Eliminates functional patterns from the rule's parameters by matching on
// inverse calls. Names of the callees whose inverses are now required are
// added to `needed`.
inline void eliminateFunPats(Rule& r, std::set<std::string>& needed) {
  std::set<std::string> avoid = inv_detail::ruleNames(r);
  Expr body = std::move(r.body);
  for (auto it = r.params.rbegin(); it != r.params.rend(); ++it)
    if (containsFunCall(*it)) body = inv_detail::eliminateInPattern(*it, std::move(body), avoid, needed);
  r.body = std::move(body);
}

// Makes every pattern in the rule left-linear, adding `=:=` guards for the
// renamed repeats at rule scope (parameters) or branch scope (case patterns).
inline void linearize(Rule& r) {
  std::set<std::string> avoid = inv_detail::ruleNames(r);
  std::set<std::string> seen;
  for (auto& p : r.params) inv_detail::renameRepeats(p, seen, avoid, r.guards);
  r.body = inv_detail::linearizeExpr(r.body, std::move(seen), avoid);
}

// The complete, search-based fallback inverse.
inline FuncDef makeFallbackInverse(const FuncDef& fd) {
  Rule r;
  std::set<std::string> avoid;
  std::vector<Expr> argVars;
  for (std::size_t i = 0; i < fd.arity; ++i) {
    std::string x = "x" + std::to_string(i + 1);
    avoid.insert(x);
    r.freeVars.push_back(x);
    argVars.push_back(eVar(x));
  }
  std::string z = freshName("z", avoid);
  r.params.push_back(pVar(z));
  r.guards.push_back(Constraint{UnifyMode::NonStrict, eApp(fd.name, argVars), eVar(z)});
  r.body = tupleExpr(std::move(argVars));

  FuncDef inv;
  inv.name = inverseName(fd.name);
  inv.arity = 1;
  inv.rules.push_back(std::move(r));
  inv.origin = Origin::Synthesized;
  return inv;
}

namespace inv_detail {

inline std::optional<Signature> inverseSignature(const FuncDef& fd) {
  if (!fd.signature) return std::nullopt;
  Signature sig;
  sig.argTypes.push_back(fd.signature->result);
  if (fd.signature->argTypes.size() == 1) {
    sig.result = fd.signature->argTypes.front();
  } else {
    TypeExpr tuple;
    tuple.head = tupleCtor(fd.signature->argTypes.size());
    tuple.args = fd.signature->argTypes;
    sig.result = std::move(tuple);
  }
  return sig;
}

inline FuncDef makeDirectInverse(const FuncDef& fd, std::set<std::string>& needed) {
  FuncDef inv;
  inv.name = inverseName(fd.name);
  inv.arity = 1;
  inv.origin = Origin::Synthesized;
  inv.signature = inverseSignature(fd);
  for (const auto& r : fd.rules) {
    Rule swapped = swapRule(r);
    eliminateFunPats(swapped, needed);
    linearize(swapped);
    inv.rules.push_back(std::move(swapped));
  }
  return inv;
}

inline bool hasStrictGuards(const FuncDef& fd) {
  bool found = false;
  for (const auto& r : fd.rules)
    forEachConstraint(r, [&](const Constraint& c) {
      if (c.mode == UnifyMode::Strict) found = true;
    });
  return found;
}

inline bool hasFreeVars(const FuncDef& fd) {
  for (const auto& r : fd.rules)
    if (!r.freeVars.empty()) return true;
  return false;
}

// Appends inverses for `first` and everything its direct construction pulls
// in. Returns the report for `first`; helper inverses fall back on their own
// classification when needed.
inline InversionReport synthesizeInto(Program& prog, const std::string& first,
                                      const InversionOptions& options) {
  InversionReport top;
  std::set<std::string> planned;
  std::deque<std::string> todo{first};
  planned.insert(first);
  std::vector<std::size_t> emitted;  // indices into prog.funcs

  while (!todo.empty()) {
    std::string name = todo.front();
    todo.pop_front();
    bool isTop = name == first;

    InversionReport rep = classify(prog, name);
    if (!isTop && prog.func(inverseName(name)) != nullptr) {
      top.warnings.push_back("using existing definition of '" + inverseName(name) + "'");
      continue;
    }
    if (isTop) top = rep;

    if (rep.strategy == InverseStrategy::Rejected) {
      if (isTop) return top;
      // Unreachable: a higher-order callee rejects the caller transitively.
      throw std::logic_error("inverse synthesis: helper '" + name + "' rejected");
    }

    bool direct = rep.strategy == InverseStrategy::Direct;
    if (!direct && isTop && options.forceDirect) {
      bool hazardOnly = true;
      for (const auto& reason : rep.reasons)
        if (reason.find("unsupported rule shape") != std::string::npos) hazardOnly = false;
      if (hazardOnly) {
        direct = true;
        top.strategy = InverseStrategy::Direct;
        for (const auto& reason : rep.reasons)
          top.warnings.push_back("forced direct synthesis despite: " + reason);
      } else {
        top.warnings.push_back("cannot force direct synthesis: unsupported rule shape");
      }
    }

    FuncDef inv;
    if (direct) {
      std::set<std::string> needed;
      inv = makeDirectInverse(*prog.func(name), needed);
      for (const auto& callee : needed)
        if (planned.insert(callee).second) todo.push_back(callee);
    } else {
      inv = makeFallbackInverse(*prog.func(name));
    }
    if (!isTop) top.calleeInverses.push_back(inv.name);
    prog.funcs.push_back(std::move(inv));
    emitted.push_back(prog.funcs.size() - 1);
  }

  // The soundness caveat of the construction: strict linearization guards
  // over values that reappear from an inverse with free variables.
  if (top.strategy == InverseStrategy::Direct) {
    bool guards = false, frees = false;
    for (std::size_t i : emitted) {
      guards = guards || hasStrictGuards(prog.funcs[i]);
      frees = frees || hasFreeVars(prog.funcs[i]);
    }
    if (guards && frees)
      top.warnings.push_back(
          "the direct inverse combines strict equality guards with free variables; it may miss "
          "solutions on partial inputs");
  }
  return top;
}

}  // namespace inv_detail

// Synthesizes an inverse for `fn` (and any helper inverses it needs),
// appending the new definitions to a copy of the program.
inline InversionOutcome synthesizeInverse(const Program& prog, const std::string& fn,
                                          const InversionOptions& options = {}) {
  InversionOutcome out;
  out.program = prog;
  if (out.program.func(inverseName(fn)) != nullptr) {
    out.report = classify(prog, fn);
    out.report.warnings.push_back("using existing definition of '" + inverseName(fn) + "'");
    return out;
  }
  out.report = inv_detail::synthesizeInto(out.program, fn, options);
  return out;
}

// ------------------------------
// functional-pattern elaboration
// ------------------------------

// Rewrites every rule with functional patterns into the chosen encoding:
// NonStrictUnify turns each such parameter p into a fresh variable z with a
// guard `p =:<= z` and makes p's variables free; InverseCalls matches the
// parameter against the callee's inverse (synthesizing that inverse).
inline Program elaborateFunPats(const Program& prog, ElabMode mode) {
  Program out = prog;
  std::set<std::string> needed;

  for (auto& fd : out.funcs) {
    for (auto& r : fd.rules) {
      bool any = false;
      for (const auto& p : r.params) any = any || containsFunCall(p);
      if (!any) continue;

      if (mode == ElabMode::NonStrictUnify) {
        std::set<std::string> avoid = inv_detail::ruleNames(r);
        std::vector<Constraint> pre;
        for (auto& p : r.params) {
          if (!containsFunCall(p)) continue;
          std::vector<std::string> vars;
          inv_detail::orderedVars(p, vars);
          std::string z = freshName("z", avoid);
          avoid.insert(z);
          pre.push_back(Constraint{UnifyMode::NonStrict, exprOfPattern(p), eVar(z)});
          p = pVar(z);
          for (auto& v : vars) r.freeVars.push_back(std::move(v));
        }
        r.guards.insert(r.guards.begin(), std::make_move_iterator(pre.begin()),
                        std::make_move_iterator(pre.end()));
      } else {
        eliminateFunPats(r, needed);
        linearize(r);
      }
    }
  }

  for (const auto& fn : needed)
    if (out.func(inverseName(fn)) == nullptr)
      inv_detail::synthesizeInto(out, fn, InversionOptions{});
  return out;
}

}  // namespace flc
