#pragma once

// Pretty-printer. Emits layout-free surface syntax that parses back to the
// same AST: list/tuple sugar, infix `:` and `++`, braced case expressions.

#include <sstream>
#include <string>

#include "flc/ast.hpp"

namespace flc {

// Precedence levels, loosest to tightest. Guards sit below Append.
enum Prec : int { PrecTop = 0, PrecAppend = 1, PrecCons = 2, PrecApp = 3, PrecAtom = 4 };

inline bool isOpChar(char c) {
  return std::string("+-*/<>=:$&|^.").find(c) != std::string::npos;
}

inline bool isOperatorName(const std::string& name) {
  return !name.empty() && isOpChar(name[0]);
}

// "++"      -> "(++)"
// "++_inv"  -> "(++)_inv"
// "tail"    -> "tail"
inline std::string displayName(const std::string& name) {
  if (!isOperatorName(name)) return name;
  std::size_t i = 0;
  while (i < name.size() && isOpChar(name[i])) ++i;
  return "(" + name.substr(0, i) + ")" + name.substr(i);
}

// True for names written infix (pure operator names; only `++` and `:` exist
// in practice, but any pure-symbol binary name prints infix).
inline bool printsInfix(const std::string& name) {
  for (char c : name)
    if (!isOpChar(c)) return false;
  return !name.empty();
}

namespace detail {

inline void printExpr(std::ostream& os, const Expr& e, int minPrec);
inline void printPattern(std::ostream& os, const Pattern& p, int minPrec);
inline void printConstraint(std::ostream& os, const Constraint& c);

inline void parensOpen(std::ostream& os, bool need) {
  if (need) os << '(';
}
inline void parensClose(std::ostream& os, bool need) {
  if (need) os << ')';
}

inline void printExpr(std::ostream& os, const Expr& e, int minPrec) {
  std::visit(
      Overloaded{
          [&](const EVar& v) { os << v.name; },
          [&](const ECtor& c) {
            std::size_t width = 0;
            if (c.ctor == nilCtor) {
              os << "[]";
            } else if (c.ctor == consCtor) {
              // Try the list-literal form first.
              std::vector<const Expr*> elems;
              const Expr* node = &e;
              while (true) {
                const auto* cc = node->as<ECtor>();
                if (cc != nullptr && cc->ctor == consCtor) {
                  elems.push_back(&cc->args[0]);
                  node = &cc->args[1];
                } else {
                  break;
                }
              }
              const auto* end = node->as<ECtor>();
              if (end != nullptr && end->ctor == nilCtor) {
                os << '[';
                for (std::size_t i = 0; i < elems.size(); ++i) {
                  if (i) os << ", ";
                  printExpr(os, *elems[i], PrecTop);
                }
                os << ']';
              } else {
                bool need = minPrec > PrecCons;
                parensOpen(os, need);
                for (const Expr* el : elems) {
                  printExpr(os, *el, PrecCons + 1);
                  os << " : ";
                }
                printExpr(os, *node, PrecCons);
                parensClose(os, need);
              }
            } else if (isTupleCtor(c.ctor, &width)) {
              os << '(';
              for (std::size_t i = 0; i < c.args.size(); ++i) {
                if (i) os << ", ";
                printExpr(os, c.args[i], PrecTop);
              }
              os << ')';
            } else if (c.args.empty()) {
              os << c.ctor;
            } else {
              bool need = minPrec > PrecApp;
              parensOpen(os, need);
              os << c.ctor;
              for (const auto& a : c.args) {
                os << ' ';
                printExpr(os, a, PrecAtom);
              }
              parensClose(os, need);
            }
          },
          [&](const EApp& a) {
            if (!a.fnIsVar && printsInfix(a.fn) && a.args.size() == 2) {
              bool need = minPrec > PrecAppend;
              parensOpen(os, need);
              printExpr(os, a.args[0], PrecAppend + 1);
              os << ' ' << a.fn << ' ';
              printExpr(os, a.args[1], PrecAppend);
              parensClose(os, need);
            } else if (a.args.empty()) {
              os << (a.fnIsVar ? a.fn : displayName(a.fn));
            } else {
              bool need = minPrec > PrecApp;
              parensOpen(os, need);
              os << (a.fnIsVar ? a.fn : displayName(a.fn));
              for (const auto& x : a.args) {
                os << ' ';
                printExpr(os, x, PrecAtom);
              }
              parensClose(os, need);
            }
          },
          [&](const ECase& c) {
            bool need = minPrec > PrecTop;
            parensOpen(os, need);
            os << "case ";
            printExpr(os, *c.scrutinee, PrecAppend);
            os << " of { ";
            for (std::size_t i = 0; i < c.branches.size(); ++i) {
              if (i) os << "; ";
              const auto& br = c.branches[i];
              printPattern(os, br.pat, PrecTop);
              if (!br.guards.empty()) {
                os << " | ";
                for (std::size_t j = 0; j < br.guards.size(); ++j) {
                  if (j) os << ", ";
                  printConstraint(os, br.guards[j]);
                }
              }
              os << " -> ";
              printExpr(os, *br.body, PrecTop);
            }
            os << " }";
            parensClose(os, need);
          },
          [&](const EFail&) { os << "failed"; },
      },
      e.node);
}

inline void printPattern(std::ostream& os, const Pattern& p, int minPrec) {
  // Patterns and expressions share one term syntax; reuse the expression
  // printer via the conversion (it is exact for patterns).
  printExpr(os, exprOfPattern(p), minPrec);
}

inline void printConstraint(std::ostream& os, const Constraint& c) {
  printExpr(os, c.lhs, PrecAppend);
  os << (c.mode == UnifyMode::Strict ? " =:= " : " =:<= ");
  printExpr(os, c.rhs, PrecAppend);
}

inline void printType(std::ostream& os, const TypeExpr& t, bool atomCtx) {
  std::size_t width = 0;
  if (t.head == "->" && t.args.size() == 2) {
    os << '(';
    printType(os, t.args[0], false);
    os << " -> ";
    printType(os, t.args[1], false);
    os << ')';
  } else if (t.head == listType && t.args.size() == 1) {
    os << '[';
    printType(os, t.args[0], false);
    os << ']';
  } else if (isTupleCtor(t.head, &width) && t.args.size() == width) {
    os << '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) os << ", ";
      printType(os, t.args[i], false);
    }
    os << ')';
  } else if (t.args.empty()) {
    os << t.head;
  } else {
    if (atomCtx) os << '(';
    os << t.head;
    for (const auto& a : t.args) {
      os << ' ';
      printType(os, a, true);
    }
    if (atomCtx) os << ')';
  }
}

}  // namespace detail

inline std::string pretty(const Expr& e) {
  std::ostringstream os;
  detail::printExpr(os, e, PrecTop);
  return os.str();
}

inline std::string pretty(const Pattern& p) {
  std::ostringstream os;
  detail::printPattern(os, p, PrecTop);
  return os.str();
}

inline std::string pretty(const Constraint& c) {
  std::ostringstream os;
  detail::printConstraint(os, c);
  return os.str();
}

inline std::string pretty(const TypeExpr& t) {
  std::ostringstream os;
  detail::printType(os, t, false);
  return os.str();
}

inline std::string pretty(const Signature& sig) {
  std::ostringstream os;
  for (const auto& a : sig.argTypes) {
    detail::printType(os, a, false);
    os << " -> ";
  }
  detail::printType(os, sig.result, false);
  return os.str();
}

inline std::string prettyRule(const std::string& fnName, const Rule& r) {
  std::ostringstream os;
  if (printsInfix(fnName) && r.params.size() == 2) {
    detail::printPattern(os, r.params[0], PrecApp);
    os << ' ' << fnName << ' ';
    detail::printPattern(os, r.params[1], PrecApp);
  } else {
    os << displayName(fnName);
    for (const auto& p : r.params) {
      os << ' ';
      detail::printPattern(os, p, PrecAtom);
    }
  }
  if (!r.guards.empty()) {
    os << " | ";
    for (std::size_t i = 0; i < r.guards.size(); ++i) {
      if (i) os << ", ";
      detail::printConstraint(os, r.guards[i]);
    }
  }
  os << " = ";
  detail::printExpr(os, r.body, PrecTop);
  if (!r.freeVars.empty()) {
    os << " where ";
    for (std::size_t i = 0; i < r.freeVars.size(); ++i) {
      if (i) os << ", ";
      os << r.freeVars[i];
    }
    os << " free";
  }
  return os.str();
}

inline std::string pretty(const FuncDef& fd) {
  std::ostringstream os;
  if (fd.signature) {
    // Derived signatures are documentation; only user-written ones reparse.
    if (fd.origin == Origin::Synthesized) os << "-- ";
    os << displayName(fd.name) << " :: " << pretty(*fd.signature) << '\n';
  }
  for (const auto& r : fd.rules) os << prettyRule(fd.name, r) << '\n';
  return os.str();
}

inline std::string pretty(const DataDecl& d) {
  std::ostringstream os;
  os << "data " << d.typeName;
  for (const auto& p : d.params) os << ' ' << p;
  os << " = ";
  for (std::size_t i = 0; i < d.ctors.size(); ++i) {
    if (i) os << " | ";
    os << d.ctors[i].name;
    for (const auto& t : d.ctors[i].argTypes) {
      os << ' ';
      detail::printType(os, t, true);
    }
  }
  return os.str();
}

inline std::string pretty(const Program& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& d : p.dataDecls) {
    if (d.fromPrelude) continue;
    os << pretty(d) << '\n';
    first = false;
  }
  for (const auto& f : p.funcs) {
    if (!first) os << '\n';
    os << pretty(f);
    first = false;
  }
  return os.str();
}

}  // namespace flc
