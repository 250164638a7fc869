#pragma once

// Lexer and parser for the layout-free surface syntax.
//
// Declarations are separated by `;` or by newlines at bracket depth zero.
// Rule parsing is two-pass: a first pass collects data declarations and
// function names/arities so bodies can reference functions in any order, a
// second pass parses rule bodies with full resolution. Nested constructor
// patterns are desugared into flat case chains; functional patterns are kept
// faithfully. User rules must be left-linear.

#include <cassert>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "flc/ast.hpp"
#include "flc/pretty.hpp"

namespace flc {

struct SourcePos {
  int line = 1;
  int col = 1;
};

struct ParseError {
  SourcePos pos;
  std::string message;

  std::string format() const {
    return std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + message;
  }
};

struct ParseOptions {
  // Accept variable-headed and arity-mismatched applications, representing
  // them in the AST so the inversion classifier can reject the function.
  bool lenientHigherOrder = false;
};

struct ParseResult {
  std::optional<Program> program;
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

namespace lex {

enum class TokKind { Name, Number, Punct, Newline, End };

struct Token {
  TokKind kind;
  std::string text;
  SourcePos pos;
};

struct LexFail {
  SourcePos pos;
  std::string message;
};

inline bool isIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}
inline bool isIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

inline const std::set<std::string>& knownOperators() {
  static const std::set<std::string> ops = {"=:<=", "=:=", "::", "++", "->", "=", "|", ":"};
  return ops;
}

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++pos.line;
        pos.col = 1;
      } else {
        ++pos.col;
      }
    }
    i += n;
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      out.push_back({TokKind::Newline, "\n", pos});
      advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (isIdentStart(c)) {
      std::size_t j = i;
      while (j < src.size() && isIdentChar(src[j])) ++j;
      out.push_back({TokKind::Name, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])) != 0) ++j;
      out.push_back({TokKind::Number, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (c == '(') {
      // `(++)` and `(++)_inv` are single name tokens.
      std::size_t j = i + 1;
      while (j < src.size() && isOpChar(src[j])) ++j;
      if (j > i + 1 && j < src.size() && src[j] == ')') {
        std::size_t k = j + 1;
        while (k < src.size() && isIdentChar(src[k])) ++k;
        std::string name =
            std::string(src.substr(i + 1, j - i - 1)) + std::string(src.substr(j + 1, k - j - 1));
        out.push_back({TokKind::Name, name, pos});
        advance(k - i);
        continue;
      }
    }
    if (std::string("()[]{},;").find(c) != std::string::npos) {
      out.push_back({TokKind::Punct, std::string(1, c), pos});
      advance(1);
      continue;
    }
    if (isOpChar(c)) {
      std::size_t j = i;
      while (j < src.size() && isOpChar(src[j])) ++j;
      std::string op(src.substr(i, j - i));
      if (knownOperators().count(op) == 0)
        throw LexFail{pos, "unknown operator '" + op + "'"};
      out.push_back({TokKind::Punct, op, pos});
      advance(j - i);
      continue;
    }
    throw LexFail{pos, std::string("unexpected character '") + c + "'"};
  }
  out.push_back({TokKind::End, "", pos});
  return out;
}

}  // namespace lex

namespace detail {

using lex::TokKind;
using lex::Token;

struct ParseFail {
  SourcePos pos;
  std::string message;
};

[[noreturn]] inline void fail(const Token& t, const std::string& msg) {
  throw ParseFail{t.pos, msg};
}

inline bool isKeyword(const std::string& s) {
  static const std::set<std::string> kw = {"data", "case", "of", "where", "free", "failed"};
  return kw.count(s) != 0;
}

inline bool isUpperName(const Token& t) {
  return t.kind == TokKind::Name && !t.text.empty() &&
         std::isupper(static_cast<unsigned char>(t.text[0])) != 0;
}
inline bool isLowerName(const Token& t) {
  return t.kind == TokKind::Name && !t.text.empty() &&
         std::islower(static_cast<unsigned char>(t.text[0])) != 0 && !isKeyword(t.text);
}
inline bool isOpName(const Token& t) {
  return t.kind == TokKind::Name && !t.text.empty() && isOpChar(t.text[0]);
}
inline bool isPunct(const Token& t, const char* p) {
  return t.kind == TokKind::Punct && t.text == p;
}
inline bool isNameTok(const Token& t, const char* n) {
  return t.kind == TokKind::Name && t.text == n;
}

// Resolution tables shared by both passes.
struct Tables {
  std::map<std::string, std::size_t> ctorArity;
  std::map<std::string, std::size_t> funcArity;
  std::set<std::string> typeNames;
};

struct Cursor {
  const std::vector<Token>* toks;
  std::size_t i = 0;
  std::size_t end = 0;

  // Past the span end this returns the token at `end`, which is either a
  // synthetic End marker or (for spans narrowed at a `where`) the `where`
  // keyword; neither matches any punctuation or starts an atom.
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = i + ahead;
    return k < end ? (*toks)[k] : (*toks)[end];
  }
  const Token& eat() {
    const Token& t = peek();
    if (i < end) ++i;
    return t;
  }
  bool done() const { return i >= end; }
  void expectPunct(const char* p) {
    if (!isPunct(peek(), p)) fail(peek(), std::string("expected '") + p + "'");
    eat();
  }
};

// ------------------------------
// type expressions (data declarations, signatures)
// ------------------------------

inline TypeExpr parseType(Cursor& c);

inline TypeExpr parseTypeAtom(Cursor& c) {
  const Token& t = c.peek();
  if (isPunct(t, "[")) {
    c.eat();
    TypeExpr inner = parseType(c);
    c.expectPunct("]");
    return TypeExpr{listType, {inner}};
  }
  if (isPunct(t, "(")) {
    c.eat();
    std::vector<TypeExpr> parts{parseType(c)};
    while (isPunct(c.peek(), ",")) {
      c.eat();
      parts.push_back(parseType(c));
    }
    c.expectPunct(")");
    if (parts.size() == 1) return parts[0];
    if (parts.size() > maxTupleWidth) fail(t, "tuple type too wide");
    return TypeExpr{tupleCtor(parts.size()), std::move(parts)};
  }
  if (t.kind == TokKind::Name && !isKeyword(t.text) && !isOpName(t)) {
    c.eat();
    return TypeExpr{t.text, {}};
  }
  fail(t, "expected a type");
}

inline TypeExpr parseTypeApp(Cursor& c) {
  const Token& head = c.peek();
  TypeExpr first = parseTypeAtom(c);
  std::vector<TypeExpr> args;
  while (!c.done() && (isPunct(c.peek(), "[") || isPunct(c.peek(), "(") ||
                       (c.peek().kind == TokKind::Name && !isKeyword(c.peek().text) &&
                        !isOpName(c.peek())))) {
    args.push_back(parseTypeAtom(c));
  }
  if (args.empty()) return first;
  if (!first.args.empty() || std::islower(static_cast<unsigned char>(first.head[0])) != 0)
    fail(head, "type arguments applied to a non-type-constructor");
  first.args = std::move(args);
  return first;
}

inline TypeExpr parseType(Cursor& c) {
  TypeExpr lhs = parseTypeApp(c);
  if (isPunct(c.peek(), "->")) {
    c.eat();
    TypeExpr rhs = parseType(c);
    return TypeExpr{"->", {std::move(lhs), std::move(rhs)}};
  }
  return lhs;
}

// ------------------------------
// patterns
// ------------------------------

struct RuleCtx {
  const Tables* tables = nullptr;
  bool lenient = false;
  std::vector<ParseFail>* deferred = nullptr;  // unused; reserved
};

inline Pattern parsePattern(Cursor& c, const RuleCtx& ctx);

inline void checkCtorUse(const Token& at, const std::string& name, std::size_t args,
                         const Tables& t) {
  auto it = t.ctorArity.find(name);
  if (it == t.ctorArity.end()) fail(at, "unknown constructor '" + name + "'");
  if (it->second != args)
    fail(at, "constructor '" + name + "' expects " + std::to_string(it->second) +
                 " arguments, got " + std::to_string(args));
}

inline Pattern parsePatternAtom(Cursor& c, const RuleCtx& ctx) {
  const Token& t = c.peek();
  if (isUpperName(t)) {
    c.eat();
    checkCtorUse(t, t.text, 0, *ctx.tables);
    return pCtor(t.text);
  }
  if (t.kind == TokKind::Number) {
    c.eat();
    checkCtorUse(t, t.text, 0, *ctx.tables);
    return pCtor(t.text);
  }
  if (isLowerName(t)) {
    c.eat();
    return pVar(t.text);
  }
  if (isPunct(t, "(")) {
    c.eat();
    std::vector<Pattern> parts{parsePattern(c, ctx)};
    while (isPunct(c.peek(), ",")) {
      c.eat();
      parts.push_back(parsePattern(c, ctx));
    }
    c.expectPunct(")");
    if (parts.size() == 1) return parts[0];
    if (parts.size() > maxTupleWidth) fail(t, "tuple pattern too wide");
    return tuplePattern(std::move(parts));
  }
  if (isPunct(t, "[")) {
    c.eat();
    std::vector<Pattern> elems;
    if (!isPunct(c.peek(), "]")) {
      elems.push_back(parsePattern(c, ctx));
      while (isPunct(c.peek(), ",")) {
        c.eat();
        elems.push_back(parsePattern(c, ctx));
      }
    }
    c.expectPunct("]");
    Pattern acc = pCtor(nilCtor);
    for (auto it = elems.rbegin(); it != elems.rend(); ++it)
      acc = pCtor(consCtor, {std::move(*it), std::move(acc)});
    return acc;
  }
  fail(t, "expected a pattern");
}

inline bool startsPatternAtom(const Token& t) {
  return isUpperName(t) || isLowerName(t) || t.kind == TokKind::Number || isPunct(t, "(") ||
         isPunct(t, "[");
}

inline Pattern parsePatternApp(Cursor& c, const RuleCtx& ctx) {
  const Token& head = c.peek();
  if (isUpperName(head) || head.kind == TokKind::Number) {
    c.eat();
    std::vector<Pattern> args;
    while (startsPatternAtom(c.peek())) args.push_back(parsePatternAtom(c, ctx));
    checkCtorUse(head, head.text, args.size(), *ctx.tables);
    return pCtor(head.text, std::move(args));
  }
  if (isLowerName(head) || isOpName(head)) {
    c.eat();
    std::vector<Pattern> args;
    while (startsPatternAtom(c.peek())) args.push_back(parsePatternAtom(c, ctx));
    if (args.empty()) {
      if (isOpName(head)) fail(head, "operator name '" + head.text + "' is not a pattern");
      return pVar(head.text);
    }
    auto it = ctx.tables->funcArity.find(head.text);
    if (it == ctx.tables->funcArity.end())
      fail(head, "unknown function '" + head.text + "' in pattern");
    if (it->second != args.size())
      fail(head, "function '" + head.text + "' expects " + std::to_string(it->second) +
                     " arguments, got " + std::to_string(args.size()));
    return pFun(head.text, std::move(args));
  }
  return parsePatternAtom(c, ctx);
}

inline Pattern parsePatternCons(Cursor& c, const RuleCtx& ctx) {
  Pattern lhs = parsePatternApp(c, ctx);
  if (isPunct(c.peek(), ":")) {
    c.eat();
    Pattern rhs = parsePatternCons(c, ctx);
    return pCtor(consCtor, {std::move(lhs), std::move(rhs)});
  }
  return lhs;
}

inline Pattern parsePattern(Cursor& c, const RuleCtx& ctx) {
  const Token& at = c.peek();
  Pattern lhs = parsePatternCons(c, ctx);
  if (isPunct(c.peek(), "++")) {
    c.eat();
    Pattern rhs = parsePattern(c, ctx);
    auto it = ctx.tables->funcArity.find("++");
    if (it == ctx.tables->funcArity.end()) fail(at, "unknown function '++' in pattern");
    return pFun("++", {std::move(lhs), std::move(rhs)});
  }
  return lhs;
}

// ------------------------------
// expressions
// ------------------------------

struct ExprCtx {
  const Tables* tables = nullptr;
  const std::set<std::string>* scope = nullptr;
  bool lenient = false;
};

inline Expr parseExprTop(Cursor& c, const ExprCtx& ctx);

inline bool startsExprAtom(const Token& t) {
  return isUpperName(t) || isLowerName(t) || isOpName(t) || t.kind == TokKind::Number ||
         isNameTok(t, "failed") || isPunct(t, "(") || isPunct(t, "[");
}

inline Expr parseExprAtom(Cursor& c, const ExprCtx& ctx) {
  const Token& t = c.peek();
  if (isNameTok(t, "failed")) {
    c.eat();
    return eFail();
  }
  if (isUpperName(t) || t.kind == TokKind::Number) {
    c.eat();
    checkCtorUse(t, t.text, 0, *ctx.tables);
    return eCtor(t.text);
  }
  if (isLowerName(t) || isOpName(t)) {
    // Bare name: local variable, nullary function, or (leniently) a function
    // value. Applications are handled one level up.
    c.eat();
    if (!isOpName(t) && ctx.scope->count(t.text) != 0) return eVar(t.text);
    auto it = ctx.tables->funcArity.find(t.text);
    if (it != ctx.tables->funcArity.end()) {
      if (it->second == 0) return eApp(t.text);
      if (ctx.lenient) return eApp(t.text);  // function value (higher-order source)
      fail(t, "function '" + t.text + "' expects " + std::to_string(it->second) +
                  " arguments, got 0");
    }
    fail(t, "unbound variable '" + t.text + "'");
  }
  if (isPunct(t, "(")) {
    c.eat();
    std::vector<Expr> parts{parseExprTop(c, ctx)};
    while (isPunct(c.peek(), ",")) {
      c.eat();
      parts.push_back(parseExprTop(c, ctx));
    }
    c.expectPunct(")");
    if (parts.size() == 1) return parts[0];
    if (parts.size() > maxTupleWidth) fail(t, "tuple too wide");
    return tupleExpr(std::move(parts));
  }
  if (isPunct(t, "[")) {
    c.eat();
    std::vector<Expr> elems;
    if (!isPunct(c.peek(), "]")) {
      elems.push_back(parseExprTop(c, ctx));
      while (isPunct(c.peek(), ",")) {
        c.eat();
        elems.push_back(parseExprTop(c, ctx));
      }
    }
    c.expectPunct("]");
    Expr acc = eCtor(nilCtor);
    for (auto it = elems.rbegin(); it != elems.rend(); ++it)
      acc = eCtor(consCtor, {std::move(*it), std::move(acc)});
    return acc;
  }
  fail(t, "expected an expression");
}

inline Constraint parseConstraint(Cursor& c, const ExprCtx& ctx);
inline Expr parseCase(Cursor& c, const ExprCtx& ctx);

inline Expr parseExprApp(Cursor& c, const ExprCtx& ctx) {
  const Token& head = c.peek();
  if (isNameTok(head, "case")) return parseCase(c, ctx);

  if (isUpperName(head) || head.kind == TokKind::Number) {
    c.eat();
    std::vector<Expr> args;
    while (startsExprAtom(c.peek())) args.push_back(parseExprAtom(c, ctx));
    checkCtorUse(head, head.text, args.size(), *ctx.tables);
    return eCtor(head.text, std::move(args));
  }
  if (isLowerName(head) || isOpName(head)) {
    c.eat();
    std::vector<Expr> args;
    while (startsExprAtom(c.peek())) args.push_back(parseExprAtom(c, ctx));
    bool local = !isOpName(head) && ctx.scope->count(head.text) != 0;
    if (local) {
      if (args.empty()) return eVar(head.text);
      if (ctx.lenient) return eApp(head.text, std::move(args), /*fnIsVar=*/true);
      fail(head, "variable '" + head.text + "' used in function position");
    }
    auto it = ctx.tables->funcArity.find(head.text);
    if (it == ctx.tables->funcArity.end()) {
      if (args.empty()) fail(head, "unbound variable '" + head.text + "'");
      fail(head, "unknown function '" + head.text + "'");
    }
    if (it->second != args.size() && !ctx.lenient)
      fail(head, "function '" + head.text + "' expects " + std::to_string(it->second) +
                     " arguments, got " + std::to_string(args.size()));
    return eApp(head.text, std::move(args));
  }
  Expr first = parseExprAtom(c, ctx);
  if (startsExprAtom(c.peek())) fail(c.peek(), "cannot apply an expression");
  return first;
}

inline Expr parseExprCons(Cursor& c, const ExprCtx& ctx) {
  Expr lhs = parseExprApp(c, ctx);
  if (isPunct(c.peek(), ":")) {
    c.eat();
    Expr rhs = parseExprCons(c, ctx);
    return eCtor(consCtor, {std::move(lhs), std::move(rhs)});
  }
  return lhs;
}

inline Expr parseExprTop(Cursor& c, const ExprCtx& ctx) {
  const Token& at = c.peek();
  Expr lhs = parseExprCons(c, ctx);
  if (isPunct(c.peek(), "++")) {
    c.eat();
    Expr rhs = parseExprTop(c, ctx);
    if (ctx.tables->funcArity.find("++") == ctx.tables->funcArity.end())
      fail(at, "unknown function '++'");
    return eApp("++", {std::move(lhs), std::move(rhs)});
  }
  return lhs;
}

inline Constraint parseConstraint(Cursor& c, const ExprCtx& ctx) {
  Expr lhs = parseExprTop(c, ctx);
  UnifyMode mode;
  const Token& opTok = c.peek();
  if (isPunct(opTok, "=:=")) {
    mode = UnifyMode::Strict;
  } else if (isPunct(opTok, "=:<=")) {
    mode = UnifyMode::NonStrict;
  } else {
    fail(opTok, "expected '=:=' or '=:<='");
  }
  c.eat();
  Expr rhs = parseExprTop(c, ctx);
  if (mode == UnifyMode::NonStrict && !isLinear(lhs))
    fail(opTok, "non-linear left-hand side of '=:<='");
  return Constraint{mode, std::move(lhs), std::move(rhs)};
}

// Flattens a case-branch (or rule) pattern to the flat form, threading the
// guards to the innermost generated branch so every guard variable is bound.
inline std::tuple<Pattern, std::vector<Constraint>, Expr> flattenWithGuards(
    const Pattern& pat, std::vector<Constraint> guards, Expr body, std::set<std::string>& avoid) {
  if (isFlat(pat)) return {pat, std::move(guards), std::move(body)};
  const auto* ctor = pat.as<PCtor>();
  if (ctor == nullptr) throw std::logic_error("flattenWithGuards: functional pattern");

  std::vector<Pattern> flatArgs;
  std::vector<std::pair<std::string, const Pattern*>> nested;
  for (const auto& a : ctor->args) {
    if (a.as<PVar>()) {
      flatArgs.push_back(a);
    } else {
      std::string z = freshName("z", avoid);
      avoid.insert(z);
      flatArgs.push_back(pVar(z));
      nested.emplace_back(z, &a);
    }
  }
  // Rightmost nested child first: its case ends up innermost and receives the
  // guards; the leftmost child's case ends up outermost.
  for (auto it = nested.rbegin(); it != nested.rend(); ++it) {
    auto [sub, subGuards, inner] = flattenWithGuards(*it->second, std::move(guards), std::move(body), avoid);
    guards = {};
    body = eCase(eVar(it->first), {CaseBranch{std::move(sub), std::move(subGuards),
                                              std::make_shared<const Expr>(std::move(inner))}});
  }
  return {pCtor(ctor->ctor, std::move(flatArgs)), std::move(guards), std::move(body)};
}

inline Expr parseCase(Cursor& c, const ExprCtx& ctx) {
  c.eat();  // 'case'
  Expr scrut = parseExprTop(c, ctx);
  if (!isNameTok(c.peek(), "of")) fail(c.peek(), "expected 'of'");
  c.eat();
  c.expectPunct("{");

  std::vector<CaseBranch> branches;
  std::set<std::string> roots;
  while (true) {
    const Token& at = c.peek();
    RuleCtx pctx{ctx.tables, ctx.lenient, nullptr};
    Pattern pat = parsePattern(c, pctx);
    if (pat.as<PVar>() != nullptr || containsFunCall(pat))
      fail(at, "case branch pattern must be constructor-rooted");
    const std::string& root = pat.as<PCtor>()->ctor;
    if (!roots.insert(root).second) fail(at, "overlapping case branches on '" + root + "'");
    auto occ = varOccurrences(pat);
    for (const auto& [v, n] : occ)
      if (n > 1) fail(at, "repeated variable '" + v + "' in case branch pattern");

    std::set<std::string> inner = *ctx.scope;
    for (const auto& [v, n] : occ) inner.insert(v);
    ExprCtx bctx{ctx.tables, &inner, ctx.lenient};

    std::vector<Constraint> guards;
    if (isPunct(c.peek(), "|")) {
      c.eat();
      guards.push_back(parseConstraint(c, bctx));
      while (isPunct(c.peek(), ",")) {
        c.eat();
        guards.push_back(parseConstraint(c, bctx));
      }
    }
    c.expectPunct("->");
    Expr body = parseExprTop(c, bctx);

    std::set<std::string> avoid = inner;
    auto [flatPat, outGuards, newBody] =
        flattenWithGuards(pat, std::move(guards), std::move(body), avoid);
    branches.push_back(CaseBranch{std::move(flatPat), std::move(outGuards),
                                  std::make_shared<const Expr>(std::move(newBody))});
    if (isPunct(c.peek(), ";")) {
      c.eat();
      continue;
    }
    break;
  }
  c.expectPunct("}");
  return Expr{ECase{std::make_shared<const Expr>(std::move(scrut)), std::move(branches)}};
}

// ------------------------------
// declarations
// ------------------------------

struct RawRule {
  std::string name;
  SourcePos pos;
  Rule rule;
};

struct SpanView {
  const std::vector<Token>* toks;
  std::size_t begin, end;

  Cursor cursor() const { return Cursor{toks, begin, end}; }
  const Token& first() const { return (*toks)[begin]; }
};

inline DataDecl parseDataDecl(Cursor& c, std::set<std::string>& seenTypes,
                              std::set<std::string>& seenCtors) {
  c.eat();  // 'data'
  const Token& nameTok = c.peek();
  if (!isUpperName(nameTok)) fail(nameTok, "expected a type name after 'data'");
  c.eat();
  DataDecl d;
  d.typeName = nameTok.text;
  if (!seenTypes.insert(d.typeName).second)
    fail(nameTok, "type '" + d.typeName + "' already declared");
  while (isLowerName(c.peek())) d.params.push_back(c.eat().text);
  c.expectPunct("=");
  while (true) {
    const Token& ctorTok = c.peek();
    if (!isUpperName(ctorTok) && ctorTok.kind != TokKind::Number)
      fail(ctorTok, "expected a constructor name");
    c.eat();
    CtorDecl ctor;
    ctor.name = ctorTok.text;
    if (!seenCtors.insert(ctor.name).second)
      fail(ctorTok, "constructor '" + ctor.name + "' already declared");
    while (!c.done() && !isPunct(c.peek(), "|")) ctor.argTypes.push_back(parseTypeAtom(c));
    d.ctors.push_back(std::move(ctor));
    if (isPunct(c.peek(), "|")) {
      c.eat();
      continue;
    }
    break;
  }
  if (!c.done()) fail(c.peek(), "unexpected token in data declaration");

  // Type variables in constructor arguments must be declared parameters.
  std::set<std::string> params(d.params.begin(), d.params.end());
  std::function<void(const TypeExpr&)> checkVars = [&](const TypeExpr& t) {
    if (isTypeVar(t) && params.count(t.head) == 0)
      fail(nameTok, "undeclared type variable '" + t.head + "' in 'data " + d.typeName + "'");
    for (const auto& a : t.args) checkVars(a);
  };
  for (const auto& ctor : d.ctors)
    for (const auto& at : ctor.argTypes) checkVars(at);
  return d;
}

// Skips one pattern atom, returning false on malformed bracketing.
inline bool skipAtom(Cursor& c) {
  const Token& t = c.peek();
  if (t.kind == TokKind::Name || t.kind == TokKind::Number) {
    c.eat();
    return true;
  }
  if (isPunct(t, "(") || isPunct(t, "[")) {
    const char* close = isPunct(t, "(") ? ")" : "]";
    const char* open = t.text.c_str();
    int depth = 0;
    while (!c.done()) {
      const Token& u = c.eat();
      if (u.kind == TokKind::Punct && u.text == open) ++depth;
      if (u.kind == TokKind::Punct && u.text == close && --depth == 0) return true;
    }
    return false;
  }
  return false;
}

struct RuleHead {
  std::string name;
  SourcePos pos;
  std::size_t arity;
  bool infix;
};

// Pass 1: identify the defined name and arity without resolving patterns.
inline RuleHead scanRuleHead(const SpanView& span) {
  Cursor c = span.cursor();
  const Token& t0 = c.peek();

  auto finishPrefix = [&](const Token& nameTok) -> RuleHead {
    std::size_t arity = 0;
    while (!c.done() && !isPunct(c.peek(), "|") && !isPunct(c.peek(), "=")) {
      if (!skipAtom(c)) fail(c.peek(), "expected a pattern");
      ++arity;
    }
    return RuleHead{nameTok.text, nameTok.pos, arity, false};
  };

  if (isLowerName(t0) || isOpName(t0)) {
    c.eat();
    if (isPunct(c.peek(), "++")) {
      c.eat();
      if (!skipAtom(c)) fail(c.peek(), "expected a pattern");
      return RuleHead{"++", t0.pos, 2, true};
    }
    return finishPrefix(t0);
  }
  if (isUpperName(t0)) fail(t0, "a rule cannot define a constructor");
  // Infix definition with a non-variable first pattern: `[] ++ ys = ...`.
  if (!skipAtom(c)) fail(t0, "expected a declaration");
  if (isPunct(c.peek(), ":")) fail(c.peek(), "cannot define the list constructor ':'");
  if (!isPunct(c.peek(), "++")) fail(c.peek(), "expected '++', '|' or '='");
  c.eat();
  if (!skipAtom(c)) fail(c.peek(), "expected a pattern");
  return RuleHead{"++", t0.pos, 2, true};
}

inline std::set<std::string> allRuleNames(const Rule& r) {
  std::set<std::string> names;
  for (const auto& p : r.params)
    for (const auto& v : patternVars(p)) names.insert(v);
  names.insert(r.freeVars.begin(), r.freeVars.end());
  OccurrenceMap occ;
  for (const auto& g : r.guards) {
    countVars(g.lhs, occ);
    countVars(g.rhs, occ);
  }
  countVars(r.body, occ);
  for (const auto& [v, n] : occ) names.insert(v);
  forEachExpr(r.body, [&](const Expr& e) {
    if (const auto* cs = e.as<ECase>())
      for (const auto& br : cs->branches)
        for (const auto& v : patternVars(br.pat)) names.insert(v);
  });
  return names;
}

// Pass 2: parse one rule declaration completely.
inline RawRule parseRule(const SpanView& span, const Tables& tables, bool lenient) {
  Cursor c = span.cursor();
  RuleHead head = scanRuleHead(span);

  RawRule out;
  out.name = head.name;
  out.pos = head.pos;
  Rule& rule = out.rule;

  RuleCtx pctx{&tables, lenient, nullptr};
  if (head.infix) {
    rule.params.push_back(parsePatternAtom(c, pctx));
    c.expectPunct("++");
    rule.params.push_back(parsePatternAtom(c, pctx));
  } else {
    c.eat();  // function name
    for (std::size_t k = 0; k < head.arity; ++k) rule.params.push_back(parsePatternAtom(c, pctx));
  }

  // Left-linearity across the whole left-hand side.
  OccurrenceMap lhsOcc;
  for (const auto& p : rule.params) countVars(p, lhsOcc);
  for (const auto& [v, n] : lhsOcc)
    if (n > 1) fail(span.first(), "non-left-linear rule: variable '" + v + "' bound twice");

  // `where ... free` is parsed up front so the body sees those names.
  std::size_t whereIdx = c.end;
  {
    int depth = 0;
    for (std::size_t k = c.i; k < c.end; ++k) {
      const Token& t = (*c.toks)[k];
      if (t.kind == TokKind::Punct &&
          (t.text == "(" || t.text == "[" || t.text == "{"))
        ++depth;
      if (t.kind == TokKind::Punct &&
          (t.text == ")" || t.text == "]" || t.text == "}"))
        --depth;
      if (depth == 0 && isNameTok(t, "where")) {
        whereIdx = k;
        break;
      }
    }
  }
  if (whereIdx != c.end) {
    Cursor w{c.toks, whereIdx + 1, c.end};
    while (true) {
      const Token& v = w.peek();
      if (!isLowerName(v)) fail(v, "expected a variable name in 'where ... free'");
      w.eat();
      rule.freeVars.push_back(v.text);
      if (isPunct(w.peek(), ",")) {
        w.eat();
        continue;
      }
      break;
    }
    if (!isNameTok(w.peek(), "free")) fail(w.peek(), "expected 'free'");
    w.eat();
    if (!w.done()) fail(w.peek(), "unexpected token after 'free'");
    c.end = whereIdx;
  }
  {
    std::set<std::string> seen;
    for (const auto& v : rule.freeVars)
      if (!seen.insert(v).second) fail(span.first(), "duplicate free variable '" + v + "'");
    for (const auto& v : rule.freeVars)
      if (lhsOcc.count(v) != 0)
        fail(span.first(), "free variable '" + v + "' is already bound by a pattern");
  }

  std::set<std::string> scope;
  for (const auto& [v, n] : lhsOcc) scope.insert(v);
  scope.insert(rule.freeVars.begin(), rule.freeVars.end());
  ExprCtx ectx{&tables, &scope, lenient};

  if (isPunct(c.peek(), "|")) {
    c.eat();
    rule.guards.push_back(parseConstraint(c, ectx));
    while (isPunct(c.peek(), ",")) {
      c.eat();
      rule.guards.push_back(parseConstraint(c, ectx));
    }
  }
  c.expectPunct("=");
  rule.body = parseExprTop(c, ectx);
  if (!c.done()) fail(c.peek(), "unexpected token after rule body");

  // Desugar nested constructor parameters into flat case chains. Functional
  // patterns stay as written. Guards move inward with the deepest pattern so
  // their variables remain bound.
  bool anyNested = false;
  for (const auto& p : rule.params) anyNested = anyNested || (!isFlat(p) && !containsFunCall(p));
  if (anyNested) {
    std::set<std::string> avoid = allRuleNames(rule);
    std::vector<Constraint> guards = std::move(rule.guards);
    Expr body = std::move(rule.body);
    for (std::size_t k = rule.params.size(); k-- > 0;) {
      Pattern& p = rule.params[k];
      if (isFlat(p) || containsFunCall(p)) continue;
      auto [flat, outGuards, newBody] =
          flattenWithGuards(p, std::move(guards), std::move(body), avoid);
      p = std::move(flat);
      guards = std::move(outGuards);
      body = std::move(newBody);
    }
    rule.guards = std::move(guards);
    rule.body = std::move(body);
  }
  return out;
}

}  // namespace detail

// ------------------------------
// public entry points
// ------------------------------

inline ParseResult parseProgram(std::string_view text, ParseOptions options = {}) {
  using namespace detail;
  ParseResult result;

  std::vector<lex::Token> toks;
  try {
    toks = lex::tokenize(text);
  } catch (const lex::LexFail& lf) {
    result.errors.push_back({lf.pos, lf.message});
    return result;
  }

  // Split into declaration spans at depth-0 newlines and semicolons.
  std::vector<SpanView> spans;
  {
    int depth = 0;
    std::size_t begin = 0;
    std::size_t i = 0;
    auto flush = [&](std::size_t endIdx) {
      if (endIdx > begin) spans.push_back(SpanView{&toks, begin, endIdx});
    };
    for (; i < toks.size(); ++i) {
      const lex::Token& t = toks[i];
      if (t.kind == lex::TokKind::Punct) {
        if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
        if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      }
      bool boundary = (t.kind == lex::TokKind::End) ||
                      (depth == 0 && (t.kind == lex::TokKind::Newline ||
                                      (t.kind == lex::TokKind::Punct && t.text == ";")));
      if (boundary) {
        flush(i);
        begin = i + 1;
      }
    }
  }
  // Newlines inside brackets act as whitespace; rebuild spans without them.
  // Each span is followed by a synthetic End token so cursors reading past a
  // span see an end marker rather than the next declaration.
  std::vector<lex::Token> filtered;
  std::vector<SpanView> cleanSpans;
  filtered.reserve(toks.size() + spans.size());
  for (const auto& span : spans) {
    std::size_t b = filtered.size();
    for (std::size_t k = span.begin; k < span.end; ++k)
      if (toks[k].kind != lex::TokKind::Newline) filtered.push_back(toks[k]);
    if (filtered.size() == b) continue;
    filtered.push_back({lex::TokKind::End, "", toks[span.end].pos});
    cleanSpans.push_back(SpanView{nullptr, b, filtered.size() - 1});
  }
  for (auto& s : cleanSpans) s.toks = &filtered;

  Program program = prelude();
  Tables tables;
  for (const auto& d : program.dataDecls)
    for (const auto& ctor : d.ctors) tables.ctorArity[ctor.name] = ctor.arity();
  std::set<std::string> seenTypes, seenCtors;
  for (const auto& d : program.dataDecls) {
    seenTypes.insert(d.typeName);
    for (const auto& ctor : d.ctors) seenCtors.insert(ctor.name);
  }

  // Pass 1: data declarations and function headers.
  struct PendingSig {
    std::string name;
    SourcePos pos;
    Signature sig;
  };
  enum class SpanKind { Data, Sig, Rule, Bad };
  std::vector<SpanKind> kinds(cleanSpans.size(), SpanKind::Rule);
  std::vector<PendingSig> sigs;
  struct HeadInfo {
    std::string name;
    SourcePos pos;
    std::size_t arity;
  };
  std::vector<std::optional<HeadInfo>> heads(cleanSpans.size());

  for (std::size_t s = 0; s < cleanSpans.size(); ++s) {
    const SpanView& span = cleanSpans[s];
    try {
      if (isNameTok(span.first(), "data")) {
        kinds[s] = SpanKind::Data;
        Cursor c = span.cursor();
        DataDecl d = parseDataDecl(c, seenTypes, seenCtors);
        for (const auto& ctor : d.ctors) tables.ctorArity[ctor.name] = ctor.arity();
        program.dataDecls.push_back(std::move(d));
        continue;
      }
      bool isSig = false;
      for (std::size_t k = span.begin; k < span.end; ++k)
        if (isPunct((*span.toks)[k], "::")) {
          isSig = true;
          break;
        }
      if (isSig) {
        kinds[s] = SpanKind::Sig;
        continue;  // parsed in pass 2
      }
      RuleHead head = scanRuleHead(span);
      heads[s] = HeadInfo{head.name, head.pos, head.arity};
      auto it = tables.funcArity.find(head.name);
      if (it == tables.funcArity.end()) {
        tables.funcArity[head.name] = head.arity;
      } else if (it->second != head.arity) {
        fail((*span.toks)[span.begin], "rules for '" + head.name + "' have differing arities");
      }
    } catch (const ParseFail& pf) {
      kinds[s] = SpanKind::Bad;
      result.errors.push_back({pf.pos, pf.message});
    }
  }

  // Pass 2: signatures and rule bodies.
  std::vector<RawRule> rules;
  for (std::size_t s = 0; s < cleanSpans.size(); ++s) {
    const SpanView& span = cleanSpans[s];
    try {
      switch (kinds[s]) {
        case SpanKind::Data:
        case SpanKind::Bad:
          break;
        case SpanKind::Sig: {
          Cursor c = span.cursor();
          const lex::Token& nameTok = c.peek();
          if (!isLowerName(nameTok) && !isOpName(nameTok))
            fail(nameTok, "expected a function name before '::'");
          c.eat();
          c.expectPunct("::");
          TypeExpr t = parseType(c);
          if (!c.done()) fail(c.peek(), "unexpected token in signature");
          Signature sig;
          while (t.head == "->" && t.args.size() == 2) {
            sig.argTypes.push_back(t.args[0]);
            t = t.args[1];
          }
          sig.result = std::move(t);
          sigs.push_back({nameTok.text, nameTok.pos, std::move(sig)});
          break;
        }
        case SpanKind::Rule: {
          rules.push_back(parseRule(span, tables, options.lenientHigherOrder));
          break;
        }
      }
    } catch (const ParseFail& pf) {
      result.errors.push_back({pf.pos, pf.message});
    }
  }

  // Group contiguous rules into function definitions.
  std::set<std::string> finished;
  for (std::size_t r = 0; r < rules.size();) {
    const std::string& name = rules[r].name;
    if (finished.count(name) != 0) {
      result.errors.push_back({rules[r].pos, "rules for '" + name + "' are not contiguous"});
      ++r;
      continue;
    }
    FuncDef fd;
    fd.name = name;
    fd.arity = rules[r].rule.params.size();
    fd.origin = Origin::UserWritten;
    while (r < rules.size() && rules[r].name == name) {
      fd.rules.push_back(std::move(rules[r].rule));
      ++r;
    }
    finished.insert(name);
    program.funcs.push_back(std::move(fd));
  }
  for (const auto& ps : sigs) {
    FuncDef* fd = program.func(ps.name);
    if (fd == nullptr) {
      result.errors.push_back({ps.pos, "signature for undefined function '" + ps.name + "'"});
      continue;
    }
    if (fd->signature) {
      result.errors.push_back({ps.pos, "duplicate signature for '" + ps.name + "'"});
      continue;
    }
    if (ps.sig.argTypes.size() != fd->arity) {
      result.errors.push_back(
          {ps.pos, "signature for '" + ps.name + "' does not match its arity"});
      continue;
    }
    fd->signature = ps.sig;
  }

  if (result.errors.empty()) result.program = std::move(program);
  return result;
}

// Parses a query expression against a program. `scope` names are treated as
// bound variables. Queries are always strict (first-order).
inline std::variant<Expr, ParseError> parseExpr(const Program& program, std::string_view text,
                                                const std::set<std::string>& scope = {}) {
  using namespace detail;
  try {
    std::vector<lex::Token> toks = lex::tokenize(text);
    std::vector<lex::Token> filtered;
    for (const auto& t : toks)
      if (t.kind != lex::TokKind::Newline) filtered.push_back(t);

    Tables tables;
    for (const auto& d : program.dataDecls)
      for (const auto& ctor : d.ctors) tables.ctorArity[ctor.name] = ctor.arity();
    for (const auto& f : program.funcs) tables.funcArity[f.name] = f.arity;

    Cursor c{&filtered, 0, filtered.size() - 1};  // exclude End
    ExprCtx ctx{&tables, &scope, false};
    Expr e = parseExprTop(c, ctx);
    if (!c.done()) fail(c.peek(), "unexpected token after expression");
    return e;
  } catch (const lex::LexFail& lf) {
    return ParseError{lf.pos, lf.message};
  } catch (const detail::ParseFail& pf) {
    return ParseError{pf.pos, pf.message};
  }
}

}  // namespace flc
