// Grammar coverage, desugaring, diagnostics, and the printer/parser
// round-trip property over the corpus and generated programs.

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "flc/ast.hpp"
#include "flc/parser.hpp"
#include "flc/pretty.hpp"
#include "support/gen.hpp"
#include "support/testutil.hpp"

using namespace flc;
using testutil::loadCorpus;
using testutil::parseP;
using testutil::qe;

static const char* kCorpusFiles[] = {
    "append.flc", "last_funpat.flc", "last_nsu.flc", "last_strict.flc",
    "selfappend.flc", "tail.flc", "g.flc", "g_simple.flc",
    "peano.flc", "prelude.flc",
};

TEST_CASE("every corpus file parses (dollar needs the lenient grammar)") {
  for (const char* f : kCorpusFiles) {
    INFO(f);
    CHECK_NOTHROW(loadCorpus(f));
  }
  // dollar applies a variable, which only the lenient grammar accepts.
  std::string dollarSrc = testutil::readFileOrThrow(testutil::corpusPath("dollar.flc"));
  ParseResult strict = parseProgram(dollarSrc);
  REQUIRE_FALSE(strict.ok());
  CHECK(strict.errors[0].message == "variable 'f' used in function position");

  Program lenient = parseP(dollarSrc, /*lenient=*/true);
  const FuncDef* dollar = lenient.func("dollar");
  REQUIRE(dollar != nullptr);
  const auto* app = dollar->rules[0].body.as<EApp>();
  REQUIRE(app != nullptr);
  CHECK(app->fnIsVar);
}

TEST_CASE("append parses to the two structural rules with its signature") {
  Program p = loadCorpus("append.flc");
  const FuncDef* app = p.func("++");
  REQUIRE(app != nullptr);
  CHECK(app->arity == 2);
  REQUIRE(app->rules.size() == 2);

  // [] ++ ys = ys
  CHECK(equal(app->rules[0].params[0], pCtor(nilCtor)));
  CHECK(equal(app->rules[0].body, eVar("ys")));
  // (x : xs) ++ ys = x : (xs ++ ys)
  CHECK(equal(app->rules[1].params[0], pCtor(consCtor, {pVar("x"), pVar("xs")})));
  CHECK(equal(app->rules[1].body,
              eCtor(consCtor, {eVar("x"), eApp("++", {eVar("xs"), eVar("ys")})})));

  REQUIRE(app->signature.has_value());
  CHECK(app->signature->argTypes.size() == 2);
  CHECK(pretty(*app->signature) == "[a] -> [a] -> [a]");
}

TEST_CASE("functional patterns parse into FunCall pattern nodes") {
  Program p = loadCorpus("last_funpat.flc");
  const FuncDef* last = p.func("last");
  REQUIRE(last != nullptr);
  Pattern expected =
      pFun("++", {pVar("xs"), pCtor(consCtor, {pVar("x"), pCtor(nilCtor)})});
  CHECK(equal(last->rules[0].params[0], expected));
  CHECK(hasFunctionalPatterns(*last));
}

TEST_CASE("unification guards and where-free lists parse in declaration order") {
  Program p = loadCorpus("last_nsu.flc");
  const Rule& r = p.func("last")->rules[0];
  REQUIRE(r.guards.size() == 1);
  CHECK(r.guards[0].mode == UnifyMode::NonStrict);
  CHECK(equal(r.guards[0].rhs, eVar("z")));
  CHECK(r.freeVars == std::vector<std::string>{"xs", "x"});

  Program ps = loadCorpus("last_strict.flc");
  CHECK(ps.func("last")->rules[0].guards[0].mode == UnifyMode::Strict);
}

TEST_CASE("nested constructor patterns desugar into case expressions") {
  Program p = parseP("f (x : (y : ys)) = y\n");
  const Rule& r = p.func("f")->rules[0];
  CHECK(isFlat(r.params[0]));
  CHECK(equal(r.params[0], pCtor(consCtor, {pVar("x"), pVar("z")})));
  Expr expected =
      eCase(eVar("z"), {branch(pCtor(consCtor, {pVar("y"), pVar("ys")}), eVar("y"))});
  CHECK(equal(r.body, expected));
}

TEST_CASE("forward references and numeric constructors parse") {
  Program p = parseP("f x = g x\ng y = y\n");
  CHECK(p.func("f") != nullptr);

  Program q = parseP("data Int = 0 | S Int\nf 0 = 0\nf (S n) = n\n");
  auto [decl, zero] = q.ctor("0");
  REQUIRE(zero != nullptr);
  CHECK(decl->typeName == "Int");
  CHECK(equal(q.func("f")->rules[0].params[0], pCtor("0")));
}

TEST_CASE("diagnostics carry positions and exact causes") {
  auto firstError = [](const std::string& src) {
    ParseResult r = parseProgram(src);
    REQUIRE_FALSE(r.ok());
    return r.errors[0];
  };
  CHECK(firstError("f True = True\ng x = x\nf False = False\n").message ==
        "rules for 'f' are not contiguous");
  CHECK(firstError("f x = x\nf x y = x\n").message == "rules for 'f' have differing arities");
  CHECK(firstError("f x = case x of { y -> y }\n").message ==
        "case branch pattern must be constructor-rooted");
  CHECK(firstError("f x = True False\n").message == "constructor 'True' expects 0 arguments, got 1");
  CHECK(firstError("data D = K\ndata D = J\n").message == "type 'D' already declared");
  CHECK(firstError("data D = K\ndata E = K\n").message == "constructor 'K' already declared");
  CHECK(firstError("f x x = x\n").message == "non-left-linear rule: variable 'x' bound twice");
  CHECK(firstError("f z | (x, x) =:<= z = x where x free\n").message ==
        "non-linear left-hand side of '=:<='");
  CHECK(firstError("last (xs ++ [x]) = x\n").message == "unknown function '++' in pattern");
  CHECK(firstError("f :: Bool\nf x = x\n").message == "signature for 'f' does not match its arity");
  CHECK(firstError("f x = x + x\n").message == "unknown operator '+'");
  CHECK(firstError("f ? = True\n").message == "unexpected character '?'");

  ParseError positioned = firstError("f x = x\n\ng y = True False\n");
  CHECK(positioned.pos.line == 3);
}

TEST_CASE("error recovery reports independent spans separately") {
  ParseResult r = parseProgram("f x = y\ng x = True False\n");
  REQUIRE_FALSE(r.ok());
  REQUIRE(r.errors.size() == 2);
  CHECK(r.errors[0].message == "unbound variable 'y'");
  CHECK(r.errors[1].message == "constructor 'True' expects 0 arguments, got 1");
}

TEST_CASE("comment-only files yield an empty program over the prelude") {
  Program p = loadCorpus("prelude.flc");
  CHECK(p.funcs.empty());
  CHECK(p.dataDecl("Bool") != nullptr);  // the prelude itself is present
}

TEST_CASE("query expressions: sugar, scope, and trailing-input errors") {
  Program p = loadCorpus("append.flc");
  CHECK(equal(qe(p, "[True, False]"),
              eCtor(consCtor, {eCtor("True"), eCtor(consCtor, {eCtor("False"), eCtor(nilCtor)})})));
  CHECK(equal(qe(p, "(True, [])"), tupleExpr({eCtor("True"), eCtor(nilCtor)})));
  CHECK(equal(qe(p, "xs ++ []", {"xs"}), eApp("++", {eVar("xs"), eCtor(nilCtor)})));

  auto err = [&](const std::string& text) {
    auto r = parseExpr(p, text);
    REQUIRE(std::holds_alternative<ParseError>(r));
    return std::get<ParseError>(r).message;
  };
  CHECK(err("xs ++ []") == "unbound variable 'xs'");
  CHECK(err("True True") == "constructor 'True' expects 0 arguments, got 1");
  CHECK(err("[] []") == "cannot apply an expression");
}

TEST_CASE("operator-derived names parse in expression position") {
  Program p = loadCorpus("append.flc");
  Program withInv = p;
  FuncDef inv;
  inv.name = "++_inv";
  inv.arity = 1;
  inv.rules.push_back(Rule{{pVar("z")}, {}, eVar("z"), {}});
  withInv.funcs.push_back(inv);
  CHECK(equal(qe(withInv, "(++)_inv [True]"),
              eApp("++_inv", {eCtor(consCtor, {eCtor("True"), eCtor(nilCtor)})})));
}

TEST_CASE("parse after pretty is the identity on the corpus") {
  for (const char* f : kCorpusFiles) {
    INFO(f);
    Program p = loadCorpus(f);
    Program again = parseP(pretty(p));
    CHECK(equal(again, p));
    CHECK(pretty(again) == pretty(p));
  }
  // dollar round-trips through the lenient grammar.
  Program d = loadCorpus("dollar.flc", /*lenient=*/true);
  CHECK(equal(parseP(pretty(d), /*lenient=*/true), d));
}

TEST_CASE("parse after pretty is the identity on 500 generated programs") {
  gen::Rng rng(0xF1C);
  for (int i = 0; i < 500; ++i) {
    Program p = gen::roundtripProgram(rng);
    std::string text = pretty(p);
    INFO("program #" << i << ":\n" << text);
    ParseResult r = parseProgram(text);
    REQUIRE(r.ok());
    CHECK(equal(*r.program, p));
    CHECK(pretty(*r.program) == text);
  }
}
