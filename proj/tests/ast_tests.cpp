// Core syntax-tree invariants: builders, structural equality, variable
// analyses, pattern/expression conversions, and the built-in prelude.

#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <stdexcept>

#include "flc/ast.hpp"
#include "flc/pretty.hpp"

using namespace flc;

TEST_CASE("structural equality distinguishes node kinds and flags") {
  CHECK(equal(eVar("x"), eVar("x")));
  CHECK_FALSE(equal(eVar("x"), eVar("y")));
  CHECK_FALSE(equal(eVar("f"), eApp("f")));  // variable vs nullary call
  CHECK(equal(eApp("f", {eVar("x")}), eApp("f", {eVar("x")})));
  CHECK_FALSE(equal(eApp("f", {eVar("x")}), eApp("f", {eVar("x")}, /*fnIsVar=*/true)));
  CHECK(equal(eFail(), eFail()));
  CHECK_FALSE(equal(eFail(), eCtor("True")));

  Expr c1 = eCase(eVar("x"), {branch(pCtor("True"), eCtor("False"))});
  Expr c2 = eCase(eVar("x"), {branch(pCtor("True"), eCtor("False"))});
  Expr c3 = eCase(eVar("x"), {branch(pCtor("False"), eCtor("False"))});
  CHECK(equal(c1, c2));
  CHECK_FALSE(equal(c1, c3));
}

TEST_CASE("signature and origin are metadata, not identity") {
  FuncDef a{"f", 1, {Rule{{pVar("x")}, {}, eVar("x"), {}}}, Origin::UserWritten, std::nullopt};
  FuncDef b = a;
  b.origin = Origin::Synthesized;
  b.signature = Signature{{TypeExpr{"Bool", {}}}, TypeExpr{"Bool", {}}};
  CHECK(equal(a, b));
}

TEST_CASE("variable occurrence counting skips case-branch binders") {
  // case y of { Cons h t -> h } — y and h occur; t does not, and the
  // binders themselves are not occurrences.
  Expr e = eCase(eVar("y"), {branch(pCtor(consCtor, {pVar("h"), pVar("t")}), eVar("h"))});
  OccurrenceMap occ = varOccurrences(e);
  CHECK(occ["y"] == 1);
  CHECK(occ["h"] == 1);
  CHECK(occ.find("t") == occ.end());

  // A variable applied as a function counts as an occurrence.
  OccurrenceMap ho = varOccurrences(eApp("f", {eVar("x")}, /*fnIsVar=*/true));
  CHECK(ho["f"] == 1);
  CHECK(ho["x"] == 1);
}

TEST_CASE("linearity of patterns and expressions") {
  CHECK(isLinear(pCtor(consCtor, {pVar("x"), pVar("xs")})));
  CHECK_FALSE(isLinear(pCtor(consCtor, {pVar("x"), pVar("x")})));
  CHECK(isLinear(eApp("f", {eVar("x"), eVar("y")})));
  CHECK_FALSE(isLinear(eApp("f", {eVar("x"), eVar("x")})));
}

TEST_CASE("extraVars reports unused pattern variables and where-free variables") {
  // tail (x : xs) = xs — x never reaches the right-hand side.
  Rule tailRule{{pCtor(consCtor, {pVar("x"), pVar("xs")})}, {}, eVar("xs"), {}};
  ExtraVars ev = extraVars(tailRule);
  CHECK(ev.unusedLhs == std::set<std::string>{"x"});
  CHECK(ev.whereFree.empty());

  // g 0 = (f j, j) where j free
  Rule gRule{{pCtor("0")},
             {},
             tupleExpr({eApp("f", {eVar("j")}), eVar("j")}),
             {"j"}};
  ExtraVars gv = extraVars(gRule);
  CHECK(gv.unusedLhs.empty());
  CHECK(gv.whereFree == std::set<std::string>{"j"});

  // Guard occurrences count as uses.
  Rule guarded{{pVar("x")},
               {Constraint{UnifyMode::Strict, eVar("x"), eCtor("True")}},
               eCtor("True"),
               {}};
  CHECK(extraVars(guarded).unusedLhs.empty());
}

TEST_CASE("freshName picks the base or the smallest free numeric suffix") {
  CHECK(freshName("xs", {}) == "xs");
  CHECK(freshName("xs", {"xs"}) == "xs1");
  CHECK(freshName("xs", {"xs", "xs1"}) == "xs2");
  CHECK(freshName("z", {"z", "z1", "z3"}) == "z2");
}

TEST_CASE("pattern/expression conversions invert each other") {
  // Functional pattern (xs ++ [x]) <-> application expression.
  Pattern funpat = pFun("++", {pVar("xs"), pCtor(consCtor, {pVar("x"), pCtor(nilCtor)})});
  Expr asExpr = exprOfPattern(funpat);
  CHECK(equal(asExpr, eApp("++", {eVar("xs"), eCtor(consCtor, {eVar("x"), eCtor(nilCtor)})})));
  CHECK(equal(patternOfExpr(asExpr), funpat));

  Pattern plain = pCtor(consCtor, {pVar("x"), pVar("xs")});
  CHECK(equal(patternOfExpr(exprOfPattern(plain)), plain));

  CHECK_THROWS_AS(patternOfExpr(eFail()), std::logic_error);
  CHECK_THROWS_AS(patternOfExpr(eCase(eVar("x"), {branch(pCtor("True"), eVar("x"))})),
                  std::logic_error);
  CHECK_THROWS_AS(patternOfExpr(eApp("f", {eVar("x")}, /*fnIsVar=*/true)), std::logic_error);
}

TEST_CASE("isFlat and flattenPattern") {
  CHECK(isFlat(pVar("x")));
  CHECK(isFlat(pCtor(consCtor, {pVar("x"), pVar("xs")})));
  Pattern nested = pCtor(consCtor, {pVar("x"), pCtor(consCtor, {pVar("y"), pVar("ys")})});
  CHECK_FALSE(isFlat(nested));

  std::set<std::string> avoid{"x", "y", "ys"};
  auto [flat, body] = flattenPattern(nested, eVar("y"), avoid);
  CHECK(isFlat(flat));
  // x : z with case z of { y : ys -> y } wrapped around the body.
  CHECK(equal(flat, pCtor(consCtor, {pVar("x"), pVar("z")})));
  Expr expected =
      eCase(eVar("z"), {branch(pCtor(consCtor, {pVar("y"), pVar("ys")}), eVar("y"))});
  CHECK(equal(body, expected));
}

TEST_CASE("flattening puts the leftmost nested child in the outermost case") {
  // K (J a) (J b) — two nested children; the leftmost must be
  // scrutinized first in the generated right-hand side.
  Pattern p = pCtor("K", {pCtor("J", {pVar("a")}), pCtor("J", {pVar("b")})});
  std::set<std::string> avoid{"a", "b"};
  auto [flat, body] = flattenPattern(p, eVar("a"), avoid);
  CHECK(equal(flat, pCtor("K", {pVar("z"), pVar("z1")})));
  const auto* outer = body.as<ECase>();
  REQUIRE(outer != nullptr);
  CHECK(equal(*outer->scrutinee, eVar("z")));  // z holds (J a), the leftmost child
}

TEST_CASE("tuple helpers") {
  CHECK(tupleCtor(2) == "Tuple2");
  CHECK(equal(tupleExpr({eVar("x")}), eVar("x")));  // width 1 is bare
  CHECK(equal(tupleExpr({eVar("x"), eVar("y")}), eCtor("Tuple2", {eVar("x"), eVar("y")})));
  CHECK(equal(tuplePattern({pVar("x")}), pVar("x")));
  CHECK(equal(tuplePattern({pVar("x"), pVar("y")}),
              pCtor("Tuple2", {pVar("x"), pVar("y")})));
}

TEST_CASE("prelude declares Bool, List, and tuple types") {
  Program p = prelude();
  REQUIRE(p.dataDecl("Bool") != nullptr);
  REQUIRE(p.dataDecl(listType) != nullptr);
  CHECK(p.dataDecl("Bool")->fromPrelude);

  auto [listDecl, cons] = p.ctor(consCtor);
  REQUIRE(cons != nullptr);
  CHECK(listDecl->typeName == listType);
  CHECK(cons->argTypes.size() == 2);

  for (std::size_t w = 2; w <= maxTupleWidth; ++w) {
    auto [d, c] = p.ctor(tupleCtor(w));
    REQUIRE(c != nullptr);
    CHECK(c->argTypes.size() == w);
    CHECK(d->fromPrelude);
  }
  CHECK(p.ctor("Tuple9").second == nullptr);
}

TEST_CASE("inverse and display names") {
  CHECK(inverseName("tail") == "tail_inv");
  CHECK(inverseName("++") == "++_inv");
  CHECK(displayName("tail_inv") == "tail_inv");
  CHECK(displayName("++") == "(++)");
  CHECK(displayName("++_inv") == "(++)_inv");
  CHECK(printsInfix("++"));
  CHECK(printsInfix(":"));
  CHECK_FALSE(printsInfix("tail"));
  CHECK_FALSE(printsInfix("++_inv"));
}

TEST_CASE("type variable instantiation replaces every lowercase head") {
  TypeExpr listOfA{listType, {TypeExpr{"a", {}}}};
  TypeExpr ground = instantiateTypeVars(listOfA, TypeExpr{"Bool", {}});
  CHECK(pretty(ground) == "[Bool]");

  TypeExpr pairAB{tupleCtor(2), {TypeExpr{"a", {}}, TypeExpr{"b", {}}}};
  CHECK(pretty(instantiateTypeVars(pairAB, TypeExpr{"Bool", {}})) == "(Bool, Bool)");
}
