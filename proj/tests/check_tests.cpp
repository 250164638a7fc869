// Bounded-enumeration checking: term enumeration against closed-form counts,
// instance matching, round-trip and equivalence verdicts on the example
// programs, and honest Inconclusive verdicts under truncation.

#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "flc/ast.hpp"
#include "flc/check.hpp"
#include "flc/eval.hpp"
#include "flc/invert.hpp"
#include "flc/parser.hpp"
#include "flc/pretty.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace flc;
using testutil::loadCorpus;
using testutil::parseP;

namespace {

TypeExpr ty(std::string head, std::vector<TypeExpr> args = {}) {
  return TypeExpr{std::move(head), std::move(args)};
}

const EnumSpec kListBool{TypeExpr{"List", {TypeExpr{"Bool", {}}}}, 3};

std::vector<std::string> shownTerms(const std::vector<ResultTerm>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(showResult(t));
  return out;
}

// The canonical comparison setup: the synthesized inverse of `fn` next to the
// generate-and-test construction of the same function, under a fresh name.
Program withReferenceInverse(Program p, const std::string& fn, const std::string& refName) {
  FuncDef fb = makeFallbackInverse(*p.func(fn));
  fb.name = refName;
  p.funcs.push_back(std::move(fb));
  return p;
}

}  // namespace

TEST_CASE("term enumeration matches closed-form counts and declaration order") {
  Program p = loadCorpus("append.flc");

  CHECK(shownTerms(enumerateTerms(p, ty("Bool"), 3)) ==
        std::vector<std::string>{"True", "False"});
  CHECK(enumerateTerms(p, ty("Bool"), 3).size() == oracle::countBool(3));

  auto lists = enumerateTerms(p, ty("List", {ty("Bool")}), 3);
  CHECK(shownTerms(lists) ==
        std::vector<std::string>{"[]", "[True]", "[True, True]", "[True, False]", "[False]",
                                 "[False, True]", "[False, False]"});
  CHECK(lists.size() == oracle::countListBool(3));

  auto pairs = enumerateTerms(p, ty("Tuple2", {ty("Bool"), ty("Bool")}), 3);
  CHECK(shownTerms(pairs) ==
        std::vector<std::string>{"(True, True)", "(True, False)", "(False, True)",
                                 "(False, False)"});
  CHECK(pairs.size() == oracle::countPair(oracle::countBool(2), oracle::countBool(2)));

  CHECK(shownTerms(enumerateTerms(p, ty("List", {ty("Bool")}), 1)) ==
        std::vector<std::string>{"[]"});
  CHECK(enumerateTerms(p, ty("List", {ty("Bool")}), 1).size() == oracle::countListBool(1));
  CHECK(enumerateTerms(p, ty("Bool"), 0).empty());

  Program peano = loadCorpus("peano.flc");
  CHECK(shownTerms(enumerateTerms(peano, ty("Nat"), 3)) ==
        std::vector<std::string>{"Z", "S Z", "S (S Z)"});
  CHECK(enumerateTerms(peano, ty("Nat"), 4).size() == oracle::countNat(4));

  CHECK_THROWS_AS(enumerateTerms(p, ty("Mystery"), 3), std::invalid_argument);
  CHECK_THROWS_AS(enumerateTerms(p, ty("List"), 3), std::invalid_argument);  // missing type arg
}

TEST_CASE("instance matching binds each free leaf once, consistently") {
  ResultTerm t = oracle::boolTerm(true);
  ResultTerm f = oracle::boolTerm(false);
  ResultTerm freeX = ResultTerm::freeLeaf(0);

  std::map<int, ResultTerm> b;
  CHECK(instanceOf(freeX, t, b));

  // (_0, _0) covers (True, True) but not (True, False).
  ResultTerm both = ResultTerm::make(tupleCtor(2), {freeX, freeX});
  std::map<int, ResultTerm> b1;
  CHECK(instanceOf(both, ResultTerm::make(tupleCtor(2), {t, t}), b1));
  std::map<int, ResultTerm> b2;
  CHECK_FALSE(instanceOf(both, ResultTerm::make(tupleCtor(2), {t, f}), b2));

  // Ground terms only match themselves; a free leaf is never "more specific".
  std::map<int, ResultTerm> b3;
  CHECK_FALSE(instanceOf(t, f, b3));
  std::map<int, ResultTerm> b4;
  CHECK_FALSE(instanceOf(t, freeX, b4));

  CHECK(anyInstanceOf({f, ResultTerm::make(consCtor, {freeX, ResultTerm::make(nilCtor)})},
                      oracle::listTerm({true})));
  CHECK_FALSE(anyInstanceOf({f}, t));
}

TEST_CASE("round-trip: concatenation inverse recovers every split") {
  InversionOutcome out = synthesizeInverse(loadCorpus("append.flc"), "++");
  RoundtripOutcome rt = roundtripCheck(out.program, "++", {kListBool, kListBool});
  CHECK(rt.verdict == Verdict::Pass);
  CHECK(rt.casesChecked == 49);  // 7 lists in each argument position
  CHECK(rt.notes.empty());
}

TEST_CASE("round-trip: tail and selfAppend inverses recover their arguments") {
  InversionOutcome tl = synthesizeInverse(loadCorpus("tail.flc"), "tail");
  RoundtripOutcome rt = roundtripCheck(tl.program, "tail", {kListBool});
  CHECK(rt.verdict == Verdict::Pass);
  CHECK(rt.casesChecked == 7);

  InversionOutcome sa = synthesizeInverse(loadCorpus("selfappend.flc"), "selfAppend");
  RoundtripOutcome rt2 = roundtripCheck(sa.program, "selfAppend", {kListBool});
  CHECK(rt2.verdict == Verdict::Pass);
  CHECK(rt2.casesChecked == 7);
}

TEST_CASE("round-trip: a functional-pattern function checks after elaboration") {
  // The inverse of last enumerates an infinite preimage, so the answer search
  // must be cut short; the arguments are always recovered early enough.
  InversionOutcome la = synthesizeInverse(loadCorpus("last_funpat.flc"), "last");
  Program p = elaborateFunPats(la.program, ElabMode::NonStrictUnify);
  RoundtripOutcome rt = roundtripCheck(p, "last", {kListBool}, EvalConfig{Strategy::BFS, 3000, 25});
  CHECK(rt.verdict == Verdict::Pass);
  CHECK(rt.casesChecked == 7);
  CHECK(rt.notes.empty());
}

TEST_CASE("round-trip: a wrong inverse fails with the lost argument tuple") {
  Program p = loadCorpus("tail.flc");
  p.funcs.push_back(FuncDef{
      "badinv", 1, {Rule{{pVar("x")}, {}, eVar("x"), {}}}, Origin::UserWritten, std::nullopt});
  RoundtripOutcome rt = roundtripCheck(p, "tail", {kListBool}, {}, "badinv");
  CHECK(rt.verdict == Verdict::Fail);
  REQUIRE(rt.counterexample.has_value());
  REQUIRE(rt.counterexample->args.size() == 1);
  CHECK(rt.counterexample->args[0] == oracle::listTerm({true}));
  CHECK(rt.counterexample->output == oracle::listTerm({}));
  CHECK(rt.casesChecked == 2);  // [] produces nothing; [True] exposes the bug
}

TEST_CASE("round-trip: truncation yields Inconclusive, never a false verdict") {
  InversionOutcome out = synthesizeInverse(loadCorpus("append.flc"), "++");
  RoundtripOutcome rt = roundtripCheck(out.program, "++", {kListBool, kListBool},
                                       EvalConfig{Strategy::BFS, 100000, 2});
  CHECK(rt.verdict == Verdict::Inconclusive);
  REQUIRE_FALSE(rt.notes.empty());
  CHECK(rt.notes[0] == "inverse search truncated before recovering some arguments");
  CHECK(rt.casesChecked == 49);
}

TEST_CASE("equivalence: synthesized inverses agree with generate-and-test references") {
  InversionOutcome app = synthesizeInverse(loadCorpus("append.flc"), "++");
  Program p = withReferenceInverse(app.program, "++", "++_ref");
  EquivalenceOutcome eq = equivalenceCheck(p, "++_inv", "++_ref", kListBool);
  CHECK(eq.verdict == Verdict::Pass);
  CHECK(eq.casesChecked == 34);  // 7 ground lists plus every failed-subterm variant

  InversionOutcome la = synthesizeInverse(loadCorpus("last_funpat.flc"), "last");
  Program lp = withReferenceInverse(elaborateFunPats(la.program, ElabMode::NonStrictUnify),
                                    "last", "last_ref");
  EquivalenceOutcome eq2 = equivalenceCheck(lp, "last_inv", "last_ref", EnumSpec{ty("Bool"), 3},
                                            EvalConfig{Strategy::BFS, 4000, 12});
  CHECK(eq2.verdict == Verdict::Pass);
  CHECK(eq2.casesChecked == 4);
  CHECK(eq2.notes.empty());
}

TEST_CASE("equivalence: the forced direct inverse is caught on a partial input") {
  InversionOutcome forced =
      synthesizeInverse(loadCorpus("g.flc"), "g", InversionOptions{/*forceDirect=*/true});
  Program p = withReferenceInverse(forced.program, "g", "g_ref");
  EnumSpec pairs{ty("Tuple2", {ty("Int"), ty("Int")}), 3};
  EquivalenceOutcome eq = equivalenceCheck(p, "g_inv", "g_ref", pairs);

  CHECK(eq.verdict == Verdict::Fail);
  REQUIRE(eq.counterexample.has_value());
  CHECK(pretty(eq.counterexample->input) == "(0, failed)");
  CHECK(eq.counterexample->left.empty());
  CHECK(shownTerms(eq.counterexample->right) == std::vector<std::string>{"0"});
  CHECK(eq.casesChecked == 4);  // fails on the first pair's last failed variant
}

TEST_CASE("equivalence: the hazard-free variant agrees everywhere") {
  InversionOutcome gs = synthesizeInverse(loadCorpus("g_simple.flc"), "g");
  Program p = withReferenceInverse(gs.program, "g", "g_ref");
  EnumSpec pairs{ty("Tuple2", {ty("Int"), ty("Int")}), 3};
  EquivalenceOutcome eq = equivalenceCheck(p, "g_inv", "g_ref", pairs);
  CHECK(eq.verdict == Verdict::Pass);
  CHECK(eq.casesChecked == 20);
}

TEST_CASE("equivalence: sets that differ only past a truncation are Inconclusive") {
  Program p = parseP(
      "(++) :: [a] -> [a] -> [a]\n"
      "[] ++ ys = ys\n"
      "(x : xs) ++ ys = x : (xs ++ ys)\n"
      "lt x = xs ++ [True] where xs free\n"
      "rt x = xs ++ [False] where xs free\n");
  EquivalenceOutcome eq = equivalenceCheck(p, "lt", "rt", EnumSpec{ty("Bool"), 1},
                                           EvalConfig{Strategy::BFS, 100000, 2},
                                           /*withFailedProbes=*/false);
  CHECK(eq.verdict == Verdict::Inconclusive);
  REQUIRE_FALSE(eq.notes.empty());
  CHECK(eq.notes[0] == "answer sets differ only where a search was truncated");
  CHECK(eq.casesChecked == 2);
}

TEST_CASE("the concatenation inverse enumerates exactly the n+1 splits of a ground list") {
  InversionOutcome out = synthesizeInverse(loadCorpus("append.flc"), "++");
  for (const auto& xs : oracle::boolLists(3)) {
    EvalResult r = runQuery(out.program, eApp("++_inv", {exprOfResult(oracle::listTerm(xs))}));
    INFO("input " << showResult(oracle::listTerm(xs)));
    CHECK_FALSE(r.truncated);
    CHECK(r.values.size() == xs.size() + 1);

    std::set<ResultTerm> expected;
    for (const auto& [pre, suf] : oracle::splits(xs))
      expected.insert(oracle::pairTerm(oracle::listTerm(pre), oracle::listTerm(suf)));
    CHECK(resultSet(r) == expected);
  }
}

TEST_CASE("forcing the hazardous inverse loses the answer on a partial input") {
  Program base = loadCorpus("g.flc");
  Expr partialInput = tupleExpr({eCtor("0"), eFail()});

  InversionOutcome forced = synthesizeInverse(base, "g", InversionOptions{true});
  EvalResult lost = runQuery(forced.program, eApp("g_inv", {partialInput}));
  CHECK(lost.values.empty());

  InversionOutcome fallback = synthesizeInverse(base, "g");
  EvalResult kept = runQuery(fallback.program, eApp("g_inv", {partialInput}));
  CHECK(testutil::shownSet(kept) == std::set<std::string>{"0"});

  InversionOutcome simple = synthesizeInverse(loadCorpus("g_simple.flc"), "g");
  EvalResult simpleKept = runQuery(simple.program, eApp("g_inv", {partialInput}));
  CHECK(testutil::shownSet(simpleKept) == std::set<std::string>{"0"});
}
