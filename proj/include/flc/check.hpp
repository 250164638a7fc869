#pragma once

// Bounded-enumeration checking.
//
// Two checks back the inverse synthesizer. The round-trip check enumerates
// ground argument tuples up to a depth bound, runs the function forward, and
// requires the arguments among the inverse's answers for every produced
// value (answers may carry free variables; they count when the arguments are
// an instance). The equivalence check runs two functions over enumerated
// inputs — optionally including variants with `failed` planted at every
// subterm position — and requires identical answer sets.
//
// Search limits make every verdict honest: a missing answer in a truncated
// search (or differing sets when a search was cut off) is Inconclusive, not
// Fail. Fail always carries the first counterexample.

#include <optional>
#include <utility>

#include "flc/ast.hpp"
#include "flc/eval.hpp"

namespace flc {

// ------------------------------
// term enumeration
// ------------------------------

// What to enumerate for one argument position: a ground type and a depth
// bound (a nullary constructor has depth 1).
struct EnumSpec {
  TypeExpr type;
  std::size_t maxDepth = 3;
};

namespace check_detail {

inline TypeExpr substitute(const TypeExpr& t, const std::map<std::string, TypeExpr>& sub) {
  if (isTypeVar(t)) {
    auto it = sub.find(t.head);
    if (it != sub.end()) return it->second;
    return t;
  }
  TypeExpr out{t.head, {}};
  out.args.reserve(t.args.size());
  for (const auto& a : t.args) out.args.push_back(substitute(a, sub));
  return out;
}

}  // namespace check_detail

// All ground terms of `type` with depth at most `maxDepth`, ordered by
// constructor declaration order and then left-to-right by children.
inline std::vector<ResultTerm> enumerateTerms(const Program& prog, const TypeExpr& type,
                                              std::size_t maxDepth) {
  std::vector<ResultTerm> out;
  if (maxDepth == 0) return out;
  const DataDecl* decl = prog.dataDecl(type.head);
  if (decl == nullptr)
    throw std::invalid_argument("enumerateTerms: no data declaration for type '" + type.head +
                                "'");
  if (decl->params.size() != type.args.size())
    throw std::invalid_argument("enumerateTerms: type '" + type.head + "' expects " +
                                std::to_string(decl->params.size()) + " arguments");
  std::map<std::string, TypeExpr> sub;
  for (std::size_t i = 0; i < decl->params.size(); ++i) sub[decl->params[i]] = type.args[i];

  for (const auto& ctor : decl->ctors) {
    if (ctor.arity() == 0) {
      out.push_back(ResultTerm::make(ctor.name));
      continue;
    }
    if (maxDepth < 2) continue;
    std::vector<std::vector<ResultTerm>> kidChoices;
    bool empty = false;
    for (const auto& at : ctor.argTypes) {
      kidChoices.push_back(enumerateTerms(prog, check_detail::substitute(at, sub), maxDepth - 1));
      empty = empty || kidChoices.back().empty();
    }
    if (empty) continue;
    std::vector<std::size_t> idx(kidChoices.size(), 0);
    for (;;) {
      std::vector<ResultTerm> kids;
      kids.reserve(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) kids.push_back(kidChoices[i][idx[i]]);
      out.push_back(ResultTerm::make(ctor.name, std::move(kids)));
      std::size_t i = idx.size();
      while (i-- > 0) {
        if (++idx[i] < kidChoices[i].size()) break;
        idx[i] = 0;
        if (i == 0) goto nextCtor;
      }
    }
  nextCtor:;
  }
  return out;
}

// ------------------------------
// verdicts
// ------------------------------

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* verdictName(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct RoundtripCounterexample {
  std::vector<ResultTerm> args;  // the argument tuple the inverse lost
  ResultTerm output;             // the forward value whose preimages miss it
};

struct RoundtripOutcome {
  Verdict verdict = Verdict::Pass;
  std::optional<RoundtripCounterexample> counterexample;
  std::size_t casesChecked = 0;  // argument tuples enumerated
  std::vector<std::string> notes;
};

struct EquivalenceCounterexample {
  Expr input;
  std::vector<ResultTerm> left, right;  // differing answer sets
};

struct EquivalenceOutcome {
  Verdict verdict = Verdict::Pass;
  std::optional<EquivalenceCounterexample> counterexample;
  std::size_t casesChecked = 0;  // probe inputs evaluated
  std::vector<std::string> notes;
};

// Whether ground `specific` is an instance of `general`: free leaves of
// `general` may stand for any subterm, consistently per leaf.
inline bool instanceOf(const ResultTerm& general, const ResultTerm& specific,
                       std::map<int, ResultTerm>& binding) {
  if (general.isFree) {
    auto [it, inserted] = binding.try_emplace(general.freeId, specific);
    return inserted || it->second == specific;
  }
  if (specific.isFree || general.ctor != specific.ctor ||
      general.kids.size() != specific.kids.size())
    return false;
  for (std::size_t i = 0; i < general.kids.size(); ++i)
    if (!instanceOf(general.kids[i], specific.kids[i], binding)) return false;
  return true;
}

inline bool anyInstanceOf(const std::vector<ResultTerm>& results, const ResultTerm& wanted) {
  for (const auto& r : results) {
    std::map<int, ResultTerm> binding;
    if (instanceOf(r, wanted, binding)) return true;
  }
  return false;
}

namespace check_detail {

inline bool isGround(const ResultTerm& t) {
  if (t.isFree) return false;
  for (const auto& k : t.kids)
    if (!isGround(k)) return false;
  return true;
}

// The input with `failed` planted at every subterm position, one position at
// a time, root first, then depth-first left to right.
inline std::vector<Expr> failedVariants(const ResultTerm& t) {
  std::vector<Expr> out{eFail()};
  for (std::size_t i = 0; i < t.kids.size(); ++i) {
    std::vector<Expr> subs = failedVariants(t.kids[i]);
    for (Expr& sub : subs) {
      std::vector<Expr> kids;
      kids.reserve(t.kids.size());
      for (std::size_t j = 0; j < t.kids.size(); ++j)
        kids.push_back(i == j ? std::move(sub) : exprOfResult(t.kids[j]));
      out.push_back(eCtor(t.ctor, std::move(kids)));
    }
  }
  return out;
}

}  // namespace check_detail

// ------------------------------
// the checks
// ------------------------------

// For every enumerated argument tuple x1..xn with f x1..xn nonempty and
// every value v it produces: the tuple (x1,..,xn) must appear among (or be
// an instance of) the answers of f_inv v. Values that are not ground cannot
// be re-quoted as queries, so those tuples are checked compositionally as
// f_inv (f x1..xn).
inline RoundtripOutcome roundtripCheck(const Program& prog, const std::string& fn,
                                       const std::vector<EnumSpec>& argSpecs,
                                       const EvalConfig& config = {},
                                       std::string invName = std::string()) {
  if (invName.empty()) invName = inverseName(fn);
  RoundtripOutcome out;

  std::vector<std::vector<ResultTerm>> domains;
  domains.reserve(argSpecs.size());
  for (const auto& spec : argSpecs) domains.push_back(enumerateTerms(prog, spec.type, spec.maxDepth));
  for (const auto& d : domains)
    if (d.empty()) {
      out.verdict = Verdict::Inconclusive;
      out.notes.push_back("an argument domain is empty");
      return out;
    }

  std::vector<std::size_t> idx(domains.size(), 0);
  bool sawInconclusive = false;
  for (;;) {
    std::vector<ResultTerm> args;
    std::vector<Expr> argExprs;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      args.push_back(domains[i][idx[i]]);
      argExprs.push_back(exprOfResult(args.back()));
    }
    ++out.casesChecked;

    ResultTerm wanted =
        args.size() == 1 ? args.front() : ResultTerm::make(tupleCtor(args.size()), args);
    EvalResult forward = runQuery(prog, eApp(fn, argExprs), config);
    if (forward.truncated && out.notes.empty())
      out.notes.push_back("forward search truncated; some values were not covered");
    bool compositionalDone = false;
    for (const auto& v : forward.values) {
      EvalResult back;
      if (check_detail::isGround(v)) {
        back = runQuery(prog, eApp(invName, {exprOfResult(v)}), config);
      } else {
        // e.g. f introduced a free variable; check f_inv (f x1..xn) instead
        if (compositionalDone) continue;
        compositionalDone = true;
        back = runQuery(prog, eApp(invName, {eApp(fn, argExprs)}), config);
      }
      if (anyInstanceOf(back.values, wanted)) continue;
      if (back.truncated || forward.truncated) {
        sawInconclusive = true;
        if (out.notes.empty() || out.notes.back().find("inverse search") == std::string::npos)
          out.notes.push_back("inverse search truncated before recovering some arguments");
        continue;
      }
      out.verdict = Verdict::Fail;
      out.counterexample = RoundtripCounterexample{std::move(args), v};
      return out;
    }
    if (forward.truncated) sawInconclusive = true;

    std::size_t i = idx.size();
    while (i-- > 0) {
      if (++idx[i] < domains[i].size()) break;
      idx[i] = 0;
      if (i == 0) {
        out.verdict = sawInconclusive ? Verdict::Inconclusive : Verdict::Pass;
        return out;
      }
    }
  }
}

// Runs `left` and `right` over every enumerated input — plus, optionally,
// every failed-subterm variant — and requires identical answer sets. Two
// searches that were both cut off with equal sets still pass; differing sets
// under truncation are inconclusive.
inline EquivalenceOutcome equivalenceCheck(const Program& prog, const std::string& left,
                                           const std::string& right, const EnumSpec& inputSpec,
                                           const EvalConfig& config = {},
                                           bool withFailedProbes = true) {
  EquivalenceOutcome out;
  bool sawInconclusive = false;

  for (const auto& t : enumerateTerms(prog, inputSpec.type, inputSpec.maxDepth)) {
    std::vector<Expr> probes{exprOfResult(t)};
    if (withFailedProbes)
      for (auto& v : check_detail::failedVariants(t)) probes.push_back(std::move(v));

    for (const auto& probe : probes) {
      ++out.casesChecked;
      EvalResult a = runQuery(prog, eApp(left, {probe}), config);
      EvalResult b = runQuery(prog, eApp(right, {probe}), config);
      if (resultSet(a) == resultSet(b)) continue;
      if (a.truncated || b.truncated) {
        sawInconclusive = true;
        if (out.notes.empty())
          out.notes.push_back("answer sets differ only where a search was truncated");
        continue;
      }
      out.verdict = Verdict::Fail;
      out.counterexample = EquivalenceCounterexample{probe, a.values, b.values};
      return out;
    }
  }
  out.verdict = sawInconclusive ? Verdict::Inconclusive : Verdict::Pass;
  return out;
}

}  // namespace flc
