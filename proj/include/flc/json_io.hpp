// JSON views of evaluator, inverter, and checker outputs.
//
// Programs are rendered as source text (the pretty-printer is the
// canonical serialization and reparses); terms, reports, and check
// outcomes get structured objects so callers can inspect them without
// scraping strings.

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "flc/check.hpp"
#include "flc/eval.hpp"
#include "flc/invert.hpp"
#include "flc/parser.hpp"
#include "flc/pretty.hpp"

namespace flc {
namespace jsonio {

using nlohmann::json;

inline json toJson(const ResultTerm& t) {
  if (t.isFree) return json{{"free", t.freeId}};
  json kids = json::array();
  for (const auto& k : t.kids) kids.push_back(toJson(k));
  return json{{"ctor", t.ctor}, {"args", std::move(kids)}};
}

inline json shownTerms(const std::vector<ResultTerm>& ts) {
  json out = json::array();
  for (const auto& t : ts) out.push_back(showResult(t));
  return out;
}

inline json toJson(const EvalResult& r) {
  json terms = json::array();
  for (const auto& v : r.values) terms.push_back(toJson(v));
  return json{{"values", shownTerms(r.values)},
              {"terms", std::move(terms)},
              {"truncated", r.truncated},
              {"statesExplored", r.statesExplored}};
}

inline json toJson(const InversionReport& r) {
  return json{{"function", displayName(r.function)},
              {"strategy", strategyName(r.strategy)},
              {"inverse", displayName(r.inverse)},
              {"reasons", r.reasons},
              {"warnings", r.warnings},
              {"calleeInverses", [&] {
                 json names = json::array();
                 for (const auto& n : r.calleeInverses) names.push_back(displayName(n));
                 return names;
               }()}};
}

inline json toJson(const RoundtripOutcome& o) {
  json out{{"verdict", verdictName(o.verdict)},
           {"casesChecked", o.casesChecked},
           {"notes", o.notes}};
  if (o.counterexample) {
    out["counterexample"] = json{{"args", shownTerms(o.counterexample->args)},
                                 {"output", showResult(o.counterexample->output)}};
  }
  return out;
}

inline json toJson(const EquivalenceOutcome& o) {
  json out{{"verdict", verdictName(o.verdict)},
           {"casesChecked", o.casesChecked},
           {"notes", o.notes}};
  if (o.counterexample) {
    out["counterexample"] = json{{"input", pretty(o.counterexample->input)},
                                 {"left", shownTerms(o.counterexample->left)},
                                 {"right", shownTerms(o.counterexample->right)}};
  }
  return out;
}

inline json toJson(const std::vector<ParseError>& errors) {
  json out = json::array();
  for (const auto& e : errors)
    out.push_back(json{{"line", e.pos.line}, {"col", e.pos.col}, {"message", e.message}});
  return out;
}

}  // namespace jsonio
}  // namespace flc
