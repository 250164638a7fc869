// Command-line driver: batch commands over .flc files.
//
//   check      parse and validate a program, print a summary
//   eval       evaluate a query expression against a program
//   invert     synthesize an inverse and print it with its report
//   elaborate  rewrite functional patterns (non-strict unification or
//              inverse-call encoding) and print the result
//   test       run the roundtrip and fallback-equivalence checks for a
//              function (or every invertible one)
//
// Exit codes: 0 success/Pass, 1 Fail or evaluation error (including
// Rejected inversions), 2 usage or parse error, 3 Inconclusive.
//
// Programs are parsed leniently so higher-order code loads and can be
// classified (and rejected) by the inverter; query expressions stay
// first-order. Functional patterns are elaborated automatically before
// evaluation, and a query mentioning `f_inv` synthesizes it on demand.

#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flc/ast.hpp"
#include "flc/check.hpp"
#include "flc/eval.hpp"
#include "flc/invert.hpp"
#include "flc/json_io.hpp"
#include "flc/parser.hpp"
#include "flc/pretty.hpp"

namespace flc {
namespace cli {

struct CliConfig {
  std::string command;
  std::string inputPath;
  std::string expr;
  std::string function;
  Strategy strategy = Strategy::BFS;
  std::size_t maxSteps = 100000;
  std::size_t maxResults = 100;
  std::size_t depth = 3;
  ElabMode mode = ElabMode::NonStrictUnify;
  bool forceDirect = false;
  bool json = false;
};

namespace detail {

using jsonio::json;

inline std::optional<std::string> readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// `(++)` on the command line names the function stored as `++`.
inline std::string stripParens(const std::string& name) {
  if (name.size() >= 3 && name.front() == '(' && name.back() == ')')
    return name.substr(1, name.size() - 2);
  return name;
}

inline void emitJson(const CliConfig& cfg, json result) {
  std::cout << json{{"command", cfg.command}, {"input", cfg.inputPath},
                    {"result", std::move(result)}}
                   .dump(2)
            << '\n';
}

inline int parseFailure(const CliConfig& cfg, const std::vector<ParseError>& errors,
                        const std::string& label) {
  for (const auto& e : errors) std::cerr << label << ':' << e.format() << '\n';
  if (cfg.json) emitJson(cfg, json{{"errors", jsonio::toJson(errors)}});
  return 2;
}

inline std::string showSet(const std::vector<ResultTerm>& ts) {
  std::string out = "{";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    out += showResult(ts[i]);
  }
  return out + "}";
}

inline EvalConfig evalConfig(const CliConfig& cfg) {
  return EvalConfig{cfg.strategy, cfg.maxSteps, cfg.maxResults};
}

// ---------------------------------------------------------------- check

inline int cmdCheck(const CliConfig& cfg, const Program& program) {
  std::vector<std::string> fns, data, funpatFns;
  for (const auto& f : program.funcs) fns.push_back(displayName(f.name));
  for (const auto& d : program.dataDecls)
    if (!d.fromPrelude) data.push_back(d.typeName);
  for (const auto& f : program.funcs)
    if (hasFunctionalPatterns(f)) funpatFns.push_back(displayName(f.name));
  if (cfg.json) {
    emitJson(cfg, json{{"ok", true},
                       {"functions", fns},
                       {"data", data},
                       {"functionalPatterns", funpatFns}});
    return 0;
  }
  std::cout << "ok: " << fns.size() << " function(s), " << data.size()
            << " data declaration(s)\n";
  if (!fns.empty()) {
    std::cout << "functions:";
    for (const auto& n : fns) std::cout << ' ' << n;
    std::cout << '\n';
  }
  if (!data.empty()) {
    std::cout << "data:";
    for (const auto& n : data) std::cout << ' ' << n;
    std::cout << '\n';
  }
  if (!funpatFns.empty()) {
    std::cout << "functional patterns in:";
    for (const auto& n : funpatFns) std::cout << ' ' << n;
    std::cout << '\n';
  }
  return 0;
}

// ----------------------------------------------------------------- eval

// Names like `f_inv` in the query whose base function exists but whose
// inverse does not yet; these are synthesized before the query parses.
inline std::vector<std::string> neededInverses(const Program& program, const std::string& expr) {
  std::vector<std::string> bases;
  try {
    for (const auto& tok : lex::tokenize(expr)) {
      if (tok.kind != lex::TokKind::Name) continue;
      const std::string& n = tok.text;
      if (n.size() <= 4 || n.substr(n.size() - 4) != "_inv") continue;
      std::string base = n.substr(0, n.size() - 4);
      if (program.func(n) == nullptr && program.func(base) != nullptr) bases.push_back(base);
    }
  } catch (const lex::LexFail&) {
    // Let parseExpr report the lexical error with a position.
  }
  return bases;
}

inline int cmdEval(const CliConfig& cfg, Program program) {
  json derived = json::array();
  for (const auto& base : neededInverses(program, cfg.expr)) {
    InversionOutcome outcome = synthesizeInverse(program, base, {cfg.forceDirect});
    if (outcome.report.strategy == InverseStrategy::Rejected) {
      std::cerr << "cannot derive " << displayName(inverseName(base)) << ":\n";
      for (const auto& r : outcome.report.reasons) std::cerr << "  " << r << '\n';
      if (cfg.json)
        emitJson(cfg, json{{"error", "inversion rejected"},
                           {"report", jsonio::toJson(outcome.report)}});
      return 1;
    }
    program = std::move(outcome.program);
    derived.push_back(jsonio::toJson(outcome.report));
    if (!cfg.json)
      std::cerr << "derived " << displayName(outcome.report.inverse) << " ("
                << strategyName(outcome.report.strategy) << ")\n";
  }

  bool anyFunPats = false;
  for (const auto& f : program.funcs) anyFunPats = anyFunPats || hasFunctionalPatterns(f);
  if (anyFunPats) program = elaborateFunPats(program, cfg.mode);

  auto parsed = parseExpr(program, cfg.expr);
  if (auto* err = std::get_if<ParseError>(&parsed))
    return parseFailure(cfg, {*err}, "expr");

  EvalResult result;
  try {
    result = runQuery(program, std::get<Expr>(parsed), evalConfig(cfg));
  } catch (const EvalError& e) {
    std::cerr << "evaluation error: " << e.what() << '\n';
    if (cfg.json) emitJson(cfg, json{{"error", e.what()}});
    return 1;
  }

  if (cfg.json) {
    json r = jsonio::toJson(result);
    if (!derived.empty()) r["derived"] = std::move(derived);
    emitJson(cfg, std::move(r));
    return 0;
  }
  for (const auto& v : result.values) std::cout << showResult(v) << '\n';
  if (result.truncated)
    std::cout << "-- truncated (" << result.statesExplored << " states explored)\n";
  return 0;
}

// --------------------------------------------------------------- invert

inline int cmdInvert(const CliConfig& cfg, const Program& program) {
  std::string fn = stripParens(cfg.function);
  if (program.func(fn) == nullptr) {
    std::cerr << "unknown function '" << cfg.function << "'\n";
    if (cfg.json) emitJson(cfg, json{{"error", "unknown function"}});
    return 2;
  }
  InversionOutcome outcome = synthesizeInverse(program, fn, {cfg.forceDirect});
  const InversionReport& rep = outcome.report;

  std::string defs;
  for (const auto& f : outcome.program.funcs)
    if (f.origin == Origin::Synthesized) defs += pretty(f);

  if (cfg.json) {
    emitJson(cfg, json{{"report", jsonio::toJson(rep)}, {"definitions", defs}});
  } else {
    std::cout << "function: " << displayName(rep.function) << '\n';
    std::cout << "strategy: " << strategyName(rep.strategy) << '\n';
    for (const auto& r : rep.reasons) std::cout << "reason: " << r << '\n';
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << '\n';
    for (const auto& c : rep.calleeInverses)
      std::cout << "derived callee inverse: " << displayName(c) << '\n';
    if (!defs.empty()) std::cout << '\n' << defs;
  }
  return rep.strategy == InverseStrategy::Rejected ? 1 : 0;
}

// ------------------------------------------------------------ elaborate

inline int cmdElaborate(const CliConfig& cfg, const Program& program) {
  Program out = elaborateFunPats(program, cfg.mode);
  std::string text = pretty(out);
  if (cfg.json) {
    const char* modeName = cfg.mode == ElabMode::NonStrictUnify ? "nsu" : "inverse-calls";
    emitJson(cfg, json{{"mode", modeName}, {"program", text}});
  } else {
    std::cout << text;
  }
  return 0;
}

// ----------------------------------------------------------------- test

struct TestTally {
  bool anyFail = false;
  bool anyInconclusive = false;
  bool anyRan = false;
};

inline void tally(TestTally& t, Verdict v) {
  t.anyRan = true;
  if (v == Verdict::Fail) t.anyFail = true;
  if (v == Verdict::Inconclusive) t.anyInconclusive = true;
}

inline json testOne(const CliConfig& cfg, const Program& program, const std::string& fn,
                    TestTally& t) {
  InversionOutcome outcome = synthesizeInverse(program, fn, {cfg.forceDirect});
  const FuncDef* def = outcome.program.func(fn);
  json entry{{"function", displayName(fn)},
             {"strategy", strategyName(outcome.report.strategy)}};

  if (!cfg.json) {
    std::cout << "function: " << displayName(fn) << "  [strategy: "
              << strategyName(outcome.report.strategy) << "]\n";
    for (const auto& w : outcome.report.warnings) std::cout << "  warning: " << w << '\n';
  }
  if (outcome.report.strategy == InverseStrategy::Rejected) {
    if (!cfg.json)
      for (const auto& r : outcome.report.reasons) std::cout << "  reason: " << r << '\n';
    entry["reasons"] = outcome.report.reasons;
    t.anyFail = true;  // an explicitly requested function that cannot be inverted
    return entry;
  }
  if (!def->signature) {
    if (!cfg.json) std::cout << "  skipped: no signature to derive test domains from\n";
    entry["skipped"] = "no signature";
    return entry;
  }

  Program p = elaborateFunPats(outcome.program, ElabMode::NonStrictUnify);
  FuncDef fallback = makeFallbackInverse(*p.func(fn));
  fallback.name += "_ref";
  p.funcs.push_back(std::move(fallback));

  const TypeExpr boolType{"Bool", {}};
  std::vector<EnumSpec> argSpecs;
  for (const auto& a : def->signature->argTypes)
    argSpecs.push_back(EnumSpec{instantiateTypeVars(a, boolType), cfg.depth});
  EnumSpec resultSpec{instantiateTypeVars(def->signature->result, boolType), cfg.depth};

  EvalConfig ecfg = evalConfig(cfg);
  RoundtripOutcome rt = roundtripCheck(p, fn, argSpecs, ecfg);
  EquivalenceOutcome eq =
      equivalenceCheck(p, inverseName(fn), inverseName(fn) + "_ref", resultSpec, ecfg);
  tally(t, rt.verdict);
  tally(t, eq.verdict);

  if (!cfg.json) {
    std::cout << "  roundtrip: " << verdictName(rt.verdict) << " (" << rt.casesChecked
              << " cases)\n";
    if (rt.counterexample)
      std::cout << "    counterexample: args = " << showSet(rt.counterexample->args)
                << "; output = " << showResult(rt.counterexample->output) << '\n';
    for (const auto& n : rt.notes) std::cout << "    note: " << n << '\n';
    std::cout << "  equivalence vs fallback: " << verdictName(eq.verdict) << " ("
              << eq.casesChecked << " cases)\n";
    if (eq.counterexample)
      std::cout << "    counterexample: input " << pretty(eq.counterexample->input) << ": "
                << showSet(eq.counterexample->left) << " vs "
                << showSet(eq.counterexample->right) << '\n';
    for (const auto& n : eq.notes) std::cout << "    note: " << n << '\n';
  }
  entry["roundtrip"] = jsonio::toJson(rt);
  entry["equivalence"] = jsonio::toJson(eq);
  return entry;
}

inline int cmdTest(const CliConfig& cfg, const Program& program) {
  std::vector<std::string> targets;
  if (!cfg.function.empty()) {
    std::string fn = stripParens(cfg.function);
    if (program.func(fn) == nullptr) {
      std::cerr << "unknown function '" << cfg.function << "'\n";
      if (cfg.json) emitJson(cfg, json{{"error", "unknown function"}});
      return 2;
    }
    targets.push_back(fn);
  } else {
    for (const auto& f : program.funcs) {
      if (f.origin != Origin::UserWritten || !f.signature) continue;
      if (classify(program, f.name).strategy == InverseStrategy::Rejected) continue;
      targets.push_back(f.name);
    }
    if (targets.empty()) {
      std::cerr << "no invertible functions with signatures found\n";
      if (cfg.json) emitJson(cfg, json{{"error", "nothing to test"}});
      return 2;
    }
  }

  TestTally t;
  json entries = json::array();
  for (const auto& fn : targets) entries.push_back(testOne(cfg, program, fn, t));
  if (cfg.json) emitJson(cfg, json{{"functions", std::move(entries)}});

  if (t.anyFail) return 1;
  if (t.anyInconclusive) return 3;
  return 0;
}

}  // namespace detail

inline int dispatch(const CliConfig& cfg) {
  auto text = detail::readFile(cfg.inputPath);
  if (!text) {
    std::cerr << "cannot read file '" << cfg.inputPath << "'\n";
    if (cfg.json)
      detail::emitJson(cfg, detail::json{{"error", "cannot read file"}});
    return 2;
  }
  ParseResult parsed = parseProgram(*text, ParseOptions{/*lenientHigherOrder=*/true});
  if (!parsed.ok()) return detail::parseFailure(cfg, parsed.errors, cfg.inputPath);
  const Program& program = *parsed.program;

  if (cfg.command == "check") return detail::cmdCheck(cfg, program);
  if (cfg.command == "eval") return detail::cmdEval(cfg, program);
  if (cfg.command == "invert") return detail::cmdInvert(cfg, program);
  if (cfg.command == "elaborate") return detail::cmdElaborate(cfg, program);
  if (cfg.command == "test") return detail::cmdTest(cfg, program);
  std::cerr << "unknown command '" << cfg.command << "'\n";
  return 2;
}

inline int runCli(int argc, const char* const* argv) {
  CliConfig cfg;
  CLI::App app{"lazy functional-logic evaluator and program inverter"};
  app.require_subcommand(1);

  const std::map<std::string, Strategy> strategyMap{{"bfs", Strategy::BFS},
                                                    {"dfs", Strategy::DFS}};
  const std::map<std::string, ElabMode> modeMap{{"nsu", ElabMode::NonStrictUnify},
                                                {"inverse-calls", ElabMode::InverseCalls}};

  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("input", cfg.inputPath, "program file (.flc)")->required();
    sub->add_flag("--json", cfg.json, "emit {command, input, result} JSON");
  };
  auto addEval = [&](CLI::App* sub) {
    sub->add_option("--strategy", cfg.strategy, "search strategy")
        ->transform(CLI::CheckedTransformer(strategyMap, CLI::ignore_case));
    sub->add_option("--max-steps", cfg.maxSteps, "evaluation step budget");
    sub->add_option("--max-results", cfg.maxResults, "cap on reported results");
  };

  CLI::App* check = app.add_subcommand("check", "parse and validate a program");
  addCommon(check);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a query expression");
  addCommon(eval);
  addEval(eval);
  eval->add_option("--expr", cfg.expr, "query expression")->required();
  eval->add_option("--mode", cfg.mode, "functional-pattern elaboration")
      ->transform(CLI::CheckedTransformer(modeMap, CLI::ignore_case));
  eval->add_flag("--force-direct", cfg.forceDirect,
                 "force direct synthesis for on-demand inverses");

  CLI::App* invert = app.add_subcommand("invert", "synthesize an inverse function");
  addCommon(invert);
  invert->add_option("--function", cfg.function, "function to invert")->required();
  invert->add_flag("--force-direct", cfg.forceDirect,
                   "attempt direct synthesis even when the fallback would be chosen");

  CLI::App* elaborate = app.add_subcommand("elaborate", "rewrite functional patterns");
  addCommon(elaborate);
  elaborate->add_option("--mode", cfg.mode, "nsu or inverse-calls")
      ->transform(CLI::CheckedTransformer(modeMap, CLI::ignore_case))
      ->required();

  CLI::App* test = app.add_subcommand("test", "roundtrip and equivalence checks");
  addCommon(test);
  addEval(test);
  test->add_option("--function", cfg.function, "function to test (default: all invertible)");
  test->add_option("--depth", cfg.depth, "enumeration depth for test inputs");
  test->add_flag("--force-direct", cfg.forceDirect,
                 "force direct synthesis of the tested inverse");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help is success; anything else is a usage error
  }

  for (CLI::App* sub : {check, eval, invert, elaborate, test})
    if (sub->parsed()) cfg.command = sub->get_name();
  return dispatch(cfg);
}

}  // namespace cli
}  // namespace flc
