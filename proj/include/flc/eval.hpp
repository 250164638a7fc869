#pragma once

// Lazy narrowing evaluator.
//
// Terms live in a growable node store (graph); evaluation is driven by a
// frame stack, and non-determinism is realized by cloning the whole search
// state at choice points (rule choice, free-variable narrowing at a case).
// Cloning makes call-time choice and the "bind without evaluating" behavior
// of non-strict unification trivially correct: a shared argument node is
// evaluated at most once per state, and an unevaluated node can be bound by
// reference.
//
// Node discipline: a Thunk is overwritten with an Indirection to its head
// normal form (graph reduction); a free variable is only ever overwritten
// with an Indirection when bound. Strict unification (`=:=`) normalizes the
// constructor side before binding a free variable to it and performs an
// occurs check; non-strict unification (`=:<=`) binds a free left-hand side
// to the unevaluated right-hand side and forces the right side only where
// the left side is constructor-rooted.
//
// The search is bounded by a global step budget (one step per rule
// application, narrowing instantiation, and unification decomposition) and
// by a result cap; exceeding either sets the truncation flag.

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "flc/ast.hpp"
#include "flc/pretty.hpp"

namespace flc {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Strategy { BFS, DFS };

struct EvalConfig {
  Strategy strategy = Strategy::BFS;
  std::size_t maxSteps = 100000;
  std::size_t maxResults = 100;
};

// ------------------------------
// result terms
// ------------------------------

// A fully normalized answer: constructor tree with unbound free variables as
// leaves. Free leaves are numbered 0,1,... in depth-first left-to-right
// order, so structurally equal answers compare equal.
struct ResultTerm {
  bool isFree = false;
  int freeId = 0;
  std::string ctor;
  std::vector<ResultTerm> kids;

  static ResultTerm freeLeaf(int id) {
    ResultTerm t;
    t.isFree = true;
    t.freeId = id;
    return t;
  }
  static ResultTerm make(std::string name, std::vector<ResultTerm> children = {}) {
    ResultTerm t;
    t.ctor = std::move(name);
    t.kids = std::move(children);
    return t;
  }
};

inline bool operator==(const ResultTerm& a, const ResultTerm& b) {
  if (a.isFree != b.isFree) return false;
  if (a.isFree) return a.freeId == b.freeId;
  return a.ctor == b.ctor && a.kids == b.kids;
}
inline bool operator!=(const ResultTerm& a, const ResultTerm& b) { return !(a == b); }

inline bool operator<(const ResultTerm& a, const ResultTerm& b) {
  if (a.isFree != b.isFree) return a.isFree;  // free leaves sort first
  if (a.isFree) return a.freeId < b.freeId;
  if (a.ctor != b.ctor) return a.ctor < b.ctor;
  return a.kids < b.kids;
}

inline Expr exprOfResult(const ResultTerm& t) {
  if (t.isFree) return eVar("_" + std::to_string(t.freeId));
  std::vector<Expr> args;
  args.reserve(t.kids.size());
  for (const auto& k : t.kids) args.push_back(exprOfResult(k));
  return eCtor(t.ctor, std::move(args));
}

inline std::string showResult(const ResultTerm& t) { return pretty(exprOfResult(t)); }

struct EvalResult {
  std::vector<ResultTerm> values;  // deduplicated, in discovery order
  bool truncated = false;
  std::size_t statesExplored = 0;
};

inline std::set<ResultTerm> resultSet(const EvalResult& r) {
  return std::set<ResultTerm>(r.values.begin(), r.values.end());
}

// ------------------------------
// the machine
// ------------------------------

namespace machine {

using NodeRef = std::uint32_t;
using Env = std::map<std::string, NodeRef>;
using EnvPtr = std::shared_ptr<const Env>;

struct CtorNode {
  std::string name;
  std::vector<NodeRef> kids;
};
struct ThunkNode {
  const Expr* expr;  // owned by the program or the query; must outlive the run
  EnvPtr env;
};
struct FreeNode {
  std::uint32_t id;
};
struct IndNode {
  NodeRef target;
};
struct FailNode {};

using Node = std::variant<CtorNode, ThunkNode, FreeNode, IndNode, FailNode>;

// Continuation frames. A state is either evaluating `cur` to head normal
// form or returning `cur` (already HNF) to the topmost frame.
struct FUpdate {  // overwrite a forced thunk with its HNF
  NodeRef target;
};
struct FMatch {  // match rule parameters or a case branch pattern
  std::vector<std::pair<const Pattern*, NodeRef>> jobs;  // back() is next
  Env binds;
  const std::vector<Constraint>* guards;
  const Expr* body;
  const std::vector<std::string>* freeVars;  // null for case branches
};
struct FCaseDispatch {  // scrutinee HNF -> select branch / fork on free var
  const ECase* expr;
  EnvPtr env;
};
struct FGuards {  // solve guards left-to-right, then evaluate the body
  const std::vector<Constraint>* guards;
  std::size_t next;
  EnvPtr env;
  const Expr* body;
};
struct FUnifyPair {  // pending unification of two nodes
  NodeRef a, b;
  UnifyMode mode;
};
struct FUnifyA {  // left side being forced; right side pending
  NodeRef b;
  UnifyMode mode;
};
struct FUnifyB {  // right side being forced; left side already HNF
  NodeRef a;
  UnifyMode mode;
};
struct FBindNormed {  // bind a free var to the just-normalized ctor side
  NodeRef freeSide;
};
struct FNormalize {};  // normalize the returned HNF recursively
struct FNormKids {     // normalize children of a ctor left-to-right
  NodeRef root;
  std::size_t next;
};

using Frame = std::variant<FUpdate, FMatch, FCaseDispatch, FGuards, FUnifyPair, FUnifyA, FUnifyB,
                           FBindNormed, FNormalize, FNormKids>;

struct SearchState {
  std::vector<Node> store;
  std::vector<Frame> frames;
  NodeRef cur = 0;
  bool evaluating = false;
  bool dead = false;
  std::uint32_t nextFreeId = 0;
};

inline NodeRef deref(const std::vector<Node>& store, NodeRef r) {
  while (const auto* ind = std::get_if<IndNode>(&store[r])) r = ind->target;
  return r;
}

class Machine {
 public:
  Machine(const Program& program, const EvalConfig& config) : prog_(program), cfg_(config) {}

  // Evaluates `query` to all normal forms. Names in `queryFrees` are bound to
  // fresh free variables in the query's environment.
  EvalResult run(const Expr& query, const std::vector<std::string>& queryFrees) {
    SearchState init;
    EnvPtr env = makeEnv(init, queryFrees);
    NodeRef root = alloc(init, query, env);
    init.frames.push_back(FNormalize{});
    init.cur = root;
    init.evaluating = true;
    return search(std::move(init));
  }

  // Solves the constraints left-to-right, then normalizes `body` in the same
  // environment. Used to expose unification directly.
  EvalResult runGoal(const std::vector<Constraint>& goal, const Expr& body,
                     const std::vector<std::string>& frees) {
    SearchState init;
    EnvPtr env = makeEnv(init, frees);
    init.frames.push_back(FNormalize{});
    init.frames.push_back(FGuards{&goal, 0, env, &body});
    init.evaluating = false;
    return search(std::move(init));
  }

 private:
  const Program& prog_;
  EvalConfig cfg_;
  std::deque<SearchState> work_;
  EvalResult out_;
  std::set<ResultTerm> seen_;
  std::size_t steps_ = 0;
  bool stop_ = false;

  // ---- store helpers ----

  static NodeRef push(SearchState& st, Node n) {
    st.store.push_back(std::move(n));
    return static_cast<NodeRef>(st.store.size() - 1);
  }

  static NodeRef freshFree(SearchState& st) { return push(st, FreeNode{st.nextFreeId++}); }

  static EnvPtr makeEnv(SearchState& st, const std::vector<std::string>& frees) {
    Env env;
    for (const auto& name : frees) env[name] = freshFree(st);
    return std::make_shared<const Env>(std::move(env));
  }

  static NodeRef alloc(SearchState& st, const Expr& e, const EnvPtr& env) {
    return std::visit(
        Overloaded{
            [&](const EVar& v) -> NodeRef {
              auto it = env->find(v.name);
              if (it == env->end())
                throw EvalError("internal error: unbound variable '" + v.name + "'");
              return it->second;
            },
            [&](const ECtor& c) -> NodeRef {
              std::vector<NodeRef> kids;
              kids.reserve(c.args.size());
              for (const auto& a : c.args) kids.push_back(alloc(st, a, env));
              return push(st, CtorNode{c.ctor, std::move(kids)});
            },
            [&](const EApp&) -> NodeRef { return push(st, ThunkNode{&e, env}); },
            [&](const ECase&) -> NodeRef { return push(st, ThunkNode{&e, env}); },
            [&](const EFail&) -> NodeRef { return push(st, FailNode{}); },
        },
        e.node);
  }

  // One step per rule application, narrowing instantiation, and unification
  // decomposition; exceeding the budget stops the whole search.
  bool countStep() {
    if (++steps_ > cfg_.maxSteps) stop_ = true;
    return stop_;
  }

  void spawn(std::vector<SearchState>&& children) {
    if (cfg_.strategy == Strategy::BFS) {
      for (auto& c : children) work_.push_back(std::move(c));
    } else {
      for (auto it = children.rbegin(); it != children.rend(); ++it)
        work_.push_back(std::move(*it));
    }
  }

  // ---- the driver ----

  EvalResult search(SearchState&& init) {
    work_.push_back(std::move(init));
    while (!work_.empty() && !stop_) {
      if (out_.values.size() >= cfg_.maxResults) {
        out_.truncated = true;
        break;
      }
      SearchState st;
      if (cfg_.strategy == Strategy::BFS) {
        st = std::move(work_.front());
        work_.pop_front();
      } else {
        st = std::move(work_.back());
        work_.pop_back();
      }
      ++out_.statesExplored;
      drive(st);
    }
    if (stop_) out_.truncated = true;
    return std::move(out_);
  }

  // Runs one state until it dies, yields a result, or forks.
  void drive(SearchState& st) {
    while (!stop_ && !st.dead) {
      if (st.evaluating) {
        if (evalStep(st)) return;  // forked
      } else {
        if (st.frames.empty()) {
          recordResult(st);
          return;
        }
        if (returnStep(st)) return;  // forked
      }
    }
  }

  void recordResult(const SearchState& st) {
    std::map<NodeRef, int> ids;
    ResultTerm t = readback(st.store, st.cur, ids);
    if (seen_.insert(t).second) out_.values.push_back(std::move(t));
  }

  static ResultTerm readback(const std::vector<Node>& store, NodeRef r,
                             std::map<NodeRef, int>& ids) {
    r = deref(store, r);
    if (const auto* c = std::get_if<CtorNode>(&store[r])) {
      std::vector<ResultTerm> kids;
      kids.reserve(c->kids.size());
      for (NodeRef k : c->kids) kids.push_back(readback(store, k, ids));
      return ResultTerm::make(c->name, std::move(kids));
    }
    if (std::get_if<FreeNode>(&store[r])) {
      auto [it, inserted] = ids.try_emplace(r, static_cast<int>(ids.size()));
      return ResultTerm::freeLeaf(it->second);
    }
    throw EvalError("internal error: unnormalized node in a result");
  }

  // ---- evaluation to head normal form ----

  // Returns true if the state forked (children enqueued, `st` abandoned).
  bool evalStep(SearchState& st) {
    NodeRef r = deref(st.store, st.cur);
    const Node& n = st.store[r];
    if (std::get_if<CtorNode>(&n) || std::get_if<FreeNode>(&n)) {
      st.cur = r;
      st.evaluating = false;
      return false;
    }
    if (std::get_if<FailNode>(&n)) {
      st.dead = true;
      return false;
    }
    const auto& th = std::get<ThunkNode>(n);
    const Expr* expr = th.expr;
    EnvPtr env = th.env;  // copy out: allocations below may move the node

    if (const auto* app = expr->as<EApp>()) {
      if (app->fnIsVar)
        throw EvalError("higher-order program: variable '" + app->fn + "' in function position");
      const FuncDef* fd = prog_.func(app->fn);
      if (fd == nullptr) throw EvalError("unknown function '" + app->fn + "'");
      if (fd->arity != app->args.size())
        throw EvalError("higher-order program: '" + app->fn + "' expects " +
                        std::to_string(fd->arity) + " arguments, got " +
                        std::to_string(app->args.size()));
      st.frames.push_back(FUpdate{r});
      std::vector<NodeRef> argRefs;
      argRefs.reserve(app->args.size());
      for (const auto& a : app->args) argRefs.push_back(alloc(st, a, env));

      if (fd->rules.size() == 1) {
        if (countStep()) return false;
        beginRuleMatch(st, fd->rules[0], argRefs);
        return false;
      }
      std::vector<SearchState> children;
      children.reserve(fd->rules.size());
      for (const auto& rule : fd->rules) {
        if (countStep()) return false;
        SearchState child = st;
        beginRuleMatch(child, rule, argRefs);
        children.push_back(std::move(child));
      }
      spawn(std::move(children));
      return true;
    }
    const auto* cs = expr->as<ECase>();
    if (cs == nullptr) throw EvalError("internal error: unexpected thunk expression");
    st.frames.push_back(FUpdate{r});
    st.frames.push_back(FCaseDispatch{cs, env});
    st.cur = alloc(st, *cs->scrutinee, env);
    st.evaluating = true;
    return false;
  }

  static void beginRuleMatch(SearchState& st, const Rule& rule,
                             const std::vector<NodeRef>& argRefs) {
    FMatch m;
    m.guards = &rule.guards;
    m.body = &rule.body;
    m.freeVars = &rule.freeVars;
    for (std::size_t i = rule.params.size(); i-- > 0;)
      m.jobs.emplace_back(&rule.params[i], argRefs[i]);
    st.frames.push_back(std::move(m));
    st.evaluating = false;
  }

  static void beginBranchMatch(SearchState& st, const CaseBranch& br, NodeRef scrut,
                               const EnvPtr& env) {
    FMatch m;
    m.binds = *env;  // branch binders extend (and may shadow) the case env
    m.guards = &br.guards;
    m.body = br.body.get();
    m.freeVars = nullptr;
    m.jobs.emplace_back(&br.pat, scrut);
    st.frames.push_back(std::move(m));
    st.evaluating = false;
  }

  // ---- return dispatch ----

  // Returns true if the state forked.
  bool returnStep(SearchState& st) {
    Frame& top = st.frames.back();

    if (auto* up = std::get_if<FUpdate>(&top)) {
      NodeRef target = up->target;
      NodeRef h = deref(st.store, st.cur);
      st.frames.pop_back();
      if (target != h) st.store[target] = IndNode{h};
      st.cur = h;
      return false;
    }

    if (auto* nm = std::get_if<FNormalize>(&top)) {
      (void)nm;
      NodeRef h = deref(st.store, st.cur);
      st.frames.pop_back();
      st.cur = h;
      if (const auto* c = std::get_if<CtorNode>(&st.store[h]); c != nullptr && !c->kids.empty())
        st.frames.push_back(FNormKids{h, 0});
      return false;
    }

    if (auto* nk = std::get_if<FNormKids>(&top)) {
      const auto& c = std::get<CtorNode>(st.store[nk->root]);
      if (nk->next < c.kids.size()) {
        NodeRef kid = c.kids[nk->next];
        ++nk->next;
        st.frames.push_back(FNormalize{});
        st.cur = kid;
        st.evaluating = true;
      } else {
        st.cur = nk->root;
        st.frames.pop_back();
      }
      return false;
    }

    if (auto* cd = std::get_if<FCaseDispatch>(&top)) {
      const ECase* expr = cd->expr;
      EnvPtr env = cd->env;
      NodeRef h = deref(st.store, st.cur);
      st.frames.pop_back();

      if (std::get_if<FailNode>(&st.store[h])) {
        st.dead = true;
        return false;
      }
      if (const auto* c = std::get_if<CtorNode>(&st.store[h])) {
        for (const auto& br : expr->branches) {
          const auto* root = br.pat.as<PCtor>();
          if (root == nullptr || root->ctor == c->name) {
            beginBranchMatch(st, br, h, env);
            return false;
          }
        }
        st.dead = true;
        return false;
      }
      // Free scrutinee: one clone per branch (branch-directed narrowing; the
      // instantiation step is counted inside the branch's pattern match).
      if (expr->branches.size() == 1) {
        beginBranchMatch(st, expr->branches[0], h, env);
        return false;
      }
      std::vector<SearchState> children;
      children.reserve(expr->branches.size());
      for (const auto& br : expr->branches) {
        SearchState child = st;
        beginBranchMatch(child, br, h, env);
        children.push_back(std::move(child));
      }
      spawn(std::move(children));
      return true;
    }

    if (auto* m = std::get_if<FMatch>(&top)) {
      while (!m->jobs.empty()) {
        auto [pat, ref] = m->jobs.back();
        if (const auto* pv = pat->as<PVar>()) {
          m->binds[pv->name] = ref;
          m->jobs.pop_back();
          continue;
        }
        if (pat->as<PFun>() != nullptr)
          throw EvalError("functional pattern reached the evaluator; elaborate the program first");
        const auto* pc = pat->as<PCtor>();
        NodeRef h = deref(st.store, ref);
        if (std::get_if<ThunkNode>(&st.store[h])) {
          st.cur = h;
          st.evaluating = true;  // force, then revisit this job
          return false;
        }
        if (std::get_if<FailNode>(&st.store[h])) {
          st.dead = true;
          return false;
        }
        if (std::get_if<FreeNode>(&st.store[h])) {
          // Narrow: bind the variable to a skeleton of the required ctor.
          if (countStep()) return false;
          std::vector<NodeRef> kids;
          kids.reserve(pc->args.size());
          for (std::size_t i = 0; i < pc->args.size(); ++i) kids.push_back(freshFree(st));
          NodeRef skel = push(st, CtorNode{pc->ctor, kids});
          st.store[h] = IndNode{skel};
          m->jobs.pop_back();
          for (std::size_t i = pc->args.size(); i-- > 0;)
            m->jobs.emplace_back(&pc->args[i], kids[i]);
          continue;
        }
        const auto& c = std::get<CtorNode>(st.store[h]);
        if (c.name != pc->ctor || c.kids.size() != pc->args.size()) {
          st.dead = true;
          return false;
        }
        std::vector<NodeRef> kids = c.kids;
        m->jobs.pop_back();
        for (std::size_t i = pc->args.size(); i-- > 0;)
          m->jobs.emplace_back(&pc->args[i], kids[i]);
      }

      // Match complete: introduce free variables, then guards, then body.
      if (m->freeVars != nullptr)
        for (const auto& name : *m->freeVars) m->binds[name] = freshFree(st);
      EnvPtr env = std::make_shared<const Env>(std::move(m->binds));
      const std::vector<Constraint>* guards = m->guards;
      const Expr* body = m->body;
      st.frames.pop_back();
      if (guards != nullptr && !guards->empty()) {
        st.frames.push_back(FGuards{guards, 0, env, body});
      } else {
        st.cur = alloc(st, *body, env);
        st.evaluating = true;
      }
      return false;
    }

    if (auto* g = std::get_if<FGuards>(&top)) {
      if (g->next < g->guards->size()) {
        const Constraint& con = (*g->guards)[g->next];
        ++g->next;
        EnvPtr env = g->env;
        NodeRef a = alloc(st, con.lhs, env);
        NodeRef b = alloc(st, con.rhs, env);
        pushUnify(st, a, b, con.mode);
      } else {
        EnvPtr env = g->env;
        const Expr* body = g->body;
        st.frames.pop_back();
        st.cur = alloc(st, *body, env);
        st.evaluating = true;
      }
      return false;
    }

    if (auto* p = std::get_if<FUnifyPair>(&top)) {
      NodeRef a = p->a, b = p->b;
      UnifyMode mode = p->mode;
      st.frames.pop_back();
      pushUnify(st, a, b, mode);
      return false;
    }

    if (auto* ua = std::get_if<FUnifyA>(&top)) {
      NodeRef b = ua->b;
      UnifyMode mode = ua->mode;
      st.frames.pop_back();
      pushUnify(st, st.cur, b, mode);
      return false;
    }

    if (auto* ub = std::get_if<FUnifyB>(&top)) {
      NodeRef a = ub->a;
      UnifyMode mode = ub->mode;
      st.frames.pop_back();
      pushUnify(st, a, st.cur, mode);
      return false;
    }

    if (auto* bn = std::get_if<FBindNormed>(&top)) {
      NodeRef freeSide = deref(st.store, bn->freeSide);
      NodeRef ctorSide = deref(st.store, st.cur);
      st.frames.pop_back();
      if (std::get_if<FreeNode>(&st.store[freeSide])) {
        if (occurs(st.store, freeSide, ctorSide)) {
          st.dead = true;
          return false;
        }
        if (freeSide != ctorSide) st.store[freeSide] = IndNode{ctorSide};
      } else {
        // The variable got bound while the other side was being normalized
        // (it occurred inside); retry as a fresh pair.
        pushUnify(st, freeSide, ctorSide, UnifyMode::Strict);
      }
      return false;
    }

    throw EvalError("internal error: unknown frame");
  }

  // ---- unification ----

  // Dispatches a unification pair, forcing sides as needed. On success the
  // state simply continues with the next frame.
  void pushUnify(SearchState& st, NodeRef a, NodeRef b, UnifyMode mode) {
    NodeRef da = deref(st.store, a);
    if (std::get_if<ThunkNode>(&st.store[da])) {
      st.frames.push_back(FUnifyA{b, mode});
      st.cur = da;
      st.evaluating = true;
      return;
    }
    if (std::get_if<FailNode>(&st.store[da])) {
      st.dead = true;
      return;
    }
    if (mode == UnifyMode::NonStrict && std::get_if<FreeNode>(&st.store[da])) {
      // The defining case of `=:<=`: bind without evaluating the right side.
      NodeRef db = deref(st.store, b);
      if (db != da) {
        if (countStep()) return;
        st.store[da] = IndNode{db};
      }
      st.evaluating = false;
      return;
    }
    NodeRef db = deref(st.store, b);
    if (std::get_if<ThunkNode>(&st.store[db])) {
      st.frames.push_back(FUnifyB{da, mode});
      st.cur = db;
      st.evaluating = true;
      return;
    }
    if (std::get_if<FailNode>(&st.store[db])) {
      st.dead = true;
      return;
    }
    bothHNF(st, da, db, mode);
  }

  void bothHNF(SearchState& st, NodeRef a, NodeRef b, UnifyMode mode) {
    bool freeA = std::get_if<FreeNode>(&st.store[a]) != nullptr;
    bool freeB = std::get_if<FreeNode>(&st.store[b]) != nullptr;

    if (freeA && freeB) {
      if (a != b) st.store[a] = IndNode{b};
      st.evaluating = false;
      return;
    }
    if (freeA) {  // strict only: NS handled the free-lhs case already
      st.frames.push_back(FBindNormed{a});
      st.frames.push_back(FNormalize{});
      st.cur = b;
      st.evaluating = true;
      return;
    }
    if (freeB) {
      if (mode == UnifyMode::NonStrict) {
        // Ctor pattern against a free value: bind to the pattern side, whose
        // children stay unevaluated until demanded.
        if (countStep()) return;
        st.store[b] = IndNode{a};
        st.evaluating = false;
        return;
      }
      st.frames.push_back(FBindNormed{b});
      st.frames.push_back(FNormalize{});
      st.cur = a;
      st.evaluating = true;
      return;
    }

    const auto& ca = std::get<CtorNode>(st.store[a]);
    const auto& cb = std::get<CtorNode>(st.store[b]);
    if (ca.name != cb.name || ca.kids.size() != cb.kids.size()) {
      st.dead = true;
      return;
    }
    if (countStep()) return;
    std::vector<NodeRef> ka = ca.kids, kb = cb.kids;
    for (std::size_t i = ka.size(); i-- > 0;)
      st.frames.push_back(FUnifyPair{ka[i], kb[i], mode});
    st.evaluating = false;
  }

  static bool occurs(const std::vector<Node>& store, NodeRef fv, NodeRef r) {
    r = deref(store, r);
    if (r == fv) return true;
    if (const auto* c = std::get_if<CtorNode>(&store[r]))
      for (NodeRef k : c->kids)
        if (occurs(store, fv, k)) return true;
    return false;
  }
};

}  // namespace machine

// ------------------------------
// public entry points
// ------------------------------

// Evaluates a query expression to all normal forms under the given limits.
// Names listed in `queryFrees` are free variables of the query.
inline EvalResult runQuery(const Program& program, const Expr& query, const EvalConfig& config = {},
                           const std::vector<std::string>& queryFrees = {}) {
  machine::Machine m(program, config);
  return m.run(query, queryFrees);
}

// Solves unification constraints directly; each answer is the tuple of the
// `frees` bindings (bare for a single variable, `[]` marker when none).
inline EvalResult solveConstraints(const Program& program,
                                   const std::vector<Constraint>& constraints,
                                   const std::vector<std::string>& frees,
                                   const EvalConfig& config = {}) {
  std::vector<Expr> parts;
  parts.reserve(frees.size());
  for (const auto& name : frees) parts.push_back(eVar(name));
  Expr body = parts.empty() ? eCtor(nilCtor) : tupleExpr(std::move(parts));
  machine::Machine m(program, config);
  return m.runGoal(constraints, body, frees);
}

}  // namespace flc
