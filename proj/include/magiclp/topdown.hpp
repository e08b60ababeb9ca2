#pragma once

// LD-resolution: SLD-resolution with the leftmost selection rule. The
// explorer enumerates the LD-tree up to a budget and reports computed
// answers together with the procedure calls and successes observed across
// all explored derivations.
//
// A procedure call is the first atom of any query in a derivation. The call
// A of Q_i = A, B succeeds at the least j > i with Q_j = B θ(i,j); its
// success is A θ(i,j), where θ(i,j) is the composition of the step mgus.
// Because the leftmost atom is always selected, that least j is exactly the
// first point where the query length drops below |Q_i|.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "magiclp/ast.hpp"
#include "magiclp/errors.hpp"
#include "magiclp/subst.hpp"

namespace magiclp {

// Exploration limits. max_derivation_length bounds the number of resolution
// steps per derivation, max_answers the number of distinct answers, and
// max_steps the total resolution steps across the whole run (the guard
// against exponentially branching trees).
struct Budget {
  std::size_t max_derivation_length = 100;
  std::size_t max_answers = 256;
  std::size_t max_steps = 100000;
};

// Iterative deepening explores the tree fairly (shortest derivations
// first) and is the default; plain depth-first is available for
// demonstration and behaves like a bounded Prolog search.
enum class SearchMode { iterative_deepening, depth_first };

// One maximal explored derivation: queries Q_0..Q_m (the last entry has an
// empty atom list on success), the step mgus θ_1..θ_m, and the 1-based
// indices of the clauses used.
struct DerivationTrace {
  enum class Status { success, failure, budget_exhausted };
  std::vector<Query> queries;
  std::vector<Substitution> mgus;
  std::vector<std::size_t> clause_choices;
  Status status = Status::failure;
};

struct SolveResult {
  std::vector<Query> answers;  // canonicalized, in discovery order
  bool complete = false;       // whole LD-tree exhausted within budget
};

// Calls, successes and answers are stored modulo variable renaming (the
// canonical renaming of subst.hpp). Answer substitutions are restricted to
// the query's variables; bindings that merely rename an otherwise
// unconstrained variable are dropped.
struct TraceReport {
  std::set<Atom> calls;
  std::set<Atom> successes;
  std::set<Substitution> answers;
  bool complete = false;
};

struct ExploreResult {
  SolveResult solve;
  TraceReport trace;
};

using DerivationCallback = std::function<void(const DerivationTrace&)>;

namespace detail {

struct PendingCall {
  Atom atom;                 // A θ(i,current), updated as steps accumulate
  std::size_t len_at_call;   // |Q_i|
  bool succeeded = false;
  bool ground = false;
};

struct ExploreState {
  const Program& program;
  Budget budget;
  std::uint64_t var_counter = 0;
  std::size_t steps = 0;
  bool pruned = false;       // some subtree was cut off by a limit
  bool aborted = false;      // answer cap reached
  std::set<Atom> calls;
  std::set<Atom> successes;
  std::set<Substitution> answer_substs;
  std::set<Query> answer_keys;          // canonical forms, for dedup
  std::vector<Query> answers;           // discovery order
  const Query* q0 = nullptr;
  DerivationCallback callback;
  // Path recording, only populated when a callback is installed.
  std::vector<Query> path_queries;
  std::vector<Substitution> path_mgus;
  std::vector<std::size_t> path_choices;
};

// Extracts the answer substitution by walking Q0 against its instance.
inline void extract_bindings(const Term& pattern, const Term& inst,
                             std::map<std::string, Term>& out) {
  if (pattern.is_var()) {
    out.emplace(pattern.name, inst);
    return;
  }
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    extract_bindings(pattern.args[i], inst.args[i], out);
}

inline Substitution answer_substitution(const Query& q0, const Query& inst) {
  std::map<std::string, Term> b;
  for (std::size_t i = 0; i < q0.atoms.size(); ++i)
    for (std::size_t j = 0; j < q0.atoms[i].args.size(); ++j)
      extract_bindings(q0.atoms[i].args[j], inst.atoms[i].args[j], b);
  for (auto it = b.begin(); it != b.end();) {
    if (it->second.is_var() && it->second.name == it->first)
      it = b.erase(it);
    else
      ++it;
  }
  // Drop bindings that rename an unconstrained variable: v -> w where w is
  // a variable occurring exactly once across all right-hand sides.
  std::map<std::string, std::size_t> occurrences;
  std::function<void(const Term&)> count = [&](const Term& u) {
    if (u.is_var()) {
      occurrences[u.name]++;
      return;
    }
    for (const Term& a : u.args) count(a);
  };
  for (const auto& [v, t] : b) {
    (void)v;
    count(t);
  }
  for (auto it = b.begin(); it != b.end();) {
    if (it->second.is_var() && occurrences[it->second.name] == 1)
      it = b.erase(it);
    else
      ++it;
  }
  // Canonicalize the remaining free variables jointly.
  std::vector<std::string> rhs_vars;
  std::set<std::string> seen;
  for (const auto& [v, t] : b) {
    (void)v;
    collect_vars(t, rhs_vars, seen);
  }
  Substitution ren = canonical_renaming(rhs_vars);
  std::map<std::string, Term> final_b;
  for (const auto& [v, t] : b) final_b.emplace(v, apply(ren, t));
  return Substitution::raw(std::move(final_b));
}

inline std::set<std::string> live_vars(const std::vector<Atom>& cur,
                                       const std::vector<PendingCall>& pending,
                                       const Query& q0inst) {
  std::set<std::string> out;
  auto add_atom = [&out](const Atom& a) {
    std::vector<std::string> vs;
    std::set<std::string> seen;
    for (const Term& t : a.args) collect_vars(t, vs, seen);
    out.insert(seen.begin(), seen.end());
  };
  for (const Atom& a : cur) add_atom(a);
  for (const PendingCall& p : pending)
    if (!p.ground) add_atom(p.atom);
  for (const Atom& a : q0inst.atoms) add_atom(a);
  return out;
}

inline void record_answer(ExploreState& st, const Query& q0inst) {
  Query key = canonical(q0inst);
  if (!st.answer_keys.insert(key).second) return;
  st.answers.push_back(key);
  st.answer_substs.insert(answer_substitution(*st.q0, q0inst));
  if (st.answers.size() >= st.budget.max_answers) st.aborted = true;
}

inline void emit_trace(ExploreState& st, DerivationTrace::Status status) {
  if (!st.callback) return;
  DerivationTrace t;
  t.queries = st.path_queries;
  t.mgus = st.path_mgus;
  t.clause_choices = st.path_choices;
  t.status = status;
  st.callback(t);
}

inline bool some_clause_resolves(ExploreState& st, const Atom& goal,
                                 const std::set<std::string>& avoid) {
  for (const Clause& c : st.program.clauses) {
    std::uint64_t scratch = st.var_counter;
    Clause rc = rename_apart(c, avoid, scratch);
    if (mgu(goal, rc.head)) return true;
  }
  return false;
}

inline void dfs(ExploreState& st, const std::vector<Atom>& cur,
                const std::vector<PendingCall>& pending, const Query& q0inst,
                std::size_t depth_left) {
  if (cur.empty()) {
    record_answer(st, q0inst);
    emit_trace(st, DerivationTrace::Status::success);
    return;
  }
  st.calls.insert(canonical(cur[0]));
  std::set<std::string> avoid = live_vars(cur, pending, q0inst);
  if (depth_left == 0) {
    if (some_clause_resolves(st, cur[0], avoid)) {
      st.pruned = true;
      emit_trace(st, DerivationTrace::Status::budget_exhausted);
    } else {
      emit_trace(st, DerivationTrace::Status::failure);
    }
    return;
  }
  bool resolved_any = false;
  for (std::size_t k = 1; k <= st.program.clauses.size(); ++k) {
    if (st.aborted) return;
    if (st.steps >= st.budget.max_steps) {
      st.pruned = true;
      return;
    }
    Clause rc = rename_apart(st.program.clauses[k - 1], avoid, st.var_counter);
    std::optional<Substitution> m = mgu(cur[0], rc.head);
    if (!m) continue;
    ++st.steps;
    resolved_any = true;

    std::vector<Atom> next;
    next.reserve(rc.body.size() + cur.size() - 1);
    for (const Atom& b : rc.body) next.push_back(apply(*m, b));
    for (std::size_t i = 1; i < cur.size(); ++i) next.push_back(apply(*m, cur[i]));

    std::vector<PendingCall> next_pending;
    next_pending.reserve(pending.size() + 1);
    for (const PendingCall& pc : pending) {
      PendingCall np = pc;
      if (!np.ground) {
        np.atom = apply(*m, np.atom);
        np.ground = is_ground(np.atom);
      }
      next_pending.push_back(std::move(np));
    }
    {
      PendingCall np;
      np.atom = apply(*m, cur[0]);
      np.ground = is_ground(np.atom);
      np.len_at_call = cur.size();
      next_pending.push_back(std::move(np));
    }
    for (PendingCall& pc : next_pending) {
      if (!pc.succeeded && next.size() == pc.len_at_call - 1) {
        st.successes.insert(canonical(pc.atom));
        pc.succeeded = true;
      }
    }

    Query next_q0 = is_ground(q0inst) ? q0inst : apply(*m, q0inst);

    if (st.callback) {
      st.path_queries.push_back(Query{next});
      st.path_mgus.push_back(*m);
      st.path_choices.push_back(k);
    }
    dfs(st, next, next_pending, next_q0, depth_left - 1);
    if (st.callback) {
      st.path_queries.pop_back();
      st.path_mgus.pop_back();
      st.path_choices.pop_back();
    }
  }
  if (!resolved_any) emit_trace(st, DerivationTrace::Status::failure);
}

}  // namespace detail

// Runs the LD-tree exploration once and reports answers, calls and
// successes. complete is true iff the whole tree was exhausted within the
// budget.
inline ExploreResult ld_run(const Program& p, const Query& q, const Budget& b = {},
                            SearchMode mode = SearchMode::iterative_deepening,
                            DerivationCallback callback = nullptr) {
  if (q.atoms.empty()) throw Error("ld_run on an empty query");
  if (b.max_derivation_length < 1 || b.max_answers < 1)
    throw Error("budget limits must be at least 1");
  check_compatible(p, q);

  detail::ExploreState st{p, b};
  st.q0 = &q;
  st.callback = std::move(callback);

  bool complete = false;
  auto run_at = [&](std::size_t depth) {
    st.pruned = false;
    if (st.callback) {
      st.path_queries = {q};
      st.path_mgus.clear();
      st.path_choices.clear();
    }
    detail::dfs(st, q.atoms, {}, q, depth);
  };

  if (mode == SearchMode::depth_first) {
    run_at(b.max_derivation_length);
    complete = !st.pruned && !st.aborted;
  } else {
    for (std::size_t d = 1; d <= b.max_derivation_length; ++d) {
      run_at(d);
      if (st.aborted || st.steps >= b.max_steps) break;
      if (!st.pruned) {
        complete = true;
        break;
      }
    }
  }

  ExploreResult out;
  out.solve.answers = std::move(st.answers);
  out.solve.complete = complete;
  out.trace.calls = std::move(st.calls);
  out.trace.successes = std::move(st.successes);
  out.trace.answers = std::move(st.answer_substs);
  out.trace.complete = complete;
  return out;
}

// Enumerates computed answers Qθ.
inline SolveResult ld_solve(const Program& p, const Query& q, const Budget& b = {},
                            SearchMode mode = SearchMode::iterative_deepening) {
  return ld_run(p, q, b, mode).solve;
}

// Reports procedure calls, successes and answers across the explored tree.
inline TraceReport ld_trace(const Program& p, const Query& q, const Budget& b = {},
                            SearchMode mode = SearchMode::iterative_deepening) {
  return ld_run(p, q, b, mode).trace;
}

}  // namespace magiclp
