#pragma once

// Substitutions, unification (with occurs check), one-way matching,
// standardization apart and grounding.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "magiclp/ast.hpp"
#include "magiclp/errors.hpp"

namespace magiclp {

// A finite map from variables to terms. Bindings never contain X -> X.
// Unification keeps the map in solved form (no bound variable occurs in any
// right-hand side), which makes application a single pass and the result
// idempotent.
class Substitution {
 public:
  Substitution() = default;

  // Raw constructor for bindings that are already simultaneous (the internal
  // convention used by mgu and compose). Identity bindings are dropped.
  static Substitution raw(std::map<std::string, Term> b) {
    Substitution s;
    for (auto& [v, t] : b)
      if (!(t.is_var() && t.name == v)) s.b_.emplace(v, std::move(t));
    return s;
  }

  // Normalizing constructor: rewrites the bindings to idempotent form, e.g.
  // {X -> f(Y), Y -> b} becomes {X -> f(b), Y -> b}. Throws when no
  // idempotent form exists (cyclic bindings such as {X -> f(X)}).
  static Substitution from_bindings(std::map<std::string, Term> b);

  bool empty() const { return b_.empty(); }
  std::size_t size() const { return b_.size(); }
  const std::map<std::string, Term>& bindings() const { return b_; }

  const Term* lookup(const std::string& var) const {
    auto it = b_.find(var);
    return it == b_.end() ? nullptr : &it->second;
  }

 private:
  friend std::optional<Substitution> unify_all(
      std::vector<std::pair<Term, Term>> pairs);
  friend Substitution compose(const Substitution&, const Substitution&);

  std::map<std::string, Term> b_;
};

inline int compare(const Substitution& a, const Substitution& b) {
  auto i = a.bindings().begin();
  auto j = b.bindings().begin();
  for (; i != a.bindings().end() && j != b.bindings().end(); ++i, ++j) {
    if (int c = i->first.compare(j->first)) return c < 0 ? -1 : 1;
    if (int c = compare(i->second, j->second)) return c;
  }
  if (i != a.bindings().end()) return 1;
  if (j != b.bindings().end()) return -1;
  return 0;
}

inline bool operator==(const Substitution& a, const Substitution& b) {
  return compare(a, b) == 0;
}
inline bool operator<(const Substitution& a, const Substitution& b) {
  return compare(a, b) < 0;
}

inline Term apply(const Substitution& s, const Term& t) {
  if (t.is_var()) {
    if (const Term* bound = s.lookup(t.name)) return *bound;
    return t;
  }
  if (t.is_const()) return t;
  std::vector<Term> args;
  args.reserve(t.args.size());
  for (const Term& a : t.args) args.push_back(apply(s, a));
  return Term::fun(t.name, std::move(args));
}

inline Atom apply(const Substitution& s, const Atom& a) {
  Atom out{a.pred, {}};
  out.args.reserve(a.args.size());
  for (const Term& t : a.args) out.args.push_back(apply(s, t));
  return out;
}

inline Query apply(const Substitution& s, const Query& q) {
  Query out;
  out.atoms.reserve(q.atoms.size());
  for (const Atom& a : q.atoms) out.atoms.push_back(apply(s, a));
  return out;
}

inline Clause apply(const Substitution& s, const Clause& c) {
  Clause out{apply(s, c.head), {}};
  out.body.reserve(c.body.size());
  for (const Atom& b : c.body) out.body.push_back(apply(s, b));
  return out;
}

// True when no bound variable occurs in any right-hand side, i.e. applying
// twice equals applying once.
inline bool is_idempotent(const Substitution& s) {
  std::set<std::string> rhs_vars;
  for (const auto& [v, t] : s.bindings()) {
    (void)v;
    std::vector<std::string> vs;
    std::set<std::string> seen;
    detail::collect_vars(t, vs, seen);
    rhs_vars.insert(seen.begin(), seen.end());
  }
  for (const auto& [v, t] : s.bindings()) {
    (void)t;
    if (rhs_vars.count(v)) return false;
  }
  return true;
}

inline Substitution Substitution::from_bindings(std::map<std::string, Term> b) {
  for (auto it = b.begin(); it != b.end();) {
    if (it->second.is_var() && it->second.name == it->first)
      it = b.erase(it);
    else
      ++it;
  }
  Substitution s = Substitution::raw(b);
  for (std::size_t round = 0; round <= b.size(); ++round) {
    bool changed = false;
    std::map<std::string, Term> next;
    for (const auto& [v, t] : s.bindings()) {
      Term nt = apply(s, t);
      if (nt.is_var() && nt.name == v)
        // A binding collapsed to identity: the input permutes variables and
        // has no idempotent form.
        throw Error("substitution has no idempotent form (cyclic bindings)");
      if (nt != t) changed = true;
      next.emplace(v, std::move(nt));
    }
    if (!changed) break;
    s = Substitution::raw(std::move(next));
  }
  if (!is_idempotent(s))
    throw Error("substitution has no idempotent form (cyclic bindings)");
  return s;
}

// Composition: apply(compose(s1, s2), t) == apply(s2, apply(s1, t)) for all
// t. The result is idempotent in the standardization-apart uses that arise
// during resolution; arbitrary inputs may compose to a non-idempotent map,
// in which case the composition law above still holds.
inline Substitution compose(const Substitution& s1, const Substitution& s2) {
  std::map<std::string, Term> out;
  for (const auto& [v, t] : s1.bindings()) out.emplace(v, apply(s2, t));
  for (const auto& [v, t] : s2.bindings()) out.emplace(v, t);  // s1 wins on clash
  return Substitution::raw(std::move(out));
}

namespace detail {

inline bool occurs(const std::string& var, const Term& t) {
  if (t.is_var()) return t.name == var;
  for (const Term& a : t.args)
    if (occurs(var, a)) return true;
  return false;
}

}  // namespace detail

// Solves a list of term equations, returning the most general unifier in
// solved (idempotent) form, or nothing. Occurs check is always on: the
// engine's declarative checks rely on sound unification.
inline std::optional<Substitution> unify_all(
    std::vector<std::pair<Term, Term>> pairs) {
  Substitution s;
  // Process left to right.
  std::vector<std::pair<Term, Term>> stack(pairs.rbegin(), pairs.rend());
  while (!stack.empty()) {
    auto [a, b] = std::move(stack.back());
    stack.pop_back();
    a = apply(s, a);
    b = apply(s, b);
    if (a == b) continue;
    if (!a.is_var() && b.is_var()) std::swap(a, b);
    if (a.is_var()) {
      if (detail::occurs(a.name, b)) return std::nullopt;
      // Keep solved form: eliminate the new variable from existing rhs.
      Substitution unit = Substitution::raw({{a.name, b}});
      std::map<std::string, Term> next;
      for (const auto& [v, t] : s.b_) next.emplace(v, apply(unit, t));
      next.emplace(a.name, b);
      s = Substitution::raw(std::move(next));
      continue;
    }
    if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size())
      return std::nullopt;
    for (std::size_t i = a.args.size(); i-- > 0;)
      stack.emplace_back(a.args[i], b.args[i]);
  }
  return s;
}

inline std::optional<Substitution> unify(const Term& a, const Term& b) {
  return unify_all({{a, b}});
}

inline std::optional<Substitution> mgu(const Atom& a, const Atom& b) {
  if (a.pred != b.pred || a.arity() != b.arity()) return std::nullopt;
  std::vector<std::pair<Term, Term>> pairs;
  pairs.reserve(a.args.size());
  for (std::size_t i = 0; i < a.args.size(); ++i)
    pairs.emplace_back(a.args[i], b.args[i]);
  return unify_all(std::move(pairs));
}

namespace detail {

// One-way matching: binds only pattern variables; target variables are
// rigid. Success means apply(bindings, pattern) == target.
inline bool match_term(const Term& pattern, const Term& target,
                       std::map<std::string, Term>& bindings) {
  if (pattern.is_var()) {
    auto it = bindings.find(pattern.name);
    if (it != bindings.end()) return it->second == target;
    bindings.emplace(pattern.name, target);
    return true;
  }
  if (pattern.kind != target.kind || pattern.name != target.name ||
      pattern.args.size() != target.args.size())
    return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!match_term(pattern.args[i], target.args[i], bindings)) return false;
  return true;
}

inline bool match_atom(const Atom& pattern, const Atom& target,
                       std::map<std::string, Term>& bindings) {
  if (pattern.pred != target.pred || pattern.arity() != target.arity())
    return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!match_term(pattern.args[i], target.args[i], bindings)) return false;
  return true;
}

}  // namespace detail

// True iff `specific` is an instance of `general`.
inline bool instance_of(const Atom& general, const Atom& specific) {
  std::map<std::string, Term> b;
  return detail::match_atom(general, specific, b);
}

// Renames the clause so that it shares no variable with `avoid`. Fresh names
// are drawn from a monotone counter (_G0, _G1, ...), so runs are
// deterministic given the counter state.
inline Clause rename_apart(const Clause& c, const std::set<std::string>& avoid,
                           std::uint64_t& counter) {
  std::vector<std::string> vars = vars_of(c);
  if (vars.empty()) return c;
  std::set<std::string> own(vars.begin(), vars.end());
  std::map<std::string, Term> renaming;
  for (const std::string& v : vars) {
    std::string fresh;
    do {
      fresh = "_G" + std::to_string(counter++);
    } while (avoid.count(fresh) || own.count(fresh));
    renaming.emplace(v, Term::var(fresh));
  }
  return apply(Substitution::raw(std::move(renaming)), c);
}

namespace detail {

// All assignments of `vars` to constants of the (sorted) universe, in
// odometer order with the last variable changing fastest.
template <typename Fn>
inline void for_each_assignment(const std::vector<std::string>& vars,
                                const std::vector<std::string>& universe,
                                Fn&& fn) {
  if (vars.empty()) {
    fn(Substitution());
    return;
  }
  std::vector<std::size_t> idx(vars.size(), 0);
  for (;;) {
    std::map<std::string, Term> b;
    for (std::size_t i = 0; i < vars.size(); ++i)
      b.emplace(vars[i], Term::cst(universe[idx[i]]));
    fn(Substitution::raw(std::move(b)));
    std::size_t i = vars.size();
    while (i-- > 0) {
      if (++idx[i] < universe.size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace detail

// All ground instances of a Datalog clause over the universe; exactly
// |universe|^|vars| clauses, in a deterministic order.
inline std::vector<Clause> ground_instances(const Clause& c,
                                            const std::set<std::string>& universe) {
  if (!is_datalog(c))
    throw NonDatalogError("ground_instances requires a Datalog clause");
  std::vector<std::string> u(universe.begin(), universe.end());
  std::vector<Clause> out;
  detail::for_each_assignment(vars_of(c), u, [&](const Substitution& s) {
    out.push_back(apply(s, c));
  });
  return out;
}

inline std::vector<Atom> ground_instances(const Atom& a,
                                          const std::set<std::string>& universe) {
  if (!is_datalog(a))
    throw NonDatalogError("ground_instances requires a Datalog atom");
  std::vector<std::string> u(universe.begin(), universe.end());
  std::vector<Atom> out;
  detail::for_each_assignment(vars_of(a), u, [&](const Substitution& s) {
    out.push_back(apply(s, a));
  });
  return out;
}

inline std::vector<Query> ground_instances(const Query& q,
                                           const std::set<std::string>& universe) {
  if (!is_datalog(q))
    throw NonDatalogError("ground_instances requires a Datalog query");
  std::vector<std::string> u(universe.begin(), universe.end());
  std::vector<Query> out;
  detail::for_each_assignment(vars_of(q), u, [&](const Substitution& s) {
    out.push_back(apply(s, q));
  });
  return out;
}

namespace detail {

inline Substitution canonical_renaming(const std::vector<std::string>& vars) {
  std::map<std::string, Term> b;
  std::size_t k = 0;
  for (const std::string& v : vars)
    b.emplace(v, Term::var("V" + std::to_string(k++)));
  return Substitution::raw(std::move(b));
}

}  // namespace detail

// Canonical variants: variables renamed to V0, V1, ... in order of first
// occurrence. Two terms are variants iff their canonical forms are equal.
inline Atom canonical(const Atom& a) {
  return apply(detail::canonical_renaming(vars_of(a)), a);
}

inline Query canonical(const Query& q) {
  return apply(detail::canonical_renaming(vars_of(q)), q);
}

inline Clause canonical(const Clause& c) {
  return apply(detail::canonical_renaming(vars_of(c)), c);
}

inline bool variant(const Atom& a, const Atom& b) {
  return canonical(a) == canonical(b);
}

inline bool variant(const Clause& a, const Clause& b) {
  return canonical(a) == canonical(b);
}

}  // namespace magiclp
