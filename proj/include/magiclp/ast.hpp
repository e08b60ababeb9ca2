#pragma once

// Abstract syntax for definite clause programs: terms, atoms, clauses,
// programs and queries. All values are immutable after construction and
// compare structurally.

#include <cassert>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "magiclp/errors.hpp"

namespace magiclp {

// Predicate namespace. Magic predicates live in a namespace of their own, so
// a transformed program can never collide with user predicates. User-facing
// syntax spells a magic predicate p as `pre_p`.
enum class Ns { original, magic };

struct Term {
  enum class Kind { variable, constant, compound };

  Kind kind = Kind::constant;
  std::string name;        // variable or constant name, or functor
  std::vector<Term> args;  // non-empty iff compound

  static Term var(std::string n) { return Term{Kind::variable, std::move(n), {}}; }
  static Term cst(std::string n) { return Term{Kind::constant, std::move(n), {}}; }
  static Term fun(std::string functor, std::vector<Term> as) {
    assert(!as.empty() && "compound terms have arity >= 1");
    return Term{Kind::compound, std::move(functor), std::move(as)};
  }

  bool is_var() const { return kind == Kind::variable; }
  bool is_const() const { return kind == Kind::constant; }
  bool is_compound() const { return kind == Kind::compound; }
};

inline int compare(const Term& a, const Term& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (int c = a.name.compare(b.name)) return c < 0 ? -1 : 1;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (int c = compare(a.args[i], b.args[i])) return c;
  return 0;
}

inline bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
inline bool operator!=(const Term& a, const Term& b) { return compare(a, b) != 0; }
inline bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

struct Pred {
  std::string name;
  Ns ns = Ns::original;
};

inline int compare(const Pred& a, const Pred& b) {
  if (a.ns != b.ns) return a.ns < b.ns ? -1 : 1;
  if (int c = a.name.compare(b.name)) return c < 0 ? -1 : 1;
  return 0;
}

inline bool operator==(const Pred& a, const Pred& b) { return compare(a, b) == 0; }
inline bool operator!=(const Pred& a, const Pred& b) { return compare(a, b) != 0; }
inline bool operator<(const Pred& a, const Pred& b) { return compare(a, b) < 0; }

struct Atom {
  Pred pred;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
};

inline int compare(const Atom& a, const Atom& b) {
  if (int c = compare(a.pred, b.pred)) return c;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (int c = compare(a.args[i], b.args[i])) return c;
  return 0;
}

inline bool operator==(const Atom& a, const Atom& b) { return compare(a, b) == 0; }
inline bool operator!=(const Atom& a, const Atom& b) { return compare(a, b) != 0; }
inline bool operator<(const Atom& a, const Atom& b) { return compare(a, b) < 0; }

// H :- B1, ..., Bn.  An empty body is a fact. Head and body share one
// variable scope.
struct Clause {
  Atom head;
  std::vector<Atom> body;
};

inline int compare(const Clause& a, const Clause& b) {
  if (int c = compare(a.head, b.head)) return c;
  if (a.body.size() != b.body.size()) return a.body.size() < b.body.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.body.size(); ++i)
    if (int c = compare(a.body[i], b.body[i])) return c;
  return 0;
}

inline bool operator==(const Clause& a, const Clause& b) { return compare(a, b) == 0; }
inline bool operator<(const Clause& a, const Clause& b) { return compare(a, b) < 0; }

// A conjunction of atoms. Parsers guarantee non-emptiness; derivation
// records use an empty atom list for the final query of a successful
// derivation.
struct Query {
  std::vector<Atom> atoms;
};

inline int compare(const Query& a, const Query& b) {
  if (a.atoms.size() != b.atoms.size()) return a.atoms.size() < b.atoms.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.atoms.size(); ++i)
    if (int c = compare(a.atoms[i], b.atoms[i])) return c;
  return 0;
}

inline bool operator==(const Query& a, const Query& b) { return compare(a, b) == 0; }
inline bool operator!=(const Query& a, const Query& b) { return compare(a, b) != 0; }
inline bool operator<(const Query& a, const Query& b) { return compare(a, b) < 0; }

namespace detail {

inline void collect_vars(const Term& t, std::vector<std::string>& out,
                         std::set<std::string>& seen) {
  if (t.is_var()) {
    if (seen.insert(t.name).second) out.push_back(t.name);
    return;
  }
  for (const Term& a : t.args) collect_vars(a, out, seen);
}

inline void collect_constants(const Term& t, std::set<std::string>& out) {
  if (t.is_const()) {
    out.insert(t.name);
    return;
  }
  for (const Term& a : t.args) collect_constants(a, out);
}

}  // namespace detail

// Variables in order of first occurrence (left to right, head before body).
inline std::vector<std::string> vars_of(const Atom& a) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const Term& t : a.args) detail::collect_vars(t, out, seen);
  return out;
}

inline std::vector<std::string> vars_of(const Clause& c) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const Term& t : c.head.args) detail::collect_vars(t, out, seen);
  for (const Atom& b : c.body)
    for (const Term& t : b.args) detail::collect_vars(t, out, seen);
  return out;
}

inline std::vector<std::string> vars_of(const Query& q) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const Atom& a : q.atoms)
    for (const Term& t : a.args) detail::collect_vars(t, out, seen);
  return out;
}

inline bool is_ground(const Term& t) {
  if (t.is_var()) return false;
  for (const Term& a : t.args)
    if (!is_ground(a)) return false;
  return true;
}

inline bool is_ground(const Atom& a) {
  for (const Term& t : a.args)
    if (!is_ground(t)) return false;
  return true;
}

inline bool is_ground(const Query& q) {
  for (const Atom& a : q.atoms)
    if (!is_ground(a)) return false;
  return true;
}

// Datalog = no compound terms anywhere.
inline bool is_datalog(const Term& t) { return !t.is_compound(); }

inline bool is_datalog(const Atom& a) {
  for (const Term& t : a.args)
    if (!is_datalog(t)) return false;
  return true;
}

inline bool is_datalog(const Clause& c) {
  if (!is_datalog(c.head)) return false;
  for (const Atom& b : c.body)
    if (!is_datalog(b)) return false;
  return true;
}

inline bool is_datalog(const Query& q) {
  for (const Atom& a : q.atoms)
    if (!is_datalog(a)) return false;
  return true;
}

// An ordered clause list plus derived tables: predicate arities and the set
// of constants appearing anywhere. Clause order is preserved exactly;
// LD-resolution depends on it.
struct Program {
  std::vector<Clause> clauses;
  std::map<Pred, std::size_t> predicates;
  std::set<std::string> constants;

  static Program build(std::vector<Clause> cs) {
    Program p;
    p.clauses = std::move(cs);
    auto note = [&p](const Atom& a) {
      auto [it, fresh] = p.predicates.emplace(a.pred, a.arity());
      if (!fresh && it->second != a.arity())
        throw ArityError("predicate " + a.pred.name + " used at arities " +
                         std::to_string(it->second) + " and " +
                         std::to_string(a.arity()));
      for (const Term& t : a.args) detail::collect_constants(t, p.constants);
    };
    for (const Clause& c : p.clauses) {
      note(c.head);
      for (const Atom& b : c.body) note(b);
    }
    return p;
  }
};

inline bool is_datalog(const Program& p) {
  for (const Clause& c : p.clauses)
    if (!is_datalog(c)) return false;
  return true;
}

// Checks that every predicate the query uses at an arity consistent with the
// program. Unknown predicates are fine (they simply fail).
inline void check_compatible(const Program& p, const Query& q) {
  for (const Atom& a : q.atoms) {
    auto it = p.predicates.find(a.pred);
    if (it != p.predicates.end() && it->second != a.arity())
      throw ArityError("query uses " + a.pred.name + "/" +
                       std::to_string(a.arity()) + " but the program defines " +
                       a.pred.name + "/" + std::to_string(it->second));
  }
}

}  // namespace magiclp
