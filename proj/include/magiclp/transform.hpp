#pragma once

// The magic transformation and its variants.
//
// Given a program P and an atomic query Q, the transformed program contains,
// for each clause H :- B1,...,Bn of P,
//
//   case 1:  H :- pre_H, B1, ..., Bn
//   case 2:  pre_Bi :- pre_H, B1, ..., B(i-1)        (one clause per i)
//   seed:    pre_Q.
//
// where pre_A projects A onto its selected argument positions and moves the
// predicate into the magic namespace. Variants: the pre_H guard of case-1
// clauses may be dropped, body atoms of case-2 clauses may be pruned, and a
// case-2 clause for Bi may be supplemented with pre_Bj (j < i), which is a
// logically redundant guard.
//
// The adorned pipeline first specializes P by bound/free argument patterns
// (full left-to-right sideways information passing) and then applies the
// transformation with the bound positions as the selection.

#include <cstddef>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "magiclp/ast.hpp"
#include "magiclp/errors.hpp"

namespace magiclp {

// Per-predicate selected argument positions (1-based, strictly increasing).
// An absent predicate is an error at use sites; build full maps with all_of
// or none_of and override entries as needed.
struct SelectionMap {
  std::map<std::string, std::vector<std::size_t>> positions;

  static SelectionMap all_of(const Program& p, const Query& q) {
    SelectionMap s;
    auto add = [&s](const std::string& name, std::size_t arity) {
      std::vector<std::size_t> ps;
      for (std::size_t i = 1; i <= arity; ++i) ps.push_back(i);
      s.positions.emplace(name, std::move(ps));
    };
    for (const auto& [pred, arity] : p.predicates)
      if (pred.ns == Ns::original) add(pred.name, arity);
    for (const Atom& a : q.atoms)
      if (a.pred.ns == Ns::original && !s.positions.count(a.pred.name))
        add(a.pred.name, a.arity());
    return s;
  }

  static SelectionMap none_of(const Program& p, const Query& q) {
    SelectionMap s = all_of(p, q);
    for (auto& [name, ps] : s.positions) ps.clear();
    return s;
  }

  const std::vector<std::size_t>* find(const std::string& pred) const {
    auto it = positions.find(pred);
    return it == positions.end() ? nullptr : &it->second;
  }
};

// Validates positions against the program's arities. Selection entries must
// name predicates of the program (or the query) and stay in range.
inline void validate_selection(const SelectionMap& sel, const Program& p,
                               const Query& q) {
  std::map<std::string, std::size_t> arity;
  for (const auto& [pred, ar] : p.predicates)
    if (pred.ns == Ns::original) arity.emplace(pred.name, ar);
  for (const Atom& a : q.atoms)
    if (a.pred.ns == Ns::original) arity.emplace(a.pred.name, a.arity());
  for (const auto& [name, ps] : sel.positions) {
    auto it = arity.find(name);
    if (it == arity.end())
      throw UnknownPredicateError("selection names unknown predicate " + name);
    std::size_t prev = 0;
    for (std::size_t pos : ps) {
      if (pos < 1 || pos > it->second)
        throw Error("selection position " + std::to_string(pos) +
                    " out of range for " + name + "/" + std::to_string(it->second));
      if (pos <= prev)
        throw Error("selection positions for " + name +
                    " must be strictly increasing");
      prev = pos;
    }
  }
}

enum class ClauseCase { case1, case2, seed };

// Which transformation case produced a generated clause. source_clause is
// the 1-based index into the source program (0 for the seed); body_index is
// the i of a case-2 clause.
struct Provenance {
  ClauseCase kind = ClauseCase::seed;
  std::size_t source_clause = 0;
  std::size_t body_index = 0;
};

// Adds pre_Bj to the body of the case-2 clause generated for body atom i of
// the given source clause; requires j < i.
struct Supplement {
  std::size_t source_clause = 0;  // 1-based
  std::size_t i = 0;
  std::size_t j = 0;
};

struct VariantFlags {
  bool drop_pre_head = false;
  // (source clause, i) -> 1-based positions to delete from the generated
  // case-2 body (position 1 is the pre_H guard, position k+1 is Bk).
  std::map<std::pair<std::size_t, std::size_t>, std::set<std::size_t>> body_prune;
  std::vector<Supplement> supplementary;
};

struct MagicProgram {
  Program program;  // mixed namespaces
  std::vector<Provenance> provenance;  // parallel to program.clauses
  SelectionMap selection;
  VariantFlags variants;
};

// Projects the atom onto its selected positions and moves it into the magic
// namespace:  p(t1,...,tn)  ->  pre_p(t_{i1},...,t_{ik}).
inline Atom magic_template(const Atom& a, const SelectionMap& sel) {
  if (a.pred.ns != Ns::original)
    throw Error("magic_template applied to a magic-namespace atom");
  const std::vector<std::size_t>* ps = sel.find(a.pred.name);
  if (!ps)
    throw UnknownPredicateError("no selection for predicate " + a.pred.name);
  Atom out{Pred{a.pred.name, Ns::magic}, {}};
  out.args.reserve(ps->size());
  for (std::size_t pos : *ps) {
    if (pos < 1 || pos > a.arity())
      throw Error("selection position " + std::to_string(pos) +
                  " out of range for " + a.pred.name + "/" +
                  std::to_string(a.arity()));
    out.args.push_back(a.args[pos - 1]);
  }
  return out;
}

inline MagicProgram magic_transform(const Program& p, const Query& q,
                                    const SelectionMap& sel,
                                    const VariantFlags& flags = {}) {
  if (q.atoms.size() != 1)
    throw NonAtomicQueryError("the transformation takes an atomic query");
  check_compatible(p, q);
  validate_selection(sel, p, q);

  for (const Supplement& s : flags.supplementary) {
    if (s.source_clause < 1 || s.source_clause > p.clauses.size())
      throw IllegalVariantError("supplement references missing clause " +
                                std::to_string(s.source_clause));
    std::size_t n = p.clauses[s.source_clause - 1].body.size();
    if (s.i < 1 || s.i > n || s.j < 1 || s.j >= s.i)
      throw IllegalVariantError("supplement requires 1 <= j < i <= body length");
  }

  std::vector<Clause> out;
  std::vector<Provenance> prov;
  for (std::size_t k = 1; k <= p.clauses.size(); ++k) {
    const Clause& c = p.clauses[k - 1];
    Atom pre_head = magic_template(c.head, sel);

    Clause guarded;
    guarded.head = c.head;
    if (!flags.drop_pre_head) guarded.body.push_back(pre_head);
    guarded.body.insert(guarded.body.end(), c.body.begin(), c.body.end());
    out.push_back(std::move(guarded));
    prov.push_back({ClauseCase::case1, k, 0});

    for (std::size_t i = 1; i <= c.body.size(); ++i) {
      Clause call;
      call.head = magic_template(c.body[i - 1], sel);
      call.body.push_back(pre_head);
      for (std::size_t j = 1; j < i; ++j) call.body.push_back(c.body[j - 1]);
      auto prune = flags.body_prune.find({k, i});
      if (prune != flags.body_prune.end()) {
        for (auto it = prune->second.rbegin(); it != prune->second.rend(); ++it) {
          if (*it < 1 || *it > call.body.size())
            throw IllegalVariantError("prune position " + std::to_string(*it) +
                                      " out of range");
          call.body.erase(call.body.begin() + static_cast<std::ptrdiff_t>(*it - 1));
        }
      }
      out.push_back(std::move(call));
      prov.push_back({ClauseCase::case2, k, i});
    }
  }

  for (const auto& [key, ps] : flags.body_prune) {
    (void)ps;
    bool found = false;
    for (const Provenance& pr : prov)
      if (pr.kind == ClauseCase::case2 && pr.source_clause == key.first &&
          pr.body_index == key.second)
        found = true;
    if (!found)
      throw IllegalVariantError("prune key does not name a generated clause");
  }

  for (const Supplement& s : flags.supplementary) {
    const Clause& src = p.clauses[s.source_clause - 1];
    for (std::size_t g = 0; g < out.size(); ++g) {
      if (prov[g].kind == ClauseCase::case2 &&
          prov[g].source_clause == s.source_clause && prov[g].body_index == s.i) {
        out[g].body.push_back(magic_template(src.body[s.j - 1], sel));
        break;
      }
    }
  }

  Clause seed;
  seed.head = magic_template(q.atoms[0], sel);
  out.push_back(std::move(seed));
  prov.push_back({ClauseCase::seed, 0, 0});

  return MagicProgram{Program::build(std::move(out)), std::move(prov), sel, flags};
}

// An adorned program: predicates renamed to p_<pattern> where the pattern
// marks each argument position bound (b) or free (f); origin maps renamed
// predicates back to their source.
struct AdornedProgram {
  Program program;
  std::map<std::string, std::string> origin;
  std::map<std::string, std::string> adornment;  // adorned name -> b/f string
  Atom adorned_query;
};

namespace detail {

inline std::string adorned_name(const std::string& base, const std::string& pattern) {
  return base + "_" + pattern;
}

// Bound/free pattern of an atom given the set of already-bound variables.
// An argument is bound iff all of its variables are bound (constants are
// bound vacuously).
inline std::string adornment_under(const Atom& a, const std::set<std::string>& bound) {
  std::string pattern;
  for (const Term& t : a.args) {
    std::vector<std::string> vs;
    std::set<std::string> seen;
    collect_vars(t, vs, seen);
    bool all_bound = true;
    for (const std::string& v : vs)
      if (!bound.count(v)) all_bound = false;
    pattern.push_back(all_bound ? 'b' : 'f');
  }
  return pattern;
}

// Query adornment: a position is bound iff the argument is a non-variable
// term or a variable occurring in an earlier bound position.
inline std::string query_adornment(const Atom& q) {
  std::string pattern;
  std::set<std::string> bound;
  for (const Term& t : q.args) {
    if (!t.is_var()) {
      pattern.push_back('b');
      std::vector<std::string> vs;
      std::set<std::string> seen;
      collect_vars(t, vs, seen);
      bound.insert(seen.begin(), seen.end());
    } else if (bound.count(t.name)) {
      pattern.push_back('b');
    } else {
      pattern.push_back('f');
    }
  }
  return pattern;
}

}  // namespace detail

// Specializes P for the query's bound/free pattern with full left-to-right
// sideways information passing: under a head adornment, a body argument is
// bound iff all its variables are bound by the head's bound arguments or by
// any earlier body atom, and after each body atom all of its variables
// become bound. Only adornments reachable from the query are emitted; a
// source clause may appear under several adornments.
inline AdornedProgram adorn(const Program& p, const Query& q) {
  if (q.atoms.size() != 1)
    throw NonAtomicQueryError("adornment takes an atomic query");
  check_compatible(p, q);
  const Atom& qa = q.atoms[0];

  AdornedProgram out;
  std::string qpattern = detail::query_adornment(qa);
  out.adorned_query = Atom{Pred{detail::adorned_name(qa.pred.name, qpattern),
                                Ns::original},
                           qa.args};

  std::deque<std::pair<std::string, std::string>> work;  // (source pred, pattern)
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<Clause> clauses;

  auto discover = [&](const std::string& pred, const std::string& pattern) {
    std::string name = detail::adorned_name(pred, pattern);
    auto it = out.origin.find(name);
    if (it != out.origin.end()) {
      if (it->second != pred)
        throw Error("adorned name collision on " + name);
      return;
    }
    out.origin.emplace(name, pred);
    out.adornment.emplace(name, pattern);
    if (seen.insert({pred, pattern}).second) work.emplace_back(pred, pattern);
  };

  discover(qa.pred.name, qpattern);
  while (!work.empty()) {
    auto [pred, pattern] = work.front();
    work.pop_front();
    std::string head_name = detail::adorned_name(pred, pattern);
    for (const Clause& c : p.clauses) {
      if (c.head.pred.ns != Ns::original || c.head.pred.name != pred) continue;
      std::set<std::string> bound;
      for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] != 'b') continue;
        std::vector<std::string> vs;
        std::set<std::string> seen_vars;
        detail::collect_vars(c.head.args[i], vs, seen_vars);
        bound.insert(seen_vars.begin(), seen_vars.end());
      }
      Clause adorned;
      adorned.head = Atom{Pred{head_name, Ns::original}, c.head.args};
      for (const Atom& b : c.body) {
        std::string bp = detail::adornment_under(b, bound);
        discover(b.pred.name, bp);
        adorned.body.push_back(
            Atom{Pred{detail::adorned_name(b.pred.name, bp), Ns::original}, b.args});
        for (const Term& t : b.args) {
          std::vector<std::string> vs;
          std::set<std::string> seen_vars;
          detail::collect_vars(t, vs, seen_vars);
          bound.insert(seen_vars.begin(), seen_vars.end());
        }
      }
      clauses.push_back(std::move(adorned));
    }
  }

  out.program = Program::build(std::move(clauses));
  return out;
}

struct MagicAdorned {
  AdornedProgram adorned;
  MagicProgram magic;
};

// Adorn, then transform with the bound positions of each adorned predicate
// as its selection.
inline MagicAdorned magic_adorned(const Program& p, const Query& q) {
  AdornedProgram ad = adorn(p, q);
  SelectionMap sel;
  for (const auto& [name, pattern] : ad.adornment) {
    std::vector<std::size_t> ps;
    for (std::size_t i = 0; i < pattern.size(); ++i)
      if (pattern[i] == 'b') ps.push_back(i + 1);
    sel.positions.emplace(name, std::move(ps));
  }
  Query adq{{ad.adorned_query}};
  MagicProgram mp = magic_transform(ad.program, adq, sel);
  return MagicAdorned{std::move(ad), std::move(mp)};
}

}  // namespace magiclp
