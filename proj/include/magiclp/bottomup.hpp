#pragma once

// Ground Datalog fixpoint evaluation (naive and semi-naive), least Herbrand
// models, an entailment oracle, proof trees, and removal of magic guards
// from proof trees over transformed programs.
//
// Grounding is explicit and up-front: every clause is instantiated over the
// universe before iteration starts. Ground atoms are interned as dense
// integer codes (predicate block + mixed-radix argument index), which keeps
// the fixpoint loops cheap while the public surface stays in terms of Atom
// sets.

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "magiclp/ast.hpp"
#include "magiclp/errors.hpp"
#include "magiclp/subst.hpp"
#include "magiclp/topdown.hpp"

namespace magiclp {

enum class Strategy { naive, seminaive };

// All constants of the program and query; the reserved constant c0 when
// there are none, so the Herbrand universe is never empty.
inline std::set<std::string> herbrand_universe(const Program& p, const Query& q) {
  if (!is_datalog(p)) throw NonDatalogError("herbrand_universe requires Datalog");
  if (!is_datalog(q)) throw NonDatalogError("herbrand_universe requires Datalog");
  std::set<std::string> u = p.constants;
  for (const Atom& a : q.atoms)
    for (const Term& t : a.args) detail::collect_constants(t, u);
  if (u.empty()) u.insert("c0");
  return u;
}

struct ProofTree {
  Atom root;
  std::vector<ProofTree> children;
};

inline int compare(const ProofTree& a, const ProofTree& b) {
  if (int c = compare(a.root, b.root)) return c;
  if (a.children.size() != b.children.size())
    return a.children.size() < b.children.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (int c = compare(a.children[i], b.children[i])) return c;
  return 0;
}

inline bool operator==(const ProofTree& a, const ProofTree& b) {
  return compare(a, b) == 0;
}

// The least Herbrand model over a universe, plus, for every derived atom,
// the first ground clause instance that fired for it (ties inside a round
// broken by clause index, then by the grounding assignment). The recorded
// round numbers strictly decrease from an atom to its body atoms, which
// makes proof-tree extraction terminate.
struct GroundModel {
  std::set<Atom> atoms;
  std::set<std::string> universe;
  Strategy strategy = Strategy::seminaive;

  struct Justification {
    std::size_t clause_index = 0;  // 1-based source clause
    std::vector<Atom> body;
    std::size_t round = 0;
  };
  std::map<Atom, Justification> provenance;

  const Justification* justification(const Atom& a) const {
    auto it = provenance.find(a);
    return it == provenance.end() ? nullptr : &it->second;
  }
};

namespace detail {

// Dense codes for ground atoms over a fixed predicate table and universe.
struct GroundSpace {
  std::vector<std::string> consts;
  std::map<std::string, std::size_t> const_index;
  struct PredInfo {
    Pred pred;
    std::size_t arity = 0;
    std::size_t base = 0;
    std::size_t count = 0;
  };
  std::vector<PredInfo> preds;
  std::map<Pred, std::size_t> pred_index;
  std::size_t total = 0;

  GroundSpace(const Program& p, const std::set<std::string>& universe) {
    consts.assign(universe.begin(), universe.end());
    for (std::size_t i = 0; i < consts.size(); ++i) const_index.emplace(consts[i], i);
    for (const auto& [pred, arity] : p.predicates) {
      PredInfo info;
      info.pred = pred;
      info.arity = arity;
      info.base = total;
      info.count = 1;
      for (std::size_t i = 0; i < arity; ++i) info.count *= consts.size();
      pred_index.emplace(pred, preds.size());
      preds.push_back(info);
      total += info.count;
    }
  }

  Atom decode(std::size_t code) const {
    std::size_t lo = 0, hi = preds.size();
    while (lo + 1 < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (preds[mid].base <= code)
        lo = mid;
      else
        hi = mid;
    }
    const PredInfo& info = preds[lo];
    std::size_t rest = code - info.base;
    Atom a{info.pred, std::vector<Term>(info.arity, Term::cst(""))};
    for (std::size_t i = info.arity; i-- > 0;) {
      a.args[i] = Term::cst(consts[rest % consts.size()]);
      rest /= consts.size();
    }
    return a;
  }
};

// A ground clause instance in code form.
struct GroundInstance {
  std::size_t clause_index = 0;  // 1-based
  std::size_t head = 0;
  std::vector<std::size_t> body;
};

// Compiled per-clause grounding: each atom becomes a fixed offset plus
// weighted variable slots; enumerating assignments is then pure arithmetic.
inline void ground_program(const Program& p, const GroundSpace& space,
                           std::vector<GroundInstance>& out) {
  std::size_t m = space.consts.size();
  for (std::size_t k = 1; k <= p.clauses.size(); ++k) {
    const Clause& c = p.clauses[k - 1];
    std::vector<std::string> vars = vars_of(c);
    std::map<std::string, std::size_t> var_slot;
    for (std::size_t i = 0; i < vars.size(); ++i) var_slot.emplace(vars[i], i);

    struct AtomTemplate {
      std::size_t fixed = 0;
      std::vector<std::pair<std::size_t, std::size_t>> var_parts;  // slot, weight
    };
    auto compile = [&](const Atom& a) {
      AtomTemplate t;
      auto pit = space.pred_index.find(a.pred);
      t.fixed = space.preds[pit->second].base;
      std::size_t weight = 1;
      for (std::size_t i = a.args.size(); i-- > 0;) {
        const Term& arg = a.args[i];
        if (arg.is_var())
          t.var_parts.emplace_back(var_slot[arg.name], weight);
        else
          t.fixed += space.const_index.at(arg.name) * weight;
        weight *= m;
      }
      return t;
    };

    AtomTemplate head = compile(c.head);
    std::vector<AtomTemplate> body;
    body.reserve(c.body.size());
    for (const Atom& b : c.body) body.push_back(compile(b));

    auto eval = [](const AtomTemplate& t, const std::vector<std::size_t>& assign) {
      std::size_t code = t.fixed;
      for (const auto& [slot, weight] : t.var_parts) code += assign[slot] * weight;
      return code;
    };

    std::vector<std::size_t> assign(vars.size(), 0);
    for (;;) {
      GroundInstance inst;
      inst.clause_index = k;
      inst.head = eval(head, assign);
      inst.body.reserve(body.size());
      for (const AtomTemplate& b : body) inst.body.push_back(eval(b, assign));
      out.push_back(std::move(inst));
      std::size_t i = vars.size();
      bool done = true;
      while (i-- > 0) {
        if (++assign[i] < m) {
          done = false;
          break;
        }
        assign[i] = 0;
      }
      if (done) break;
    }
  }
}

}  // namespace detail

// Fixpoint of the immediate-consequence operator over the grounded program,
// starting from the empty set. Naive recomputes every round from the full
// current set; semi-naive only fires instances touching the previous
// round's delta. Both produce the same model and the same provenance.
inline GroundModel least_model(const Program& p,
                               const std::set<std::string>& universe,
                               Strategy strategy = Strategy::seminaive) {
  if (!is_datalog(p)) throw NonDatalogError("least_model requires Datalog");
  if (universe.empty()) throw Error("least_model requires a non-empty universe");

  detail::GroundSpace space(p, universe);
  std::vector<detail::GroundInstance> instances;
  detail::ground_program(p, space, instances);

  std::vector<std::uint8_t> in(space.total, 0);
  struct Prov {
    std::size_t inst = 0;
    std::size_t round = 0;
  };
  std::map<std::size_t, Prov> prov;

  auto fires = [&in](const detail::GroundInstance& inst) {
    for (std::size_t b : inst.body)
      if (!in[b]) return false;
    return true;
  };

  std::size_t round = 0;
  if (strategy == Strategy::naive) {
    for (;;) {
      ++round;
      std::vector<std::pair<std::size_t, std::size_t>> fired;  // inst idx, head
      for (std::size_t i = 0; i < instances.size(); ++i)
        if (!in[instances[i].head] && fires(instances[i]))
          fired.emplace_back(i, instances[i].head);
      bool changed = false;
      for (const auto& [i, head] : fired) {
        if (in[head]) continue;
        in[head] = 1;
        prov.emplace(head, Prov{i, round});
        changed = true;
      }
      if (!changed) break;
    }
  } else {
    // Index instances by body atom so each round only revisits candidates.
    std::map<std::size_t, std::vector<std::size_t>> by_body;
    std::vector<std::size_t> facts;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (instances[i].body.empty()) facts.push_back(i);
      for (std::size_t b : instances[i].body) by_body[b].push_back(i);
    }
    std::vector<std::size_t> delta;
    ++round;
    for (std::size_t i : facts) {
      std::size_t head = instances[i].head;
      if (in[head]) continue;
      in[head] = 1;
      prov.emplace(head, Prov{i, round});
      delta.push_back(head);
    }
    while (!delta.empty()) {
      ++round;
      std::set<std::size_t> candidates;
      for (std::size_t d : delta) {
        auto it = by_body.find(d);
        if (it == by_body.end()) continue;
        candidates.insert(it->second.begin(), it->second.end());
      }
      std::vector<std::pair<std::size_t, std::size_t>> fired;
      for (std::size_t i : candidates)
        if (!in[instances[i].head] && fires(instances[i]))
          fired.emplace_back(i, instances[i].head);
      delta.clear();
      for (const auto& [i, head] : fired) {
        if (in[head]) continue;
        in[head] = 1;
        prov.emplace(head, Prov{i, round});
        delta.push_back(head);
      }
    }
  }

  GroundModel model;
  model.universe = universe;
  model.strategy = strategy;
  for (std::size_t code = 0; code < space.total; ++code)
    if (in[code]) model.atoms.insert(space.decode(code));
  for (const auto& [code, pr] : prov) {
    const detail::GroundInstance& inst = instances[pr.inst];
    GroundModel::Justification j;
    j.clause_index = inst.clause_index;
    j.round = pr.round;
    j.body.reserve(inst.body.size());
    for (std::size_t b : inst.body) j.body.push_back(space.decode(b));
    model.provenance.emplace(space.decode(code), std::move(j));
  }
  return model;
}

enum class Entailment { yes, no, unknown };

// Decides P |= A. Exact for Datalog programs and ground atoms (least-model
// membership); otherwise falls back to budgeted top-down search, which can
// only answer yes (an answer was found), no (the whole LD-tree failed), or
// unknown (budget exhausted). For a non-ground atom the top-down route asks
// whether some instance is entailed.
inline Entailment entails(const Program& p, const Atom& a, const Budget& b = {}) {
  Query q{{a}};
  if (is_datalog(p) && is_datalog(a) && is_ground(a)) {
    GroundModel m = least_model(p, herbrand_universe(p, q));
    return m.atoms.count(a) ? Entailment::yes : Entailment::no;
  }
  SolveResult r = ld_solve(p, q, b);
  if (!r.answers.empty()) return Entailment::yes;
  return r.complete ? Entailment::no : Entailment::unknown;
}

// A proof tree for a model atom, reading off the recorded first-firing
// clause instances.
inline ProofTree build_proof_tree(const Program& p, const Atom& a,
                                  const GroundModel& m) {
  (void)p;
  const GroundModel::Justification* j = m.justification(a);
  if (!m.atoms.count(a) || !j)
    throw NotEntailedError("atom " + a.pred.name + " is not in the model");
  ProofTree t{a, {}};
  t.children.reserve(j->body.size());
  for (const Atom& b : j->body) t.children.push_back(build_proof_tree(p, b, m));
  return t;
}

// True iff every node with children c1..cn is an instance of a program
// clause H :- B1,...,Bn (leaves must instantiate bodyless clauses).
inline bool check_proof_tree(const Program& p, const ProofTree& t) {
  bool node_ok = false;
  for (const Clause& c : p.clauses) {
    if (c.body.size() != t.children.size()) continue;
    std::map<std::string, Term> bind;
    if (!detail::match_atom(c.head, t.root, bind)) continue;
    bool ok = true;
    for (std::size_t i = 0; i < c.body.size(); ++i)
      if (!detail::match_atom(c.body[i], t.children[i].root, bind)) {
        ok = false;
        break;
      }
    if (ok) {
      node_ok = true;
      break;
    }
  }
  if (!node_ok) return false;
  for (const ProofTree& c : t.children)
    if (!check_proof_tree(p, c)) return false;
  return true;
}

namespace detail {

struct StripResult {
  ProofTree main;
  std::vector<ProofTree> fragments;
};

inline std::vector<ProofTree> strip_forest(const ProofTree& magic_node);

inline StripResult strip_node(const ProofTree& original_node) {
  StripResult r;
  r.main.root = original_node.root;
  for (const ProofTree& c : original_node.children) {
    if (c.root.pred.ns == Ns::original) {
      StripResult sub = strip_node(c);
      r.main.children.push_back(std::move(sub.main));
      for (ProofTree& f : sub.fragments) r.fragments.push_back(std::move(f));
    } else {
      for (ProofTree& f : strip_forest(c)) r.fragments.push_back(std::move(f));
    }
  }
  return r;
}

inline std::vector<ProofTree> strip_forest(const ProofTree& magic_node) {
  std::vector<ProofTree> out;
  for (const ProofTree& c : magic_node.children) {
    if (c.root.pred.ns == Ns::original) {
      StripResult sub = strip_node(c);
      out.push_back(std::move(sub.main));
      for (ProofTree& f : sub.fragments) out.push_back(std::move(f));
    } else {
      for (ProofTree& f : strip_forest(c)) out.push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace detail

// Deletes every magic-namespace node from a proof tree over a transformed
// program. Original-namespace nodes keep their original-namespace children;
// the original fragments buried inside deleted magic subtrees are returned
// as separate trees. When the root is original-namespace, the first result
// is a proof tree for the source program rooted at it.
inline std::vector<ProofTree> strip_magic(const Program& magic_program,
                                          const ProofTree& t) {
  if (!check_proof_tree(magic_program, t))
    throw InvalidTreeError("tree is not a proof tree of the given program");
  if (t.root.pred.ns == Ns::original) {
    detail::StripResult r = detail::strip_node(t);
    std::vector<ProofTree> out;
    out.push_back(std::move(r.main));
    for (ProofTree& f : r.fragments) out.push_back(std::move(f));
    return out;
  }
  return detail::strip_forest(t);
}

}  // namespace magiclp
