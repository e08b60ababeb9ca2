#pragma once

// Text rendering. parse(render(x)) reproduces x structurally (magic
// predicates need permissive parse mode).

#include <string>
#include <vector>

#include "magiclp/ast.hpp"
#include "magiclp/subst.hpp"

namespace magiclp {

inline std::string pred_name(const Pred& p) {
  return p.ns == Ns::magic ? "pre_" + p.name : p.name;
}

inline std::string render(const Term& t) {
  if (!t.is_compound()) return t.name;
  std::string out = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ",";
    out += render(t.args[i]);
  }
  return out + ")";
}

inline std::string render(const Atom& a) {
  std::string out = pred_name(a.pred);
  if (a.args.empty()) return out;
  out += "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += render(a.args[i]);
  }
  return out + ")";
}

inline std::string render(const Clause& c) {
  std::string out = render(c.head);
  if (!c.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (i) out += ", ";
      out += render(c.body[i]);
    }
  }
  return out + ".";
}

inline std::string render(const Program& p) {
  std::string out;
  for (const Clause& c : p.clauses) {
    out += render(c);
    out += "\n";
  }
  return out;
}

inline std::string render(const Query& q) {
  std::string out = "?- ";
  for (std::size_t i = 0; i < q.atoms.size(); ++i) {
    if (i) out += ", ";
    out += render(q.atoms[i]);
  }
  return out + ".";
}

inline std::string render(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += v + " = " + render(t);
  }
  return out + "}";
}

}  // namespace magiclp
