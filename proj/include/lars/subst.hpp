// ============================================================================
// include/lars/subst.hpp — Substitutions, matching, and guard evaluation
// ============================================================================
//
// Design notes
// ------------
// A substitution maps variable names to ground terms. Matching unifies a
// pattern atom against a ground atom, extending the substitution in place;
// callers copy before a tentative match to backtrack. Guards compare two
// ground terms; integers compare numerically (with the optional offset on
// the right side), everything else falls back to the total term order.
// ============================================================================

#ifndef LARS_SUBST_HPP
#define LARS_SUBST_HPP

#include <map>
#include <optional>
#include <string>

#include "lars/atom.hpp"
#include "lars/program.hpp"

namespace lars {

using Subst = std::map<std::string, Term>;

inline Term substitute(const Subst& s, const Term& t) {
  if (!t.is_var()) return t;
  auto it = s.find(t.name);
  return it == s.end() ? t : it->second;
}

inline Atom substitute(const Subst& s, const Atom& a) {
  Atom out;
  out.pred = a.pred;
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(substitute(s, t));
  return out;
}

// Extends s so that pattern matches ground; false on clash. s may be left
// partially extended on failure; copy to backtrack.
inline bool match(const Term& pattern, const Term& ground, Subst& s) {
  Term p = substitute(s, pattern);
  if (p.is_var()) {
    s[p.name] = ground;
    return true;
  }
  return p == ground;
}

inline bool match(const Atom& pattern, const Atom& ground, Subst& s) {
  if (pattern.pred != ground.pred || pattern.args.size() != ground.args.size())
    return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!match(pattern.args[i], ground.args[i], s)) return false;
  return true;
}

// nullopt when either side is still a variable under s.
inline std::optional<bool> eval_guard(const Guard& g, const Subst& s) {
  Term l = substitute(s, g.lhs);
  Term r = substitute(s, g.rhs);
  if (l.is_var() || r.is_var()) return std::nullopt;
  if (g.offset != 0) {
    if (!l.is_int() || !r.is_int()) return false;
    r = Term::integer(r.num + g.offset);
  }
  bool lt = l < r;
  bool gt = r < l;
  switch (g.op) {
    case CmpOp::Eq: return !lt && !gt;
    case CmpOp::Neq: return lt || gt;
    case CmpOp::Lt: return lt;
    case CmpOp::Leq: return !gt;
    case CmpOp::Gt: return gt;
    case CmpOp::Geq: return !lt;
  }
  return false;
}

}  // namespace lars

#endif  // LARS_SUBST_HPP
