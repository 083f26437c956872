// ============================================================================
// include/lars/asp.hpp — ASP rules, programs, and grounding
// ============================================================================
//
// Design notes
// ------------
// An AspRule is a normal rule over possibly non-ground atoms with comparison
// guards. Grounding computes a positive envelope (least model ignoring
// negation), instantiates every rule against it, and resolves all guards:
//
//   - equality guards with one unbound side act as assignments; a binding
//     that computes a negative integer prunes the instance, which clamps
//     the encoders' tick arithmetic at the start of the timeline
//   - other guards are tests
//   - negative body atoms outside the envelope can never hold and are
//     dropped from the instance
//
// Join order is greedy (most bound variables first), so the single-match
// clock atoms bind their variables before the wide scans. Output order is
// canonical: deduplicated, structurally sorted.
// ============================================================================

#ifndef LARS_ASP_HPP
#define LARS_ASP_HPP

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "lars/atom.hpp"
#include "lars/program.hpp"
#include "lars/subst.hpp"

namespace lars {

// ── Rules ───────────────────────────────────────────────────────────────────

struct AspRule {
  Atom head;
  std::vector<Atom> pos;
  std::vector<Atom> neg;
  std::vector<Guard> guards;

  friend bool operator==(const AspRule& a, const AspRule& b) {
    return a.head == b.head && a.pos == b.pos && a.neg == b.neg &&
           a.guards == b.guards;
  }
};

struct AspProgram {
  std::vector<AspRule> rules;
};

struct GroundRule {
  Atom head;
  std::vector<Atom> pos;
  std::vector<Atom> neg;

  friend bool operator<(const GroundRule& a, const GroundRule& b) {
    if (a.head != b.head) return a.head < b.head;
    if (a.pos != b.pos) return a.pos < b.pos;
    return a.neg < b.neg;
  }
  friend bool operator==(const GroundRule& a, const GroundRule& b) {
    return a.head == b.head && a.pos == b.pos && a.neg == b.neg;
  }
};

struct GroundProgram {
  std::vector<GroundRule> rules;
};

// ── Text dump ───────────────────────────────────────────────────────────────

inline std::string to_text(const AspRule& r) {
  std::string out = r.head.to_string();
  bool first = true;
  auto sep = [&]() -> std::string {
    if (first) {
      first = false;
      return " :- ";
    }
    return ", ";
  };
  for (const auto& a : r.pos) out += sep() + a.to_string();
  for (const auto& a : r.neg) out += sep() + "not " + a.to_string();
  for (const auto& g : r.guards) out += sep() + g.to_string();
  return out + ".";
}

inline std::string to_text(const AspProgram& p) {
  std::string out;
  for (const auto& r : p.rules) out += to_text(r) + "\n";
  return out;
}

inline std::string to_text(const GroundRule& r) {
  return to_text(AspRule{r.head, r.pos, r.neg, {}});
}

inline std::string to_text(const GroundProgram& p) {
  std::string out;
  for (const auto& r : p.rules) out += to_text(r) + "\n";
  return out;
}

// ── Grounding ───────────────────────────────────────────────────────────────

namespace detail {

struct AtomStore {
  std::map<std::string, std::vector<Atom>> by_pred;  // key: pred/arity
  std::unordered_set<Atom, AtomHash> all;

  static std::string key(const Atom& a) {
    return a.pred + "/" + std::to_string(a.args.size());
  }

  bool add(const Atom& a) {
    if (!all.insert(a).second) return false;
    by_pred[key(a)].push_back(a);
    return true;
  }

  const std::vector<Atom>& candidates(const Atom& pattern) const {
    static const std::vector<Atom> kEmpty;
    auto it = by_pred.find(key(pattern));
    return it == by_pred.end() ? kEmpty : it->second;
  }
};

inline bool match_args(const Atom& pattern, const Atom& ground, Subst& s) {
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!match(pattern.args[i], ground.args[i], s)) return false;
  return true;
}

// Applies every decidable guard. Equality guards with exactly one unbound
// side bind that variable; a binding to a negative integer prunes (tick
// arithmetic never reaches before the start of the timeline). Returns false
// to prune the instance.
inline bool settle_guards(const std::vector<Guard>& guards,
                          std::vector<bool>& used, Subst& s) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < guards.size(); ++i) {
      if (used[i]) continue;
      const Guard& g = guards[i];
      if (auto v = eval_guard(g, s); v.has_value()) {
        if (!*v) return false;
        used[i] = true;
        progress = true;
        continue;
      }
      if (g.op != CmpOp::Eq) continue;
      Term l = substitute(s, g.lhs);
      Term r = substitute(s, g.rhs);
      if (l.is_var() && !r.is_var()) {
        if (g.offset != 0) {
          if (!r.is_int()) return false;
          r = Term::integer(r.num + g.offset);
        }
        if (r.is_int() && r.num < 0) return false;
        s[l.name] = r;
        used[i] = true;
        progress = true;
      } else if (r.is_var() && !l.is_var()) {
        // l = r + offset, so r = l - offset.
        Term bound = l;
        if (g.offset != 0) {
          if (!l.is_int()) return false;
          bound = Term::integer(l.num - g.offset);
        }
        if (bound.is_int() && bound.num < 0) return false;
        s[r.name] = bound;
        used[i] = true;
        progress = true;
      }
    }
  }
  return true;
}

template <typename Emit>
void instantiate(const AspRule& r, const AtomStore& store, const Emit& emit) {
  struct Frame {
    Subst subst;
    std::vector<bool> pos_done;
    std::vector<bool> guard_used;
  };
  std::vector<Frame> stack;
  {
    Frame f{{}, std::vector<bool>(r.pos.size(), false),
            std::vector<bool>(r.guards.size(), false)};
    if (settle_guards(r.guards, f.guard_used, f.subst))
      stack.push_back(std::move(f));
  }
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();

    // Pick the undone positive literal with the most bound variables.
    int best = -1;
    int best_bound = -1;
    for (std::size_t i = 0; i < r.pos.size(); ++i) {
      if (f.pos_done[i]) continue;
      int bound = 0;
      for (const auto& t : r.pos[i].args)
        if (!substitute(f.subst, t).is_var()) ++bound;
      if (bound > best_bound) {
        best_bound = bound;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) {
      for (std::size_t i = 0; i < r.guards.size(); ++i)
        if (!f.guard_used[i])
          throw std::invalid_argument("grounding: guard over unbound variables in " +
                                      to_text(r));
      emit(f.subst);
      continue;
    }

    const Atom pattern = substitute(f.subst, r.pos[best]);
    for (const Atom& cand : store.candidates(pattern)) {
      Frame next = f;
      if (!match_args(pattern, cand, next.subst)) continue;
      next.pos_done[best] = true;
      if (!settle_guards(r.guards, next.guard_used, next.subst)) continue;
      stack.push_back(std::move(next));
    }
  }
}

}  // namespace detail

// Grounds p: every rule instantiated over the positive envelope, guards
// resolved, negative literals that can never hold dropped.
inline GroundProgram ground_program(const AspProgram& p) {
  detail::AtomStore store;

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : p.rules) {
      detail::instantiate(r, store, [&](const Subst& s) {
        Atom h = substitute(s, r.head);
        if (!h.is_ground())
          throw std::invalid_argument("grounding: unsafe head in " + to_text(r));
        if (store.add(h)) changed = true;
      });
    }
  }

  std::set<GroundRule> out;
  for (const auto& r : p.rules) {
    detail::instantiate(r, store, [&](const Subst& s) {
      GroundRule g;
      g.head = substitute(s, r.head);
      for (const auto& a : r.pos) g.pos.push_back(substitute(s, a));
      for (const auto& a : r.neg) {
        Atom n = substitute(s, a);
        if (!n.is_ground())
          throw std::invalid_argument("grounding: unsafe negative literal in " +
                                      to_text(r));
        if (store.all.count(n)) g.neg.push_back(n);
      }
      out.insert(std::move(g));
    });
  }

  GroundProgram gp;
  gp.rules.assign(out.begin(), out.end());
  return gp;
}

// Atom universe in first-occurrence order (head, then positive, then
// negative atoms, rule by rule).
inline std::vector<Atom> universe(const GroundProgram& p) {
  std::vector<Atom> out;
  std::unordered_set<Atom, AtomHash> seen;
  auto add = [&](const Atom& a) {
    if (seen.insert(a).second) out.push_back(a);
  };
  for (const auto& r : p.rules) {
    add(r.head);
    for (const auto& a : r.pos) add(a);
    for (const auto& a : r.neg) add(a);
  }
  return out;
}

}  // namespace lars

#endif  // LARS_ASP_HPP
