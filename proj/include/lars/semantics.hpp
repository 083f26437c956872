// ============================================================================
// include/lars/semantics.hpp — Reference semantics and answer-stream oracle
// ============================================================================
//
// Design notes
// ------------
// This module evaluates LARS programs directly from the definitions, with no
// shortcuts shared with the engine. It serves as the correctness oracle in
// tests: an exhaustive enumerator over candidate intensional atoms, checking
// each candidate interpretation for modelhood and FLP minimality.
//
// Satisfaction at time t over an interpretation M = (I, B):
//   a          a in I(t) or a in B
//   @T' a      T' in timeline and a in I(T') or a in B
//   [w] * a    apply the window at t, then evaluate * inside the snapshot;
//              background does not leak into windows.
// Time windows slice I by time points. Tuple windows slice the *data* tick
// stream: they count arriving signals, never inferences, so the snapshot of
// a tuple window contains extensional atoms only.
//
// An interpretation I supersets the data D, coincides with it on extensional
// atoms, and is an answer stream at t when M is a minimal model of the reduct
// { r | M,t satisfies body(r) }, minimality over pointwise-smaller
// interpretations on the same timeline.
// ============================================================================

#ifndef LARS_SEMANTICS_HPP
#define LARS_SEMANTICS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lars/atom.hpp"
#include "lars/parser.hpp"
#include "lars/program.hpp"
#include "lars/stream.hpp"
#include "lars/subst.hpp"

namespace lars {

// ── Stream-level time window ────────────────────────────────────────────────

// Timeline [max(t1, t-n), t]; evaluation restricted pointwise.
inline Stream time_window(const Stream& s, TimePoint t, std::int64_t n) {
  if (!s.in_timeline(t))
    throw std::invalid_argument("time_window: time outside timeline");
  if (n < 0) throw std::invalid_argument("time_window: negative size");
  Stream out = Stream::empty(std::max(s.t_begin, t - n), t);
  for (TimePoint u = out.t_begin; u <= out.t_end; ++u)
    for (const auto& a : s.at(u)) out.add(u, a);
  return out;
}

// ── Interpretations ─────────────────────────────────────────────────────────

struct Interpretation {
  TickStream data;           // signal arrival order; extensional atoms only
  Stream stream;             // I: underlying(data) plus intensional atoms
  std::set<Atom> background;
};

inline Interpretation make_interpretation(
    const TickStream& data,
    const std::vector<std::pair<TimePoint, Atom>>& additions = {},
    std::set<Atom> background = {}) {
  Interpretation m{data, data.underlying(), std::move(background)};
  for (const auto& [t, a] : additions) m.stream.add(t, a);
  return m;
}

// ── Satisfaction ────────────────────────────────────────────────────────────

namespace detail {

inline Tick anchor_tick(const TickStream& s, TimePoint t) {
  for (std::size_t i = s.entries.size(); i-- > 0;)
    if (s.entries[i].tick.time == t) return s.entries[i].tick;
  throw std::invalid_argument("anchor: time not covered by tick stream");
}

inline bool modality_holds(const Stream& snap, Modality mod, const Atom& a,
                           const Term& at_time) {
  switch (mod) {
    case Modality::Diamond:
      for (TimePoint u = snap.t_begin; u <= snap.t_end; ++u)
        if (snap.at(u).count(a)) return true;
      return false;
    case Modality::Box:
      for (TimePoint u = snap.t_begin; u <= snap.t_end; ++u)
        if (!snap.at(u).count(a)) return false;
      return true;
    case Modality::At: {
      if (!at_time.is_int()) return false;
      TimePoint u = at_time.num;
      return snap.in_timeline(u) && snap.at(u).count(a) > 0;
    }
  }
  return false;
}

}  // namespace detail

inline bool satisfies(const Interpretation& m, TimePoint t,
                      const ExtendedAtom& e) {
  if (!m.stream.in_timeline(t))
    throw std::invalid_argument("satisfies: time outside timeline");
  switch (e.form) {
    case ExtendedAtom::Form::Plain:
      return m.stream.at(t).count(e.atom) > 0 || m.background.count(e.atom) > 0;
    case ExtendedAtom::Form::At: {
      if (!e.at_time.is_int()) return false;
      TimePoint u = e.at_time.num;
      if (!m.stream.in_timeline(u)) return false;
      return m.stream.at(u).count(e.atom) > 0 || m.background.count(e.atom) > 0;
    }
    case ExtendedAtom::Form::Window: {
      switch (e.window.kind) {
        case WindowKind::Time: {
          Stream snap = time_window(m.stream, t, e.window.size);
          return detail::modality_holds(snap, e.mod, e.atom, e.at_time);
        }
        case WindowKind::TimeInf: {
          Stream snap = time_window(m.stream, t, t - m.stream.t_begin);
          return detail::modality_holds(snap, e.mod, e.atom, e.at_time);
        }
        case WindowKind::Tuple: {
          Tick k = detail::anchor_tick(m.data, t);
          Stream snap = tuple_window(m.data, k, e.window.size).underlying();
          return detail::modality_holds(snap, e.mod, e.atom, e.at_time);
        }
      }
      return false;
    }
  }
  return false;
}

// Ground rules only: guards are evaluated under the empty substitution.
inline bool body_satisfied(const Interpretation& m, TimePoint t,
                           const LarsRule& r) {
  for (const auto& g : r.guards) {
    auto v = eval_guard(g, {});
    if (!v.has_value() || !*v) return false;
  }
  for (const auto& lit : r.body)
    if (satisfies(m, t, lit.atom) == lit.negated) return false;
  return true;
}

inline bool rule_satisfied(const Interpretation& m, TimePoint t,
                           const LarsRule& r) {
  return !body_satisfied(m, t, r) || satisfies(m, t, r.head);
}

inline bool is_model(const std::vector<LarsRule>& ground,
                     const Interpretation& m, TimePoint t) {
  for (const auto& r : ground)
    if (!rule_satisfied(m, t, r)) return false;
  return true;
}

// ── Reduct ──────────────────────────────────────────────────────────────────

inline std::vector<LarsRule> reduct(const std::vector<LarsRule>& ground,
                                    const Interpretation& m, TimePoint t) {
  std::vector<LarsRule> out;
  for (const auto& r : ground)
    if (body_satisfied(m, t, r)) out.push_back(r);
  return out;
}

// ── Grounding ───────────────────────────────────────────────────────────────

namespace detail {

inline void pool_from_atom(const Atom& a, std::set<Term>& pool) {
  for (const auto& t : a.args)
    if (t.is_ground()) pool.insert(t);
}

inline void vars_of_rule(const LarsRule& r, std::vector<std::string>& order,
                         std::set<std::string>& time_vars) {
  std::set<std::string> seen;
  auto add = [&](const Term& t) {
    if (t.is_var() && seen.insert(t.name).second) order.push_back(t.name);
  };
  auto scan = [&](const ExtendedAtom& e) {
    if (e.has_at()) {
      if (e.at_time.is_var()) time_vars.insert(e.at_time.name);
      add(e.at_time);
    }
    for (const auto& t : e.atom.args) add(t);
  };
  scan(r.head);
  for (const auto& lit : r.body) scan(lit.atom);
  for (const auto& g : r.guards) {
    add(g.lhs);
    add(g.rhs);
  }
}

inline ExtendedAtom substitute(const Subst& s, const ExtendedAtom& e) {
  ExtendedAtom out = e;
  out.atom = lars::substitute(s, e.atom);
  if (e.has_at()) out.at_time = lars::substitute(s, e.at_time);
  return out;
}

}  // namespace detail

// Full instantiation: every variable ranges over the constants occurring in
// the program, background, and data; variables used as @-times range over
// the timeline instead. Guards filter instances.
inline std::vector<LarsRule> ground_rules(const LarsProgram& p,
                                          const TickStream& d) {
  std::set<Term> pool;
  for (const auto& r : p.rules) {
    detail::pool_from_atom(r.head.atom, pool);
    for (const auto& lit : r.body) detail::pool_from_atom(lit.atom.atom, pool);
    for (const auto& g : r.guards) {
      if (g.lhs.is_ground()) pool.insert(g.lhs);
      if (g.rhs.is_ground()) pool.insert(g.rhs);
    }
  }
  for (const auto& a : p.background) detail::pool_from_atom(a, pool);
  for (const auto& e : d.entries)
    if (e.atom) detail::pool_from_atom(*e.atom, pool);

  std::vector<Term> times;
  for (TimePoint u = d.first().time; u <= d.now().time; ++u)
    times.push_back(Term::integer(u));

  std::vector<LarsRule> out;
  std::set<std::string> seen;
  for (const auto& r : p.rules) {
    std::vector<std::string> order;
    std::set<std::string> time_vars;
    detail::vars_of_rule(r, order, time_vars);

    std::vector<const std::vector<Term>*> domains;
    std::vector<Term> pool_vec(pool.begin(), pool.end());
    for (const auto& v : order)
      domains.push_back(time_vars.count(v) ? &times : &pool_vec);

    Subst subst;
    // Depth-first product over variable domains.
    std::vector<std::size_t> idx(order.size(), 0);
    std::size_t depth = 0;
    for (;;) {
      if (depth == order.size()) {
        bool ok = true;
        for (const auto& g : r.guards) {
          auto v = eval_guard(g, subst);
          if (!v.has_value() || !*v) {
            ok = false;
            break;
          }
        }
        if (ok) {
          LarsRule inst;
          inst.head = detail::substitute(subst, r.head);
          for (const auto& lit : r.body)
            inst.body.push_back(
                Literal{detail::substitute(subst, lit.atom), lit.negated});
          if (seen.insert(to_string(inst)).second) out.push_back(inst);
        }
        if (depth == 0) break;
        --depth;
        ++idx[depth];
        continue;
      }
      if (idx[depth] >= domains[depth]->size()) {
        subst.erase(order[depth]);
        idx[depth] = 0;
        if (depth == 0) break;
        --depth;
        ++idx[depth];
        continue;
      }
      subst[order[depth]] = (*domains[depth])[idx[depth]];
      ++depth;
    }
  }
  return out;
}

// ── Answer-stream enumeration ───────────────────────────────────────────────

class OracleInfeasible : public std::runtime_error {
 public:
  explicit OracleInfeasible(const std::string& msg) : std::runtime_error(msg) {}
};

struct OracleOptions {
  std::size_t candidate_cap = 24;
};

// All answer streams of p for data d at time t, exhaustively.
inline std::vector<Stream> answer_streams(const LarsProgram& p,
                                          const TickStream& d, TimePoint t,
                                          const OracleOptions& opt = {}) {
  const Stream base = d.underlying();
  if (!base.in_timeline(t))
    throw std::invalid_argument("answer_streams: time outside timeline");

  std::vector<LarsRule> ground = ground_rules(p, d);

  std::set<std::pair<TimePoint, Atom>> cand_set;
  for (const auto& r : ground) {
    if (r.head.form == ExtendedAtom::Form::Plain) {
      cand_set.insert({t, r.head.atom});
    } else if (r.head.form == ExtendedAtom::Form::At && r.head.at_time.is_int()) {
      TimePoint u = r.head.at_time.num;
      if (base.in_timeline(u)) cand_set.insert({u, r.head.atom});
    }
  }
  std::vector<std::pair<TimePoint, Atom>> cand(cand_set.begin(),
                                               cand_set.end());
  if (cand.size() > opt.candidate_cap)
    throw OracleInfeasible("oracle infeasible: " + std::to_string(cand.size()) +
                           " candidate atoms exceed the cap of " +
                           std::to_string(opt.candidate_cap));

  std::set<Atom> background(p.background.begin(), p.background.end());
  auto interp_of = [&](std::uint64_t mask) {
    Interpretation m{d, base, background};
    for (std::size_t i = 0; i < cand.size(); ++i)
      if (mask & (std::uint64_t{1} << i))
        m.stream.add(cand[i].first, cand[i].second);
    return m;
  };

  std::vector<Stream> result;
  const std::uint64_t total = std::uint64_t{1} << cand.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Interpretation m = interp_of(mask);
    if (!is_model(ground, m, t)) continue;

    std::vector<LarsRule> red = reduct(ground, m, t);
    bool minimal = true;
    if (mask != 0) {
      for (std::uint64_t sub = (mask - 1) & mask;; sub = (sub - 1) & mask) {
        if (is_model(red, interp_of(sub), t)) {
          minimal = false;
          break;
        }
        if (sub == 0) break;
      }
    }
    if (minimal) result.push_back(m.stream);
  }

  std::sort(result.begin(), result.end(), [](const Stream& a, const Stream& b) {
    return a.eval < b.eval;
  });
  return result;
}

// The intensional additions of an answer stream relative to the data.
inline std::vector<std::pair<TimePoint, Atom>> additions(const Stream& answer,
                                                         const Stream& data) {
  std::vector<std::pair<TimePoint, Atom>> out;
  for (const auto& [u, atoms] : answer.eval)
    for (const auto& a : atoms)
      if (!data.at(u).count(a)) out.push_back({u, a});
  return out;
}

}  // namespace lars

#endif  // LARS_SEMANTICS_HPP
