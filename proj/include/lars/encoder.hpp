// ============================================================================
// include/lars/encoder.hpp — LARS to ASP translation for one-shot solving
// ============================================================================
//
// Design notes
// ------------
// Translates a validated LARS program for evaluation at a fixed time t into
// a normal logic program:
//
//   - bridge rules tie each predicate's plain form to its time-pinned form
//     at the current time, a(X..) ← now(N), a_at(X..,N) and back
//   - every rule becomes a base rule over encoded body atoms plus a family
//     of window rules deriving each encoded window atom
//   - the stream is encoded separately as facts: time-pinned atoms,
//     tick-pinned atoms, the current count, and one tick(t,c) per tick
//
// Auxiliary predicates are derived deterministically from the rule index,
// body position, window, and modality, so identical inputs give identical
// programs. User programs cannot collide with them: validation reserves
// the now/cnt/tick names, the _at/_tick suffixes, and the w_/spoil_/covers_
// prefixes.
// ============================================================================

#ifndef LARS_ENCODER_HPP
#define LARS_ENCODER_HPP

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lars/asp.hpp"
#include "lars/atom.hpp"
#include "lars/program.hpp"
#include "lars/stream.hpp"

namespace lars {

// ── Pinned forms ────────────────────────────────────────────────────────────

inline Atom time_pinned(const Atom& a, const Term& time) {
  Atom out = a;
  out.pred += "_at";
  out.args.push_back(time);
  return out;
}

inline Atom tick_pinned(const Atom& a, const Term& time, const Term& count) {
  Atom out = a;
  out.pred += "_tick";
  out.args.push_back(time);
  out.args.push_back(count);
  return out;
}

namespace detail {

// Tag naming one window atom occurrence: rule and body position (1-based),
// window kind and size, modality, predicate. Injective by construction.
inline std::string window_tag(const ExtendedAtom& e, int rule_index,
                              int body_index) {
  std::string kind;
  switch (e.window.kind) {
    case WindowKind::Time:
      kind = "t" + std::to_string(e.window.size);
      break;
    case WindowKind::Tuple:
      kind = "h" + std::to_string(e.window.size);
      break;
    case WindowKind::TimeInf:
      throw std::invalid_argument("unbounded window atoms are not encodable");
  }
  std::string mod;
  switch (e.mod) {
    case Modality::At:
      mod = "a";
      break;
    case Modality::Diamond:
      mod = "d";
      break;
    case Modality::Box:
      mod = "b";
      break;
  }
  return "r" + std::to_string(rule_index) + "_b" + std::to_string(body_index) +
         "_" + kind + "_" + mod + "_" + e.atom.pred;
}

// Synthetic variable that avoids the variables already used by the window
// atom itself.
inline Term fresh_var(const std::string& base,
                      const std::set<std::string>& taken) {
  std::string name = base;
  while (taken.count(name)) name += "X";
  return Term::var(name);
}

inline std::set<std::string> own_vars(const ExtendedAtom& e) {
  std::set<std::string> vars;
  for (const auto& t : e.atom.args)
    if (t.is_var()) vars.insert(t.name);
  if (e.has_at() && e.at_time.is_var()) vars.insert(e.at_time.name);
  return vars;
}

}  // namespace detail

// Encoded form of one window atom occurrence: the head atom of its window
// rules. Diamond and box drop the time argument, @ keeps it.
inline Atom window_atom(const ExtendedAtom& e, int rule_index, int body_index) {
  Atom out;
  out.pred = "w_" + detail::window_tag(e, rule_index, body_index);
  out.args = e.atom.args;
  if (e.mod == Modality::At) out.args.push_back(e.at_time);
  return out;
}

// atm(e): the ordinary atom standing in for an extended atom.
inline Atom encoded_atom(const ExtendedAtom& e, int rule_index,
                         int body_index) {
  switch (e.form) {
    case ExtendedAtom::Form::Plain:
      return e.atom;
    case ExtendedAtom::Form::At:
      return time_pinned(e.atom, e.at_time);
    case ExtendedAtom::Form::Window:
      return window_atom(e, rule_index, body_index);
  }
  throw std::logic_error("unreachable");
}

// ── Base rule ───────────────────────────────────────────────────────────────

inline AspRule base_rule(const LarsRule& r, int rule_index) {
  AspRule out;
  out.head = encoded_atom(r.head, rule_index, 0);
  int body_index = 0;
  for (const auto& lit : r.body) {
    ++body_index;
    Atom a = encoded_atom(lit.atom, rule_index, body_index);
    if (lit.negated)
      out.neg.push_back(std::move(a));
    else
      out.pos.push_back(std::move(a));
  }
  out.guards = r.guards;
  return out;
}

// ── Window rules ────────────────────────────────────────────────────────────

inline std::vector<AspRule> window_rules(const ExtendedAtom& e, int rule_index,
                                         int body_index) {
  std::vector<AspRule> out;
  if (e.form != ExtendedAtom::Form::Window) return out;

  const std::string tag = detail::window_tag(e, rule_index, body_index);
  const Atom head = window_atom(e, rule_index, body_index);
  const Atom spoil = Atom::make("spoil_" + tag, e.atom.args);
  const std::set<std::string> taken = detail::own_vars(e);
  const long long n = e.window.size;

  if (e.window.kind == WindowKind::Time) {
    const Term nn = detail::fresh_var("NN", taken);
    const Term now_t = detail::fresh_var("T", taken);
    switch (e.mod) {
      case Modality::At:
        for (long long i = 0; i <= n; ++i) {
          AspRule r;
          r.head = head;
          r.pos = {Atom::make("now", {nn}), time_pinned(e.atom, e.at_time)};
          r.guards = {Guard{e.at_time, CmpOp::Eq, nn, -i}};
          out.push_back(std::move(r));
        }
        break;
      case Modality::Diamond:
        for (long long i = 0; i <= n; ++i) {
          AspRule r;
          r.head = head;
          r.pos = {Atom::make("now", {nn}), time_pinned(e.atom, now_t)};
          r.guards = {Guard{now_t, CmpOp::Eq, nn, -i}};
          out.push_back(std::move(r));
        }
        break;
      case Modality::Box: {
        AspRule base;
        base.head = head;
        base.pos = {e.atom};
        base.neg = {spoil};
        out.push_back(std::move(base));
        for (long long i = 1; i <= n; ++i) {
          AspRule r;
          r.head = spoil;
          r.pos = {e.atom, Atom::make("now", {nn})};
          r.neg = {time_pinned(e.atom, now_t)};
          r.guards = {Guard{now_t, CmpOp::Eq, nn, -i}};
          out.push_back(std::move(r));
        }
        break;
      }
    }
    return out;
  }

  // Tuple windows, over tick-pinned input atoms.
  const Term cc = detail::fresh_var("CC", taken);
  const Term tt = detail::fresh_var("T", taken);
  const Term dd = detail::fresh_var("D", taken);
  const Term dp = detail::fresh_var("DP", taken);
  switch (e.mod) {
    case Modality::At:
      for (long long j = 0; j < n; ++j) {
        AspRule r;
        r.head = head;
        r.pos = {Atom::make("cnt", {cc}), tick_pinned(e.atom, e.at_time, dd)};
        r.guards = {Guard{dd, CmpOp::Eq, cc, -j}};
        out.push_back(std::move(r));
      }
      break;
    case Modality::Diamond:
      for (long long j = 0; j < n; ++j) {
        AspRule r;
        r.head = head;
        r.pos = {Atom::make("cnt", {cc}), tick_pinned(e.atom, tt, dd)};
        r.guards = {Guard{dd, CmpOp::Eq, cc, -j}};
        out.push_back(std::move(r));
      }
      break;
    case Modality::Box: {
      AspRule base;
      base.head = head;
      base.pos = {e.atom};
      base.neg = {spoil};
      out.push_back(std::move(base));

      // Some time point in the window's range lacks the atom entirely.
      AspRule range;
      range.head = spoil;
      range.pos = {e.atom, Atom::make("cnt", {cc}), Atom::make("tick", {tt, dd})};
      range.neg = {time_pinned(e.atom, tt)};
      range.guards = {Guard{dd, CmpOp::Geq, cc, -(n - 1)},
                      Guard{dd, CmpOp::Leq, cc, 0}};
      out.push_back(std::move(range));

      // The atom occurs at the cut-off time point, but before the cut.
      AspRule cut;
      cut.head = spoil;
      cut.pos = {e.atom, Atom::make("cnt", {cc}), Atom::make("tick", {tt, dd}),
                 tick_pinned(e.atom, tt, dp)};
      cut.guards = {Guard{dd, CmpOp::Eq, cc, -(n - 1)},
                    Guard{dp, CmpOp::Lt, dd, 0}};
      out.push_back(std::move(cut));
      break;
    }
  }
  return out;
}

// ── Program translation ─────────────────────────────────────────────────────

// Predicates of p in first-occurrence order, scanning each rule's body
// before its head.
inline std::vector<PredSig> bridge_predicates(const LarsProgram& p) {
  std::vector<PredSig> out;
  std::set<PredSig> seen;
  auto add = [&](const Atom& a) {
    PredSig sig{a.pred, a.arity()};
    if (seen.insert(sig).second) out.push_back(sig);
  };
  for (const auto& r : p.rules) {
    for (const auto& lit : r.body) add(lit.atom.atom);
    add(r.head.atom);
  }
  return out;
}

inline AspProgram lars_to_asp(const LarsProgram& p, TimePoint t) {
  ValidationReport report = validate(p);
  if (!report.ok()) throw std::invalid_argument(report.to_string());

  AspProgram out;

  // Q: bridge rules per predicate.
  const Term nn = Term::var("NN");
  for (const auto& sig : bridge_predicates(p)) {
    Atom plain;
    plain.pred = sig.name;
    for (std::size_t i = 1; i <= sig.arity; ++i)
      plain.args.push_back(Term::var("X" + std::to_string(i)));
    Atom pinned = time_pinned(plain, nn);
    out.rules.push_back(
        AspRule{plain, {Atom::make("now", {nn}), pinned}, {}, {}});
    out.rules.push_back(
        AspRule{pinned, {Atom::make("now", {nn}), plain}, {}, {}});
  }

  // Background data as plain facts.
  for (const auto& b : p.background) out.rules.push_back(AspRule{b, {}, {}, {}});

  // R: base rule plus window rules per LARS rule.
  for (std::size_t ri = 0; ri < p.rules.size(); ++ri) {
    const LarsRule& r = p.rules[ri];
    const int rule_index = static_cast<int>(ri) + 1;
    out.rules.push_back(base_rule(r, rule_index));
    for (std::size_t bi = 0; bi < r.body.size(); ++bi) {
      auto rules =
          window_rules(r.body[bi].atom, rule_index, static_cast<int>(bi) + 1);
      for (auto& wr : rules) out.rules.push_back(std::move(wr));
    }
  }

  out.rules.push_back(
      AspRule{Atom::make("now", {Term::integer(t)}), {}, {}, {}});
  return out;
}

// ── Stream encoding ─────────────────────────────────────────────────────────

// Facts encoding a data tick stream: time-pinned atoms, tick-pinned atoms,
// the current count, and one tick(t,c) per tick.
inline std::vector<Atom> encode_stream(const TickStream& d) {
  std::vector<Atom> out;
  const Stream s = d.underlying();
  for (TimePoint t = s.t_begin; t <= s.t_end; ++t)
    for (const auto& a : s.at(t)) out.push_back(time_pinned(a, Term::integer(t)));
  for (const auto& entry : d.entries)
    if (entry.atom.has_value())
      out.push_back(tick_pinned(*entry.atom, Term::integer(entry.tick.time),
                                Term::integer(entry.tick.count)));
  out.push_back(Atom::make("cnt", {Term::integer(d.now().count)}));
  for (const auto& entry : d.entries)
    out.push_back(Atom::make("tick", {Term::integer(entry.tick.time),
                                      Term::integer(entry.tick.count)}));
  return out;
}

inline void append_facts(AspProgram& p, const std::vector<Atom>& facts) {
  for (const auto& a : facts) p.rules.push_back(AspRule{a, {}, {}, {}});
}

}  // namespace lars

#endif  // LARS_ENCODER_HPP
