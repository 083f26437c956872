// ===========================================================================
// include/lars/incremental.hpp -- Incremental translation with expiring rules
//
// Design notes
//
//   Instead of re-encoding the whole program at every tick, this module keeps
//   a set of annotated rules.  Each rule carries an expiration tick: a pair
//   of a time bound and a count bound, either of which may be unbounded.  A
//   tick step emits a small batch of freshly pinned rules (stream facts,
//   bridges between plain and pinned atoms, base rules, and per-window
//   helper rules), retires every rule whose time or count bound has been
//   reached, and grounds the new batch against a cumulative store of atoms
//   seen so far.  The ground rule set is what a solver or the truth
//   maintenance network consumes; increment_tick reports the exact delta.
//
//   Durations per emitted rule family (time windows of length n, tuple
//   windows of length n, at tick (t,c)):
//
//     stream facts, base rules,            (inf, inf)   never retire
//     box-window derivation rules
//     plain/pinned bridges                 (1,   inf)   next time increment
//     time window, @ and <>                (n+1, inf)
//     time window, [] spoiler              (n,   inf)   skipped at t = 0
//     tuple window, @ and <>               (inf, n)
//     tuple window, [] spoilers + covers   (inf, n)
//
//   A re-emitted rule normally carries the expiration it already has.  The
//   one exception is the stale-tuple spoiler of a tuple box: its count
//   bound must outlive the last tick of the time point it guards, which is
//   unknown when the time point starts.  That rule keeps the count slot of
//   its tuple atom as a variable and is re-emitted at every tick of the
//   same time point, each time sliding its expiration forward; after the
//   final tick of the time point it expires in lockstep with the covers_t_
//   marker it joins on.  Expirations therefore merge by componentwise
//   maximum, and a re-emission may only extend a bound, never shorten it.
//
//   Grounding never invents constants: it joins rule bodies against atoms
//   already observed (stream facts, background data, heads of ground rules),
//   so each step reduces to lookups.  The store only grows, which makes the
//   ground set a safe over-approximation: a stale rule whose body can no
//   longer be derived does not change any answer set.  One wrinkle needs
//   care: a rule head of the form @_T a can derive a pinned atom for an
//   older time point, which may wake a still-live window rule that was
//   pinned at that time in an earlier tick.  Such templates register a
//   driver index when inserted, and new atoms re-trigger them during the
//   per-tick grounding fixpoint.
//
//   pre_ground() eliminates rule variables that feed window atoms by
//   enumerating positive plain body literals over background predicates
//   (the guards).  Guard literals stay in the instantiated bodies; decided
//   comparison guards are resolved away.  Variables under window atoms over
//   extensional predicates may stay un-instantiated (arriving signals drive
//   their instances); a variable under a window over a derived predicate
//   must be guard-covered, since no signal will ever pin it, and is an
//   error otherwise.  verbatim_templates() skips instantiation for callers
//   that want the raw rules (grounding then falls back to the
//   cumulative-store join, which handles variables fine at small scale).
//
//   An optional garbage-collection switch drops stream facts that no window
//   can still reach: arrivals are kept per tick, and a tick's facts are
//   dropped once a later tick exists whose time lies at least n_time behind
//   the current time and whose count lies at least n_count - 1 behind the
//   current count, where n_time/n_count are the largest window reaches of
//   the program (unbounded when a body @-atom reads arbitrary past times).
//   Dropping whole tick prefixes, rather than individual facts, keeps the
//   retained suffix self-consistent for the tuple-box spoiler rules.
//
//   Single writer: IncrementalState is not synchronized; callers drive one
//   tick at a time from one thread.
// ===========================================================================
#ifndef LARS_INCREMENTAL_HPP
#define LARS_INCREMENTAL_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lars/asp.hpp"
#include "lars/encoder.hpp"
#include "lars/parser.hpp"
#include "lars/program.hpp"
#include "lars/stream.hpp"
#include "lars/subst.hpp"

namespace lars {

// ── Tick annotations ───────────────────────────────────────────────────────

// Sentinel for an unbounded annotation component; prints as "inf".
constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

// A pair of bounds attached to a rule.  As a duration it counts increments;
// as an expiration it names the first tick at which the rule is stale: the
// rule retires once the current time reaches `time` or the current count
// reaches `count`.
struct TickAnn {
  std::int64_t time = kNever;
  std::int64_t count = kNever;

  static TickAnn never() { return TickAnn{}; }

  friend bool operator==(const TickAnn& a, const TickAnn& b) {
    return a.time == b.time && a.count == b.count;
  }

  std::string to_string() const {
    std::string out = time == kNever ? "inf" : std::to_string(time);
    out += ',';
    out += count == kNever ? "inf" : std::to_string(count);
    return out;
  }
};

// Expiration of a rule emitted at `at` with the given duration; an
// unbounded duration component stays unbounded.
inline TickAnn expire_at(const Tick& at, const TickAnn& duration) {
  TickAnn out;
  out.time = duration.time == kNever ? kNever : at.time + duration.time;
  out.count = duration.count == kNever ? kNever : at.count + duration.count;
  return out;
}

struct AnnotatedRule {
  TickAnn ann;
  AspRule rule;

  friend bool operator==(const AnnotatedRule& a, const AnnotatedRule& b) {
    return a.ann == b.ann && a.rule == b.rule;
  }
};

struct AnnotatedGroundRule {
  TickAnn ann;
  GroundRule rule;

  friend bool operator==(const AnnotatedGroundRule& a,
                         const AnnotatedGroundRule& b) {
    return a.ann == b.ann && a.rule == b.rule;
  }
};

// What one tick step changed.  The ground parts are what a truth
// maintenance network should apply, additions first.
struct TickDelta {
  std::vector<AnnotatedRule> pi_added;
  std::vector<AnnotatedRule> pi_removed;
  std::vector<AnnotatedGroundRule> ground_added;
  std::vector<AnnotatedGroundRule> ground_removed;
};

// ── Pre-grounded templates ──────────────────────────────────────────────────

// One instantiation of a source rule; window helper rules are still shared
// across instances because they are emitted per source rule position.
struct TemplateRule {
  LarsRule rule;
  std::size_t source_index;  // 1-based position in the source program
};

struct PreGroundedTemplates {
  LarsProgram source;
  std::vector<TemplateRule> instances;
};

namespace detail {

inline ExtendedAtom substitute_extended(const Subst& s, const ExtendedAtom& e) {
  ExtendedAtom out = e;
  out.atom = substitute(s, e.atom);
  if (out.has_at()) out.at_time = substitute(s, e.at_time);
  return out;
}

inline LarsRule substitute_lars(const Subst& s, const LarsRule& r) {
  LarsRule out;
  out.head = substitute_extended(s, r.head);
  for (const auto& l : r.body)
    out.body.push_back(Literal{substitute_extended(s, l.atom), l.negated});
  out.guards = r.guards;
  return out;
}

inline std::string pred_key(const Atom& a) {
  return a.pred + "/" + std::to_string(a.args.size());
}

}  // namespace detail

// Instantiates every guard-covered variable by enumerating the rule's guard
// literals: the positive plain body atoms over background predicates.  Guard
// literals stay in the instantiated bodies.  Comparison guards that become
// decided are resolved (a false one drops the instance); undecided ones are
// kept.  Throws when a variable inside a window atom over a derived
// predicate is not covered by any guard; variables under extensional window
// atoms may stay, since arriving signals instantiate them.
inline PreGroundedTemplates pre_ground(const LarsProgram& p) {
  ValidationReport report = validate(p);
  if (!report.ok()) throw std::invalid_argument(report.to_string());

  PreGroundedTemplates out;
  out.source = p;

  detail::AtomStore facts;
  std::set<std::string> bg_preds;
  for (const auto& a : p.background) {
    facts.add(a);
    bg_preds.insert(detail::pred_key(a));
  }

  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    const LarsRule& r = p.rules[i];

    std::vector<const Atom*> guard_atoms;
    for (const auto& l : r.body)
      if (!l.negated && l.atom.form == ExtendedAtom::Form::Plain &&
          bg_preds.count(detail::pred_key(l.atom.atom)))
        guard_atoms.push_back(&l.atom.atom);

    std::set<std::string> guarded;
    for (const Atom* a : guard_atoms)
      for (const auto& t : a->args)
        if (t.is_var()) guarded.insert(t.name);

    // Windows over extensional predicates are instantiated by arriving
    // signals; windows over derived predicates have no such driver and
    // must be fully instantiated here.
    for (const auto& l : r.body) {
      if (l.atom.form != ExtendedAtom::Form::Window) continue;
      if (p.extensional.count(PredSig{l.atom.atom.pred,
                                      l.atom.atom.args.size()}))
        continue;
      for (const auto& t : l.atom.atom.args)
        if (t.is_var() && !guarded.count(t.name))
          throw std::invalid_argument(
              "pre-grounding: unguarded window variable " + t.name +
              " in rule " + to_string(r));
    }

    std::vector<Subst> frontier{Subst{}};
    for (const Atom* a : guard_atoms) {
      std::vector<Subst> next;
      for (const auto& s : frontier) {
        const Atom pattern = substitute(s, *a);
        for (const Atom& cand : facts.candidates(pattern)) {
          Subst ext = s;
          if (match(pattern, cand, ext)) next.push_back(std::move(ext));
        }
      }
      frontier = std::move(next);
    }

    std::set<std::string> seen;
    for (const auto& s : frontier) {
      LarsRule inst = detail::substitute_lars(s, r);
      inst.guards.clear();
      bool dead = false;
      for (const auto& g : r.guards) {
        const std::optional<bool> v = eval_guard(g, s);
        if (!v) {
          Guard kept = g;
          kept.lhs = substitute(s, g.lhs);
          kept.rhs = substitute(s, g.rhs);
          inst.guards.push_back(kept);
        } else if (!*v) {
          dead = true;
          break;
        }
      }
      if (dead) continue;
      if (seen.insert(to_string(inst)).second)
        out.instances.push_back(TemplateRule{std::move(inst), i + 1});
    }
  }
  return out;
}

// The identity packaging: one template per source rule, no instantiation.
inline PreGroundedTemplates verbatim_templates(const LarsProgram& p) {
  ValidationReport report = validate(p);
  if (!report.ok()) throw std::invalid_argument(report.to_string());
  PreGroundedTemplates out;
  out.source = p;
  for (std::size_t i = 0; i < p.rules.size(); ++i)
    out.instances.push_back(TemplateRule{p.rules[i], i + 1});
  return out;
}

namespace detail {

// A rule due for emission at the current tick, plus the driver index the
// state should register so that later pinned atoms re-trigger grounding.
struct IncRuleInfo {
  AnnotatedRule ar;  // ann holds the *duration* until expire_at is applied
  bool plain_driver = false;  // revisit on new plain atoms of driver_key
  bool at_driver = false;     // revisit on new pinned atoms at driver_time
  std::string driver_key;
  std::int64_t driver_time = 0;
};

// Incremental helper rules for one window atom, pinned at tick (t,c).
template <class Sink>
void emit_window_templates(const ExtendedAtom& e, int rule_index,
                           int body_index, TimePoint t, std::int64_t c,
                           Sink&& sink) {
  const std::string tag = window_tag(e, rule_index, body_index);
  const Term tt = Term::integer(t);
  const Term tc = Term::integer(c);
  const Atom spoil = Atom::make("spoil_" + tag, e.atom.args);
  const Atom pin_at = time_pinned(e.atom, tt);
  const std::int64_t n = e.window.size;

  auto plain_rule = [&](TickAnn dur, AspRule rule) {
    IncRuleInfo info;
    info.ar = AnnotatedRule{dur, std::move(rule)};
    sink(std::move(info));
  };

  if (e.window.kind == WindowKind::Time) {
    if (e.mod == Modality::At || e.mod == Modality::Diamond) {
      // The pinned occurrence rule covers one time point and survives until
      // that point leaves the window: duration n+1 time increments.
      Atom head = window_atom(e, rule_index, body_index);
      if (e.mod == Modality::At) head.args.back() = tt;
      IncRuleInfo info;
      info.ar = AnnotatedRule{TickAnn{n + 1, kNever},
                              AspRule{std::move(head), {pin_at}, {}, {}}};
      info.at_driver = true;
      info.driver_key = pred_key(pin_at);
      info.driver_time = t;
      sink(std::move(info));
    } else {
      // Box: holds now unless some window time point lacks the atom.  The
      // derivation rule never retires; each tick contributes one spoiler
      // looking back a single step, alive for n time increments.
      plain_rule(TickAnn::never(),
                 AspRule{window_atom(e, rule_index, body_index),
                         {e.atom},
                         {spoil},
                         {}});
      if (n >= 1 && t >= 1) {
        IncRuleInfo info;
        info.ar = AnnotatedRule{
            TickAnn{n, kNever},
            AspRule{spoil, {e.atom}, {time_pinned(e.atom, Term::integer(t - 1))}, {}}};
        info.plain_driver = true;
        info.driver_key = pred_key(e.atom);
        sink(std::move(info));
      }
    }
    return;
  }

  // Tuple windows.  Validation guarantees n >= 1 and an extensional atom.
  const Atom pin_tick = tick_pinned(e.atom, tt, tc);
  if (e.mod == Modality::At || e.mod == Modality::Diamond) {
    Atom head = window_atom(e, rule_index, body_index);
    if (e.mod == Modality::At) head.args.back() = tt;
    plain_rule(TickAnn{kNever, n},
               AspRule{std::move(head), {pin_tick}, {}, {}});
    return;
  }

  // Tuple box.  covers_t_/covers_h_ track which time points and counts the
  // last n tuples span; the first spoiler catches a covered time point
  // missing the atom, the second a tuple of the atom that sits at a covered
  // time but outside the covered counts.  The second spoiler leaves the
  // count as a variable: a tuple falls out of the covered counts only
  // while its time point can still be covered, and re-emitting the rule at
  // every tick of that time point slides its count bound to n past the
  // last such tick, exactly the lifetime of covers_t_ for the point.
  const Atom tick_atom = Atom::make("tick", {tt, tc});
  const Atom covers_t = Atom::make("covers_t_" + tag, {tt});
  const Atom covers_h = Atom::make("covers_h_" + tag, {tc});
  plain_rule(TickAnn::never(),
             AspRule{window_atom(e, rule_index, body_index),
                     {e.atom},
                     {spoil},
                     {}});
  {
    IncRuleInfo info;
    info.ar = AnnotatedRule{
        TickAnn{kNever, n},
        AspRule{spoil, {e.atom, tick_atom, covers_t}, {pin_at}, {}}};
    info.plain_driver = true;
    info.driver_key = pred_key(e.atom);
    sink(std::move(info));
  }
  {
    std::set<std::string> used;
    for (const auto& arg : e.atom.args)
      if (arg.is_var()) used.insert(arg.name);
    std::string count_name = "C";
    for (int i = 0; used.count(count_name); ++i)
      count_name = "C" + std::to_string(i);
    const Term cv = Term::var(count_name);
    plain_rule(TickAnn{kNever, n},
               AspRule{spoil,
                       {tick_pinned(e.atom, tt, cv), covers_t},
                       {Atom::make("covers_h_" + tag, {cv})},
                       {}});
  }
  plain_rule(TickAnn{kNever, n}, AspRule{covers_t, {tick_atom}, {}, {}});
  plain_rule(TickAnn{kNever, n}, AspRule{covers_h, {tick_atom}, {}, {}});
}

// Everything due for emission at tick (t,c): stream facts for the signal,
// the tick marker, background data, plain/pinned bridges, base rules, and
// window helper rules.  Annotations carry durations.
template <class Sink>
void emit_incremental(const PreGroundedTemplates& tpl, TimePoint t,
                      std::int64_t c, const std::vector<Atom>& sig,
                      Sink&& sink) {
  const Term tt = Term::integer(t);
  const Term tc = Term::integer(c);

  auto fact = [&](Atom a) {
    IncRuleInfo info;
    info.ar =
        AnnotatedRule{TickAnn::never(), AspRule{std::move(a), {}, {}, {}}};
    sink(std::move(info));
  };

  fact(Atom::make("tick", {tt, tc}));
  for (const auto& a : sig) {
    fact(time_pinned(a, tt));
    fact(tick_pinned(a, tt, tc));
  }
  for (const auto& b : tpl.source.background) fact(b);

  for (const auto& ps : bridge_predicates(tpl.source)) {
    Atom plain;
    plain.pred = ps.name;
    for (std::size_t i = 1; i <= ps.arity; ++i)
      plain.args.push_back(Term::var("X" + std::to_string(i)));
    const Atom pinned = time_pinned(plain, tt);
    IncRuleInfo fwd;
    fwd.ar = AnnotatedRule{TickAnn{1, kNever}, AspRule{plain, {pinned}, {}, {}}};
    sink(std::move(fwd));
    IncRuleInfo bwd;
    bwd.ar = AnnotatedRule{TickAnn{1, kNever}, AspRule{pinned, {plain}, {}, {}}};
    sink(std::move(bwd));
  }

  for (const auto& inst : tpl.instances) {
    IncRuleInfo info;
    info.ar = AnnotatedRule{
        TickAnn::never(),
        base_rule(inst.rule, static_cast<int>(inst.source_index))};
    sink(std::move(info));
  }

  // Window helpers come from the source rules so that all instances of a
  // rule share one set of window predicates.
  for (std::size_t ri = 0; ri < tpl.source.rules.size(); ++ri) {
    int bi = 0;
    for (const auto& l : tpl.source.rules[ri].body) {
      ++bi;
      if (l.atom.form != ExtendedAtom::Form::Window) continue;
      emit_window_templates(l.atom, static_cast<int>(ri + 1), bi, t, c, sink);
    }
  }
}

}  // namespace detail

// The rules due for emission at tick (t,c), annotated with durations.
// `sig` holds the atom of a count increment (empty on a time increment).
inline std::vector<AnnotatedRule> incremental_rules(
    const PreGroundedTemplates& tpl, TimePoint t, std::int64_t c,
    const std::vector<Atom>& sig) {
  std::vector<AnnotatedRule> out;
  detail::emit_incremental(
      tpl, t, c, sig,
      [&](detail::IncRuleInfo info) { out.push_back(std::move(info.ar)); });
  return out;
}

// ── Incremental state ───────────────────────────────────────────────────────

class IncrementalState {
 public:
  explicit IncrementalState(PreGroundedTemplates templates)
      : tpl_(std::move(templates)) {
    gc_time_ = 0;
    gc_count_ = 0;
    for (const auto& r : tpl_.source.rules) {
      for (const auto& l : r.body) {
        if (l.atom.form == ExtendedAtom::Form::At) gc_time_ = kNever;
        if (l.atom.form != ExtendedAtom::Form::Window) continue;
        if (l.atom.window.kind == WindowKind::Time) {
          if (gc_time_ != kNever)
            gc_time_ = std::max(gc_time_, l.atom.window.size);
        } else if (l.atom.window.kind == WindowKind::Tuple) {
          gc_count_ = std::max(gc_count_, l.atom.window.size);
        } else {
          gc_time_ = kNever;
        }
      }
    }
  }

  // Drop stream facts that fall behind every window reach.  Off by default;
  // models are unaffected either way.
  void set_gc(bool on) { gc_ = on; }

  const std::map<std::string, AnnotatedRule>& pi() const { return pi_; }
  const std::map<GroundRule, TickAnn>& ground() const { return g_; }
  std::optional<Tick> current_tick() const { return current_; }

  GroundProgram ground_snapshot() const {
    GroundProgram out;
    out.rules.reserve(g_.size());
    for (const auto& [rule, ann] : g_) out.rules.push_back(rule);
    return out;
  }

  // Advances to tick (t,c).  After the first call, (t,c) must follow the
  // current tick by exactly one increment: a time increment carries no
  // signal atom, a count increment exactly one.  Returns what changed.
  TickDelta increment_tick(TimePoint t, std::int64_t c,
                           const std::vector<Atom>& sig) {
    for (const auto& a : sig)
      if (!a.is_ground())
        throw std::invalid_argument("incremental: signal atom must be ground: " +
                                    a.to_string());
    if (current_) {
      const bool time_step = t == current_->time + 1 && c == current_->count;
      const bool count_step = t == current_->time && c == current_->count + 1;
      if (!time_step && !count_step)
        throw std::invalid_argument(
            "incremental: tick (" + std::to_string(t) + "," +
            std::to_string(c) + ") does not follow (" +
            std::to_string(current_->time) + "," +
            std::to_string(current_->count) + ")");
      if (time_step && !sig.empty())
        throw std::invalid_argument(
            "incremental: a time increment carries no signal");
      if (count_step && sig.size() != 1)
        throw std::invalid_argument(
            "incremental: a count increment carries exactly one signal atom");
    } else if (sig.size() > 1) {
      throw std::invalid_argument(
          "incremental: a tick carries at most one signal atom");
    }

    TickDelta delta;
    const Tick now{t, c};

    // Retire rules whose time or count bound has been reached.  Queue
    // entries may be stale (the rule was collected earlier); re-check
    // against the live map.
    while (!pi_time_q_.empty() && pi_time_q_.top().first <= t) {
      const std::string key = pi_time_q_.top().second;
      pi_time_q_.pop();
      auto it = pi_.find(key);
      if (it == pi_.end() || it->second.ann.time > t) continue;
      delta.pi_removed.push_back(it->second);
      pi_.erase(it);
    }
    while (!pi_count_q_.empty() && pi_count_q_.top().first <= c) {
      const std::string key = pi_count_q_.top().second;
      pi_count_q_.pop();
      auto it = pi_.find(key);
      if (it == pi_.end() || it->second.ann.count > c) continue;
      delta.pi_removed.push_back(it->second);
      pi_.erase(it);
    }
    while (!g_time_q_.empty() && g_time_q_.top().first <= t) {
      const GroundRule rule = g_time_q_.top().second;
      g_time_q_.pop();
      auto it = g_.find(rule);
      if (it == g_.end() || it->second.time > t) continue;
      delta.ground_removed.push_back(AnnotatedGroundRule{it->second, rule});
      g_.erase(it);
    }
    while (!g_count_q_.empty() && g_count_q_.top().first <= c) {
      const GroundRule rule = g_count_q_.top().second;
      g_count_q_.pop();
      auto it = g_.find(rule);
      if (it == g_.end() || it->second.count > c) continue;
      delta.ground_removed.push_back(AnnotatedGroundRule{it->second, rule});
      g_.erase(it);
    }

    // This tick's emission, with durations turned into expirations.
    std::vector<detail::IncRuleInfo> emission;
    detail::emit_incremental(tpl_, t, c, sig,
                             [&](detail::IncRuleInfo info) {
                               info.ar.ann = expire_at(now, info.ar.ann);
                               emission.push_back(std::move(info));
                             });

    for (const auto& e : emission) {
      const std::string key = to_text(e.ar.rule);
      auto [it, fresh] = pi_.try_emplace(key, e.ar);
      if (!fresh) {
        // A re-emitted rule may extend its expiration (the stale-tuple
        // spoiler slides forward each tick), but never shorten it.
        if (e.ar.ann.time < it->second.ann.time ||
            e.ar.ann.count < it->second.ann.count)
          throw std::logic_error(
              "incremental: conflicting expiration for rule " + key);
        if (e.ar.ann.time > it->second.ann.time) {
          it->second.ann.time = e.ar.ann.time;
          if (e.ar.ann.time != kNever) pi_time_q_.push({e.ar.ann.time, key});
        }
        if (e.ar.ann.count > it->second.ann.count) {
          it->second.ann.count = e.ar.ann.count;
          if (e.ar.ann.count != kNever)
            pi_count_q_.push({e.ar.ann.count, key});
        }
        continue;
      }
      delta.pi_added.push_back(e.ar);
      if (e.ar.ann.time != kNever) pi_time_q_.push({e.ar.ann.time, key});
      if (e.ar.ann.count != kNever) pi_count_q_.push({e.ar.ann.count, key});
      if (e.at_driver)
        revisit_at_[{e.driver_key, e.driver_time}].push_back(key);
      if (e.plain_driver) revisit_plain_[e.driver_key].push_back(key);
    }

    // Stream-fact texts of this tick, recorded for the garbage collector.
    std::set<std::string> fact_keys;
    GcEntry arrival{t, c, {}, {}};
    if (gc_) {
      const Term tt = Term::integer(t);
      const Term tc = Term::integer(c);
      fact_keys.insert(
          to_text(AspRule{Atom::make("tick", {tt, tc}), {}, {}, {}}));
      for (const auto& a : sig) {
        fact_keys.insert(to_text(AspRule{time_pinned(a, tt), {}, {}, {}}));
        fact_keys.insert(
            to_text(AspRule{tick_pinned(a, tt, tc), {}, {}, {}}));
      }
    }

    // Ground the emission against the atom store until nothing new shows
    // up.  New atoms may re-trigger still-live templates that were pinned
    // at earlier ticks (via the driver indexes).
    std::vector<AnnotatedRule> work;
    work.reserve(emission.size());
    for (const auto& e : emission) work.push_back(e.ar);
    std::set<std::string> revisited;
    std::vector<Atom> new_atoms;

    auto ground_one = [&](const AnnotatedRule& ar) {
      detail::instantiate(ar.rule, atoms_, [&](const Subst& s) {
        GroundRule gr;
        gr.head = substitute(s, ar.rule.head);
        if (!gr.head.is_ground())
          throw std::logic_error("incremental: unsafe head in " +
                                 to_text(ar.rule));
        gr.pos.reserve(ar.rule.pos.size());
        for (const auto& a : ar.rule.pos) gr.pos.push_back(substitute(s, a));
        gr.neg.reserve(ar.rule.neg.size());
        for (const auto& a : ar.rule.neg) {
          Atom ga = substitute(s, a);
          if (!ga.is_ground())
            throw std::logic_error("incremental: unsafe negative literal in " +
                                   to_text(ar.rule));
          gr.neg.push_back(std::move(ga));
        }
        auto [it, fresh] = g_.try_emplace(gr, ar.ann);
        if (!fresh) {
          // Re-grounding the same rule can only push its expiration out.
          if (ar.ann.time > it->second.time) {
            it->second.time = ar.ann.time;
            if (ar.ann.time != kNever) g_time_q_.push({ar.ann.time, gr});
          }
          if (ar.ann.count > it->second.count) {
            it->second.count = ar.ann.count;
            if (ar.ann.count != kNever) g_count_q_.push({ar.ann.count, gr});
          }
          return;
        }
        if (ar.ann.time != kNever) g_time_q_.push({ar.ann.time, gr});
        if (ar.ann.count != kNever) g_count_q_.push({ar.ann.count, gr});
        delta.ground_added.push_back(AnnotatedGroundRule{ar.ann, gr});
        if (gc_ && gr.pos.empty() && gr.neg.empty()) {
          const std::string text = to_text(ar.rule);
          if (fact_keys.count(text)) {
            arrival.pi_keys.push_back(text);
            arrival.rules.push_back(gr);
          }
        }
        if (atoms_.add(gr.head)) new_atoms.push_back(gr.head);
      });
    };

    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& ar : work) ground_one(ar);
      std::vector<Atom> batch;
      batch.swap(new_atoms);
      if (batch.empty()) continue;
      changed = true;
      for (const auto& a : batch) {
        if (a.pred.size() > 3 && a.pred.ends_with("_at") &&
            !a.args.empty() && a.args.back().is_int()) {
          auto it = revisit_at_.find({detail::pred_key(a), a.args.back().num});
          if (it != revisit_at_.end())
            for (const auto& key : it->second) revive(key, revisited, work);
        }
        auto it = revisit_plain_.find(detail::pred_key(a));
        if (it != revisit_plain_.end())
          for (const auto& key : it->second) revive(key, revisited, work);
      }
    }

    // Garbage collection: drop whole leading ticks once a later tick lies
    // behind the current one by at least the largest window reaches.
    if (gc_) {
      arrivals_.push_back(std::move(arrival));
      while (arrivals_.size() >= 2 && gc_time_ != kNever &&
             arrivals_[1].time + gc_time_ <= t &&
             arrivals_[1].count + gc_count_ <= c + 1) {
        const GcEntry& dead = arrivals_.front();
        for (const auto& key : dead.pi_keys) {
          auto it = pi_.find(key);
          if (it == pi_.end()) continue;
          delta.pi_removed.push_back(it->second);
          pi_.erase(it);
        }
        for (const auto& rule : dead.rules) {
          auto it = g_.find(rule);
          if (it == g_.end()) continue;
          delta.ground_removed.push_back(AnnotatedGroundRule{it->second, rule});
          g_.erase(it);
        }
        arrivals_.pop_front();
      }
    }

    current_ = now;
    std::sort(delta.pi_removed.begin(), delta.pi_removed.end(),
              [](const AnnotatedRule& a, const AnnotatedRule& b) {
                return to_text(a.rule) < to_text(b.rule);
              });
    std::sort(delta.ground_removed.begin(), delta.ground_removed.end(),
              [](const AnnotatedGroundRule& a, const AnnotatedGroundRule& b) {
                return a.rule < b.rule;
              });
    return delta;
  }

  // One "[exp t,c] rule" line per template, then per ground rule.
  std::string dump() const {
    std::string out;
    for (const auto& [key, ar] : pi_)
      out += "[exp " + ar.ann.to_string() + "] " + key + "\n";
    for (const auto& [rule, ann] : g_)
      out += "[exp " + ann.to_string() + "] " + to_text(rule) + "\n";
    return out;
  }

 private:
  struct GcEntry {
    TimePoint time = 0;
    std::int64_t count = 0;
    std::vector<std::string> pi_keys;
    std::vector<GroundRule> rules;
  };

  void revive(const std::string& key, std::set<std::string>& revisited,
              std::vector<AnnotatedRule>& work) {
    if (!revisited.insert(key).second) return;
    auto it = pi_.find(key);
    if (it == pi_.end()) return;  // expired or collected; stale index entry
    work.push_back(it->second);
  }

  using TimedKey = std::pair<std::int64_t, std::string>;
  using TimedRule = std::pair<std::int64_t, GroundRule>;
  template <class T>
  using MinHeap = std::priority_queue<T, std::vector<T>, std::greater<T>>;

  PreGroundedTemplates tpl_;
  std::map<std::string, AnnotatedRule> pi_;  // keyed by rule text
  std::map<GroundRule, TickAnn> g_;
  detail::AtomStore atoms_;  // every atom ever observed; only grows
  std::optional<Tick> current_;
  MinHeap<TimedKey> pi_time_q_, pi_count_q_;
  MinHeap<TimedRule> g_time_q_, g_count_q_;
  std::map<std::pair<std::string, std::int64_t>, std::vector<std::string>>
      revisit_at_;
  std::map<std::string, std::vector<std::string>> revisit_plain_;
  bool gc_ = false;
  std::int64_t gc_time_ = 0;   // largest time reach; kNever when unbounded
  std::int64_t gc_count_ = 0;  // largest tuple reach
  std::deque<GcEntry> arrivals_;
};

inline TickDelta increment_tick(IncrementalState& state, TimePoint t,
                                std::int64_t c, const std::vector<Atom>& sig) {
  return state.increment_tick(t, c, sig);
}

// Folds a whole tick stream through an incremental state and returns the
// surviving ground rules as a program.
inline AspProgram incremental_program(const LarsProgram& p,
                                      const TickStream& d) {
  if (d.entries.empty())
    throw std::invalid_argument("incremental: empty tick stream");
  IncrementalState state(verbatim_templates(p));
  for (const auto& e : d.entries) {
    std::vector<Atom> sig;
    if (e.atom) sig.push_back(*e.atom);
    state.increment_tick(e.tick.time, e.tick.count, sig);
  }
  AspProgram out;
  out.rules.reserve(state.ground().size());
  for (const auto& [rule, ann] : state.ground()) {
    AspRule r;
    r.head = rule.head;
    r.pos = rule.pos;
    r.neg = rule.neg;
    out.rules.push_back(std::move(r));
  }
  return out;
}

}  // namespace lars

#endif  // LARS_INCREMENTAL_HPP
