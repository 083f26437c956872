// ===========================================================================
// include/lars/engine.hpp -- append/evaluate facade over the two strategies
//
// Design notes
//
//   An Engine owns one program and one logical stream position and answers
//   "what is the model now".  Two strategies implement that contract:
//
//     Oneshot      keeps the full tick stream and, per evaluation, solves
//                  the static translation of the program at the current
//                  time together with the encoded stream.  Deterministic
//                  enumeration order makes "first model" stable, which
//                  stands in for a solver whose first model may change
//                  arbitrarily between calls.
//
//     Incremental  pre-grounds the program once, then feeds every tick
//                  through the expiring-rule translation and applies the
//                  resulting ground delta to a justification network.  The
//                  network's model is always current, so evaluation is a
//                  read.
//
//   append(time, atoms) advances time increments up to `time` and then one
//   count increment per distinct new atom; evaluate(time) advances time
//   increments only.  Both synthesize the intermediate ticks of silent gaps
//   so that window expirations fire even when no signals arrive.  Repeated
//   signals within one time point are dropped: an evaluation's data sees
//   every atom at most once per time point, so a duplicate adds nothing.
//
//   In push mode a model is prepared after every append; in pull mode only
//   evaluate triggers solving.  The incremental network is maintained per
//   tick in both modes (its updates are the strategy), so push/pull only
//   differ for the oneshot solver.
//
//   Results restrict models to plain, non-auxiliary atoms: encoding helpers
//   (now/cnt/tick, window/spoiler/covers predicates) and pinned _at/_tick
//   atoms are stripped; the bridge rules already fold current-time pinned
//   atoms back into their plain forms.  A solver budget overrun or a
//   truth-maintenance failure (odd negative loop) is reported as Unknown
//   with a reason; after a network failure the engine stays in that state
//   and never exposes a possibly half-relabeled model.
//
//   One engine is one logical thread of control: append/evaluate calls
//   must be externally serialized.  Distinct engines are independent.
// ===========================================================================
#ifndef LARS_ENGINE_HPP
#define LARS_ENGINE_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lars/asp.hpp"
#include "lars/encoder.hpp"
#include "lars/incremental.hpp"
#include "lars/jtms.hpp"
#include "lars/program.hpp"
#include "lars/solver.hpp"
#include "lars/stream.hpp"

namespace lars {

// ── Configuration ───────────────────────────────────────────────────────────

enum class Strategy : std::uint8_t {
  Oneshot,      // re-solve the static translation at every evaluation
  Incremental,  // expiring rules + justification-based truth maintenance
};

enum class Mode : std::uint8_t {
  Push,  // prepare a model after every append
  Pull,  // compute only when evaluate is called
};

struct EngineConfig {
  LarsProgram program;
  Strategy strategy = Strategy::Incremental;
  Mode mode = Mode::Push;
  std::size_t solver_budget = 1'000'000;  // propagation steps per solve
  bool gc_cutoff = false;                 // drop stream facts no window reaches
};

// ── Results ─────────────────────────────────────────────────────────────────

struct EngineResult {
  enum class Kind : std::uint8_t {
    Model,    // atoms hold at the result time
    NoModel,  // the program has no answer set on the current data
    Unknown,  // evaluation gave up; see reason
  };

  Kind kind = Kind::Unknown;
  TimePoint time = 0;
  Model atoms;         // meaningful for Kind::Model
  std::string reason;  // meaningful for Kind::Unknown

  static EngineResult model(TimePoint t, Model m) {
    return EngineResult{Kind::Model, t, std::move(m), {}};
  }
  static EngineResult no_model(TimePoint t) {
    return EngineResult{Kind::NoModel, t, {}, {}};
  }
  static EngineResult unknown(TimePoint t, std::string why) {
    return EngineResult{Kind::Unknown, t, {}, std::move(why)};
  }

  bool is_model() const { return kind == Kind::Model; }

  bool operator==(const EngineResult& o) const {
    return kind == o.kind && time == o.time && atoms == o.atoms &&
           reason == o.reason;
  }
};

namespace detail {

// Predicates that belong to the encodings, not to the user's vocabulary.
inline bool engine_aux(const std::string& pred) {
  auto has_prefix = [&](const char* pre) { return pred.rfind(pre, 0) == 0; };
  return pred == "now" || pred == "cnt" || pred == "tick" ||
         has_prefix("w_") || has_prefix("spoil_") || has_prefix("covers_") ||
         pred.ends_with("_at") || pred.ends_with("_tick");
}

inline Model strip_aux(const Model& m) {
  Model out;
  for (const auto& a : m)
    if (!engine_aux(a.pred)) out.insert(a);
  return out;
}

}  // namespace detail

// ── Engine ──────────────────────────────────────────────────────────────────

class Engine {
 public:
  explicit Engine(EngineConfig config) : cfg_(std::move(config)) {
    const auto started = std::chrono::steady_clock::now();
    if (cfg_.strategy == Strategy::Oneshot) {
      ValidationReport report = validate(cfg_.program);
      if (!report.ok()) throw std::invalid_argument(report.to_string());
      stream_ = TickStream::origin();
      // Everything but the trailing now(t) fact is time-independent; build
      // it once and re-stamp per solve.
      encoding_prefix_ = lars_to_asp(cfg_.program, 0);
      encoding_prefix_.rules.pop_back();
    } else {
      templates_ = pre_ground(cfg_.program);
      inc_.emplace(templates_);
      inc_->set_gc(cfg_.gc_cutoff);
      feed_tick(0, 0, {});
    }
    init_seconds_ =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
  }

  // Appends signals at `time`: time increments up to `time`, then one count
  // increment per atom not yet seen at that time point, in arrival order.
  void append(TimePoint time, const std::vector<Atom>& signals) {
    if (time < now_.time)
      throw std::invalid_argument("engine: append time " +
                                  std::to_string(time) +
                                  " regresses behind time " +
                                  std::to_string(now_.time));
    advance_to(time);
    for (const auto& a : signals) {
      if (!a.is_ground())
        throw std::invalid_argument("engine: non-ground signal " +
                                    a.to_string());
      if (!seen_now_.insert(a).second) continue;  // duplicate in this point
      if (cfg_.strategy == Strategy::Oneshot) {
        stream_.append_atom(a);
        now_ = stream_.now();
      } else {
        ++now_.count;
        feed_tick(now_.time, now_.count, {a});
      }
    }
    if (cfg_.mode == Mode::Push) prepared_ = compute();
  }

  // Moves to `time` (synthesizing silent ticks) and reports the model.
  EngineResult evaluate(TimePoint time) {
    if (time < now_.time)
      throw std::invalid_argument("engine: evaluate time " +
                                  std::to_string(time) +
                                  " regresses behind time " +
                                  std::to_string(now_.time));
    advance_to(time);
    if (cfg_.mode == Mode::Push && prepared_ && prepared_->time == time)
      return *prepared_;
    EngineResult r = compute();
    if (cfg_.mode == Mode::Push) prepared_ = r;
    return r;
  }

  // ── Inspection ────────────────────────────────────────────────────────────

  const LarsProgram& program() const { return cfg_.program; }
  Strategy strategy() const { return cfg_.strategy; }
  Mode mode() const { return cfg_.mode; }
  Tick current_tick() const { return now_; }
  double init_seconds() const { return init_seconds_; }
  bool failed() const { return failed_; }

  // The ground rules the current model is judged against: the incremental
  // rule store, or the grounded static translation at the current time.
  GroundProgram current_ground() const {
    if (cfg_.strategy == Strategy::Incremental) return inc_->ground_snapshot();
    return ground_program(current_encoding());
  }

  // The maintained network model, unstripped.  Empty for oneshot engines
  // and after a network failure.
  std::optional<Model> network_model() const {
    if (cfg_.strategy != Strategy::Incremental || failed_) return std::nullopt;
    return tms_.current_model();
  }

  // Debug text: the static translation plus stream facts, or the annotated
  // incremental rule store.
  std::string encoding_text() const {
    if (cfg_.strategy == Strategy::Incremental) return inc_->dump();
    return to_text(current_encoding());
  }

 private:
  // One tick through the incremental pipeline: translate, then replay the
  // ground delta on the network (retired rules first, then additions).
  void feed_tick(TimePoint t, std::int64_t c, const std::vector<Atom>& sig) {
    TickDelta delta = inc_->increment_tick(t, c, sig);
    if (failed_) return;  // keep tick bookkeeping, stop maintaining a model
    try {
      for (const auto& ar : delta.ground_removed) tms_.remove_rule(ar.rule);
      for (const auto& ar : delta.ground_added) tms_.add_rule(ar.rule);
    } catch (const TmsError& err) {
      failed_ = true;
      fail_reason_ = std::string("odd-loop: ") + err.what();
    }
  }

  void advance_to(TimePoint time) {
    while (now_.time < time) {
      if (cfg_.strategy == Strategy::Oneshot) {
        stream_.advance_time();
        now_ = stream_.now();
      } else {
        ++now_.time;
        feed_tick(now_.time, now_.count, {});
      }
      seen_now_.clear();
    }
  }

  AspProgram current_encoding() const {
    AspProgram enc = encoding_prefix_;
    enc.rules.push_back(
        AspRule{Atom::make("now", {Term::integer(now_.time)}), {}, {}, {}});
    append_facts(enc, encode_stream(stream_));
    return enc;
  }

  EngineResult compute() {
    if (cfg_.strategy == Strategy::Incremental) {
      if (failed_) return EngineResult::unknown(now_.time, fail_reason_);
      return EngineResult::model(now_.time,
                                 detail::strip_aux(tms_.current_model()));
    }
    SolveOptions opt;
    opt.max_models = 1;
    opt.budget = cfg_.solver_budget;
    try {
      std::vector<Model> models = answer_sets(ground_program(current_encoding()), opt);
      if (models.empty()) return EngineResult::no_model(now_.time);
      return EngineResult::model(now_.time, detail::strip_aux(models[0]));
    } catch (const SolveBudgetExceeded& err) {
      return EngineResult::unknown(now_.time, std::string("budget: ") + err.what());
    }
  }

  EngineConfig cfg_;
  Tick now_{0, 0};
  std::set<Atom> seen_now_;  // signals already absorbed at the current time
  double init_seconds_ = 0.0;

  // Oneshot state.
  TickStream stream_;
  AspProgram encoding_prefix_;

  // Incremental state.
  PreGroundedTemplates templates_;
  std::optional<IncrementalState> inc_;
  TmsNetwork tms_;
  bool failed_ = false;
  std::string fail_reason_;

  std::optional<EngineResult> prepared_;  // push mode's last prepared model
};

}  // namespace lars

#endif  // LARS_ENGINE_HPP
