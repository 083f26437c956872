// ============================================================================
// include/lars/bench.hpp — Timing harness for the evaluation strategies
// ============================================================================
//
// Design notes
// ------------
// A benchmark run replays one generated schedule through a push-mode engine
// and measures three times:
//
//   - t_init: engine construction, including pre-grounding or building the
//     reusable encoding prefix;
//   - t_tick: mean cost of one tick (a time or count increment), derived
//     from the post-init wall time over the number of ticks taken;
//   - t_total: full wall time of the run.
//
// Push mode is used for both strategies so that a model is computed
// whenever a signal streams in; that makes the repeated-solving strategy
// comparable to the maintained network. Warmup runs execute the identical
// workload without recording. Runs are strictly sequential: interleaving
// them would contaminate the wall-clock numbers.
//
// Caching-strategy setups are checked for stratification before any timing
// starts, since the trend claims lean on every tick having a unique model.
// ============================================================================

#ifndef LARS_BENCH_HPP
#define LARS_BENCH_HPP

#include <chrono>
#include <stdexcept>
#include <string>

#include "lars/encoder.hpp"
#include "lars/engine.hpp"
#include "lars/scenario.hpp"
#include "lars/solver.hpp"

namespace lars {

// ── Requests and reports ────────────────────────────────────────────────────

struct BenchRequest {
  std::string setup;        // A1, A2, B1, or B2; names the generated instance
  Strategy strategy = Strategy::Oneshot;
  long long n = 1;          // window size
  TimePoint tp = 1;         // number of time points
  unsigned seed = 1;
  int runs = 1;             // recorded runs, averaged
  int warmup = 0;           // unrecorded runs executed first
  bool gc_cutoff = false;
  std::size_t solver_budget = 100'000'000;
};

struct BenchReport {
  std::string setup;
  Strategy strategy = Strategy::Oneshot;
  long long n = 0;
  TimePoint tp = 0;
  unsigned seed = 0;
  double t_init = 0.0;   // seconds, mean over recorded runs
  double t_tick = 0.0;   // seconds per tick, mean over recorded runs
  double t_total = 0.0;  // seconds, mean over recorded runs
  bool flagged = false;  // some run ended without a model

  // CSV row matching the header "setup,strategy,n,tp,t_init,t_tick,t_total".
  std::string csv_row() const {
    std::string out = setup;
    out += ',';
    out += strategy == Strategy::Oneshot ? "oneshot" : "incremental";
    out += ',' + std::to_string(n) + ',' + std::to_string(tp);
    out += ',' + std::to_string(t_init) + ',' + std::to_string(t_tick) + ',' +
           std::to_string(t_total);
    if (flagged) out += ",flagged";
    return out;
  }
};

inline const char* bench_csv_header() {
  return "setup,strategy,n,tp,t_init,t_tick,t_total";
}

// ── Harness ─────────────────────────────────────────────────────────────────

namespace detail {

struct RunSample {
  double t_init = 0.0;
  double t_total = 0.0;
  long long ticks = 0;
  bool flagged = false;
};

inline RunSample bench_run_once(const LarsProgram& prog,
                                const Schedule& sched,
                                const BenchRequest& req) {
  const auto start = std::chrono::steady_clock::now();
  EngineConfig cfg;
  cfg.program = prog;
  cfg.strategy = req.strategy;
  cfg.mode = Mode::Push;
  cfg.gc_cutoff = req.gc_cutoff;
  cfg.solver_budget = req.solver_budget;
  Engine eng(std::move(cfg));
  for (TimePoint t = 0; t < sched.horizon(); ++t)
    eng.append(t, sched.signals[static_cast<std::size_t>(t)]);
  const EngineResult last = eng.evaluate(sched.horizon() - 1);
  const auto end = std::chrono::steady_clock::now();

  RunSample s;
  s.t_init = eng.init_seconds();
  s.t_total = std::chrono::duration<double>(end - start).count();
  s.ticks = eng.current_tick().time + eng.current_tick().count;
  s.flagged = eng.failed() || !last.is_model();
  return s;
}

}  // namespace detail

// Replays the schedule (warmup + runs) times through a fresh engine each
// time and averages the recorded runs. Throws when no recorded runs are
// requested or when a caching-strategy encoding fails the stratification
// check that its unique-model claim rests on.
inline BenchReport benchmark(const LarsProgram& prog, const Schedule& sched,
                             const BenchRequest& req) {
  if (req.runs < 1)
    throw std::invalid_argument("benchmark: at least one recorded run");
  if (sched.horizon() < 1)
    throw std::invalid_argument("benchmark: empty schedule");
  if (!req.setup.empty() && req.setup[0] == 'A') {
    const Strata strata = stratify(ground_program(lars_to_asp(prog, 0)));
    if (!strata.stratified)
      throw std::logic_error(
          "benchmark: caching-strategy encoding is not stratified");
  }

  for (int i = 0; i < req.warmup; ++i)
    (void)detail::bench_run_once(prog, sched, req);

  BenchReport rep;
  rep.setup = req.setup;
  rep.strategy = req.strategy;
  rep.n = req.n;
  rep.tp = sched.horizon();
  rep.seed = req.seed;
  for (int i = 0; i < req.runs; ++i) {
    const detail::RunSample s = detail::bench_run_once(prog, sched, req);
    rep.t_init += s.t_init;
    rep.t_total += s.t_total;
    const long long ticks = s.ticks > 0 ? s.ticks : 1;
    rep.t_tick += (s.t_total - s.t_init) / static_cast<double>(ticks);
    rep.flagged = rep.flagged || s.flagged;
  }
  rep.t_init /= req.runs;
  rep.t_tick /= req.runs;
  rep.t_total /= req.runs;
  return rep;
}

// Generates the named instance and benchmarks it.
inline BenchReport benchmark_setup(const BenchRequest& req) {
  const ScenarioInstance inst =
      generate_scenario(req.setup, req.n, req.tp, req.seed);
  return benchmark(inst.program, inst.schedule, req);
}

}  // namespace lars

#endif  // LARS_BENCH_HPP
