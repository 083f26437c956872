// ============================================================================
// include/lars/scenario.hpp — Benchmark scenario generators
// ============================================================================
//
// Design notes
// ------------
// Two synthetic workloads exercise the engine end to end:
//
//   - Scenario A ("caching strategy") abstracts a numeric request signal
//     alpha(V) to qualitative levels with windows over the raw values, then
//     picks a cache replacement policy from the level history.  Setup A2
//     uses tuple windows for the abstraction rules, setup A1 time windows.
//     Its encoding is stratified, so every tick has exactly one model.
//   - Scenario B ("content retrieval") routes item requests through a fixed
//     11-node network (the classic Abilene topology, both edge directions),
//     with reachability as a recursive closure and a guessed source choice.
//     It can have several models per tick.
//
// Schedules are produced by a Mersenne twister with explicit seeding, and
// all draws use modulo sampling on the raw engine output.  That trades a
// sliver of uniformity for bit-identical schedules across standard library
// implementations, which matters more here: a benchmark instance is named
// by (setup, n, tp, seed) and must mean the same stream everywhere.
// ============================================================================

#ifndef LARS_SCENARIO_HPP
#define LARS_SCENARIO_HPP

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lars/parser.hpp"
#include "lars/program.hpp"

namespace lars {

// ── Schedule ────────────────────────────────────────────────────────────────

// Signals per time point, in arrival order. Index = time, contiguous from 0.
struct Schedule {
  std::vector<std::vector<Atom>> signals;

  TimePoint horizon() const { return static_cast<TimePoint>(signals.size()); }
};

struct ScenarioInstance {
  LarsProgram program;
  Schedule schedule;
};

namespace detail {

// Uniform draw from [0, k) on raw mt19937 output; k must be positive.
inline long long draw(std::mt19937& rng, long long k) {
  return static_cast<long long>(rng() % static_cast<unsigned long>(k));
}

// Bernoulli draw with probability num/den.
inline bool chance(std::mt19937& rng, long long num, long long den) {
  return draw(rng, den) < num;
}

}  // namespace detail

// ── Scenario A: caching strategy ────────────────────────────────────────────

// The ten-rule policy selector. Levels are read off the alpha thresholds:
// high needs V >= 18, mid 12 <= V < 18, low V < 12; value(0..30) guards V.
// Setup A2 abstracts with tuple windows, A1 with time windows.
inline LarsProgram scenario_a_program(const std::string& setup, long long n) {
  if (setup != "A1" && setup != "A2")
    throw std::invalid_argument("scenario A setup must be A1 or A2, got " +
                                setup);
  if (n < 1) throw std::invalid_argument("scenario A needs window size >= 1");
  const std::string w =
      "[" + std::to_string(n) + (setup == "A1" ? " t]" : " #]");
  const std::string tw = "[" + std::to_string(n) + " t]";
  std::string text;
  text += "#ext alpha/1.\n";
  text += "#background value(0..30).\n";
  text += "@T high :- value(V), " + w + " @T alpha(V), V >= 18.\n";
  text += "@T mid :- value(V), " + w + " @T alpha(V), V >= 12, V < 18.\n";
  text += "@T low :- value(V), " + w + " @T alpha(V), V < 12.\n";
  text += "lfu :- " + tw + " [] high.\n";
  text += "lru :- " + tw + " [] mid.\n";
  text += "fifo :- " + tw + " [] low.\n";
  text += "done :- lfu.\n";
  text += "done :- lru.\n";
  text += "done :- fifo.\n";
  text += "random :- not done.\n";
  return parse_program(text);
}

// One alpha(V) per time point. A mode (high, mid, low) is drawn at random
// and held for twice the window size before the next draw; V is sampled
// uniformly from the mode's band.
inline ScenarioInstance generate_scenario_a(const std::string& setup,
                                            long long n, TimePoint tp,
                                            unsigned seed) {
  if (tp < 1) throw std::invalid_argument("scenario A needs tp >= 1");
  ScenarioInstance out;
  out.program = scenario_a_program(setup, n);
  std::mt19937 rng(seed);
  out.schedule.signals.resize(static_cast<std::size_t>(tp));
  int mode = 0;
  for (TimePoint t = 0; t < tp; ++t) {
    if (t % (2 * n) == 0) mode = static_cast<int>(detail::draw(rng, 3));
    long long v = 0;
    switch (mode) {
      case 0: v = 18 + detail::draw(rng, 13); break;  // high: 18..30
      case 1: v = 12 + detail::draw(rng, 6); break;   // mid: 12..17
      default: v = detail::draw(rng, 12); break;      // low: 0..11
    }
    out.schedule.signals[static_cast<std::size_t>(t)].push_back(
        Atom::make("alpha", {Term::integer(v)}));
  }
  return out;
}

// ── Scenario B: content retrieval ───────────────────────────────────────────

// The ten-rule retrieval program over the Abilene network: requests create
// needs, cached copies satisfy them locally or via a reachable source of
// best quality, and links drop when their end node was down throughout the
// window. Multiple equal-quality sources yield multiple models.
inline LarsProgram scenario_b_program(long long n) {
  if (n < 1) throw std::invalid_argument("scenario B needs window size >= 1");
  const std::string w = "[" + std::to_string(n) + " t]";
  std::string text;
  text += "#ext req/2.\n#ext cache/2.\n#ext down/1.\n#ext qLev/2.\n";
  text += "#background node(0..10).\n";
  text += "#background item(i1).\n#background item(i2).\n";
  text += "#background lev(0..2).\n";
  static const int kEdges[][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5},
                                  {5, 6}, {6, 7}, {7, 8}, {8, 9}, {9, 10},
                                  {0, 10}, {1, 10}, {2, 8}, {3, 7}};
  for (const auto& e : kEdges) {
    text += "#background edge(" + std::to_string(e[0]) + "," +
            std::to_string(e[1]) + ").\n";
    text += "#background edge(" + std::to_string(e[1]) + "," +
            std::to_string(e[0]) + ").\n";
  }
  text += "need(I,N) :- item(I), node(N), " + w + " <> req(I,N).\n";
  text += "avail(I,N) :- item(I), node(N), " + w + " <> cache(I,N).\n";
  text += "get(I,N,M) :- source(I,N,M), not nGet(I,N,M).\n";
  text += "nGet(I,N,M) :- node(M), get(I,N,M2), M != M2.\n";
  text +=
      "nGet(I,N,M) :- source(I,N,M), source(I,N,M2), M != M2, "
      "qual(M,L), qual(M2,L2), L < L2.\n";
  text +=
      "source(I,N,M) :- need(I,N), not avail(I,N), avail(I,M), "
      "reach(N,M).\n";
  text += "reach(N,M) :- conn(N,M).\n";
  text += "reach(N,M) :- reach(N,M2), conn(M2,M), M2 != M, N != M.\n";
  text += "conn(N,M) :- edge(N,M), not " + w + " [] down(M).\n";
  text += "qual(N,L) :- node(N), lev(L), lev(L2), L2 < L, " + w +
          " <> qLev(N,L), not " + w + " <> qLev(N,L2).\n";
  return parse_program(text);
}

// Setup B1: per time point, each item is requested at a random node with
// p = 0.1; one random (item, node) pair is cached with p = 0.1; one random
// node is down with p = 0.1; each node's quality level changes with
// p = 3/n (every node reports its initial level at time 0).
//
// Setup B2: each item is requested at 1..3 random nodes with p = 0.5;
// 1..3 random cache entries always stream in; each node reports a quality
// level with p = 0.25, which repeats the previous one with p = 0.9; with
// p = 1/n a random node goes down for 1.5 * n time points.
inline ScenarioInstance generate_scenario_b(const std::string& setup,
                                            long long n, TimePoint tp,
                                            unsigned seed) {
  if (setup != "B1" && setup != "B2")
    throw std::invalid_argument("scenario B setup must be B1 or B2, got " +
                                setup);
  if (tp < 1) throw std::invalid_argument("scenario B needs tp >= 1");
  ScenarioInstance out;
  out.program = scenario_b_program(n);
  std::mt19937 rng(seed);
  out.schedule.signals.resize(static_cast<std::size_t>(tp));

  const long long kNodes = 11;
  const char* items[] = {"i1", "i2"};
  auto node = [&]() { return Term::integer(detail::draw(rng, kNodes)); };
  auto item = [&]() { return Term::sym(items[detail::draw(rng, 2)]); };

  std::vector<long long> level(static_cast<std::size_t>(kNodes), 0);
  for (auto& l : level) l = detail::draw(rng, 3);
  std::vector<TimePoint> down_until(static_cast<std::size_t>(kNodes), 0);

  for (TimePoint t = 0; t < tp; ++t) {
    auto& sig = out.schedule.signals[static_cast<std::size_t>(t)];
    if (setup == "B1") {
      for (const char* i : items)
        if (detail::chance(rng, 1, 10))
          sig.push_back(Atom::make("req", {Term::sym(i), node()}));
      if (detail::chance(rng, 1, 10))
        sig.push_back(Atom::make("cache", {item(), node()}));
      if (detail::chance(rng, 1, 10))
        sig.push_back(Atom::make("down", {node()}));
      for (long long m = 0; m < kNodes; ++m) {
        const bool report = t == 0 || detail::chance(rng, 3 < n ? 3 : n, n);
        if (!report) continue;
        if (t > 0) level[static_cast<std::size_t>(m)] = detail::draw(rng, 3);
        sig.push_back(Atom::make(
            "qLev", {Term::integer(m),
                     Term::integer(level[static_cast<std::size_t>(m)])}));
      }
    } else {
      for (const char* i : items)
        if (detail::chance(rng, 1, 2)) {
          const long long k = 1 + detail::draw(rng, 3);
          for (long long j = 0; j < k; ++j)
            sig.push_back(Atom::make("req", {Term::sym(i), node()}));
        }
      const long long k = 1 + detail::draw(rng, 3);
      for (long long j = 0; j < k; ++j)
        sig.push_back(Atom::make("cache", {item(), node()}));
      for (long long m = 0; m < kNodes; ++m) {
        if (!detail::chance(rng, 1, 4)) continue;
        if (!detail::chance(rng, 9, 10))
          level[static_cast<std::size_t>(m)] = detail::draw(rng, 3);
        sig.push_back(Atom::make(
            "qLev", {Term::integer(m),
                     Term::integer(level[static_cast<std::size_t>(m)])}));
      }
      if (detail::chance(rng, 1, n)) {
        const long long m = detail::draw(rng, kNodes);
        const TimePoint until = t + (3 * n) / 2;
        if (until > down_until[static_cast<std::size_t>(m)])
          down_until[static_cast<std::size_t>(m)] = until;
      }
      for (long long m = 0; m < kNodes; ++m)
        if (t < down_until[static_cast<std::size_t>(m)])
          sig.push_back(Atom::make("down", {Term::integer(m)}));
    }
  }
  return out;
}

// Dispatch on the setup name: A1/A2 or B1/B2.
inline ScenarioInstance generate_scenario(const std::string& setup,
                                          long long n, TimePoint tp,
                                          unsigned seed) {
  if (!setup.empty() && setup[0] == 'A')
    return generate_scenario_a(setup, n, tp, seed);
  if (!setup.empty() && setup[0] == 'B')
    return generate_scenario_b(setup, n, tp, seed);
  throw std::invalid_argument("unknown scenario setup " + setup);
}

}  // namespace lars

#endif  // LARS_SCENARIO_HPP
