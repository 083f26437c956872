// ============================================================================
// tests/test_engine.cpp — append/evaluate facade over both strategies
// ============================================================================

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lars/engine.hpp"
#include "lars/parser.hpp"
#include "lars/solver.hpp"

using namespace lars;

namespace {

Atom at1(const std::string& p, const Term& t) { return Atom::make(p, {t}); }
Term cx() { return Term::sym("x"); }
Term cy() { return Term::sym("y"); }

Engine make(const std::string& text, Strategy s, Mode m,
            bool gc = false) {
  EngineConfig cfg;
  cfg.program = parse_program(text);
  cfg.strategy = s;
  cfg.mode = m;
  cfg.gc_cutoff = gc;
  return Engine(std::move(cfg));
}

const std::string kDiamond = "#ext a/1.\nb(X) :- [2 t] <> a(X).\n";

}  // namespace

TEST_CASE("a signal is visible through its window and then expires") {
  for (Strategy s : {Strategy::Oneshot, Strategy::Incremental}) {
    for (Mode m : {Mode::Push, Mode::Pull}) {
      Engine eng = make(kDiamond, s, m);
      eng.append(5, {at1("a", cy())});

      EngineResult at5 = eng.evaluate(5);
      REQUIRE(at5.is_model());
      CHECK(at5.atoms == Model{at1("a", cy()), at1("b", cy())});

      EngineResult at7 = eng.evaluate(7);
      REQUIRE(at7.is_model());
      CHECK(at7.time == 7);
      CHECK(at7.atoms == Model{at1("b", cy())});

      EngineResult at8 = eng.evaluate(8);
      REQUIRE(at8.is_model());
      CHECK(at8.atoms.empty());
    }
  }
}

TEST_CASE("evaluating an empty program before any append yields an empty model") {
  for (Strategy s : {Strategy::Oneshot, Strategy::Incremental}) {
    Engine eng = make("", s, Mode::Pull);
    EngineResult r = eng.evaluate(0);
    REQUIRE(r.is_model());
    CHECK(r.atoms.empty());
    CHECK(r.time == 0);
  }
}

TEST_CASE("append advances counts in arrival order and drops duplicates") {
  Engine eng = make(kDiamond, Strategy::Incremental, Mode::Pull);
  eng.append(1, {at1("a", cx()), at1("a", cy()), at1("a", cx())});
  CHECK(eng.current_tick() == Tick{1, 2});
  eng.append(1, {at1("a", cy())});  // already absorbed at this time point
  CHECK(eng.current_tick() == Tick{1, 2});
  eng.append(1, {});  // no-op on counts
  CHECK(eng.current_tick() == Tick{1, 2});
  eng.append(2, {at1("a", cx())});  // a new time point accepts the atom again
  CHECK(eng.current_tick() == Tick{2, 3});

  Engine one = make(kDiamond, Strategy::Oneshot, Mode::Pull);
  one.append(1, {at1("a", cx()), at1("a", cy()), at1("a", cx())});
  CHECK(one.current_tick() == Tick{1, 2});
  CHECK(one.encoding_text().find("a_tick(x,1,1).") != std::string::npos);
  CHECK(one.encoding_text().find("a_tick(y,1,2).") != std::string::npos);
}

TEST_CASE("time regression is rejected") {
  Engine eng = make(kDiamond, Strategy::Incremental, Mode::Push);
  eng.append(5, {at1("a", cy())});
  CHECK_THROWS_AS(eng.append(3, {}), std::invalid_argument);
  CHECK(eng.evaluate(7).is_model());
  CHECK_THROWS_AS(eng.evaluate(6), std::invalid_argument);
  CHECK_THROWS_AS(eng.append(6, {}), std::invalid_argument);
  eng.append(7, {});  // the current time is still fine
}

TEST_CASE("non-ground signals are rejected") {
  Engine eng = make(kDiamond, Strategy::Incremental, Mode::Push);
  CHECK_THROWS_AS(eng.append(1, {at1("a", Term::var("X"))}),
                  std::invalid_argument);
}

TEST_CASE("silent gaps synthesize the missing ticks") {
  for (Strategy s : {Strategy::Oneshot, Strategy::Incremental}) {
    Engine eng = make(kDiamond, s, Mode::Pull);
    eng.append(0, {at1("a", cy())});
    EngineResult r = eng.evaluate(3);  // window 2 no longer reaches time 0
    REQUIRE(r.is_model());
    CHECK(r.atoms.empty());
    CHECK(eng.current_tick() == Tick{3, 1});
  }
}

TEST_CASE("an odd negative loop turns the incremental engine to Unknown") {
  Engine eng = make("a :- not a.\n", Strategy::Incremental, Mode::Push);
  EngineResult r = eng.evaluate(0);
  CHECK(r.kind == EngineResult::Kind::Unknown);
  CHECK(r.reason.find("odd-loop") != std::string::npos);
  CHECK(!eng.network_model().has_value());

  // The failure is sticky, and the engine keeps accepting ticks.
  eng.append(2, {});
  EngineResult later = eng.evaluate(3);
  CHECK(later.kind == EngineResult::Kind::Unknown);
  CHECK(eng.current_tick().time == 3);

  Engine one = make("a :- not a.\n", Strategy::Oneshot, Mode::Pull);
  CHECK(one.evaluate(0).kind == EngineResult::Kind::NoModel);
}

TEST_CASE("a solver budget overrun reports Unknown with a reason") {
  EngineConfig cfg;
  cfg.program = parse_program(
      "a :- not b.\nb :- not a.\nc :- not d.\nd :- not c.\n");
  cfg.strategy = Strategy::Oneshot;
  cfg.mode = Mode::Pull;
  cfg.solver_budget = 1;
  Engine eng(std::move(cfg));
  EngineResult r = eng.evaluate(0);
  CHECK(r.kind == EngineResult::Kind::Unknown);
  CHECK(r.reason.find("budget") != std::string::npos);
}

TEST_CASE("create rejects invalid and non-pre-groundable programs") {
  const std::string unguarded =
      "#ext s/1.\nq(X) :- s(X).\nc(X) :- [2 t] <> q(X).\n";
  CHECK_THROWS_AS(make(unguarded, Strategy::Incremental, Mode::Push),
                  std::invalid_argument);
  // The oneshot strategy has no pre-grounding step and accepts it.
  Engine one = make(unguarded, Strategy::Oneshot, Mode::Pull);
  one.append(0, {at1("s", cx())});
  EngineResult r = one.evaluate(0);
  REQUIRE(r.is_model());
  CHECK(r.atoms.count(at1("c", cx())) == 1);

  const std::string invalid = "#background d(1).\nd(X) :- [1 t] <> d(X).\n";
  CHECK_THROWS_AS(make(invalid, Strategy::Oneshot, Mode::Pull),
                  std::invalid_argument);
  CHECK_THROWS_AS(make(invalid, Strategy::Incremental, Mode::Pull),
                  std::invalid_argument);
}

TEST_CASE("push prepares after every append and pull recomputes on demand") {
  const std::string prog =
      "#ext s/1.\n#background dom(0..1).\n"
      "q(X) :- dom(X), [1 t] <> s(X).\n";
  Engine push = make(prog, Strategy::Incremental, Mode::Push);
  Engine pull = make(prog, Strategy::Incremental, Mode::Pull);

  push.append(1, {at1("s", Term::integer(0))});
  pull.append(1, {at1("s", Term::integer(0))});
  CHECK(push.evaluate(1) == pull.evaluate(1));

  push.append(3, {at1("s", Term::integer(1))});
  pull.append(3, {at1("s", Term::integer(1))});
  CHECK(push.evaluate(3) == pull.evaluate(3));
  CHECK(push.evaluate(4) == pull.evaluate(4));
}

TEST_CASE("garbage collection does not change reported models") {
  const std::string prog = "#ext s/1.\nq(X) :- [1 t] <> s(X).\n";
  Engine plain = make(prog, Strategy::Incremental, Mode::Push);
  Engine cut = make(prog, Strategy::Incremental, Mode::Push, true);

  std::vector<std::pair<TimePoint, Atom>> schedule = {
      {1, at1("s", cx())}, {3, at1("s", cy())}, {4, at1("s", cx())}};
  TimePoint t = 0;
  for (const auto& [at, atom] : schedule) {
    plain.append(at, {atom});
    cut.append(at, {atom});
    t = at;
    CHECK(plain.evaluate(t) == cut.evaluate(t));
  }
  CHECK(plain.evaluate(t + 2) == cut.evaluate(t + 2));
  CHECK(cut.current_ground().rules.size() <
        plain.current_ground().rules.size());
}

// ── Randomized strategy agreement ───────────────────────────────────────────

namespace {

struct EngineCase {
  std::string program;
  // Per time point 0..horizon: the signals appended there.
  std::vector<std::vector<Atom>> appends;
};

// Stratified programs in the engine-admissible fragment: window variables
// are either guarded by a background domain or absent, and negation never
// feeds back into its own definition.
EngineCase random_engine_case(std::mt19937& rng) {
  EngineCase ec;
  ec.program = "#ext s/1.\n#background dom(x). #background dom(y).\n";
  const int n_rules = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < n_rules; ++i) {
    const long long n = 1 + static_cast<long long>(rng() % 2);
    switch (rng() % 6) {
      case 0:
        ec.program += "q(X) :- dom(X), [" + std::to_string(n) + " t] <> s(X).\n";
        break;
      case 1:
        ec.program += "u(X) :- dom(X), [" + std::to_string(n) + " #] <> s(X).\n";
        break;
      case 2:
        ec.program += "v(X) :- dom(X), [" + std::to_string(n) + " t] [] s(X).\n";
        break;
      case 3:
        ec.program += "w(X) :- dom(X), [" + std::to_string(n) + " #] [] s(X).\n";
        break;
      case 4:
        ec.program += "@T p(X) :- dom(X), [" + std::to_string(n) + " t] @T s(X).\n";
        break;
      case 5:
        ec.program +=
            "r(X) :- dom(X), [" + std::to_string(n) + " t] <> s(X), not q(X).\n";
        break;
    }
  }
  // One consumer over a derived predicate, guarded as required.
  if (rng() % 2)
    ec.program += "z(X) :- dom(X), [1 t] <> q(X).\n";

  const int horizon = 1 + static_cast<int>(rng() % 4);
  ec.appends.resize(horizon + 1);
  for (auto& sig : ec.appends) {
    const int k = static_cast<int>(rng() % 3);
    for (int i = 0; i < k; ++i)
      sig.push_back(at1("s", rng() % 2 ? cx() : cy()));
  }
  return ec;
}

}  // namespace

TEST_CASE("both strategies report identical models on stratified programs") {
  std::mt19937 rng(46013);
  for (int round = 0; round < 40; ++round) {
    EngineCase ec = random_engine_case(rng);

    std::vector<Engine> engines;
    engines.push_back(make(ec.program, Strategy::Oneshot, Mode::Push));
    engines.push_back(make(ec.program, Strategy::Oneshot, Mode::Pull));
    engines.push_back(make(ec.program, Strategy::Incremental, Mode::Push));
    engines.push_back(make(ec.program, Strategy::Incremental, Mode::Pull));

    for (TimePoint t = 0; t < static_cast<TimePoint>(ec.appends.size()); ++t) {
      for (auto& eng : engines)
        eng.append(t, ec.appends[static_cast<std::size_t>(t)]);
      EngineResult reference = engines.front().evaluate(t);
      REQUIRE(reference.is_model());
      for (std::size_t i = 1; i < engines.size(); ++i) {
        EngineResult got = engines[i].evaluate(t);
        REQUIRE(got == reference);
      }

      // The maintained network model is an answer set of the maintained
      // ground program, tick for tick.
      for (auto& eng : engines) {
        if (eng.strategy() != Strategy::Incremental) continue;
        auto raw = eng.network_model();
        REQUIRE(raw.has_value());
        REQUIRE(is_answer_set(eng.current_ground(), *raw));
      }
    }
  }
}

TEST_CASE("engine bookkeeping exposes timing and configuration") {
  Engine eng = make(kDiamond, Strategy::Incremental, Mode::Push);
  CHECK(eng.init_seconds() >= 0.0);
  CHECK(eng.strategy() == Strategy::Incremental);
  CHECK(eng.mode() == Mode::Push);
  CHECK(eng.program().rules.size() == 1);
  CHECK(!eng.failed());
  CHECK(eng.encoding_text().find("[exp") != std::string::npos);
}
