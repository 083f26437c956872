// ============================================================================
// tests/test_encoder.cpp — LARS to ASP translation and stream encoding
// ============================================================================

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lars/encoder.hpp"
#include "lars/parser.hpp"
#include "lars/semantics.hpp"
#include "lars/solver.hpp"

using namespace lars;

namespace {

Atom at0(const std::string& p) { return Atom::make(p, {}); }
Atom at1(const std::string& p, const Term& t) { return Atom::make(p, {t}); }
Term cx() { return Term::sym("x"); }
Term cy() { return Term::sym("y"); }

// Ground-and-solve convenience for a program at time t over data d.
std::vector<Model> solve_encoding(const LarsProgram& p, const TickStream& d,
                                  TimePoint t) {
  AspProgram enc = lars_to_asp(p, t);
  append_facts(enc, encode_stream(d));
  return answer_sets(ground_program(enc));
}

bool aux_pred(const std::string& pred) {
  auto has_prefix = [&](const std::string& pre) {
    return pred.rfind(pre, 0) == 0;
  };
  auto has_suffix = [&](const std::string& suf) {
    return pred.size() >= suf.size() &&
           pred.compare(pred.size() - suf.size(), suf.size(), suf) == 0;
  };
  return pred == "now" || pred == "cnt" || pred == "tick" ||
         has_prefix("w_") || has_prefix("spoil_") || has_prefix("covers_") ||
         has_suffix("_tick");
}

// Reads a solver model back as a stream evaluation: every non-auxiliary
// time-pinned atom contributes its plain form at the pinned time. Plain
// atoms carry no time and are covered by the bridge-derived pinned form.
std::map<TimePoint, std::set<Atom>> read_back(const Model& m,
                                              const std::set<std::string>& bg) {
  std::map<TimePoint, std::set<Atom>> eval;
  for (const auto& a : m) {
    if (aux_pred(a.pred)) continue;
    const std::string suf = "_at";
    if (a.pred.size() <= suf.size() ||
        a.pred.compare(a.pred.size() - suf.size(), suf.size(), suf) != 0)
      continue;
    std::string base = a.pred.substr(0, a.pred.size() - suf.size());
    if (bg.count(base)) continue;
    REQUIRE(!a.args.empty());
    REQUIRE(a.args.back().is_int());
    Atom plain;
    plain.pred = base;
    plain.args.assign(a.args.begin(), a.args.end() - 1);
    eval[a.args.back().num].insert(plain);
  }
  return eval;
}

}  // namespace

// ── Program translation goldens ─────────────────────────────────────────────

TEST_CASE("single diamond rule translates to the frozen encoding") {
  LarsProgram p = parse_program(
      "#ext a/1.\n"
      "b(X) :- [2 t] <> a(X).\n");
  AspProgram enc = lars_to_asp(p, 7);
  CHECK(to_text(enc) ==
        "a(X1) :- now(NN), a_at(X1,NN).\n"
        "a_at(X1,NN) :- now(NN), a(X1).\n"
        "b(X1) :- now(NN), b_at(X1,NN).\n"
        "b_at(X1,NN) :- now(NN), b(X1).\n"
        "b(X) :- w_r1_b1_t2_d_a(X).\n"
        "w_r1_b1_t2_d_a(X) :- now(NN), a_at(X,T), T = NN.\n"
        "w_r1_b1_t2_d_a(X) :- now(NN), a_at(X,T), T = NN - 1.\n"
        "w_r1_b1_t2_d_a(X) :- now(NN), a_at(X,T), T = NN - 2.\n"
        "now(7).\n");
}

TEST_CASE("empty program translates to the now fact alone") {
  LarsProgram p;
  AspProgram enc = lars_to_asp(p, 5);
  CHECK(to_text(enc) == "now(5).\n");
}

TEST_CASE("translation rejects invalid programs") {
  LarsProgram p = parse_program("b :- [2 t] [] b.\n");
  CHECK_THROWS_AS(lars_to_asp(p, 0), std::invalid_argument);
}

TEST_CASE("base rule pins @-heads and keeps guards") {
  LarsProgram p = parse_program(
      "#ext alpha/1.\n"
      "#background value(0..1).\n"
      "@T high :- value(V), [5 t] @T alpha(V), V >= 18.\n");
  AspRule r = base_rule(p.rules[0], 1);
  CHECK(to_text(r) ==
        "high_at(T) :- value(V), w_r1_b2_t5_a_alpha(V,T), V >= 18.");
}

TEST_CASE("base rule keeps negation on encoded atoms") {
  LarsProgram p = parse_program(
      "#ext a/0.\n"
      "q :- [1 t] <> a, not r.\n"
      "r :- q.\n");
  AspRule r = base_rule(p.rules[0], 1);
  CHECK(to_text(r) == "q :- w_r1_b1_t1_d_a, not r.");
}

// ── Window rule families ────────────────────────────────────────────────────

TEST_CASE("plain and @-atoms need no window rules") {
  CHECK(window_rules(ExtendedAtom::plain(at1("a", cx())), 1, 1).empty());
  CHECK(window_rules(ExtendedAtom::at(Term::integer(3), at1("a", cx())), 1, 1)
            .empty());
}

TEST_CASE("time box produces the window rule and one spoiler per step") {
  ExtendedAtom e = ExtendedAtom::win(WindowSpec{WindowKind::Time, 2},
                                     Modality::Box, at1("a", Term::var("X")));
  auto rs = window_rules(e, 1, 1);
  REQUIRE(rs.size() == 3);
  CHECK(to_text(rs[0]) == "w_r1_b1_t2_b_a(X) :- a(X), not spoil_r1_b1_t2_b_a(X).");
  CHECK(to_text(rs[1]) ==
        "spoil_r1_b1_t2_b_a(X) :- a(X), now(NN), not a_at(X,T), T = NN - 1.");
  CHECK(to_text(rs[2]) ==
        "spoil_r1_b1_t2_b_a(X) :- a(X), now(NN), not a_at(X,T), T = NN - 2.");
}

TEST_CASE("time box of size zero has no spoiler") {
  ExtendedAtom e = ExtendedAtom::win(WindowSpec{WindowKind::Time, 0},
                                     Modality::Box, at0("a"));
  auto rs = window_rules(e, 2, 3);
  REQUIRE(rs.size() == 1);
  CHECK(to_text(rs[0]) == "w_r2_b3_t0_b_a :- a, not spoil_r2_b3_t0_b_a.");
}

TEST_CASE("tuple @ counts back over tick-pinned atoms") {
  ExtendedAtom e =
      ExtendedAtom::win(WindowSpec{WindowKind::Tuple, 2}, Modality::At,
                        at1("a", Term::var("X")));
  e.at_time = Term::var("T");
  auto rs = window_rules(e, 1, 2);
  REQUIRE(rs.size() == 2);
  CHECK(to_text(rs[0]) ==
        "w_r1_b2_h2_a_a(X,T) :- cnt(CC), a_tick(X,T,D), D = CC.");
  CHECK(to_text(rs[1]) ==
        "w_r1_b2_h2_a_a(X,T) :- cnt(CC), a_tick(X,T,D), D = CC - 1.");
}

TEST_CASE("tuple box spoils by time range and by cut-off position") {
  ExtendedAtom e = ExtendedAtom::win(WindowSpec{WindowKind::Tuple, 2},
                                     Modality::Box, at0("a"));
  auto rs = window_rules(e, 1, 1);
  REQUIRE(rs.size() == 3);
  CHECK(to_text(rs[0]) == "w_r1_b1_h2_b_a :- a, not spoil_r1_b1_h2_b_a.");
  CHECK(to_text(rs[1]) ==
        "spoil_r1_b1_h2_b_a :- a, cnt(CC), tick(T,D), not a_at(T), "
        "D >= CC - 1, D <= CC.");
  CHECK(to_text(rs[2]) ==
        "spoil_r1_b1_h2_b_a :- a, cnt(CC), tick(T,D), a_tick(T,DP), "
        "D = CC - 1, DP < D.");
}

TEST_CASE("synthetic variables avoid the atom's own variables") {
  ExtendedAtom e = ExtendedAtom::win(WindowSpec{WindowKind::Time, 1},
                                     Modality::Diamond, at1("a", Term::var("T")));
  auto rs = window_rules(e, 1, 1);
  REQUIRE(rs.size() == 2);
  CHECK(to_text(rs[0]) == "w_r1_b1_t1_d_a(T) :- now(NN), a_at(T,TX), TX = NN.");
}

// ── Stream encoding ─────────────────────────────────────────────────────────

TEST_CASE("stream encoding lists pinned atoms, count, and ticks") {
  TickStream d = TickStream::origin();
  d.advance_time();
  d.advance_time();
  d.advance_time();  // (3,0)
  d.append_atom(at0("a"));
  d.append_atom(at0("b"));
  d.advance_time();  // (4,2)

  std::vector<Atom> expect{
      at1("a_at", Term::integer(3)),
      at1("b_at", Term::integer(3)),
      Atom::make("a_tick", {Term::integer(3), Term::integer(1)}),
      Atom::make("b_tick", {Term::integer(3), Term::integer(2)}),
      at1("cnt", Term::integer(2)),
      Atom::make("tick", {Term::integer(0), Term::integer(0)}),
      Atom::make("tick", {Term::integer(1), Term::integer(0)}),
      Atom::make("tick", {Term::integer(2), Term::integer(0)}),
      Atom::make("tick", {Term::integer(3), Term::integer(0)}),
      Atom::make("tick", {Term::integer(3), Term::integer(1)}),
      Atom::make("tick", {Term::integer(3), Term::integer(2)}),
      Atom::make("tick", {Term::integer(4), Term::integer(2)}),
  };
  CHECK(encode_stream(d) == expect);
}

TEST_CASE("empty tick stream encodes to count and origin tick") {
  TickStream d = TickStream::origin();
  std::vector<Atom> expect{
      at1("cnt", Term::integer(0)),
      Atom::make("tick", {Term::integer(0), Term::integer(0)}),
  };
  CHECK(encode_stream(d) == expect);
}

// ── End to end against the solver ───────────────────────────────────────────

TEST_CASE("diamond window program solves to the expected answer set") {
  LarsProgram p = parse_program(
      "#ext a/1.\n"
      "b(X) :- [2 t] <> a(X).\n");
  TickStream d = TickStream::origin();
  for (int i = 0; i < 5; ++i) d.advance_time();  // (5,0)
  d.append_atom(at1("a", cy()));                 // (5,1)
  d.advance_time();
  d.advance_time();  // (7,1)

  auto models = solve_encoding(p, d, 7);
  REQUIRE(models.size() == 1);
  const Model& m = models[0];
  CHECK(m.count(at1("b", cy())));
  CHECK(m.count(Atom::make("a_at", {cy(), Term::integer(5)})));
  CHECK(m.count(Atom::make("b_at", {cy(), Term::integer(7)})));
  CHECK(m.count(at1("now", Term::integer(7))));
  CHECK(m.count(at1("cnt", Term::integer(1))));
  CHECK(m.count(Atom::make("a_tick", {cy(), Term::integer(5), Term::integer(1)})));
  CHECK(m.count(at1("w_r1_b1_t2_d_a", cy())));
  CHECK_FALSE(m.count(at1("b", cx())));

  // Projection to the stream view: data plus b at 7.
  auto eval = read_back(m, {});
  std::map<TimePoint, std::set<Atom>> expect{
      {5, {at1("a", cy())}},
      {7, {at1("b", cy())}},
  };
  CHECK(eval == expect);
}

TEST_CASE("signal outside the window derives nothing") {
  LarsProgram p = parse_program(
      "#ext a/1.\n"
      "b(X) :- [1 t] <> a(X).\n");
  TickStream d = TickStream::origin();
  for (int i = 0; i < 5; ++i) d.advance_time();
  d.append_atom(at1("a", cy()));  // (5,1)
  d.advance_time();
  d.advance_time();  // (7,1)

  auto models = solve_encoding(p, d, 7);
  REQUIRE(models.size() == 1);
  CHECK_FALSE(models[0].count(at1("b", cy())));
}

TEST_CASE("tuple box respects the cut-off position inside a time point") {
  // Stream: a and b arrive at 3, a arrives at 4; evaluated at 4.
  TickStream d = TickStream::origin();
  d.advance_time();
  d.advance_time();
  d.advance_time();          // (3,0)
  d.append_atom(at0("a"));   // (3,1)
  d.append_atom(at0("b"));   // (3,2)
  d.advance_time();          // (4,2)
  d.append_atom(at0("a"));   // (4,3)

  LarsProgram two = parse_program(
      "#ext a/0, b/0.\n"
      "q :- [2 #] [] a.\n");
  auto m2 = solve_encoding(two, d, 4);
  REQUIRE(m2.size() == 1);
  // Window of the last 2 tuples covers counts {2,3}, so at time 3 the
  // only occurrence of a has count 1 and spoils the box.
  CHECK_FALSE(m2[0].count(at0("q")));
  CHECK(m2[0].count(at0("spoil_r1_b1_h2_b_a")));

  LarsProgram three = parse_program(
      "#ext a/0, b/0.\n"
      "q :- [3 #] [] a.\n");
  auto m3 = solve_encoding(three, d, 4);
  REQUIRE(m3.size() == 1);
  CHECK(m3[0].count(at0("q")));
}

TEST_CASE("background joins work through the encoding") {
  LarsProgram p = parse_program(
      "#ext alpha/1.\n"
      "#background value(0..30).\n"
      "@T high :- value(V), [5 t] @T alpha(V), V >= 18.\n");
  TickStream d = TickStream::origin();
  d.advance_time();
  d.advance_time();  // (2,0)
  d.append_atom(at1("alpha", Term::integer(20)));  // (2,1)
  d.advance_time();  // (3,1)

  auto models = solve_encoding(p, d, 3);
  REQUIRE(models.size() == 1);
  CHECK(models[0].count(at1("high_at", Term::integer(2))));
  CHECK_FALSE(models[0].count(at1("high_at", Term::integer(3))));

  // A low reading stays below the band.
  TickStream d2 = TickStream::origin();
  d2.advance_time();
  d2.advance_time();
  d2.append_atom(at1("alpha", Term::integer(5)));
  d2.advance_time();
  auto models2 = solve_encoding(p, d2, 3);
  REQUIRE(models2.size() == 1);
  for (const auto& a : models2[0]) CHECK(a.pred != "high_at");
}

TEST_CASE("translation output is deterministic") {
  const std::string text =
      "#ext a/1, s/2.\n"
      "#background value(0..3).\n"
      "q(X) :- [2 t] <> a(X), not b(X).\n"
      "b(X) :- value(X), [1 #] <> a(X).\n"
      "@T c(X) :- [3 t] @T a(X).\n";
  LarsProgram p1 = parse_program(text);
  LarsProgram p2 = parse_program(text);
  CHECK(to_text(lars_to_asp(p1, 9)) == to_text(lars_to_asp(p2, 9)));
}

// ── Random agreement with the reference semantics ───────────────────────────

namespace {

struct RandomCase {
  LarsProgram program;
  TickStream data;
  TimePoint t = 0;
};

RandomCase random_case(std::mt19937& rng) {
  RandomCase rc;
  rc.program.extensional.insert(PredSig{"s", 1});

  auto var_x = Term::var("X");
  auto var_t = Term::var("T");
  auto s_x = ExtendedAtom::plain(at1("s", var_x));
  auto q_x = at1("q", var_x);
  auto b_x = at1("b", var_x);

  const int n_rules = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < n_rules; ++i) {
    LarsRule r;
    switch (rng() % 8) {
      case 0: {  // q(X) :- [n t] <> s(X).
        r.head = ExtendedAtom::plain(q_x);
        r.body.push_back(Literal::pos(ExtendedAtom::win(
            WindowSpec{WindowKind::Time, static_cast<long long>(rng() % 3)},
            Modality::Diamond, at1("s", var_x))));
        break;
      }
      case 1: {  // q(X) :- [n #] <> s(X).
        r.head = ExtendedAtom::plain(q_x);
        r.body.push_back(Literal::pos(ExtendedAtom::win(
            WindowSpec{WindowKind::Tuple, 1 + static_cast<long long>(rng() % 2)},
            Modality::Diamond, at1("s", var_x))));
        break;
      }
      case 2: {  // b(X) :- [n t] [] s(X).
        r.head = ExtendedAtom::plain(b_x);
        r.body.push_back(Literal::pos(ExtendedAtom::win(
            WindowSpec{WindowKind::Time, static_cast<long long>(rng() % 3)},
            Modality::Box, at1("s", var_x))));
        break;
      }
      case 3: {  // @T q(X) :- [n t] @T s(X).
        r.head = ExtendedAtom::at(var_t, q_x);
        ExtendedAtom w = ExtendedAtom::win(
            WindowSpec{WindowKind::Time, static_cast<long long>(rng() % 3)},
            Modality::At, at1("s", var_x));
        w.at_time = var_t;
        r.body.push_back(Literal::pos(w));
        break;
      }
      case 4: {  // q(X) :- s(X).
        r.head = ExtendedAtom::plain(q_x);
        r.body.push_back(Literal::pos(s_x));
        break;
      }
      case 5: {  // b(X) :- [n t] <> s(X), not q(X).
        r.head = ExtendedAtom::plain(b_x);
        r.body.push_back(Literal::pos(ExtendedAtom::win(
            WindowSpec{WindowKind::Time, static_cast<long long>(rng() % 3)},
            Modality::Diamond, at1("s", var_x))));
        r.body.push_back(Literal::neg(ExtendedAtom::plain(q_x)));
        break;
      }
      case 6: {  // q(X) :- [n #] [] s(X).
        r.head = ExtendedAtom::plain(q_x);
        r.body.push_back(Literal::pos(ExtendedAtom::win(
            WindowSpec{WindowKind::Tuple, 1 + static_cast<long long>(rng() % 2)},
            Modality::Box, at1("s", var_x))));
        break;
      }
      case 7: {  // choice pair over ground atoms
        LarsRule other;
        r.head = ExtendedAtom::plain(at1("q", cx()));
        r.body.push_back(Literal::neg(ExtendedAtom::plain(at1("b", cx()))));
        other.head = ExtendedAtom::plain(at1("b", cx()));
        other.body.push_back(Literal::neg(ExtendedAtom::plain(at1("q", cx()))));
        rc.program.rules.push_back(other);
        break;
      }
    }
    rc.program.rules.push_back(std::move(r));
  }

  rc.data = TickStream::origin();
  const int t_end = 1 + static_cast<int>(rng() % 3);
  const int n_signals = static_cast<int>(rng() % 5);
  std::vector<std::pair<TimePoint, Atom>> signals;
  for (int i = 0; i < n_signals; ++i) {
    TimePoint at = static_cast<TimePoint>(rng() % (t_end + 1));
    signals.emplace_back(at, at1("s", rng() % 2 ? cx() : cy()));
  }
  // Canonical data streams list each atom at most once per time point; the
  // engine enforces this by deduplicating arriving signals.
  std::sort(signals.begin(), signals.end());
  signals.erase(std::unique(signals.begin(), signals.end()), signals.end());
  for (const auto& [at, atom] : signals) {
    while (rc.data.now().time < at) rc.data.advance_time();
    rc.data.append_atom(atom);
  }
  while (rc.data.now().time < t_end) rc.data.advance_time();
  rc.t = t_end;
  return rc;
}

}  // namespace

TEST_CASE("one-shot encoding matches the reference semantics") {
  std::mt19937 rng(46012);
  for (int round = 0; round < 120; ++round) {
    RandomCase rc = random_case(rng);
    REQUIRE(validate(rc.program).ok());

    auto models = solve_encoding(rc.program, rc.data, rc.t);
    std::set<std::map<TimePoint, std::set<Atom>>> via_encoding;
    for (const auto& m : models) via_encoding.insert(read_back(m, {}));

    std::set<std::map<TimePoint, std::set<Atom>>> via_oracle;
    for (const auto& s : answer_streams(rc.program, rc.data, rc.t))
      via_oracle.insert(s.eval);

    REQUIRE(models.size() == via_encoding.size());
    CHECK(via_encoding == via_oracle);
  }
}
