// ============================================================================
// include/lars/program.hpp — Plain LARS programs
// ============================================================================
//
// Design notes
// ------------
// Extended atoms come in three forms: a plain atom, a time-pinned atom
// @_T a(X), and a window atom [w] MOD a(X) with MOD one of <> (sometime),
// [] (always), @_T (at). Rule heads are plain or time-pinned; bodies are
// lists of possibly negated extended atoms plus comparison guards.
//
// Predicates split into extensional (stream input, declared), background
// (facts only, used as domain guards), and intensional (everything defined
// by rule heads). validate() enforces the shape restrictions the evaluation
// strategies rely on; the engine refuses programs with violations.
// ============================================================================

#ifndef LARS_PROGRAM_HPP
#define LARS_PROGRAM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lars/atom.hpp"

namespace lars {

// ── Extended atoms ──────────────────────────────────────────────────────────

enum class Modality : std::uint8_t {
  Diamond,  // <>  holds at some time point of the window
  Box,      // []  holds at all time points of the window
  At,       // @T  holds at time point T of the window
};

enum class WindowKind : std::uint8_t {
  Time,     // [n t]  last n time points
  Tuple,    // [n #]  last n stream atoms
  TimeInf,  // unbounded time window; internal rewrite of body @-atoms
};

struct WindowSpec {
  WindowKind kind = WindowKind::Time;
  std::int64_t size = 0;  // >= 0 for time, >= 1 for tuple

  friend bool operator==(const WindowSpec& a, const WindowSpec& b) {
    return a.kind == b.kind && a.size == b.size;
  }
};

struct ExtendedAtom {
  enum class Form : std::uint8_t { Plain, At, Window };

  Form form = Form::Plain;
  Atom atom;
  Term at_time;                    // for At, and Window with Modality::At
  WindowSpec window;               // for Window
  Modality mod = Modality::Diamond;  // for Window

  static ExtendedAtom plain(Atom a) {
    ExtendedAtom e;
    e.form = Form::Plain;
    e.atom = std::move(a);
    return e;
  }
  static ExtendedAtom at(Term t, Atom a) {
    ExtendedAtom e;
    e.form = Form::At;
    e.atom = std::move(a);
    e.at_time = std::move(t);
    return e;
  }
  static ExtendedAtom win(WindowSpec w, Modality m, Atom a, Term at_time = {}) {
    ExtendedAtom e;
    e.form = Form::Window;
    e.atom = std::move(a);
    e.window = w;
    e.mod = m;
    e.at_time = std::move(at_time);
    return e;
  }

  bool is_window() const { return form == Form::Window; }
  bool has_at() const {
    return form == Form::At || (form == Form::Window && mod == Modality::At);
  }

  friend bool operator==(const ExtendedAtom& a, const ExtendedAtom& b) {
    if (a.form != b.form || a.atom != b.atom) return false;
    if (a.form == Form::Window && (!(a.window == b.window) || a.mod != b.mod))
      return false;
    if (a.has_at() && a.at_time != b.at_time) return false;
    return true;
  }
};

struct Literal {
  ExtendedAtom atom;
  bool negated = false;

  static Literal pos(ExtendedAtom e) { return Literal{std::move(e), false}; }
  static Literal neg(ExtendedAtom e) { return Literal{std::move(e), true}; }

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.negated == b.negated && a.atom == b.atom;
  }
};

// ── Comparison guards ───────────────────────────────────────────────────────

enum class CmpOp : std::uint8_t { Eq, Neq, Lt, Leq, Gt, Geq };

inline const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Neq: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Leq: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Geq: return ">=";
  }
  return "?";
}

// lhs OP rhs + offset. The offset form carries the encoder's tick arithmetic
// (T = N - i); surface programs use offset 0.
struct Guard {
  Term lhs;
  CmpOp op = CmpOp::Eq;
  Term rhs;
  std::int64_t offset = 0;

  static Guard cmp(Term l, CmpOp o, Term r, std::int64_t off = 0) {
    return Guard{std::move(l), o, std::move(r), off};
  }

  std::string to_string() const {
    std::string out = lhs.to_string();
    out += ' ';
    out += cmp_op_text(op);
    out += ' ';
    out += rhs.to_string();
    if (offset > 0) out += " + " + std::to_string(offset);
    if (offset < 0) out += " - " + std::to_string(-offset);
    return out;
  }

  friend bool operator==(const Guard& a, const Guard& b) {
    return a.lhs == b.lhs && a.op == b.op && a.rhs == b.rhs && a.offset == b.offset;
  }
};

// ── Rules and programs ──────────────────────────────────────────────────────

struct LarsRule {
  ExtendedAtom head;  // Plain or At
  std::vector<Literal> body;
  std::vector<Guard> guards;

  friend bool operator==(const LarsRule& a, const LarsRule& b) {
    return a.head == b.head && a.body == b.body && a.guards == b.guards;
  }
};

struct PredSig {
  std::string name;
  std::size_t arity = 0;
  friend bool operator<(const PredSig& a, const PredSig& b) {
    return a.name != b.name ? a.name < b.name : a.arity < b.arity;
  }
  friend bool operator==(const PredSig& a, const PredSig& b) {
    return a.name == b.name && a.arity == b.arity;
  }
};

struct LarsProgram {
  std::vector<LarsRule> rules;
  std::set<PredSig> extensional;  // declared stream input predicates
  std::vector<Atom> background;   // ground facts, domain guards

  bool is_extensional(const std::string& pred, std::size_t arity) const {
    return extensional.count(PredSig{pred, arity}) != 0;
  }

  std::set<std::string> background_preds() const {
    std::set<std::string> out;
    for (const auto& a : background) out.insert(a.pred);
    return out;
  }

  std::set<std::string> head_preds() const {
    std::set<std::string> out;
    for (const auto& r : rules) out.insert(r.head.atom.pred);
    return out;
  }
};

// ── Validation ──────────────────────────────────────────────────────────────

struct ValidationIssue {
  enum class Code : std::uint8_t {
    TupleWindowIntensional,  // tuple window over a non-extensional predicate
    ExtensionalHead,         // rule head uses a declared input predicate
    TimeBoxCycle,            // positive cycle through a time [] window atom
    BackgroundMisuse,        // background predicate in head, #ext, window or @
    ReservedName,            // predicate collides with encoding names
    UnsafeRule,              // variable not bound by the positive body
    BadWindowSize,           // negative time size or non-positive tuple size
    NonGroundBackground,
  };
  Code code;
  int rule_index;  // -1 when not tied to a rule
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const {
    std::string out;
    for (const auto& i : issues) {
      if (!out.empty()) out += '\n';
      if (i.rule_index >= 0) out += "rule " + std::to_string(i.rule_index + 1) + ": ";
      out += i.message;
    }
    return out;
  }
};

namespace detail {

inline bool reserved_pred(const std::string& p) {
  if (p == "now" || p == "cnt" || p == "tick") return true;
  auto ends_with = [&](const char* suf) {
    std::string s(suf);
    return p.size() >= s.size() && p.compare(p.size() - s.size(), s.size(), s) == 0;
  };
  auto starts_with = [&](const char* pre) {
    std::string s(pre);
    return p.size() >= s.size() && p.compare(0, s.size(), s) == 0;
  };
  return ends_with("_at") || ends_with("_tick") || starts_with("w_") ||
         starts_with("spoil_") || starts_with("covers_");
}

inline void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) out.insert(t.name);
}

inline void collect_vars(const Atom& a, std::set<std::string>& out) {
  for (const auto& t : a.args) collect_vars(t, out);
}

inline void collect_vars(const ExtendedAtom& e, std::set<std::string>& out) {
  collect_vars(e.atom, out);
  if (e.has_at()) collect_vars(e.at_time, out);
}

}  // namespace detail

inline ValidationReport validate(const LarsProgram& p) {
  ValidationReport rep;
  auto issue = [&](ValidationIssue::Code c, int ri, std::string msg) {
    rep.issues.push_back({c, ri, std::move(msg)});
  };

  const std::set<std::string> bg = p.background_preds();

  for (const auto& a : p.background)
    if (!a.is_ground()) {
      issue(ValidationIssue::Code::NonGroundBackground, -1,
            "background atom " + a.to_string() + " is not ground");
      break;
    }

  for (const auto& sig : p.extensional) {
    if (detail::reserved_pred(sig.name))
      issue(ValidationIssue::Code::ReservedName, -1,
            "input predicate " + sig.name + " uses a reserved name");
    if (bg.count(sig.name))
      issue(ValidationIssue::Code::BackgroundMisuse, -1,
            "predicate " + sig.name + " is both background and input");
  }
  for (const auto& b : bg)
    if (detail::reserved_pred(b))
      issue(ValidationIssue::Code::ReservedName, -1,
            "background predicate " + b + " uses a reserved name");

  // Positive predicate dependency edges, flagged when the edge crosses a
  // time [] window; a cycle through such an edge breaks both strategies.
  std::map<std::string, std::set<std::string>> pos_edges;
  std::set<std::pair<std::string, std::string>> timebox_edges;

  for (std::size_t ri = 0; ri < p.rules.size(); ++ri) {
    const LarsRule& r = p.rules[ri];
    const int i = static_cast<int>(ri);
    const std::string& hp = r.head.atom.pred;

    if (detail::reserved_pred(hp))
      issue(ValidationIssue::Code::ReservedName, i,
            "head predicate " + hp + " uses a reserved name");
    if (p.is_extensional(hp, r.head.atom.arity()))
      issue(ValidationIssue::Code::ExtensionalHead, i,
            "head predicate " + hp + " is declared as stream input");
    if (bg.count(hp))
      issue(ValidationIssue::Code::BackgroundMisuse, i,
            "head predicate " + hp + " is a background predicate");
    if (r.head.form == ExtendedAtom::Form::Window)
      issue(ValidationIssue::Code::UnsafeRule, i, "window atom as rule head");

    std::set<std::string> pos_vars;
    for (const auto& lit : r.body) {
      const ExtendedAtom& e = lit.atom;
      const std::string& ep = e.atom.pred;
      if (detail::reserved_pred(ep))
        issue(ValidationIssue::Code::ReservedName, i,
              "body predicate " + ep + " uses a reserved name");
      if (e.form == ExtendedAtom::Form::Window) {
        if (e.window.kind == WindowKind::Time && e.window.size < 0)
          issue(ValidationIssue::Code::BadWindowSize, i, "negative time window size");
        if (e.window.kind == WindowKind::Tuple && e.window.size < 1)
          issue(ValidationIssue::Code::BadWindowSize, i,
                "tuple window size must be at least 1");
        if (e.window.kind == WindowKind::Tuple &&
            !p.is_extensional(ep, e.atom.arity()))
          issue(ValidationIssue::Code::TupleWindowIntensional, i,
                "tuple window over non-input predicate " + ep);
      }
      if (e.form != ExtendedAtom::Form::Plain && bg.count(ep))
        issue(ValidationIssue::Code::BackgroundMisuse, i,
              "background predicate " + ep + " under a window or @");
      if (!lit.negated) {
        detail::collect_vars(e, pos_vars);
        if (!p.is_extensional(ep, e.atom.arity()) && !bg.count(ep)) {
          pos_edges[hp].insert(ep);
          if (e.form == ExtendedAtom::Form::Window && e.mod == Modality::Box &&
              e.window.kind == WindowKind::Time)
            timebox_edges.insert({hp, ep});
        }
      }
    }

    // Safety: head, negated literals, and guards draw on positive body vars.
    std::set<std::string> need;
    detail::collect_vars(r.head, need);
    for (const auto& lit : r.body)
      if (lit.negated) detail::collect_vars(lit.atom, need);
    for (const auto& g : r.guards) {
      detail::collect_vars(g.lhs, need);
      detail::collect_vars(g.rhs, need);
    }
    for (const auto& v : need)
      if (!pos_vars.count(v)) {
        issue(ValidationIssue::Code::UnsafeRule, i,
              "variable " + v + " does not occur in the positive body");
        break;
      }
  }

  // Tarjan-free cycle check: an edge lies on a cycle iff both endpoints are
  // in one strongly connected component; SCCs via iterative DFS would be
  // overkill at this scale, so use reachability.
  auto reaches = [&](const std::string& from, const std::string& to) {
    std::set<std::string> seen{from};
    std::vector<std::string> stack{from};
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      if (cur == to) return true;
      auto it = pos_edges.find(cur);
      if (it == pos_edges.end()) continue;
      for (const auto& nxt : it->second)
        if (seen.insert(nxt).second) stack.push_back(nxt);
    }
    return false;
  };
  for (const auto& [h, b] : timebox_edges) {
    if (reaches(b, h)) {
      rep.issues.push_back({ValidationIssue::Code::TimeBoxCycle, -1,
                            "positive cycle through a time [] window between " +
                                h + " and " + b});
    }
  }

  return rep;
}

}  // namespace lars

#endif  // LARS_PROGRAM_HPP
