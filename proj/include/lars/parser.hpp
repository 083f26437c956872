// ============================================================================
// include/lars/parser.hpp — Program and signal text formats
// ============================================================================
//
// Design notes
// ------------
// Line-oriented, ASP-like surface syntax:
//
//   % comment
//   #ext alpha/1.
//   #background value(0..30).          (".." expands integer ranges)
//   b(X) :- [2 t] <> a(X).
//   @T high :- value(V), [5 t] @T alpha(V), V >= 18.
//   done :- [10 #] [] busy.
//
// Signal lines pair a time point with one ground atom: `5 alpha(17)`.
// Simultaneous signals arrive as separate lines; line order fixes their
// tick-count order.
//
// The printer inverts the parser: formatting a rule and re-parsing it yields
// a structurally equal rule.
// ============================================================================

#ifndef LARS_PARSER_HPP
#define LARS_PARSER_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lars/atom.hpp"
#include "lars/program.hpp"
#include "lars/stream.hpp"

namespace lars {

// ── Errors ──────────────────────────────────────────────────────────────────

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line, int col)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int column() const { return col_; }

 private:
  int line_;
  int col_;
};

// ── Signal events ───────────────────────────────────────────────────────────

struct SignalEvent {
  TimePoint time = 0;
  Atom atom;

  friend bool operator==(const SignalEvent& a, const SignalEvent& b) {
    return a.time == b.time && a.atom == b.atom;
  }
};

namespace detail {

// ── Lexer ───────────────────────────────────────────────────────────────────

enum class TokKind : std::uint8_t { Ident, Var, Int, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  std::int64_t num = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string text) : src_(std::move(text)) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok_.line, tok_.col);
  }

 private:
  void advance() {
    skip_space_and_comments();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = Token{TokKind::End, "", 0, line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_int();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      lex_word();
      return;
    }
    lex_punct();
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void lex_int() {
    std::string digits;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      digits += src_[pos_];
      bump();
    }
    tok_.kind = TokKind::Int;
    tok_.text = digits;
    tok_.num = std::stoll(digits);
  }

  void lex_word() {
    std::string word;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_')) {
      word += src_[pos_];
      bump();
    }
    tok_.kind = std::isupper(static_cast<unsigned char>(word[0]))
                    ? TokKind::Var
                    : TokKind::Ident;
    tok_.text = word;
  }

  void lex_punct() {
    static const char* kPairs[] = {":-", "..", "<>", "<=", ">=", "!=", "[]"};
    for (const char* p : kPairs) {
      if (src_.compare(pos_, 2, p) == 0) {
        tok_.kind = TokKind::Punct;
        tok_.text = p;
        bump();
        bump();
        return;
      }
    }
    static const std::string kSingles = ".,()[]<>=@#/+-";
    char c = src_[pos_];
    if (kSingles.find(c) == std::string::npos)
      throw ParseError(std::string("unexpected character '") + c + "'", line_,
                       col_);
    tok_.kind = TokKind::Punct;
    tok_.text = std::string(1, c);
    bump();
  }

  std::string src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

// ── Parser ──────────────────────────────────────────────────────────────────

class Parser {
 public:
  explicit Parser(std::string text) : lx_(std::move(text)) {}

  LarsProgram program() {
    LarsProgram p;
    while (lx_.peek().kind != TokKind::End) {
      if (is_punct("#")) {
        directive(p);
      } else {
        p.rules.push_back(rule());
      }
    }
    return p;
  }

  LarsRule rule() {
    LarsRule r;
    r.head = extended_atom();
    if (r.head.form == ExtendedAtom::Form::Window)
      lx_.fail("window atom cannot be a rule head");
    if (is_punct(":-")) {
      lx_.next();
      body_into(r);
    }
    expect_punct(".");
    return r;
  }

  SignalEvent signal() {
    if (lx_.peek().kind != TokKind::Int) lx_.fail("expected a time point");
    Token t = lx_.next();
    Atom a = atom();
    if (lx_.peek().kind != TokKind::End) lx_.fail("trailing input after signal");
    if (!a.is_ground())
      throw ParseError("signal atom " + a.to_string() + " is not ground", t.line,
                       t.col);
    return SignalEvent{t.num, std::move(a)};
  }

 private:
  bool is_punct(const char* p) const {
    return lx_.peek().kind == TokKind::Punct && lx_.peek().text == p;
  }

  Token expect_punct(const char* p) {
    if (!is_punct(p)) lx_.fail(std::string("expected '") + p + "'");
    return lx_.next();
  }

  Token expect(TokKind k, const char* what) {
    if (lx_.peek().kind != k) lx_.fail(std::string("expected ") + what);
    return lx_.next();
  }

  void directive(LarsProgram& p) {
    expect_punct("#");
    Token name = expect(TokKind::Ident, "directive name");
    if (name.text == "ext") {
      for (;;) {
        Token pred = expect(TokKind::Ident, "predicate name");
        expect_punct("/");
        Token ar = expect(TokKind::Int, "arity");
        p.extensional.insert(
            PredSig{pred.text, static_cast<std::size_t>(ar.num)});
        if (!is_punct(",")) break;
        lx_.next();
      }
    } else if (name.text == "background") {
      for (;;) {
        for (Atom& a : background_atoms()) p.background.push_back(std::move(a));
        if (!is_punct(",")) break;
        lx_.next();
      }
    } else {
      throw ParseError("unknown directive #" + name.text, name.line, name.col);
    }
    expect_punct(".");
  }

  // Background atoms may use integer ranges: value(0..3) expands to four
  // facts. Ranges are rejected everywhere else.
  std::vector<Atom> background_atoms() {
    Token pred = expect(TokKind::Ident, "predicate name");
    std::vector<std::vector<Term>> columns;
    if (is_punct("(")) {
      lx_.next();
      for (;;) {
        columns.push_back(range_term());
        if (is_punct(",")) {
          lx_.next();
          continue;
        }
        break;
      }
      expect_punct(")");
    }
    std::vector<Atom> out{Atom::make(pred.text, {})};
    for (const auto& col : columns) {
      std::vector<Atom> next;
      next.reserve(out.size() * col.size());
      for (const auto& base : out)
        for (const auto& t : col) {
          Atom a = base;
          a.args.push_back(t);
          next.push_back(std::move(a));
        }
      out = std::move(next);
    }
    return out;
  }

  std::vector<Term> range_term() {
    Term first = term();
    if (!is_punct("..")) return {first};
    Token dots = lx_.next();
    Term last = term();
    if (!first.is_int() || !last.is_int() || first.num > last.num)
      throw ParseError("invalid integer range", dots.line, dots.col);
    std::vector<Term> out;
    for (std::int64_t v = first.num; v <= last.num; ++v)
      out.push_back(Term::integer(v));
    return out;
  }

  void body_into(LarsRule& r) {
    for (;;) {
      body_element(r);
      if (is_punct(",")) {
        lx_.next();
        continue;
      }
      break;
    }
  }

  void body_element(LarsRule& r) {
    if (lx_.peek().kind == TokKind::Ident && lx_.peek().text == "not") {
      lx_.next();
      r.body.push_back(Literal::neg(extended_atom()));
      return;
    }
    if (is_punct("@") || is_punct("[")) {
      r.body.push_back(Literal::pos(extended_atom()));
      return;
    }
    // Plain atom or comparison guard; decided by what follows the first term.
    Token first = lx_.peek();
    if (first.kind == TokKind::Ident) {
      Atom a = atom();
      if (a.args.empty() && peek_cmp()) {
        r.guards.push_back(guard_tail(Term::sym(a.pred)));
        return;
      }
      r.body.push_back(Literal::pos(ExtendedAtom::plain(std::move(a))));
      return;
    }
    if (first.kind == TokKind::Var || first.kind == TokKind::Int ||
        is_punct("-")) {
      Term lhs = term();
      if (!peek_cmp()) lx_.fail("expected a comparison operator");
      r.guards.push_back(guard_tail(std::move(lhs)));
      return;
    }
    lx_.fail("expected a body literal or comparison");
  }

  bool peek_cmp() const {
    if (lx_.peek().kind != TokKind::Punct) return false;
    const std::string& p = lx_.peek().text;
    return p == "<" || p == "<=" || p == ">" || p == ">=" || p == "=" ||
           p == "!=";
  }

  Guard guard_tail(Term lhs) {
    Token op = lx_.next();
    CmpOp o;
    if (op.text == "=") o = CmpOp::Eq;
    else if (op.text == "!=") o = CmpOp::Neq;
    else if (op.text == "<") o = CmpOp::Lt;
    else if (op.text == "<=") o = CmpOp::Leq;
    else if (op.text == ">") o = CmpOp::Gt;
    else o = CmpOp::Geq;
    Term rhs = term();
    std::int64_t offset = 0;
    if (is_punct("+") || is_punct("-")) {
      bool plus = lx_.peek().text == "+";
      lx_.next();
      Token k = expect(TokKind::Int, "integer offset");
      offset = plus ? k.num : -k.num;
    }
    return Guard::cmp(std::move(lhs), o, std::move(rhs), offset);
  }

  ExtendedAtom extended_atom() {
    if (is_punct("@")) {
      lx_.next();
      Term t = term();
      return ExtendedAtom::at(std::move(t), atom());
    }
    if (is_punct("[")) {
      lx_.next();
      Token sz = expect(TokKind::Int, "window size");
      WindowSpec w;
      w.size = sz.num;
      if (lx_.peek().kind == TokKind::Ident && lx_.peek().text == "t") {
        lx_.next();
        w.kind = WindowKind::Time;
      } else if (is_punct("#")) {
        lx_.next();
        w.kind = WindowKind::Tuple;
      } else {
        lx_.fail("expected 't' or '#' in window");
      }
      expect_punct("]");
      if (is_punct("<>")) {
        lx_.next();
        return ExtendedAtom::win(w, Modality::Diamond, atom());
      }
      if (is_punct("[]")) {
        lx_.next();
        return ExtendedAtom::win(w, Modality::Box, atom());
      }
      if (is_punct("@")) {
        lx_.next();
        Term t = term();
        return ExtendedAtom::win(w, Modality::At, atom(), std::move(t));
      }
      lx_.fail("expected '<>', '[]' or '@' after window");
    }
    return ExtendedAtom::plain(atom());
  }

  Atom atom() {
    Token pred = expect(TokKind::Ident, "predicate name");
    std::vector<Term> args;
    if (is_punct("(")) {
      lx_.next();
      for (;;) {
        args.push_back(term());
        if (is_punct(",")) {
          lx_.next();
          continue;
        }
        break;
      }
      expect_punct(")");
    }
    return Atom::make(pred.text, std::move(args));
  }

  Term term() {
    if (is_punct("-")) {
      lx_.next();
      Token n = expect(TokKind::Int, "integer");
      return Term::integer(-n.num);
    }
    Token t = lx_.next();
    switch (t.kind) {
      case TokKind::Var: return Term::var(t.text);
      case TokKind::Ident: return Term::sym(t.text);
      case TokKind::Int: return Term::integer(t.num);
      default:
        throw ParseError("expected a term", t.line, t.col);
    }
  }

  Lexer lx_;
};

}  // namespace detail

// ── Entry points ────────────────────────────────────────────────────────────

inline LarsProgram parse_program(const std::string& text) {
  detail::Parser p(text);
  return p.program();
}

inline LarsRule parse_rule(const std::string& text) {
  detail::Parser p(text);
  return p.rule();
}

inline SignalEvent parse_signal(const std::string& line) {
  detail::Parser p(line);
  return p.signal();
}

inline SignalEvent parse_signal(const std::string& line, const LarsProgram& prog) {
  SignalEvent ev = parse_signal(line);
  if (!prog.is_extensional(ev.atom.pred, ev.atom.arity()))
    throw ParseError("predicate " + ev.atom.pred + "/" +
                         std::to_string(ev.atom.arity()) +
                         " is not declared as stream input",
                     1, 1);
  return ev;
}

// ── Printing ────────────────────────────────────────────────────────────────

inline std::string to_string(const WindowSpec& w) {
  if (w.kind == WindowKind::TimeInf) return "[inf t]";
  return "[" + std::to_string(w.size) +
         (w.kind == WindowKind::Time ? " t]" : " #]");
}

inline std::string to_string(const ExtendedAtom& e) {
  switch (e.form) {
    case ExtendedAtom::Form::Plain:
      return e.atom.to_string();
    case ExtendedAtom::Form::At:
      return "@" + e.at_time.to_string() + " " + e.atom.to_string();
    case ExtendedAtom::Form::Window: {
      std::string out = to_string(e.window) + " ";
      switch (e.mod) {
        case Modality::Diamond: out += "<> "; break;
        case Modality::Box: out += "[] "; break;
        case Modality::At: out += "@" + e.at_time.to_string() + " "; break;
      }
      return out + e.atom.to_string();
    }
  }
  return {};
}

inline std::string to_string(const Literal& l) {
  return (l.negated ? "not " : "") + to_string(l.atom);
}

inline std::string to_string(const LarsRule& r) {
  std::string out = to_string(r.head);
  bool first = true;
  auto sep = [&]() -> std::string {
    if (first) {
      first = false;
      return " :- ";
    }
    return ", ";
  };
  for (const auto& l : r.body) out += sep() + to_string(l);
  for (const auto& g : r.guards) out += sep() + g.to_string();
  return out + ".";
}

inline std::string to_string(const LarsProgram& p) {
  std::string out;
  for (const auto& sig : p.extensional)
    out += "#ext " + sig.name + "/" + std::to_string(sig.arity) + ".\n";
  for (const auto& a : p.background) out += "#background " + a.to_string() + ".\n";
  for (const auto& r : p.rules) out += to_string(r) + "\n";
  return out;
}

// ── Model output lines ──────────────────────────────────────────────────────

inline std::string format_model(TimePoint t, const std::vector<Atom>& atoms) {
  std::vector<std::string> parts;
  parts.reserve(atoms.size());
  for (const auto& a : atoms) parts.push_back(a.to_string());
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  std::string out = "@" + std::to_string(t) + " model:";
  for (const auto& s : parts) out += " " + s;
  return out;
}

inline std::string format_no_model(TimePoint t) {
  return "@" + std::to_string(t) + " no-model";
}

inline std::string format_unknown(TimePoint t, const std::string& reason) {
  return "@" + std::to_string(t) + " unknown (" + reason + ")";
}

}  // namespace lars

#endif  // LARS_PARSER_HPP
