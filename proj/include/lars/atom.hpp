// ============================================================================
// include/lars/atom.hpp — Terms and atoms
// ============================================================================
//
// Design notes
// ------------
// Terms are immutable tagged values: a variable, a symbolic constant, or an
// integer constant. Variables are spelled with a leading uppercase letter,
// symbols with a lowercase letter. Integers order numerically; symbols order
// lexicographically; across kinds, integers sort before symbols so that
// printed output has one stable order everywhere.
//
// Atoms are a predicate name plus a (possibly empty) argument list. Nested
// function terms are not supported.
// ============================================================================

#ifndef LARS_ATOM_HPP
#define LARS_ATOM_HPP

#include <cctype>
#include <cstdint>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

namespace lars {

// ── Term ────────────────────────────────────────────────────────────────────

struct Term {
  enum class Kind : std::uint8_t {
    Var,  // variable, leading uppercase
    Sym,  // symbolic constant, leading lowercase
    Int,  // integer constant
  };

  Kind kind = Kind::Sym;
  std::string name;       // spelling for Var and Sym
  std::int64_t num = 0;   // value for Int

  static Term var(std::string n) { return Term{Kind::Var, std::move(n), 0}; }
  static Term sym(std::string n) { return Term{Kind::Sym, std::move(n), 0}; }
  static Term integer(std::int64_t v) { return Term{Kind::Int, {}, v}; }

  bool is_var() const { return kind == Kind::Var; }
  bool is_ground() const { return kind != Kind::Var; }
  bool is_int() const { return kind == Kind::Int; }

  std::string to_string() const {
    return kind == Kind::Int ? std::to_string(num) : name;
  }

  friend bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.num == b.num && a.name == b.name;
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  friend bool operator<(const Term& a, const Term& b) {
    // Int < Sym < Var; within a kind, numeric resp. lexicographic.
    auto rank = [](Kind k) { return k == Kind::Int ? 0 : k == Kind::Sym ? 1 : 2; };
    if (rank(a.kind) != rank(b.kind)) return rank(a.kind) < rank(b.kind);
    if (a.kind == Kind::Int) return a.num < b.num;
    return a.name < b.name;
  }
};

// ── Atom ────────────────────────────────────────────────────────────────────

struct Atom {
  std::string pred;
  std::vector<Term> args;

  static Atom make(std::string p, std::vector<Term> a = {}) {
    return Atom{std::move(p), std::move(a)};
  }

  std::size_t arity() const { return args.size(); }

  bool is_ground() const {
    for (const auto& t : args)
      if (t.is_var()) return false;
    return true;
  }

  std::string to_string() const {
    if (args.empty()) return pred;
    std::string out = pred;
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ',';
      out += args[i].to_string();
    }
    out += ')';
    return out;
  }

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.pred == b.pred && a.args == b.args;
  }
  friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
  friend bool operator<(const Atom& a, const Atom& b) {
    if (a.pred != b.pred) return a.pred < b.pred;
    return std::lexicographical_compare(a.args.begin(), a.args.end(),
                                        b.args.begin(), b.args.end());
  }
};

// ── Hashing ─────────────────────────────────────────────────────────────────

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct TermHash {
  std::size_t operator()(const Term& t) const {
    std::size_t h = static_cast<std::size_t>(t.kind);
    h = hash_combine(h, std::hash<std::string>{}(t.name));
    h = hash_combine(h, std::hash<std::int64_t>{}(t.num));
    return h;
  }
};

struct AtomHash {
  std::size_t operator()(const Atom& a) const {
    std::size_t h = std::hash<std::string>{}(a.pred);
    for (const auto& t : a.args) h = hash_combine(h, TermHash{}(t));
    return h;
  }
};

}  // namespace lars

#endif  // LARS_ATOM_HPP
