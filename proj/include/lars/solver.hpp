// ============================================================================
// include/lars/solver.hpp — answer-set solving for ground programs
// ============================================================================
//
// Design notes
// ------------
// Three entry points over ground normal programs:
//
//   - stratify: predicate-level dependency analysis; negation must point
//     strictly downward, positive edges stay within or point downward
//   - least_model_stratified: stratum-by-stratum fixpoint, the unique
//     answer set of a stratified program
//   - answer_sets: complete, deterministic enumeration. Propagation
//     combines forward firing, dead-rule falsification, and an optimistic
//     derivability bound that catches unfounded positive loops. Branching
//     picks the first undefined atom, false branch first, and every leaf
//     is certified against the reduct before it is reported.
//
// Propagation work is metered; exceeding the budget raises
// SolveBudgetExceeded rather than looping silently.
// ============================================================================

#ifndef LARS_SOLVER_HPP
#define LARS_SOLVER_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lars/asp.hpp"
#include "lars/atom.hpp"

namespace lars {

using Model = std::set<Atom>;

class SolveBudgetExceeded : public std::runtime_error {
 public:
  explicit SolveBudgetExceeded(std::size_t steps)
      : std::runtime_error("answer-set search exceeded its budget after " +
                           std::to_string(steps) + " propagation steps") {}
};

// ── Stratification ──────────────────────────────────────────────────────────

struct Strata {
  bool stratified = true;
  std::map<std::string, int> level;   // predicate name → stratum
  std::vector<std::string> cycle;     // offending predicates when not
};

namespace detail {

// Tarjan SCC over the predicate dependency graph. Edges run head → body
// (head depends on body), so each component is finished only after every
// component it depends on, and levels can be assigned in emission order.
struct PredGraph {
  std::vector<std::string> names;
  std::map<std::string, int> id;
  // adj[u] = (v, negated): u depends on v.
  std::vector<std::vector<std::pair<int, bool>>> adj;

  int node(const std::string& name) {
    auto it = id.find(name);
    if (it != id.end()) return it->second;
    int n = static_cast<int>(names.size());
    id.emplace(name, n);
    names.push_back(name);
    adj.emplace_back();
    return n;
  }
};

}  // namespace detail

inline Strata stratify(const GroundProgram& p) {
  detail::PredGraph g;
  for (const auto& r : p.rules) {
    const int h = g.node(r.head.pred);
    for (const auto& a : r.pos) {
      const int v = g.node(a.pred);  // may grow adj, so resolve it first
      g.adj[h].emplace_back(v, false);
    }
    for (const auto& a : r.neg) {
      const int v = g.node(a.pred);
      g.adj[h].emplace_back(v, true);
    }
  }

  const int n = static_cast<int>(g.names.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int next_index = 0;

  // Iterative Tarjan: frame = (node, edge cursor).
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<std::pair<int, std::size_t>> frames{{root, 0}};
    while (!frames.empty()) {
      auto& [u, cursor] = frames.back();
      if (cursor == 0) {
        index[u] = low[u] = next_index++;
        stack.push_back(u);
        on_stack[u] = true;
      }
      bool descended = false;
      while (cursor < g.adj[u].size()) {
        int v = g.adj[u][cursor].first;
        ++cursor;
        if (index[v] == -1) {
          frames.emplace_back(v, 0);
          descended = true;
          break;
        }
        if (on_stack[v]) low[u] = std::min(low[u], index[v]);
      }
      if (descended) continue;
      if (low[u] == index[u]) {
        comps.emplace_back();
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = static_cast<int>(comps.size()) - 1;
          comps.back().push_back(w);
        } while (w != u);
      }
      int done = u;
      frames.pop_back();
      if (!frames.empty()) {
        int parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }

  Strata out;
  std::vector<int> comp_level(comps.size(), 0);
  // Components are emitted dependencies-first, so one pass suffices.
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (int u : comps[c]) {
      for (const auto& [v, negated] : g.adj[u]) {
        if (comp[v] == static_cast<int>(c)) {
          if (negated) {
            out.stratified = false;
            for (int w : comps[c]) out.cycle.push_back(g.names[w]);
            std::sort(out.cycle.begin(), out.cycle.end());
            out.cycle.erase(std::unique(out.cycle.begin(), out.cycle.end()),
                            out.cycle.end());
            return out;
          }
          continue;
        }
        int need = comp_level[comp[v]] + (negated ? 1 : 0);
        comp_level[c] = std::max(comp_level[c], need);
      }
    }
  }
  for (int u = 0; u < n; ++u) out.level[g.names[u]] = comp_level[comp[u]];
  return out;
}

// ── Compiled form ───────────────────────────────────────────────────────────

namespace detail {

struct CompiledRule {
  int head;
  std::vector<int> pos;
  std::vector<int> neg;
};

struct Compiled {
  std::vector<Atom> atoms;  // id → atom, first-occurrence order
  std::unordered_map<Atom, int, AtomHash> id;
  std::vector<CompiledRule> rules;
  std::vector<std::vector<int>> head_rules;  // atom id → rules with that head
  std::vector<std::vector<int>> pos_occ;     // atom id → rules using it positively

  int intern(const Atom& a) {
    auto it = id.find(a);
    if (it != id.end()) return it->second;
    int n = static_cast<int>(atoms.size());
    id.emplace(a, n);
    atoms.push_back(a);
    return n;
  }
};

inline Compiled compile(const GroundProgram& p) {
  Compiled c;
  for (const auto& r : p.rules) {
    CompiledRule cr;
    cr.head = c.intern(r.head);
    for (const auto& a : r.pos) cr.pos.push_back(c.intern(a));
    for (const auto& a : r.neg) cr.neg.push_back(c.intern(a));
    c.rules.push_back(std::move(cr));
  }
  c.head_rules.assign(c.atoms.size(), {});
  c.pos_occ.assign(c.atoms.size(), {});
  for (std::size_t i = 0; i < c.rules.size(); ++i) {
    c.head_rules[c.rules[i].head].push_back(static_cast<int>(i));
    for (int a : c.rules[i].pos) c.pos_occ[a].push_back(static_cast<int>(i));
  }
  return c;
}

// Least model of the positive rules selected by `live`, seeded with `seed`
// atoms. Counter-based: each rule fires once its positive body is covered.
inline void positive_fixpoint(const Compiled& c, const std::vector<bool>& live,
                              std::vector<bool>& true_atoms) {
  std::vector<int> remaining(c.rules.size(), 0);
  std::vector<int> queue;
  auto fire = [&](int atom) {
    if (true_atoms[atom]) return;
    true_atoms[atom] = true;
    queue.push_back(atom);
  };
  // Counts must be settled against the seed atoms before anything fires,
  // or queue decrements would double-count occurrences discounted here.
  for (std::size_t i = 0; i < c.rules.size(); ++i) {
    if (!live[i]) continue;
    int rem = 0;
    for (int a : c.rules[i].pos)
      if (!true_atoms[a]) ++rem;
    remaining[i] = rem;
  }
  for (std::size_t i = 0; i < c.rules.size(); ++i)
    if (live[i] && remaining[i] == 0) fire(c.rules[i].head);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int a = queue[qi];
    for (int ri : c.pos_occ[a]) {
      if (!live[ri]) continue;
      // Count each occurrence once: remaining was seeded per-occurrence of
      // atoms that were false at setup.
      if (--remaining[ri] == 0) fire(c.rules[ri].head);
    }
  }
}

}  // namespace detail

// ── Least model of a stratified program ─────────────────────────────────────

inline Model least_model_stratified(const GroundProgram& p,
                                    const Strata& strata) {
  if (!strata.stratified)
    throw std::invalid_argument("least_model_stratified: program is not stratified");
  detail::Compiled c = detail::compile(p);

  int max_level = 0;
  for (const auto& [pred, lvl] : strata.level)
    max_level = std::max(max_level, lvl);

  std::vector<bool> truth(c.atoms.size(), false);
  for (int lvl = 0; lvl <= max_level; ++lvl) {
    std::vector<bool> live(c.rules.size(), false);
    for (std::size_t i = 0; i < c.rules.size(); ++i) {
      const auto& r = c.rules[i];
      if (strata.level.at(c.atoms[r.head].pred) != lvl) continue;
      bool blocked = false;
      // Negated atoms live strictly below lvl, so truth is already final.
      for (int a : r.neg)
        if (truth[a]) blocked = true;
      live[i] = !blocked;
    }
    detail::positive_fixpoint(c, live, truth);
  }

  Model m;
  for (std::size_t i = 0; i < c.atoms.size(); ++i)
    if (truth[i]) m.insert(c.atoms[i]);
  return m;
}

// ── Answer-set check ────────────────────────────────────────────────────────

inline bool is_answer_set(const GroundProgram& p, const Model& m) {
  detail::Compiled c = detail::compile(p);
  for (const auto& a : m)
    if (!c.id.count(a)) return false;

  std::vector<bool> in_m(c.atoms.size(), false);
  for (const auto& a : m) in_m[c.id.at(a)] = true;

  // Reduct: drop rules whose negative body intersects m, strip negation.
  std::vector<bool> live(c.rules.size(), true);
  for (std::size_t i = 0; i < c.rules.size(); ++i)
    for (int a : c.rules[i].neg)
      if (in_m[a]) live[i] = false;

  std::vector<bool> truth(c.atoms.size(), false);
  detail::positive_fixpoint(c, live, truth);
  return truth == in_m;
}

// ── Complete enumeration ────────────────────────────────────────────────────

struct SolveOptions {
  std::size_t max_models = static_cast<std::size_t>(-1);
  std::size_t budget = 1'000'000;  // propagation steps
};

namespace detail {

enum class Val : std::uint8_t {
  Undef,  // not yet decided
  True,   // in every extension of this branch
  False,  // in no extension of this branch
};

struct Search {
  const Compiled& c;
  const GroundProgram& original;
  SolveOptions opt;
  std::vector<Model> found;
  std::size_t steps = 0;

  Search(const Compiled& comp, const GroundProgram& orig, SolveOptions o)
      : c(comp), original(orig), opt(o) {}

  void charge() {
    steps += c.rules.size() + 1;
    if (steps > opt.budget) throw SolveBudgetExceeded(steps);
  }

  // Returns false on conflict. Fixpoint of three sound inferences:
  //   (a) satisfied body forces the head true
  //   (b) an atom all of whose rules are dead is false
  //   (c) an atom outside the optimistic derivability bound is false
  bool propagate(std::vector<Val>& val) {
    bool changed = true;
    bool ok = true;
    auto set = [&](int a, Val v) {
      if (val[a] == v) return;
      if (val[a] != Val::Undef) {
        ok = false;
        return;
      }
      val[a] = v;
      changed = true;
    };
    while (changed && ok) {
      changed = false;
      charge();
      for (const auto& r : c.rules) {
        bool body_true = true;
        for (int a : r.pos)
          if (val[a] != Val::True) body_true = false;
        for (int a : r.neg)
          if (val[a] != Val::False) body_true = false;
        if (body_true) set(r.head, Val::True);
        if (!ok) return false;
      }
      for (std::size_t a = 0; a < c.atoms.size(); ++a) {
        if (val[a] == Val::False) continue;
        bool any_alive = false;
        for (int ri : c.head_rules[a]) {
          const auto& r = c.rules[ri];
          bool dead = false;
          for (int b : r.pos)
            if (val[b] == Val::False) dead = true;
          for (int b : r.neg)
            if (val[b] == Val::True) dead = true;
          if (!dead) {
            any_alive = true;
            break;
          }
        }
        if (!any_alive) set(static_cast<int>(a), Val::False);
        if (!ok) return false;
      }
      // Optimistic bound: derivable when negation is only blocked by
      // established truth and positive support avoids established falsity.
      std::vector<bool> reach(c.atoms.size(), false);
      bool grew = true;
      while (grew) {
        grew = false;
        charge();
        for (const auto& r : c.rules) {
          if (reach[r.head]) continue;
          bool usable = true;
          for (int b : r.neg)
            if (val[b] == Val::True) usable = false;
          for (int b : r.pos)
            if (!reach[b] || val[b] == Val::False) usable = false;
          if (usable) {
            reach[r.head] = true;
            grew = true;
          }
        }
      }
      for (std::size_t a = 0; a < c.atoms.size(); ++a) {
        if (reach[a]) continue;
        if (val[a] == Val::True) return false;
        set(static_cast<int>(a), Val::False);
        if (!ok) return false;
      }
    }
    return ok;
  }

  bool done() const { return found.size() >= opt.max_models; }

  void solve(std::vector<Val> val) {
    if (done() || !propagate(val)) return;
    int undef = -1;
    for (std::size_t a = 0; a < c.atoms.size(); ++a)
      if (val[a] == Val::Undef) {
        undef = static_cast<int>(a);
        break;
      }
    if (undef < 0) {
      Model m;
      for (std::size_t a = 0; a < c.atoms.size(); ++a)
        if (val[a] == Val::True) m.insert(c.atoms[a]);
      if (is_answer_set(original, m)) found.push_back(std::move(m));
      return;
    }
    auto low = val;
    low[undef] = Val::False;
    solve(std::move(low));
    if (done()) return;
    val[undef] = Val::True;
    solve(std::move(val));
  }
};

}  // namespace detail

// Complete, deterministic enumeration in branch order (first undefined atom,
// false before true). Every reported model is certified against the reduct.
inline std::vector<Model> answer_sets(const GroundProgram& p,
                                      const SolveOptions& opt = {}) {
  detail::Compiled c = detail::compile(p);
  detail::Search s(c, p, opt);
  if (opt.max_models > 0)
    s.solve(std::vector<detail::Val>(c.atoms.size(), detail::Val::Undef));
  return std::move(s.found);
}

inline std::vector<Model> answer_sets(const GroundProgram& p,
                                      std::size_t max_models) {
  SolveOptions opt;
  opt.max_models = max_models;
  return answer_sets(p, opt);
}

}  // namespace lars

#endif  // LARS_SOLVER_HPP
