// ============================================================================
// include/lars/jtms.hpp — justification-based truth maintenance
// ============================================================================
//
// Design notes
// ------------
// A network holds ground rules as justifications over atom nodes labeled
// in or out, together with the justification currently supporting each
// in-node. The represented model is admissible: every rule with satisfied
// body has its head in, every in-node has a valid, well-founded support.
// For programs free of odd negative loops this coincides with an answer
// set, which is what the incremental strategy relies on.
//
// Updates relabel only the affected region: the closure of nodes reachable
// through justifications that mention a changed node. Inside it, labels
// are settled by forced propagation (a decided-valid justification forces
// in, all-invalid forces out). When propagation stalls, a choice installs
// support: some unknown node has a justification whose positive body is
// already decided in and whose only obstacles are unknown negative
// antecedents; those are assumed out and the node goes in under that
// justification. Each stalled even loop (a choice between alternatives
// blocking each other through negation) is resolved locally this way, so
// many independent choices settle in one sweep. When no such justification
// exists the remaining unknowns only lean on each other positively and go
// out as one unfounded set. A settled region is verified before
// committing; a violation retries with a rotated choice order, and a step
// budget (quadratic in the region size) converts odd-loop nontermination
// into TmsError. After a throw the network state is undefined and should
// be discarded.
//
// Supports stay well-founded by construction: a node goes in only when the
// positive body of some justification is already decided in.
// ============================================================================

#ifndef LARS_JTMS_HPP
#define LARS_JTMS_HPP

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
#include "lars/solver.hpp"

namespace lars {

class TmsError : public std::runtime_error {
 public:
  std::vector<Atom> unresolved;

  TmsError(const std::string& msg, std::vector<Atom> nodes)
      : std::runtime_error(msg + " (" + std::to_string(nodes.size()) +
                           " unresolved atoms)"),
        unresolved(std::move(nodes)) {}
};

class TmsNetwork {
 public:
  // ── Updates ───────────────────────────────────────────────────────────────

  void add_rule(const GroundRule& r) {
    if (rule_ids_.count(r)) return;
    const int jid = alloc_just(r);
    rule_ids_.emplace(r, jid);

    const Just& j = justs_[jid];
    if (nodes_[j.head].in) return;     // model and supports stay untouched
    if (!just_valid(j)) return;        // rule already satisfied
    settle({j.head});
  }

  void remove_rule(const GroundRule& r) {
    auto it = rule_ids_.find(r);
    if (it == rule_ids_.end()) return;
    const int jid = it->second;
    const int head = justs_[jid].head;
    const bool lost_support = nodes_[head].in && nodes_[head].support == jid;
    release_just(jid);
    rule_ids_.erase(it);
    if (lost_support) {
      nodes_[head].support = -1;
      settle({head});
    }
  }

  // ── Inspection ────────────────────────────────────────────────────────────

  Model current_model() const {
    Model m;
    for (const auto& n : nodes_)
      if (n.in) m.insert(n.atom);
    return m;
  }

  std::vector<GroundRule> rules() const {
    std::vector<GroundRule> out;
    out.reserve(rule_ids_.size());
    for (const auto& [rule, jid] : rule_ids_) out.push_back(rule);
    return out;
  }

  std::size_t rule_count() const { return rule_ids_.size(); }
  std::size_t node_count() const { return nodes_.size(); }

  // Full admissibility audit: supports valid, model-ness, and acyclic
  // positive support chains. Meant for tests and debugging.
  bool check_admissible() const {
    for (const auto& n : nodes_) {
      if (n.in) {
        if (n.support < 0 || !justs_[n.support].active) return false;
        if (justs_[n.support].head != node_of(n.atom)) return false;
        if (!just_valid(justs_[n.support])) return false;
      }
    }
    for (const auto& [rule, jid] : rule_ids_)
      if (just_valid(justs_[jid]) && !nodes_[justs_[jid].head].in) return false;

    // Well-foundedness: walk positive support edges, 0 new, 1 open, 2 done.
    std::vector<std::uint8_t> state(nodes_.size(), 0);
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
      if (!nodes_[n].in || state[n]) continue;
      std::vector<std::pair<int, std::size_t>> stack{{static_cast<int>(n), 0}};
      state[n] = 1;
      while (!stack.empty()) {
        auto& [u, cursor] = stack.back();
        const auto& pos = justs_[nodes_[u].support].pos;
        bool descended = false;
        while (cursor < pos.size()) {
          int v = pos[cursor];
          ++cursor;
          if (!nodes_[v].in) return false;  // support over an out atom
          if (state[v] == 1) return false;  // positive support cycle
          if (state[v] == 0) {
            state[v] = 1;
            stack.emplace_back(v, 0);
            descended = true;
            break;
          }
        }
        if (descended) continue;
        state[u] = 2;
        stack.pop_back();
      }
    }
    return true;
  }

  std::string dump() const {
    std::string out;
    for (const auto& n : nodes_) {
      out += n.atom.to_string();
      if (n.in) {
        out += ": in, supported by ";
        out += to_text(justs_[n.support].rule);
      } else {
        out += ": out";
      }
      out += "\n";
    }
    return out;
  }

 private:
  struct Node {
    Atom atom;
    bool in = false;
    int support = -1;        // justification id while in
    std::vector<int> justs;  // justifications with this head
    std::vector<int> pos_of;  // justifications using this node positively
    std::vector<int> neg_of;  // justifications using this node negatively
  };

  struct Just {
    bool active = false;
    int head = -1;
    std::vector<int> pos;
    std::vector<int> neg;
    GroundRule rule;
  };

  std::vector<Node> nodes_;
  std::unordered_map<Atom, int, AtomHash> node_id_;
  std::vector<Just> justs_;
  std::vector<int> free_justs_;
  std::map<GroundRule, int> rule_ids_;

  int node_of(const Atom& a) const { return node_id_.at(a); }

  int intern(const Atom& a) {
    auto it = node_id_.find(a);
    if (it != node_id_.end()) return it->second;
    const int id = static_cast<int>(nodes_.size());
    node_id_.emplace(a, id);
    nodes_.push_back(Node{a, false, -1, {}, {}, {}});
    return id;
  }

  int alloc_just(const GroundRule& r) {
    int jid;
    if (!free_justs_.empty()) {
      jid = free_justs_.back();
      free_justs_.pop_back();
    } else {
      jid = static_cast<int>(justs_.size());
      justs_.emplace_back();
    }
    Just& j = justs_[jid];
    j.active = true;
    j.rule = r;
    j.head = intern(r.head);
    j.pos.clear();
    j.neg.clear();
    for (const auto& a : r.pos) j.pos.push_back(intern(a));
    for (const auto& a : r.neg) j.neg.push_back(intern(a));
    nodes_[j.head].justs.push_back(jid);
    for (int p : j.pos) nodes_[p].pos_of.push_back(jid);
    for (int n : j.neg) nodes_[n].neg_of.push_back(jid);
    return jid;
  }

  void release_just(int jid) {
    Just& j = justs_[jid];
    auto detach = [jid](std::vector<int>& v) {
      v.erase(std::remove(v.begin(), v.end(), jid), v.end());
    };
    detach(nodes_[j.head].justs);
    for (int p : j.pos) detach(nodes_[p].pos_of);
    for (int n : j.neg) detach(nodes_[n].neg_of);
    j.active = false;
    free_justs_.push_back(jid);
  }

  bool just_valid(const Just& j) const {
    for (int p : j.pos)
      if (!nodes_[p].in) return false;
    for (int n : j.neg)
      if (nodes_[n].in) return false;
    return true;
  }

  // ── Relabeling ────────────────────────────────────────────────────────────

  enum class Mark : std::uint8_t {
    Fixed,    // outside the affected region
    Unknown,  // affected, not yet decided in this attempt
    Decided,  // affected, label committed in this attempt
  };

  // A justification is decided-valid when its body is satisfied by labels
  // that are fixed or already decided; decided-invalid when refuted by one.
  bool valid_decided(const Just& j, const std::vector<Mark>& mark) const {
    for (int p : j.pos)
      if (mark[p] == Mark::Unknown || !nodes_[p].in) return false;
    for (int n : j.neg)
      if (mark[n] == Mark::Unknown || nodes_[n].in) return false;
    return true;
  }

  bool invalid_decided(const Just& j, const std::vector<Mark>& mark) const {
    for (int p : j.pos)
      if (mark[p] != Mark::Unknown && !nodes_[p].in) return true;
    for (int n : j.neg)
      if (mark[n] != Mark::Unknown && nodes_[n].in) return true;
    return false;
  }

  void settle(const std::vector<int>& seeds) {
    // Affected closure: a node joins when one of its justifications
    // mentions an affected node.
    std::set<int> affected(seeds.begin(), seeds.end());
    std::vector<int> frontier(seeds.begin(), seeds.end());
    while (!frontier.empty()) {
      const int n = frontier.back();
      frontier.pop_back();
      auto spread = [&](const std::vector<int>& uses) {
        for (int jid : uses) {
          const int h = justs_[jid].head;
          if (affected.insert(h).second) frontier.push_back(h);
        }
      };
      spread(nodes_[n].pos_of);
      spread(nodes_[n].neg_of);
    }
    const std::vector<int> region(affected.begin(), affected.end());

    // Enough for a handful of full relabeling attempts; one attempt costs
    // at most ~2|region| propagation passes of |region| node visits each.
    std::size_t budget = 10 * region.size() * region.size() + 100;
    std::vector<Mark> mark(nodes_.size(), Mark::Fixed);

    for (std::size_t rotation = 0;; ++rotation) {
      for (int n : region) {
        mark[n] = Mark::Unknown;
        nodes_[n].in = false;
        nodes_[n].support = -1;
      }
      std::size_t undecided = region.size();
      std::size_t next_choice = rotation % (region.empty() ? 1 : region.size());

      while (undecided > 0) {
        // Forced propagation to fixpoint.
        bool changed = true;
        while (changed) {
          changed = false;
          if (budget < region.size())
            throw TmsError("truth maintenance exceeded its relabeling budget",
                           unresolved_atoms(region, mark));
          budget -= region.size();
          for (int n : region) {
            if (mark[n] != Mark::Unknown) continue;
            int valid = -1;
            bool all_invalid = true;
            for (int jid : nodes_[n].justs) {
              if (valid < 0 && valid_decided(justs_[jid], mark)) valid = jid;
              if (!invalid_decided(justs_[jid], mark)) all_invalid = false;
            }
            if (valid >= 0) {
              mark[n] = Mark::Decided;
              nodes_[n].in = true;
              nodes_[n].support = valid;
              --undecided;
              changed = true;
            } else if (all_invalid) {
              mark[n] = Mark::Decided;
              --undecided;
              changed = true;
            }
          }
        }
        if (undecided == 0) break;
        // Choice: install support for an unknown node whose justification
        // lacks only unknown negative antecedents; assume those out and
        // the node in. The scan start rotates on retries. If nothing
        // qualifies, the leftover unknowns only support each other through
        // positive bodies, so they all go out as one unfounded set.
        bool chose = false;
        for (std::size_t step = 0; step < region.size() && !chose; ++step) {
          const int n = region[(next_choice + step) % region.size()];
          if (mark[n] != Mark::Unknown) continue;
          for (int jid : nodes_[n].justs) {
            const Just& j = justs_[jid];
            bool enabled = true;
            for (int p : j.pos)
              if (mark[p] == Mark::Unknown || !nodes_[p].in) {
                enabled = false;
                break;
              }
            if (enabled)
              for (int m : j.neg) {
                // A self-blocking justification (head among its own
                // unknown negatives) is an odd loop, not a choice.
                if ((m == n && mark[m] == Mark::Unknown) ||
                    (mark[m] != Mark::Unknown && nodes_[m].in)) {
                  enabled = false;
                  break;
                }
              }
            if (!enabled) continue;
            for (int m : j.neg) {
              if (mark[m] != Mark::Unknown) continue;
              mark[m] = Mark::Decided;
              nodes_[m].in = false;
              nodes_[m].support = -1;
              --undecided;
            }
            mark[n] = Mark::Decided;
            nodes_[n].in = true;
            nodes_[n].support = jid;
            --undecided;
            next_choice = (next_choice + step + 1) % region.size();
            chose = true;
            break;
          }
        }
        if (!chose) {
          for (int n : region) {
            if (mark[n] != Mark::Unknown) continue;
            mark[n] = Mark::Decided;
            nodes_[n].in = false;
            nodes_[n].support = -1;
            --undecided;
          }
        }
      }

      // Verify the settled region before accepting it.
      bool ok = true;
      for (int n : region)
        for (int jid : nodes_[n].justs)
          if (just_valid(justs_[jid]) && !nodes_[n].in) ok = false;
      if (ok) {
        for (int n : region) mark[n] = Mark::Fixed;
        return;
      }
      if (budget < region.size())
        throw TmsError("truth maintenance found no admissible relabeling",
                       unresolved_atoms(region, mark));
      budget -= region.size();
    }
  }

  std::vector<Atom> unresolved_atoms(const std::vector<int>& region,
                                     const std::vector<Mark>& mark) const {
    std::vector<Atom> out;
    for (int n : region)
      if (mark[n] != Mark::Fixed) out.push_back(nodes_[n].atom);
    return out;
  }
};

}  // namespace lars

#endif  // LARS_JTMS_HPP
