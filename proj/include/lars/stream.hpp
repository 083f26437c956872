// ============================================================================
// include/lars/stream.hpp — Streams, tick streams, and windows
// ============================================================================
//
// Design notes
// ------------
// A Stream is a timeline [t_begin, t_end] with a set of ground atoms per time
// point. A TickStream refines a stream with arrival order: a list of ticks
// (time, count) starting at some initial tick, where consecutive ticks differ
// by exactly one increment of either the time or the count component. A count
// increment carries exactly one atom; a time increment carries none. The
// underlying stream of a tick stream forgets the counts.
//
// Full input streams start with an atom-free tick, but windows and truncation
// can cut into a count increment, so a sub tick stream may begin with an
// atom-carrying tick. That atom still belongs to the underlying stream.
//
// Windows operate on tick streams and return sub tick streams:
//   time_window  keeps ticks with time   in [max(t1, t-n), t]
//   tuple_window keeps ticks with count  in [max(c1, c-n+1), c]
// where (t, c) is the reference tick and (t1, c1) the first tick.
// ============================================================================

#ifndef LARS_STREAM_HPP
#define LARS_STREAM_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lars/atom.hpp"

namespace lars {

using TimePoint = std::int64_t;

// ── Tick ────────────────────────────────────────────────────────────────────

struct Tick {
  TimePoint time = 0;
  std::int64_t count = 0;

  friend bool operator==(const Tick& a, const Tick& b) {
    return a.time == b.time && a.count == b.count;
  }
  friend bool operator!=(const Tick& a, const Tick& b) { return !(a == b); }
  // Componentwise order; ticks of one stream are totally ordered anyway.
  friend bool operator<=(const Tick& a, const Tick& b) {
    return a.time <= b.time && a.count <= b.count;
  }

  std::string to_string() const {
    return "(" + std::to_string(time) + "," + std::to_string(count) + ")";
  }
};

// ── Stream ──────────────────────────────────────────────────────────────────

struct Stream {
  TimePoint t_begin = 0;
  TimePoint t_end = 0;
  std::map<TimePoint, std::set<Atom>> eval;  // only non-empty entries

  static Stream empty(TimePoint begin, TimePoint end) {
    if (begin > end) throw std::invalid_argument("stream: empty timeline");
    return Stream{begin, end, {}};
  }

  bool in_timeline(TimePoint t) const { return t_begin <= t && t <= t_end; }

  const std::set<Atom>& at(TimePoint t) const {
    static const std::set<Atom> kEmpty;
    auto it = eval.find(t);
    return it == eval.end() ? kEmpty : it->second;
  }

  void add(TimePoint t, Atom a) {
    if (!in_timeline(t)) throw std::invalid_argument("stream: time outside timeline");
    if (!a.is_ground()) throw std::invalid_argument("stream: non-ground atom");
    eval[t].insert(std::move(a));
  }

  std::size_t atom_count() const {
    std::size_t n = 0;
    for (const auto& [t, atoms] : eval) n += atoms.size();
    return n;
  }

  friend bool operator==(const Stream& a, const Stream& b) {
    return a.t_begin == b.t_begin && a.t_end == b.t_end && a.eval == b.eval;
  }
};

// ── TickStream ──────────────────────────────────────────────────────────────

struct TickEntry {
  Tick tick;
  std::optional<Atom> atom;  // set exactly for count increments
};

struct TickStream {
  // entries.front() is the initial tick; it carries an atom only when this
  // stream is a cut (window result or suffix) landing on a count increment.
  std::vector<TickEntry> entries;

  static TickStream start_at(Tick origin) {
    TickStream s;
    s.entries.push_back({origin, std::nullopt});
    return s;
  }
  static TickStream origin() { return start_at({0, 0}); }

  bool empty_payload() const {
    for (const auto& e : entries)
      if (e.atom) return false;
    return true;
  }

  Tick first() const { return entries.front().tick; }
  Tick now() const { return entries.back().tick; }
  std::size_t size() const { return entries.size(); }

  void advance_time() {
    Tick k = now();
    entries.push_back({{k.time + 1, k.count}, std::nullopt});
  }

  void append_atom(Atom a) {
    if (!a.is_ground())
      throw std::invalid_argument("tick stream: non-ground atom");
    Tick k = now();
    entries.push_back({{k.time, k.count + 1}, std::move(a)});
  }

  // Consecutive ticks differ by exactly one increment; atoms sit exactly on
  // count increments.
  void check() const {
    if (entries.empty()) throw std::logic_error("tick stream: no initial tick");
    for (std::size_t i = 1; i < entries.size(); ++i) {
      const Tick& p = entries[i - 1].tick;
      const Tick& k = entries[i].tick;
      bool time_inc = k.time == p.time + 1 && k.count == p.count;
      bool count_inc = k.time == p.time && k.count == p.count + 1;
      if (!time_inc && !count_inc)
        throw std::logic_error("tick stream: non-consecutive ticks");
      if (count_inc != entries[i].atom.has_value())
        throw std::logic_error("tick stream: atom/increment mismatch");
    }
  }

  Stream underlying() const {
    Stream s = Stream::empty(first().time, now().time);
    for (const auto& e : entries)
      if (e.atom) s.add(e.tick.time, *e.atom);
    return s;
  }

  // Sub tick stream from tick k (inclusive) to the end. The front keeps its
  // atom when k is a count increment.
  TickStream suffix_at(Tick k) const;

  friend bool operator==(const TickStream& a, const TickStream& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
      if (a.entries[i].tick != b.entries[i].tick || a.entries[i].atom != b.entries[i].atom)
        return false;
    return true;
  }
};

// ── Ordering of a stream ────────────────────────────────────────────────────

// Builds the tick stream of `s` under an explicit arrival order: for each time
// point, the atoms of eval(t) exactly once, in the given sequence. Returns the
// canonical tick pattern: all atoms of a time point, then one time increment.
inline TickStream ordering_of(const Stream& s,
                              const std::map<TimePoint, std::vector<Atom>>& order) {
  TickStream ts = TickStream::start_at({s.t_begin, 0});
  for (TimePoint t = s.t_begin; t <= s.t_end; ++t) {
    const std::set<Atom>& atoms = s.at(t);
    std::vector<Atom> seq;
    if (auto it = order.find(t); it != order.end()) seq = it->second;
    std::set<Atom> seen;
    for (const auto& a : seq) {
      if (!atoms.count(a)) throw std::invalid_argument("ordering_of: atom not in eval");
      if (!seen.insert(a).second) throw std::invalid_argument("ordering_of: duplicate atom");
      ts.append_atom(a);
    }
    if (seen.size() != atoms.size())
      throw std::invalid_argument("ordering_of: order misses atoms");
    if (t < s.t_end) ts.advance_time();
  }
  return ts;
}

// ── Windows ─────────────────────────────────────────────────────────────────

namespace detail {
inline std::size_t index_of_tick(const TickStream& s, Tick k) {
  for (std::size_t i = s.entries.size(); i-- > 0;)
    if (s.entries[i].tick == k) return i;
  throw std::invalid_argument("window: reference tick not in stream");
}
}  // namespace detail

// Keeps the ticks (t', c') with max(t1, t-n) <= t' <= t, where k = (t, c).
// The reference tick always qualifies. A time cut never lands on a count
// increment: its predecessor shares the time and would be kept too.
inline TickStream time_window(const TickStream& s, Tick k, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("time_window: negative size");
  std::size_t anchor = detail::index_of_tick(s, k);
  TimePoint lo = std::max(s.first().time, k.time - n);
  TickStream out;
  for (std::size_t i = 0; i <= anchor; ++i) {
    const auto& e = s.entries[i];
    if (e.tick.time >= lo) out.entries.push_back(e);
  }
  return out;
}

// Keeps the ticks (t', c') with max(c1, c-n+1) <= c' <= c, where k = (t, c).
// The cut can land on a count increment; that tick keeps its atom.
inline TickStream tuple_window(const TickStream& s, Tick k, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("tuple_window: size must be positive");
  std::size_t anchor = detail::index_of_tick(s, k);
  std::int64_t lo = std::max(s.first().count, k.count - n + 1);
  TickStream out;
  for (std::size_t i = 0; i <= anchor; ++i) {
    const auto& e = s.entries[i];
    if (e.tick.count >= lo) out.entries.push_back(e);
  }
  return out;
}

inline TickStream TickStream::suffix_at(Tick k) const {
  std::size_t from = detail::index_of_tick(*this, k);
  TickStream out;
  out.entries.assign(entries.begin() + static_cast<std::ptrdiff_t>(from),
                     entries.end());
  return out;
}

}  // namespace lars

#endif  // LARS_STREAM_HPP
