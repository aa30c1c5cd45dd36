#ifndef LNFDYN_LNF_HPP
#define LNFDYN_LNF_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lnfdyn/dfst.hpp"
#include "lnfdyn/graph.hpp"

namespace lnfdyn {

enum class LoopType : std::uint8_t { NonHeader, Self, Reducible };

inline std::string_view to_string(LoopType t) noexcept {
  switch (t) {
    case LoopType::NonHeader: return "NONHEADER";
    case LoopType::Self: return "SELF";
    case LoopType::Reducible: return "REDUCIBLE";
  }
  return "?";
}

// Raised when an inserted edge enters an existing loop somewhere other than
// through its header.
class IrreducibleError : public std::runtime_error {
public:
  IrreducibleError(VertexId src, VertexId dst)
      : std::runtime_error("edge (" + std::to_string(src) + "," + std::to_string(dst) +
                           ") makes the graph irreducible"),
        src_(src),
        dst_(dst) {}

  [[nodiscard]] VertexId src() const noexcept { return src_; }
  [[nodiscard]] VertexId dst() const noexcept { return dst_; }

private:
  VertexId src_;
  VertexId dst_;
};

// Maintained loop nesting forest. headers[v] is the immediate enclosing loop
// header of v (never v itself), stored as a plain parent map. counts[0] is
// the number of SELF vertices and counts[1] the number of REDUCIBLE headers.
class LnfState {
public:
  std::vector<LoopType> types;
  std::vector<VertexId> headers;
  std::array<std::size_t, 2> counts{0, 0};
  bool irreducible = false;

  LnfState() = default;
  explicit LnfState(std::size_t n) { resize(n); }

  [[nodiscard]] std::size_t size() const noexcept { return types.size(); }

  void resize(std::size_t n) {
    types.resize(n, LoopType::NonHeader);
    headers.resize(n, kNone);
    members_.resize(n);
    member_pos_.resize(n, 0);
    touch_mark_.resize(n, 0);
    aux_mark_.resize(n, 0);
  }

  void set_type(VertexId v, LoopType t) {
    const LoopType old = types[v];
    if (old == t) return;
    if (old == LoopType::Self) --counts[0];
    if (old == LoopType::Reducible) --counts[1];
    if (t == LoopType::Self) ++counts[0];
    if (t == LoopType::Reducible) ++counts[1];
    types[v] = t;
  }

  void set_header(VertexId v, VertexId h) {
    const VertexId old = headers[v];
    if (old == h) return;
    if (old != kNone) {
      auto& list = members_[old];
      const std::uint32_t pos = member_pos_[v];
      list[pos] = list.back();
      member_pos_[list[pos]] = pos;
      list.pop_back();
    }
    if (h != kNone) {
      member_pos_[v] = static_cast<std::uint32_t>(members_[h].size());
      members_[h].push_back(v);
    }
    headers[v] = h;
  }

  // Vertices whose immediate header is h, in unspecified order.
  [[nodiscard]] const std::vector<VertexId>& members(VertexId h) const { return members_[h]; }

  std::uint32_t next_touch_gen() { return bump(touch_mark_, touch_gen_); }
  std::uint32_t next_aux_gen() { return bump(aux_mark_, aux_gen_); }
  std::vector<std::uint32_t>& touch_marks() { return touch_mark_; }
  std::vector<std::uint32_t>& aux_marks() { return aux_mark_; }

private:
  static std::uint32_t bump(std::vector<std::uint32_t>& marks, std::uint32_t& gen) {
    if (++gen == 0) {
      std::fill(marks.begin(), marks.end(), 0);
      gen = 1;
    }
    return gen;
  }

  std::vector<std::vector<VertexId>> members_;
  std::vector<std::uint32_t> member_pos_;
  std::vector<std::uint32_t> touch_mark_;
  std::vector<std::uint32_t> aux_mark_;
  std::uint32_t touch_gen_ = 0;
  std::uint32_t aux_gen_ = 0;
};

// Old values of every LNF write made during one update, for rollback.
class LnfJournal {
public:
  void record(VertexId v, LoopType old_type, VertexId old_header) {
    entries_.push_back({v, old_type, old_header});
  }

  void rollback(LnfState& s) {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
      s.set_type(it->v, it->type);
      s.set_header(it->v, it->header);
    }
    entries_.clear();
  }

  void clear() noexcept { entries_.clear(); }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

private:
  struct Entry {
    VertexId v;
    LoopType type;
    VertexId header;
  };
  std::vector<Entry> entries_;
};

// k = number of distinct vertices inspected or modified; touched lists them.
struct UpdateCounters {
  std::size_t k = 0;
  std::size_t delta = 0;
  std::vector<VertexId> touched;
};

struct LnfOptions {
  // Fault injection for testing the harness: deletions never look for
  // surviving back edges, so every affected loop is dissolved.
  bool skip_reseed = false;
};

namespace detail {

class LnfUpdate {
public:
  LnfUpdate(const Cfg& g, const DfstState& t, LnfState& s, LnfJournal* journal,
            const LnfOptions& opts)
      : g_(g), t_(t), s_(s), journal_(journal), opts_(opts) {
    if (s_.size() < g_.num_vertices()) s_.resize(g_.num_vertices());
    touch_gen_ = s_.next_touch_gen();
  }

  UpdateCounters finish() {
    UpdateCounters c;
    c.k = touched_.size();
    c.touched = std::move(touched_);
    return c;
  }

  void touch(VertexId v) {
    auto& marks = s_.touch_marks();
    if (marks[v] != touch_gen_) {
      marks[v] = touch_gen_;
      touched_.push_back(v);
    }
  }

  void set_type(VertexId v, LoopType t) {
    if (s_.types[v] == t) return;
    touch(v);
    if (journal_) journal_->record(v, s_.types[v], s_.headers[v]);
    s_.set_type(v, t);
  }

  void set_header(VertexId v, VertexId h) {
    if (s_.headers[v] == h) return;
    touch(v);
    if (journal_) journal_->record(v, s_.types[v], s_.headers[v]);
    s_.set_header(v, h);
  }

  bool ancestor(VertexId a, VertexId d) const {
    return t_.pre[a] <= t_.pre[d] && t_.post[d] <= t_.post[a];
  }

  // Climbs x's header chain while the next header is not an ancestor of
  // `head`; the result is x's representative at the nesting level directly
  // below the innermost loop that can contain `head`.
  VertexId find_loop_head(VertexId x, VertexId head) {
    VertexId xs = x;
    touch(xs);
    while (s_.headers[xs] != kNone && !ancestor(s_.headers[xs], head)) {
      xs = s_.headers[xs];
      touch(xs);
    }
    return xs;
  }

  // Single-edge insertion; both endpoints attached, tree already repaired.
  void insert_one(VertexId x, VertexId y) {
    touch(x);
    touch(y);
    if (x == y) {
      if (s_.types[x] == LoopType::NonHeader) set_type(x, LoopType::Self);
      return;
    }
    if (ancestor(y, x)) {
      // Back edge: creates the loop headed by y or enlarges it.
      const VertexId xs = find_loop_head(x, y);
      if (xs == y || s_.headers[xs] == y) return;
      if (!ancestor(y, xs)) throw IrreducibleError(x, y);
      set_type(y, LoopType::Reducible);
      propagate(y, xs, x, y);
      return;
    }
    // Tree, forward or cross edge: only matters when y sits inside a loop.
    const VertexId h = s_.headers[y];
    if (h == kNone) return;
    touch(h);
    if (!ancestor(h, x)) throw IrreducibleError(x, y);
    const VertexId xs = find_loop_head(x, h);
    if (xs == h || s_.headers[xs] == h) return;
    if (!ancestor(h, xs)) throw IrreducibleError(x, y);
    propagate(h, xs, x, y);
  }

  // After a tree restructure, an old edge (a,b) with both ends in the rebuilt
  // region must be a back edge now exactly when it was one before, i.e. when b
  // is on a's header chain. A reducible result admits no other change.
  void check_restructure(const RepairReport& repair, VertexId x, VertexId y) {
    const std::uint32_t mark = s_.next_aux_gen();
    auto& marks = s_.aux_marks();
    for (VertexId v : repair.delta) marks[v] = mark;
    for (VertexId v : repair.newly_attached) marks[v] = 0;
    std::size_t new_edge_seen = 0;
    for (VertexId a : repair.delta) {
      if (marks[a] != mark) continue;
      for (VertexId b : g_.successors(a)) {
        if (a == b || marks[b] != mark) continue;
        if (a == x && b == y && new_edge_seen++ == 0) continue;
        bool was_back = false;
        for (VertexId h = s_.headers[a]; h != kNone && !was_back; h = s_.headers[h]) {
          touch(h);
          was_back = h == b;
        }
        if (was_back != ancestor(b, a)) throw IrreducibleError(x, y);
      }
    }
  }

  // Backward worklist from `seed`: every vertex reaching the seed without
  // passing h joins h's loop, lifted to the level directly inside h.
  void propagate(VertexId h, VertexId seed, VertexId x, VertexId y) {
    const std::uint32_t queued = s_.next_aux_gen();
    auto& marks = s_.aux_marks();
    std::deque<VertexId> work{seed};
    marks[seed] = queued;
    while (!work.empty()) {
      const VertexId v = work.front();
      work.pop_front();
      touch(v);
      set_header(v, h);
      for (VertexId w : g_.predecessors(v)) {
        if (w == v || !t_.is_attached(w) || ancestor(v, w)) continue;
        const VertexId ws = find_loop_head(w, h);
        if (ws == h || s_.headers[ws] == h || marks[ws] == queued) continue;
        if (!ancestor(h, ws)) throw IrreducibleError(x, y);
        marks[ws] = queued;
        work.push_back(ws);
      }
    }
  }

  // Loops that contain v, innermost first: v itself when it heads one, then
  // its header chain.
  template <class Fn>
  void for_each_enclosing_loop(VertexId v, Fn&& fn) {
    if (s_.types[v] == LoopType::Reducible && fn(v)) return;
    for (VertexId h = s_.headers[v]; h != kNone; h = s_.headers[h]) {
      touch(h);
      if (fn(h)) return;
    }
  }

  VertexId innermost_common_loop(VertexId x, VertexId y) {
    const std::uint32_t mark = s_.next_aux_gen();
    auto& marks = s_.aux_marks();
    for_each_enclosing_loop(x, [&](VertexId h) {
      marks[h] = mark;
      return false;
    });
    VertexId found = kNone;
    for_each_enclosing_loop(y, [&](VertexId h) {
      if (marks[h] != mark) return false;
      found = h;
      return true;
    });
    return found;
  }

  // Recomputes the direct members of h from its surviving back edges. Members
  // that no longer reach a back-edge source move up to h's own header; if no
  // back edge survives, h stops being a loop header. Returns whether the
  // membership of h changed (which is what can affect enclosing loops).
  bool reflood(VertexId h) {
    touch(h);
    const std::vector<VertexId> reps = s_.members(h);
    for (VertexId r : reps) touch(r);

    const std::uint32_t reached = s_.next_aux_gen();
    auto& marks = s_.aux_marks();
    std::deque<VertexId> work;
    if (!opts_.skip_reseed) {
      for (VertexId z : g_.predecessors(h)) {
        if (z == h || !t_.is_attached(z) || !ancestor(h, z)) continue;
        const VertexId zs = find_loop_head(z, h);
        if (s_.headers[zs] == h && marks[zs] != reached) {
          marks[zs] = reached;
          work.push_back(zs);
        }
      }
    }
    const bool dissolve = work.empty();
    while (!work.empty()) {
      const VertexId v = work.front();
      work.pop_front();
      for (VertexId w : g_.predecessors(v)) {
        if (w == v || !t_.is_attached(w) || ancestor(v, w)) continue;
        const VertexId ws = find_loop_head(w, h);
        if (s_.headers[ws] != h || marks[ws] == reached) continue;
        marks[ws] = reached;
        work.push_back(ws);
      }
    }
    if (dissolve) {
      set_type(h, g_.has_edge(h, h) ? LoopType::Self : LoopType::NonHeader);
    }
    const VertexId up = s_.headers[h];
    bool dropped = false;
    for (VertexId r : reps) {
      if (dissolve || marks[r] != reached) {
        set_header(r, up);
        dropped = true;
      }
    }
    return dissolve || dropped;
  }

  void detach(VertexId v) {
    set_type(v, LoopType::NonHeader);
    set_header(v, kNone);
  }

  const Cfg& graph() const { return g_; }
  const DfstState& tree() const { return t_; }
  LnfState& state() { return s_; }

private:
  const Cfg& g_;
  const DfstState& t_;
  LnfState& s_;
  LnfJournal* journal_;
  const LnfOptions& opts_;
  std::uint32_t touch_gen_ = 0;
  std::vector<VertexId> touched_;
};

}  // namespace detail

// Climbs x's loopHeaders chain until the next header is NONE or an ancestor of
// `head` in the DFST.
inline VertexId find_loop_head(const DfstState& t, const LnfState& s, VertexId x, VertexId head) {
  detail::require_attached(t, x);
  detail::require_attached(t, head);
  VertexId xs = x;
  while (s.headers[xs] != kNone && !is_ancestor(t, s.headers[xs], head)) xs = s.headers[xs];
  return xs;
}

// Updates the forest after (x,y) was inserted and the tree repaired.
//
// Self edges only change the type of x. A back edge seeds a backward
// propagation from x that assigns every vertex reaching x without passing y to
// y's loop; nested loops move as a whole via find_loop_head. Any other edge
// changes nothing unless y is inside a loop: then x must be below that loop's
// header (otherwise the edge is a second entry and IrreducibleError is
// thrown) and x's side is absorbed by the same propagation.
//
// When the repair attached previously unreachable vertices, their out-edges
// are replayed as single insertions: tree edges first, then the rest, each in
// ascending preorder of the source.
inline UpdateCounters on_insert_edge(const Cfg& g, const DfstState& t, LnfState& s, VertexId x,
                                     VertexId y, const RepairReport* repair = nullptr,
                                     LnfJournal* journal = nullptr, const LnfOptions& opts = {}) {
  if (s.irreducible) throw UsageError("loop forest is latched irreducible");
  detail::LnfUpdate up(g, t, s, journal, opts);
  if (!t.is_attached(x) || !t.is_attached(y)) return up.finish();
  if (repair != nullptr && repair->tree_changed) up.check_restructure(*repair, x, y);
  if (repair == nullptr || repair->newly_attached.empty()) {
    up.insert_one(x, y);
  } else {
    std::vector<VertexId> fresh = repair->newly_attached;
    std::sort(fresh.begin(), fresh.end(),
              [&](VertexId a, VertexId b) { return t.pre[a] < t.pre[b]; });
    for (VertexId w : fresh) up.touch(w);
    for (VertexId w : fresh) {
      for (VertexId z : g.successors(w)) {
        if (t.parent[z] == w && z != w) up.insert_one(w, z);
      }
    }
    for (VertexId w : fresh) {
      for (VertexId z : g.successors(w)) {
        if (!(t.parent[z] == w && z != w)) up.insert_one(w, z);
      }
    }
  }
  return up.finish();
}

// Updates the forest after one instance of (x,y) was removed and the tree
// repaired. Only loops containing both endpoints can shrink. Starting from the
// innermost such loop, each level is re-flooded from its surviving back edges;
// members that fall out move to the enclosing level, which is re-flooded in
// turn. Vertices that became unreachable are reset first, and every level
// that lost such a vertex is re-flooded as well.
inline UpdateCounters on_delete_edge(const Cfg& g, const DfstState& t, LnfState& s, VertexId x,
                                     VertexId y, const RepairReport* repair = nullptr,
                                     LnfJournal* journal = nullptr, const LnfOptions& opts = {}) {
  if (s.irreducible) throw UsageError("loop forest is latched irreducible");
  detail::LnfUpdate up(g, t, s, journal, opts);
  up.touch(x);
  up.touch(y);
  if (x == y) {
    if (t.is_attached(x) && !g.has_edge(x, x) && s.types[x] == LoopType::Self) {
      up.set_type(x, LoopType::NonHeader);
    }
    return up.finish();
  }

  const VertexId common = up.innermost_common_loop(x, y);

  std::vector<VertexId> dirty_levels;
  if (repair != nullptr) {
    // Every loop around a lost vertex may have lost a back-edge source.
    const std::uint32_t mark = s.next_aux_gen();
    auto& marks = s.aux_marks();
    for (VertexId d : repair->detached) {
      for (VertexId h = s.headers[d]; h != kNone && marks[h] != mark; h = s.headers[h]) {
        up.touch(h);
        marks[h] = mark;
        dirty_levels.push_back(h);
      }
    }
    for (VertexId d : repair->detached) up.detach(d);
  }
  std::erase_if(dirty_levels, [&](VertexId h) { return !t.is_attached(h); });
  std::sort(dirty_levels.begin(), dirty_levels.end());

  std::vector<VertexId> done;
  auto pending = [&](VertexId h) {
    return std::binary_search(dirty_levels.begin(), dirty_levels.end(), h) &&
           std::find(done.begin(), done.end(), h) == done.end();
  };
  auto any_pending = [&] {
    return std::any_of(dirty_levels.begin(), dirty_levels.end(), pending);
  };
  auto walk = [&](VertexId level, bool changed) {
    while (level != kNone) {
      if (changed || pending(level)) {
        done.push_back(level);
        changed = up.reflood(level);
      }
      if (!changed && !any_pending()) return;
      level = s.headers[level];
    }
  };
  if (common != kNone && t.is_attached(common)) walk(common, true);
  std::vector<VertexId> deepest_first = dirty_levels;
  std::sort(deepest_first.begin(), deepest_first.end(),
            [&](VertexId a, VertexId b) { return t.depth[a] > t.depth[b]; });
  for (VertexId h : deepest_first) {
    if (pending(h)) walk(h, false);
  }
  return up.finish();
}

// {h} plus every vertex whose header chain reaches h, by full scan.
inline std::vector<VertexId> loop_body(const LnfState& s, VertexId h) {
  if (h >= s.size() || s.types[h] != LoopType::Reducible) {
    throw UsageError("vertex " + std::to_string(h) + " is not a reducible loop header");
  }
  std::vector<VertexId> body;
  for (VertexId v = 0; v < s.size(); ++v) {
    VertexId c = v;
    while (c != kNone && c != h) c = s.headers[c];
    if (c == h) body.push_back(v);
  }
  return body;
}

inline std::array<std::size_t, 2> recount(const LnfState& s) {
  std::array<std::size_t, 2> c{0, 0};
  for (LoopType t : s.types) {
    if (t == LoopType::Self) ++c[0];
    if (t == LoopType::Reducible) ++c[1];
  }
  return c;
}

// "v TYPE header" per vertex in id order; "-" for no header.
inline std::string format_lnf_dump(const std::vector<LoopType>& types,
                                   const std::vector<VertexId>& headers) {
  std::ostringstream os;
  for (VertexId v = 0; v < types.size(); ++v) {
    os << v << ' ' << to_string(types[v]) << ' ';
    if (headers[v] == kNone) {
      os << '-';
    } else {
      os << headers[v];
    }
    os << '\n';
  }
  return os.str();
}

inline std::string dump_lnf(const LnfState& s) { return format_lnf_dump(s.types, s.headers); }

}  // namespace lnfdyn

#endif  // LNFDYN_LNF_HPP
