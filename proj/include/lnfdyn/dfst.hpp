#ifndef LNFDYN_DFST_HPP
#define LNFDYN_DFST_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lnfdyn/graph.hpp"

namespace lnfdyn {

enum class EdgeClass : std::uint8_t { Tree, Forward, Self, Back, Cross, ForwardCross, BackCross };

inline std::string_view to_string(EdgeClass c) noexcept {
  switch (c) {
    case EdgeClass::Tree: return "Tree";
    case EdgeClass::Forward: return "Forward";
    case EdgeClass::Self: return "Self";
    case EdgeClass::Back: return "Back";
    case EdgeClass::Cross: return "Cross";
    case EdgeClass::ForwardCross: return "ForwardCross";
    case EdgeClass::BackCross: return "BackCross";
  }
  return "?";
}

// Depth-first spanning tree of the part of the graph reachable from the root.
//
// Timestamps are spaced integers: a full rebuild numbers consecutively, and
// localized repairs redistribute the stamps of the repaired subtree inside the
// interval its root already owned. When that interval is too narrow the whole
// tree is renumbered with kStampGap spacing.
struct DfstState {
  static constexpr std::int64_t kStampGap = std::int64_t{1} << 16;

  VertexId root = 0;
  std::vector<VertexId> parent;
  std::vector<std::vector<VertexId>> children;  // ascending pre
  std::vector<std::int64_t> pre;
  std::vector<std::int64_t> post;
  std::vector<std::uint32_t> depth;
  std::vector<char> attached;
  std::uint64_t epoch = 0;

  // Scratch marks for the repair routines; not part of the logical state.
  std::vector<std::uint32_t> scratch;
  std::uint32_t scratch_gen = 0;

  [[nodiscard]] std::size_t size() const noexcept { return parent.size(); }

  [[nodiscard]] bool is_attached(VertexId v) const noexcept {
    return v < attached.size() && attached[v] != 0;
  }

  void resize(std::size_t n) {
    parent.assign(n, kNone);
    children.assign(n, {});
    pre.assign(n, -1);
    post.assign(n, -1);
    depth.assign(n, 0);
    attached.assign(n, 0);
    scratch.assign(n, 0);
    scratch_gen = 0;
  }

  std::uint32_t next_mark() {
    if (scratch.size() < parent.size()) scratch.resize(parent.size(), 0);
    if (++scratch_gen == 0) {
      std::fill(scratch.begin(), scratch.end(), 0);
      scratch_gen = 1;
    }
    return scratch_gen;
  }
};

struct RepairReport {
  std::vector<VertexId> delta;     // vertices whose tree data was recomputed
  std::vector<VertexId> detached;  // vertices that lost reachability
  std::vector<VertexId> newly_attached;
  VertexId locus = kNone;
  bool tree_changed = false;
  bool edge_is_tree = false;
  bool renumbered_all = false;
};

namespace detail {

inline void require_attached(const DfstState& s, VertexId v) {
  if (!s.is_attached(v)) {
    throw UsageError("vertex " + std::to_string(v) + " is not reachable from the root");
  }
}

// Iterative DFS from `start` over vertices accepted by `can_visit`, following
// out-adjacency order. Fills parent/children/depth/attached for every visited
// vertex and returns the pre/post event sequence (second = true for post).
template <class CanVisit>
std::vector<std::pair<VertexId, bool>> explore(const Cfg& g, DfstState& s, VertexId start,
                                               CanVisit&& can_visit) {
  std::vector<std::pair<VertexId, bool>> order;
  struct Frame {
    VertexId v;
    std::size_t next;
  };
  std::vector<Frame> stack;
  const std::uint32_t mark = s.next_mark();
  auto enter = [&](VertexId v) {
    s.scratch[v] = mark;
    s.attached[v] = 1;
    s.children[v].clear();
    order.emplace_back(v, false);
    stack.push_back({v, 0});
  };
  enter(start);
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& succ = g.successors(f.v);
    if (f.next < succ.size()) {
      const VertexId w = succ[f.next++];
      if (s.scratch[w] != mark && can_visit(w)) {
        const VertexId p = f.v;
        s.parent[w] = p;
        s.depth[w] = s.depth[p] + 1;
        s.children[p].push_back(w);
        enter(w);
      }
    } else {
      order.emplace_back(f.v, true);
      stack.pop_back();
    }
  }
  return order;
}

inline void renumber_all(DfstState& s) {
  std::int64_t clock = 0;
  struct Frame {
    VertexId v;
    std::size_t next;
  };
  std::vector<Frame> stack{{s.root, 0}};
  s.pre[s.root] = clock;
  clock += DfstState::kStampGap;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < s.children[f.v].size()) {
      const VertexId c = s.children[f.v][f.next++];
      s.pre[c] = clock;
      clock += DfstState::kStampGap;
      stack.push_back({c, 0});
    } else {
      s.post[f.v] = clock;
      clock += DfstState::kStampGap;
      stack.pop_back();
    }
  }
  ++s.epoch;
}

inline std::vector<VertexId> subtree_vertices(const DfstState& s, VertexId top) {
  std::vector<VertexId> out{top};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (VertexId c : s.children[out[i]]) out.push_back(c);
  }
  return out;
}

inline void clear_vertex(DfstState& s, VertexId v) {
  s.attached[v] = 0;
  s.parent[v] = kNone;
  s.children[v].clear();
  s.pre[v] = -1;
  s.post[v] = -1;
  s.depth[v] = 0;
}

struct SubtreeRebuild {
  std::vector<VertexId> visited;
  std::vector<VertexId> lost;
  bool renumbered_all = false;
};

// Re-runs the DFS below `top` with every vertex outside the old subtree of
// `top` treated as already visited; unvisited vertices remain available. The
// result equals what a full DFS with the same visit order produces for this
// subtree, provided no edge leaves the old subtree towards a vertex visited
// later (the callers choose `top` so that this holds).
inline SubtreeRebuild rebuild_subtree(const Cfg& g, DfstState& s, VertexId top) {
  SubtreeRebuild out;
  const std::vector<VertexId> old = subtree_vertices(s, top);
  const std::int64_t lo = s.pre[top];
  const std::int64_t hi = s.post[top];
  // Old members become available again; everything else that is attached is
  // considered visited.
  for (VertexId v : old) {
    if (v != top) s.attached[v] = 0;
  }
  auto order = explore(g, s, top, [&](VertexId w) { return s.attached[w] == 0; });
  out.visited.reserve(order.size() / 2);
  for (const auto& [v, is_post] : order) {
    if (!is_post) out.visited.push_back(v);
  }
  const std::uint32_t mark = s.next_mark();
  for (VertexId v : out.visited) s.scratch[v] = mark;
  for (VertexId v : old) {
    if (s.scratch[v] != mark) {
      clear_vertex(s, v);
      out.lost.push_back(v);
    }
  }
  const auto slots = static_cast<std::int64_t>(order.size());
  const std::int64_t width = hi - lo + 1;
  if (width >= slots) {
    for (std::int64_t i = 0; i < slots; ++i) {
      const std::int64_t stamp = slots == 1 ? lo : lo + (i * (width - 1)) / (slots - 1);
      const auto& [v, is_post] = order[static_cast<std::size_t>(i)];
      (is_post ? s.post : s.pre)[v] = stamp;
    }
    ++s.epoch;
  } else {
    renumber_all(s);
    out.renumbered_all = true;
  }
  return out;
}

}  // namespace detail

// Builds the DFST from scratch. Children are visited in out-adjacency order and
// stamps come from one global counter (pre on entry, post on exit).
inline DfstState rebuild_full(const Cfg& g) {
  DfstState s;
  s.resize(g.num_vertices());
  s.root = g.root();
  if (g.num_vertices() == 0) return s;
  s.depth[s.root] = 0;
  auto order = detail::explore(g, s, s.root, [](VertexId) { return true; });
  std::int64_t clock = 0;
  for (const auto& [v, is_post] : order) (is_post ? s.post : s.pre)[v] = clock++;
  return s;
}

inline bool is_ancestor(const DfstState& s, VertexId a, VertexId d) {
  detail::require_attached(s, a);
  detail::require_attached(s, d);
  return s.pre[a] <= s.pre[d] && s.post[d] <= s.post[a];
}

inline VertexId nca(const DfstState& s, VertexId u, VertexId v) {
  detail::require_attached(s, u);
  detail::require_attached(s, v);
  while (s.depth[u] > s.depth[v]) u = s.parent[u];
  while (s.depth[v] > s.depth[u]) v = s.parent[v];
  while (u != v) {
    u = s.parent[u];
    v = s.parent[v];
  }
  return u;
}

inline EdgeClass classify_edge(const DfstState& s, VertexId u, VertexId v, bool refined = false) {
  detail::require_attached(s, u);
  detail::require_attached(s, v);
  if (u == v) return EdgeClass::Self;
  if (s.parent[v] == u) return EdgeClass::Tree;
  if (s.pre[u] < s.pre[v] && s.post[v] < s.post[u]) return EdgeClass::Forward;
  if (s.pre[v] < s.pre[u] && s.post[u] < s.post[v]) return EdgeClass::Back;
  if (!refined) return EdgeClass::Cross;
  return s.post[u] < s.pre[v] ? EdgeClass::ForwardCross : EdgeClass::BackCross;
}

// Called after (u,v) was appended to g. The tree changes only when v was not
// yet visited at the moment the DFS examined the new edge: v detached, or v
// discovered after u finished (a forward-cross edge). The subtree of the
// nearest common ancestor of u and every vertex that the new edge steals is
// re-explored.
inline RepairReport repair_after_insert(const Cfg& g, DfstState& s, VertexId u, VertexId v) {
  RepairReport rep;
  if (s.size() < g.num_vertices()) {
    s.parent.resize(g.num_vertices(), kNone);
    s.children.resize(g.num_vertices());
    s.pre.resize(g.num_vertices(), -1);
    s.post.resize(g.num_vertices(), -1);
    s.depth.resize(g.num_vertices(), 0);
    s.attached.resize(g.num_vertices(), 0);
    s.scratch.resize(g.num_vertices(), 0);
  }
  if (!s.is_attached(u) || u == v) return rep;

  VertexId locus = kNone;
  std::vector<VertexId> fresh;
  if (s.is_attached(v)) {
    if (s.post[u] < s.pre[v]) locus = nca(s, u, v);
  } else {
    locus = u;
    const std::uint32_t mark = s.next_mark();
    std::deque<VertexId> queue{v};
    s.scratch[v] = mark;
    while (!queue.empty()) {
      const VertexId w = queue.front();
      queue.pop_front();
      fresh.push_back(w);
      for (VertexId x : g.successors(w)) {
        if (s.attached[x]) {
          if (s.post[u] < s.pre[x]) locus = nca(s, locus, x);
        } else if (s.scratch[x] != mark) {
          s.scratch[x] = mark;
          queue.push_back(x);
        }
      }
    }
  }
  if (locus == kNone) return rep;

  auto rebuilt = detail::rebuild_subtree(g, s, locus);
  rep.locus = locus;
  rep.tree_changed = true;
  rep.renumbered_all = rebuilt.renumbered_all;
  rep.delta = std::move(rebuilt.visited);
  rep.newly_attached = std::move(fresh);
  std::sort(rep.newly_attached.begin(), rep.newly_attached.end());
  rep.edge_is_tree = s.parent[v] == u;
  return rep;
}

// Called after one instance of (u,v) was removed from g. `was_tree` must be
// captured before the mutation. A removed tree edge re-explores the subtree of
// u; vertices that cannot be re-reached there but still have a reachable
// predecessor elsewhere move the repair locus up to the common ancestor.
inline RepairReport repair_after_delete(const Cfg& g, DfstState& s, VertexId u, VertexId v,
                                        bool was_tree) {
  RepairReport rep;
  if (!was_tree || !s.is_attached(u)) return rep;
  (void)v;
  VertexId locus = u;
  bool renumbered = false;
  std::vector<VertexId> visited;
  std::vector<VertexId> lost_any;
  for (;;) {
    auto rebuilt = detail::rebuild_subtree(g, s, locus);
    renumbered = renumbered || rebuilt.renumbered_all;
    visited = std::move(rebuilt.visited);
    if (rebuilt.lost.empty()) break;
    lost_any.insert(lost_any.end(), rebuilt.lost.begin(), rebuilt.lost.end());
    VertexId next = locus;
    for (VertexId m : rebuilt.lost) {
      for (VertexId p : g.predecessors(m)) {
        if (s.attached[p]) next = nca(s, next, p);
      }
    }
    if (next == locus) break;
    locus = next;
  }
  rep.locus = locus;
  rep.tree_changed = true;
  rep.renumbered_all = renumbered;
  rep.delta = std::move(visited);
  std::sort(lost_any.begin(), lost_any.end());
  lost_any.erase(std::unique(lost_any.begin(), lost_any.end()), lost_any.end());
  for (VertexId w : lost_any) {
    if (!s.attached[w]) rep.detached.push_back(w);
  }
  return rep;
}

// Vertices that are detached now but were attached according to `before`.
inline std::vector<VertexId> newly_detached(const std::vector<char>& before, const DfstState& s) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < before.size() && v < s.size(); ++v) {
    if (before[v] && !s.attached[v]) out.push_back(v);
  }
  return out;
}

// Interval nesting over all attached vertices: two intervals are equal,
// disjoint, or strictly nested; subtree membership agrees with the intervals.
inline bool intervals_well_nested(const DfstState& s) {
  struct Ev {
    std::int64_t t;
    VertexId v;
    bool open;
  };
  std::vector<Ev> evs;
  for (VertexId v = 0; v < s.size(); ++v) {
    if (!s.attached[v]) continue;
    if (!(s.pre[v] < s.post[v])) return false;
    evs.push_back({s.pre[v], v, true});
    evs.push_back({s.post[v], v, false});
  }
  std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) { return a.t < b.t; });
  for (std::size_t i = 1; i < evs.size(); ++i) {
    if (evs[i].t == evs[i - 1].t) return false;
  }
  std::vector<VertexId> stack;
  for (const Ev& e : evs) {
    if (e.open) {
      const VertexId expected_parent = stack.empty() ? kNone : stack.back();
      if (e.v != s.root && s.parent[e.v] != expected_parent) return false;
      stack.push_back(e.v);
    } else {
      if (stack.empty() || stack.back() != e.v) return false;
      stack.pop_back();
    }
  }
  return true;
}

// "v parent pre post depth" with stamps replaced by their rank so that dumps
// do not depend on the spacing of the timestamps.
inline std::string dump_dfst(const DfstState& s) {
  std::vector<std::int64_t> stamps;
  for (VertexId v = 0; v < s.size(); ++v) {
    if (!s.attached[v]) continue;
    stamps.push_back(s.pre[v]);
    stamps.push_back(s.post[v]);
  }
  std::sort(stamps.begin(), stamps.end());
  auto rank = [&](std::int64_t t) {
    return std::lower_bound(stamps.begin(), stamps.end(), t) - stamps.begin();
  };
  std::ostringstream os;
  for (VertexId v = 0; v < s.size(); ++v) {
    os << v << ' ';
    if (!s.attached[v]) {
      os << "detached\n";
      continue;
    }
    if (s.parent[v] == kNone) {
      os << '-';
    } else {
      os << s.parent[v];
    }
    os << ' ' << rank(s.pre[v]) << ' ' << rank(s.post[v]) << ' ' << s.depth[v] << '\n';
  }
  return os.str();
}

inline std::string to_dot(const Cfg& g, const DfstState& s) {
  std::ostringstream os;
  os << "digraph dfst {\n";
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    os << "  " << v;
    if (!s.is_attached(v)) os << " [style=dotted]";
    os << ";\n";
  }
  for (VertexId u = 0; u < g.num_vertices(); ++u) {
    for (VertexId v : g.successors(u)) {
      os << "  " << u << " -> " << v;
      if (!s.is_attached(u) || !s.is_attached(v)) {
        os << " [style=dotted,label=\"detached\"]";
      } else {
        const EdgeClass c = classify_edge(s, u, v, true);
        if (c != EdgeClass::Tree) os << " [style=dashed,label=\"" << to_string(c) << "\"]";
      }
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace lnfdyn

#endif  // LNFDYN_DFST_HPP
