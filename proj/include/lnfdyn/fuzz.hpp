#ifndef LNFDYN_FUZZ_HPP
#define LNFDYN_FUZZ_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lnfdyn/dfst.hpp"
#include "lnfdyn/dynamic.hpp"
#include "lnfdyn/harness.hpp"
#include "lnfdyn/lnf.hpp"
#include "lnfdyn/static_oracle.hpp"

namespace lnfdyn {

struct CheckFailure {
  std::string check;
  std::string message;
};

struct FuzzStats {
  std::size_t inserts = 0;
  std::size_t deletes = 0;
  std::size_t rejected = 0;
  std::size_t latched = 0;
  std::size_t tree_changes = 0;
  std::size_t detachments = 0;
  std::size_t reattachments = 0;
  std::size_t total_k = 0;
  std::size_t total_delta = 0;
  std::size_t max_k = 0;
};

struct FuzzFailure {
  std::size_t event_index = 0;
  CheckFailure what;
  UpdateStream minimized;
};

struct FuzzResult {
  std::uint64_t seed = 0;
  UpdateStream stream;
  FuzzStats stats;
  std::optional<FuzzFailure> failure;
};

// Per-event verification of a DynamicLnf against the oracles. Construct before
// applying the event (it snapshots the forest), call verify() afterwards.
class EventChecker {
public:
  EventChecker(const DynamicLnf& eng, const UpdateEvent& ev)
      : eng_(eng), ev_(ev), types_(eng.lnf().types), headers_(eng.lnf().headers) {
    latched_before_ = eng.lnf().irreducible;
    if (ev.kind == UpdateKind::Insert && !latched_before_) {
      Cfg with = eng.graph();
      with.insert_edge_raw(ev.src, ev.dst);
      reducible_after_ = reducibility_test(with);
    }
  }

  [[nodiscard]] std::optional<CheckFailure> verify(const EventResult& r) const {
    const Cfg& g = eng_.graph();
    const DfstState& t = eng_.tree();
    const LnfState& s = eng_.lnf();

    if (reducible_after_) {
      const bool flagged = r.outcome != Outcome::Ok;
      if (flagged == *reducible_after_) {
        return CheckFailure{"irreducibility", *reducible_after_
                                                  ? "reducible insertion was flagged irreducible"
                                                  : "irreducible insertion was accepted"};
      }
    }

    const DfstState fresh = rebuild_full(g);
    if (!intervals_well_nested(t)) return CheckFailure{"intervals", "DFST intervals are not nested"};
    if (t.attached != fresh.attached) return CheckFailure{"dfst", "attached set differs from a fresh DFS"};
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      if (t.parent[v] != fresh.parent[v]) {
        return CheckFailure{"dfst", "parent of " + std::to_string(v) + " differs from a fresh DFS"};
      }
    }
    for (VertexId u = 0; u < g.num_vertices(); ++u) {
      if (!t.attached[u]) continue;
      for (VertexId v : g.successors(u)) {
        if (!t.attached[v]) continue;
        if (classify_edge(t, u, v, true) != classify_edge(fresh, u, v, true)) {
          return CheckFailure{"classification", "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                                    ") classified differently from a fresh DFS"};
        }
      }
    }

    if (s.irreducible) return std::nullopt;

    if (recount(s) != s.counts) return CheckFailure{"counts", "loopCounts differ from a full recount"};

    const StaticLoopForest oracle = build_loop_forest(g, fresh);
    if (!verify_against(s, oracle)) {
      return CheckFailure{"oracle", "forest differs from the static oracle\nmaintained:\n" + dump_lnf(s) +
                                        "oracle:\n" + format_lnf_dump(oracle.kind, oracle.header)};
    }
    Cfg reversed(g.num_vertices(), g.root());
    for (VertexId u = 0; u < g.num_vertices(); ++u) {
      const auto& succ = g.successors(u);
      for (auto it = succ.rbegin(); it != succ.rend(); ++it) reversed.insert_edge_raw(u, *it);
    }
    const StaticLoopForest other = build_loop_forest(reversed, rebuild_full(reversed));
    if (other.kind != oracle.kind || other.header != oracle.header) {
      return CheckFailure{"order-independence", "oracle forest depends on the DFS visit order"};
    }

    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      const VertexId h = s.headers[v];
      if (h != kNone && (!t.attached[h] || !t.attached[v] || !is_ancestor(t, h, v))) {
        return CheckFailure{"header-ancestry", "header of " + std::to_string(v) + " is not its ancestor"};
      }
    }

    std::vector<char> allowed(g.num_vertices(), 0);
    for (VertexId v : r.repair.delta) allowed[v] = 1;
    for (VertexId v : r.repair.detached) allowed[v] = 1;
    for (VertexId v : r.counters.touched) allowed[v] = 1;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      if ((s.types[v] != types_[v] || s.headers[v] != headers_[v]) && !allowed[v]) {
        return CheckFailure{"locality", "vertex " + std::to_string(v) + " changed outside delta and k"};
      }
    }
    return std::nullopt;
  }

private:
  const DynamicLnf& eng_;
  UpdateEvent ev_;
  std::vector<LoopType> types_;
  std::vector<VertexId> headers_;
  bool latched_before_ = false;
  std::optional<bool> reducible_after_;
};

struct ReplayFailure {
  std::size_t event_index = 0;
  CheckFailure what;
};

// Replays a stream with full checking after every event. Streams that cannot
// be replayed (a delete of an edge the engine does not have) count as passing.
inline std::optional<ReplayFailure> replay_checked(const UpdateStream& stream, IrreduciblePolicy policy,
                                                   const LnfOptions& opts = {}) {
  DynamicLnf eng(stream.n, stream.root, policy, opts);
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const auto& ev = stream.events[i];
    if (ev.kind == UpdateKind::Delete && !eng.graph().has_edge(ev.src, ev.dst)) return std::nullopt;
    EventChecker checker(eng, ev);
    const EventResult r = eng.apply(ev);
    if (auto f = checker.verify(r)) return ReplayFailure{i, std::move(*f)};
  }
  return std::nullopt;
}

// Greedy event removal: drop any single event whose removal keeps the stream
// valid and still failing, until a full pass removes nothing.
inline UpdateStream shrink(UpdateStream stream, IrreduciblePolicy policy, const LnfOptions& opts = {}) {
  for (bool removed = true; removed;) {
    removed = false;
    for (std::size_t i = stream.events.size(); i-- > 0;) {
      UpdateStream candidate = stream;
      candidate.events.erase(candidate.events.begin() + static_cast<std::ptrdiff_t>(i));
      if (!stream_valid(candidate)) continue;
      if (replay_checked(candidate, policy, opts)) {
        stream = std::move(candidate);
        removed = true;
      }
    }
  }
  for (std::size_t i = 0; i < stream.events.size(); ++i) stream.events[i].seq = i;
  return stream;
}

namespace detail {

// Chooses the next event from the engine's current state. Grows a spanning
// skeleton first, then mixes back, forward, cross and self insertions with
// deletions of random live edges and of tree edges.
class EventGenerator {
public:
  EventGenerator(std::uint64_t seed, std::size_t n) : rng_(seed), n_(n) {}

  UpdateEvent next(const DynamicLnf& eng, std::size_t index) {
    const Cfg& g = eng.graph();
    const DfstState& t = eng.tree();
    if (n_ == 1) {
      if (g.num_edges() > 0 && pick(2) == 0) return del(0, 0);
      return ins(0, 0);
    }
    if (index + 1 < n_ && index < skeleton_limit()) {
      const auto v = static_cast<VertexId>(index + 1);
      if (!t.is_attached(v)) return ins(random_attached(t), v);
    }
    const unsigned r = pick(100);
    if (r < 22) {
      const VertexId v = random_attached(t);
      VertexId a = v;
      for (unsigned steps = pick(t.depth[v] + 1); steps > 0 && t.parent[a] != kNone; --steps) a = t.parent[a];
      return ins(v, a);
    }
    if (r < 34) {
      VertexId d = random_attached(t);
      const VertexId a = d;
      for (unsigned steps = 1 + pick(4); steps > 0 && !t.children[d].empty(); --steps) {
        d = t.children[d][pick(static_cast<unsigned>(t.children[d].size()))];
      }
      return ins(a, d);
    }
    if (r < 46) return ins(random_attached(t), random_attached(t));
    if (r < 52) {
      const VertexId v = random_attached(t);
      return ins(v, v);
    }
    if (r < 58) return ins(static_cast<VertexId>(pick(n_)), static_cast<VertexId>(pick(n_)));
    if (g.num_edges() == 0) return ins(random_attached(t), static_cast<VertexId>(pick(n_)));
    if (r < 92) {
      std::size_t target = pick(static_cast<unsigned>(g.num_edges()));
      for (VertexId u = 0; u < g.num_vertices(); ++u) {
        const auto& succ = g.successors(u);
        if (target < succ.size()) return del(u, succ[target]);
        target -= succ.size();
      }
    }
    std::vector<VertexId> children;
    for (VertexId v = 0; v < t.size(); ++v) {
      if (t.attached[v] && t.parent[v] != kNone) children.push_back(v);
    }
    if (children.empty()) return ins(random_attached(t), static_cast<VertexId>(pick(n_)));
    const VertexId v = children[pick(static_cast<unsigned>(children.size()))];
    return del(t.parent[v], v);
  }

private:
  std::size_t skeleton_limit() const { return n_ - 1; }

  unsigned pick(std::size_t bound) { return static_cast<unsigned>(rng_() % bound); }

  VertexId random_attached(const DfstState& t) {
    attached_.clear();
    for (VertexId v = 0; v < t.size(); ++v) {
      if (t.attached[v]) attached_.push_back(v);
    }
    return attached_[pick(attached_.size())];
  }

  static UpdateEvent ins(VertexId u, VertexId v) { return {UpdateKind::Insert, u, v, 0}; }
  static UpdateEvent del(VertexId u, VertexId v) { return {UpdateKind::Delete, u, v, 0}; }

  std::mt19937_64 rng_;
  std::size_t n_;
  std::vector<VertexId> attached_;
};

}  // namespace detail

// Runs one randomized case of `events` updates on n vertices, checking every
// event against the oracles. Deterministic in (seed, n, events, policy). On
// failure the reproducer stream is shrunk.
inline FuzzResult fuzz(std::uint64_t seed, std::size_t n, std::size_t events,
                       IrreduciblePolicy policy = IrreduciblePolicy::Reject, const LnfOptions& opts = {}) {
  if (n == 0) throw UsageError("fuzz needs at least one vertex");
  FuzzResult res;
  res.seed = seed;
  res.stream.n = n;
  res.stream.root = 0;
  DynamicLnf eng(n, 0, policy, opts);
  detail::EventGenerator gen(seed, n);
  for (std::size_t i = 0; i < events; ++i) {
    UpdateEvent ev = gen.next(eng, i);
    ev.seq = i;
    res.stream.events.push_back(ev);
    EventChecker checker(eng, ev);
    const EventResult r = eng.apply(ev);

    auto& st = res.stats;
    (ev.kind == UpdateKind::Insert ? st.inserts : st.deletes) += 1;
    if (r.outcome == Outcome::IrreducibleRejected) ++st.rejected;
    if (r.outcome == Outcome::IrreducibleLatched) ++st.latched;
    if (r.repair.tree_changed) ++st.tree_changes;
    if (!r.repair.detached.empty()) ++st.detachments;
    if (!r.repair.newly_attached.empty()) ++st.reattachments;
    st.total_k += r.counters.k;
    st.total_delta += r.counters.delta;
    st.max_k = std::max(st.max_k, r.counters.k);

    if (auto f = checker.verify(r)) {
      res.failure = FuzzFailure{i, std::move(*f), {}};
      res.stream.events.resize(i + 1);
      res.failure->minimized = shrink(res.stream, policy, opts);
      return res;
    }
  }
  return res;
}

}  // namespace lnfdyn

#endif  // LNFDYN_FUZZ_HPP
