#ifndef LNFDYN_DYNAMIC_HPP
#define LNFDYN_DYNAMIC_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lnfdyn/dfst.hpp"
#include "lnfdyn/graph.hpp"
#include "lnfdyn/lnf.hpp"
#include "lnfdyn/static_oracle.hpp"

namespace lnfdyn {

enum class IrreduciblePolicy : std::uint8_t { Reject, Latch };

enum class Outcome : std::uint8_t { Ok, IrreducibleRejected, IrreducibleLatched };

inline std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Ok: return "ok";
    case Outcome::IrreducibleRejected: return "irreducible-rejected";
    case Outcome::IrreducibleLatched: return "irreducible-latched";
  }
  return "?";
}

struct EventResult {
  Outcome outcome = Outcome::Ok;
  std::optional<EdgeClass> edge_class;  // refined; empty if an endpoint is detached
  UpdateCounters counters;
  RepairReport repair;
};

// One update transaction = graph mutation, DFST repair, forest repair. Under
// the Reject policy an irreducible insertion is undone completely: the edge is
// removed, the tree is rebuilt and the forest is restored from the journal.
// Under Latch the edge stays, the forest is marked irreducible and only the
// graph and tree are maintained afterwards.
class DynamicLnf {
public:
  explicit DynamicLnf(std::size_t n, VertexId root = 0,
                      IrreduciblePolicy policy = IrreduciblePolicy::Reject, LnfOptions opts = {})
      : g_(n, root), t_(rebuild_full(g_)), s_(n), policy_(policy), opts_(opts) {}

  EventResult insert_edge(VertexId u, VertexId v) {
    EventResult r;
    g_.insert_edge_raw(u, v);
    r.repair = repair_after_insert(g_, t_, u, v);
    if (t_.is_attached(u) && t_.is_attached(v)) r.edge_class = classify_edge(t_, u, v, true);
    if (s_.irreducible) {
      r.outcome = Outcome::IrreducibleLatched;
      finish(r);
      return r;
    }
    journal_.clear();
    try {
      r.counters = on_insert_edge(g_, t_, s_, u, v, &r.repair, &journal_, opts_);
    } catch (const IrreducibleError&) {
      if (policy_ == IrreduciblePolicy::Reject) {
        journal_.rollback(s_);
        g_.delete_edge_raw(u, v);
        t_ = rebuild_full(g_);
        r.outcome = Outcome::IrreducibleRejected;
      } else {
        s_.irreducible = true;
        r.outcome = Outcome::IrreducibleLatched;
      }
    }
    journal_.clear();
    finish(r);
    return r;
  }

  EventResult delete_edge(VertexId u, VertexId v) {
    if (!g_.contains(u) || !g_.contains(v) || !g_.has_edge(u, v)) {
      throw UsageError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                       ") is not present");
    }
    EventResult r;
    const bool was_tree =
        u != v && t_.is_attached(v) && t_.parent[v] == u && g_.multiplicity(u, v) == 1;
    if (t_.is_attached(u) && t_.is_attached(v)) r.edge_class = classify_edge(t_, u, v, true);
    g_.delete_edge_raw(u, v);
    r.repair = repair_after_delete(g_, t_, u, v, was_tree);
    if (s_.irreducible) {
      r.outcome = Outcome::IrreducibleLatched;
      finish(r);
      return r;
    }
    r.counters = on_delete_edge(g_, t_, s_, u, v, &r.repair, nullptr, opts_);
    finish(r);
    return r;
  }

  EventResult apply(const UpdateEvent& ev) {
    return ev.kind == UpdateKind::Insert ? insert_edge(ev.src, ev.dst) : delete_edge(ev.src, ev.dst);
  }

  // Recomputes tree and forest from scratch and clears the irreducible latch.
  // Throws IrreducibleError (leaving the latch set) if the graph is still
  // irreducible.
  void reset() {
    t_ = rebuild_full(g_);
    const StaticLoopForest f = build_loop_forest(g_, t_);
    LnfState fresh(g_.num_vertices());
    for (VertexId v = 0; v < g_.num_vertices(); ++v) {
      fresh.set_type(v, f.kind[v]);
      fresh.set_header(v, f.header[v]);
    }
    s_ = std::move(fresh);
  }

  [[nodiscard]] const Cfg& graph() const noexcept { return g_; }
  [[nodiscard]] const DfstState& tree() const noexcept { return t_; }
  [[nodiscard]] const LnfState& lnf() const noexcept { return s_; }
  [[nodiscard]] IrreduciblePolicy policy() const noexcept { return policy_; }

private:
  static void finish(EventResult& r) {
    r.counters.delta = r.repair.delta.size() + r.repair.detached.size();
  }

  Cfg g_;
  DfstState t_;
  LnfState s_;
  LnfJournal journal_;
  IrreduciblePolicy policy_;
  LnfOptions opts_;
};

}  // namespace lnfdyn

#endif  // LNFDYN_DYNAMIC_HPP
