#ifndef LNFDYN_DOMINANCE_HPP
#define LNFDYN_DOMINANCE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "lnfdyn/dfst.hpp"
#include "lnfdyn/graph.hpp"
#include "lnfdyn/lnf.hpp"
#include "lnfdyn/static_oracle.hpp"

namespace lnfdyn {

enum class DomSource : std::uint8_t { LnfFast, Fallback };

struct DomQueryResult {
  bool answer = false;
  DomSource source = DomSource::Fallback;
};

// Body membership by walking v's header chain. A reducible header dominates
// every vertex of its body.
inline bool header_dominates(const LnfState& s, VertexId h, VertexId v) {
  if (h >= s.size() || s.types[h] != LoopType::Reducible) {
    throw UsageError("vertex " + std::to_string(h) + " is not a reducible loop header");
  }
  for (VertexId c = v; c != kNone; c = s.headers[c]) {
    if (c == h) return true;
  }
  return false;
}

// Dominance queries over a maintained forest. Answers that the forest decides
// directly (root, reflexivity, header-to-body, nested headers) are tagged
// LnfFast; everything else walks a dominator tree materialized on demand and
// cached until the graph changes.
class DominanceIndex {
public:
  DomQueryResult dominates(const Cfg& g, const DfstState& t, const LnfState& s, VertexId u,
                           VertexId v) {
    if (s.irreducible) throw UsageError("loop forest is latched irreducible");
    detail::require_attached(t, u);
    detail::require_attached(t, v);
    if (u == g.root() || u == v) return {true, DomSource::LnfFast};
    if (s.types[u] == LoopType::Reducible && header_dominates(s, u, v)) {
      return {true, DomSource::LnfFast};
    }
    const DomTree& tree = materialize(g, t, s);
    for (VertexId c = tree.idom[v]; c != kNone; c = tree.idom[c]) {
      if (c == u) return {true, DomSource::Fallback};
    }
    return {false, DomSource::Fallback};
  }

  // Immediate dominators for the current graph. The maintained DFST supplies
  // the reverse postorder, so no extra traversal of the graph is needed.
  const DomTree& materialize(const Cfg& g, const DfstState& t, const LnfState& s) {
    if (s.irreducible) throw UsageError("loop forest is latched irreducible");
    if (cache_ && cached_version_ == g.version()) return *cache_;
    std::vector<VertexId> rpo;
    for (VertexId v = 0; v < t.size(); ++v) {
      if (t.is_attached(v)) rpo.push_back(v);
    }
    std::sort(rpo.begin(), rpo.end(), [&](VertexId a, VertexId b) { return t.post[a] > t.post[b]; });
    cache_ = detail::dominators_over(g, rpo);
    cached_version_ = g.version();
    ++rebuilds_;
    return *cache_;
  }

  void invalidate() noexcept { cache_.reset(); }

  [[nodiscard]] std::size_t rebuilds() const noexcept { return rebuilds_; }

private:
  std::optional<DomTree> cache_;
  std::uint64_t cached_version_ = 0;
  std::size_t rebuilds_ = 0;
};

}  // namespace lnfdyn

#endif  // LNFDYN_DOMINANCE_HPP
