#ifndef LNFDYN_GRAPH_HPP
#define LNFDYN_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lnfdyn {

using VertexId = std::uint32_t;

inline constexpr VertexId kNone = std::numeric_limits<VertexId>::max();

// Misuse of the API: unknown ids, deleting absent edges, querying detached
// vertices.
class UsageError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

enum class UpdateKind : std::uint8_t { Insert, Delete };

struct UpdateEvent {
  UpdateKind kind = UpdateKind::Insert;
  VertexId src = 0;
  VertexId dst = 0;
  std::uint64_t seq = 0;

  friend bool operator==(const UpdateEvent&, const UpdateEvent&) = default;
};

// Rooted directed multigraph. Vertices are dense ids and are never removed;
// parallel and self edges are stored with multiplicity.
class Cfg {
public:
  Cfg() = default;

  explicit Cfg(std::size_t n, VertexId root = 0) {
    for (std::size_t i = 0; i < n; ++i) add_vertex();
    if (n > 0) set_root(root);
  }

  VertexId add_vertex() {
    out_.emplace_back();
    in_.emplace_back();
    return static_cast<VertexId>(out_.size() - 1);
  }

  [[nodiscard]] std::size_t num_vertices() const noexcept { return out_.size(); }
  [[nodiscard]] std::size_t num_edges() const noexcept { return m_; }

  [[nodiscard]] VertexId root() const noexcept { return root_; }

  void set_root(VertexId r) {
    check(r);
    root_ = r;
    ++version_;
  }

  [[nodiscard]] bool contains(VertexId v) const noexcept { return v < out_.size(); }

  // Appends one instance of (u,v); the new instance is visited last by DFS.
  void insert_edge_raw(VertexId u, VertexId v) {
    check(u);
    check(v);
    out_[u].push_back(v);
    in_[v].push_back(u);
    ++m_;
    ++version_;
  }

  // Removes the most recently inserted instance of (u,v). Throws UsageError
  // and leaves the graph untouched when the edge is absent.
  void delete_edge_raw(VertexId u, VertexId v) {
    check(u);
    check(v);
    auto& outs = out_[u];
    auto it = std::find(outs.rbegin(), outs.rend(), v);
    if (it == outs.rend()) {
      throw UsageError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                       ") is not present");
    }
    outs.erase(std::next(it).base());
    auto& ins = in_[v];
    auto jt = std::find(ins.rbegin(), ins.rend(), u);
    ins.erase(std::next(jt).base());
    --m_;
    ++version_;
  }

  [[nodiscard]] const std::vector<VertexId>& successors(VertexId v) const {
    check(v);
    return out_[v];
  }

  [[nodiscard]] const std::vector<VertexId>& predecessors(VertexId v) const {
    check(v);
    return in_[v];
  }

  [[nodiscard]] std::size_t multiplicity(VertexId u, VertexId v) const {
    check(u);
    check(v);
    return static_cast<std::size_t>(std::count(out_[u].begin(), out_[u].end(), v));
  }

  [[nodiscard]] bool has_edge(VertexId u, VertexId v) const {
    check(u);
    check(v);
    return std::find(out_[u].begin(), out_[u].end(), v) != out_[u].end();
  }

  // Bumped by every mutation; used to invalidate derived caches.
  [[nodiscard]] std::uint64_t version() const noexcept { return version_; }

  // Full-scan consistency check of the two adjacency views.
  [[nodiscard]] bool adjacency_consistent() const {
    std::size_t total = 0;
    for (VertexId u = 0; u < out_.size(); ++u) {
      total += out_[u].size();
      for (VertexId v : out_[u]) {
        const auto fwd = std::count(out_[u].begin(), out_[u].end(), v);
        const auto bwd = std::count(in_[v].begin(), in_[v].end(), u);
        if (fwd != bwd) return false;
      }
    }
    std::size_t total_in = 0;
    for (const auto& ins : in_) total_in += ins.size();
    return total == m_ && total_in == m_;
  }

private:
  void check(VertexId v) const {
    if (v >= out_.size()) throw UsageError("unknown vertex id " + std::to_string(v));
  }

  std::vector<std::vector<VertexId>> out_;
  std::vector<std::vector<VertexId>> in_;
  std::size_t m_ = 0;
  VertexId root_ = 0;
  std::uint64_t version_ = 0;
};

}  // namespace lnfdyn

#endif  // LNFDYN_GRAPH_HPP
