#ifndef LNFDYN_STATIC_ORACLE_HPP
#define LNFDYN_STATIC_ORACLE_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lnfdyn/dfst.hpp"
#include "lnfdyn/graph.hpp"
#include "lnfdyn/lnf.hpp"

// Offline reference computations used as ground truth for the dynamic
// structures. Everything here recomputes from scratch.

namespace lnfdyn {

struct StaticLoopForest {
  std::vector<VertexId> header;
  std::vector<LoopType> kind;
  std::size_t work = 0;  // vertices visited while building
};

struct DomTree {
  std::vector<VertexId> idom;  // kNone for the root and unreachable vertices

  friend bool operator==(const DomTree&, const DomTree&) = default;
};

// Tarjan/Havlak-style bottom-up construction. Headers are processed in reverse
// preorder; the body of each is flooded backwards from its back-edge sources,
// with already finished inner loops collapsed through a union-find. A flood
// that reaches a vertex outside the header's subtree proves a second entry.
inline StaticLoopForest build_loop_forest(const Cfg& g, const DfstState& order) {
  const std::size_t n = g.num_vertices();
  StaticLoopForest f;
  f.header.assign(n, kNone);
  f.kind.assign(n, LoopType::NonHeader);

  std::vector<VertexId> verts;
  for (VertexId v = 0; v < n; ++v) {
    if (order.is_attached(v)) verts.push_back(v);
  }
  std::sort(verts.begin(), verts.end(),
            [&](VertexId a, VertexId b) { return order.pre[a] > order.pre[b]; });

  std::vector<VertexId> uf(n);
  std::iota(uf.begin(), uf.end(), VertexId{0});
  auto find = [&](VertexId v) {
    VertexId r = v;
    while (uf[r] != r) r = uf[r];
    while (uf[v] != r) {
      const VertexId next = uf[v];
      uf[v] = r;
      v = next;
    }
    return r;
  };
  auto anc = [&](VertexId a, VertexId d) {
    return order.pre[a] <= order.pre[d] && order.post[d] <= order.post[a];
  };

  std::vector<VertexId> in_body(n, kNone);
  std::vector<VertexId> body;
  for (VertexId w : verts) {
    ++f.work;
    body.clear();
    bool self = false;
    for (VertexId z : g.predecessors(w)) {
      if (!order.is_attached(z)) continue;
      if (z == w) {
        self = true;
        continue;
      }
      if (!anc(w, z)) continue;
      const VertexId r = find(z);
      if (r != w && in_body[r] != w) {
        in_body[r] = w;
        body.push_back(r);
      }
    }
    for (std::size_t i = 0; i < body.size(); ++i) {
      const VertexId p = body[i];
      ++f.work;
      for (VertexId q : g.predecessors(p)) {
        if (!order.is_attached(q) || anc(p, q)) continue;
        const VertexId r = find(q);
        if (r == w || r == p || in_body[r] == w) continue;
        if (!anc(w, r)) throw IrreducibleError(q, p);
        in_body[r] = w;
        body.push_back(r);
      }
    }
    for (VertexId p : body) {
      f.header[p] = w;
      uf[p] = w;
    }
    if (!body.empty()) {
      f.kind[w] = LoopType::Reducible;
    } else if (self) {
      f.kind[w] = LoopType::Self;
    }
  }
  return f;
}

// Reachable set from the root, as a byte mask.
inline std::vector<char> reachable_from_root(const Cfg& g) {
  std::vector<char> seen(g.num_vertices(), 0);
  if (g.num_vertices() == 0) return seen;
  std::vector<VertexId> stack{g.root()};
  seen[g.root()] = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (VertexId w : g.successors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

namespace detail {

class Bitset {
public:
  explicit Bitset(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  [[nodiscard]] bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void fill() { std::fill(words_.begin(), words_.end(), ~std::uint64_t{0}); }
  [[nodiscard]] std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  [[nodiscard]] std::size_t first() const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i]) return i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i]));
    }
    return words_.size() * 64;
  }
  Bitset& operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  Bitset& operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      for (std::uint64_t w = words_[i]; w; w &= w - 1) {
        fn(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
      }
    }
  }
  friend bool operator==(const Bitset&, const Bitset&) = default;

private:
  std::vector<std::uint64_t> words_;
};

}  // namespace detail

// T1/T2 collapse over the reachable subgraph: drop self loops, merge any
// vertex with a single predecessor into it, until nothing changes. Reducible
// iff a single vertex remains. Independent of any DFS.
inline bool reducibility_test(const Cfg& g) {
  const std::size_t n = g.num_vertices();
  if (n == 0) return true;
  const auto reach = reachable_from_root(g);
  std::vector<detail::Bitset> pred(n, detail::Bitset(n));
  std::vector<detail::Bitset> succ(n, detail::Bitset(n));
  std::size_t alive = 0;
  for (VertexId u = 0; u < n; ++u) {
    if (!reach[u]) continue;
    ++alive;
    for (VertexId v : g.successors(u)) {
      if (u == v) continue;
      succ[u].set(v);
      pred[v].set(u);
    }
  }
  std::vector<char> live(reach.begin(), reach.end());
  for (bool changed = true; changed;) {
    changed = false;
    for (VertexId v = 0; v < n; ++v) {
      if (!live[v] || v == g.root() || pred[v].count() != 1) continue;
      const auto p = static_cast<VertexId>(pred[v].first());
      succ[v].for_each([&](std::size_t s) {
        pred[s].reset(v);
        if (s != p) {
          pred[s].set(p);
          succ[p].set(s);
        }
      });
      succ[p].reset(v);
      live[v] = 0;
      --alive;
      changed = true;
    }
  }
  return alive == 1;
}

inline std::vector<VertexId> reverse_postorder(const Cfg& g) {
  const std::size_t n = g.num_vertices();
  std::vector<VertexId> post;
  if (n == 0) return post;
  std::vector<char> seen(n, 0);
  struct Frame {
    VertexId v;
    std::size_t next;
  };
  std::vector<Frame> stack{{g.root(), 0}};
  seen[g.root()] = 1;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& succ = g.successors(f.v);
    if (f.next < succ.size()) {
      const VertexId w = succ[f.next++];
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back({w, 0});
      }
    } else {
      post.push_back(f.v);
      stack.pop_back();
    }
  }
  std::reverse(post.begin(), post.end());
  return post;
}

namespace detail {

// Intersection-based iterative solver over a given reverse postorder.
inline DomTree dominators_over(const Cfg& g, const std::vector<VertexId>& rpo) {
  const std::size_t n = g.num_vertices();
  DomTree t;
  t.idom.assign(n, kNone);
  if (rpo.empty()) return t;
  std::vector<std::size_t> index(n, n);
  for (std::size_t i = 0; i < rpo.size(); ++i) index[rpo[i]] = i;
  const VertexId root = rpo.front();
  std::vector<VertexId> idom(n, kNone);
  idom[root] = root;
  auto intersect = [&](VertexId a, VertexId b) {
    while (a != b) {
      while (index[a] > index[b]) a = idom[a];
      while (index[b] > index[a]) b = idom[b];
    }
    return a;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 1; i < rpo.size(); ++i) {
      const VertexId b = rpo[i];
      VertexId next = kNone;
      for (VertexId p : g.predecessors(b)) {
        if (index[p] == n || idom[p] == kNone) continue;
        next = next == kNone ? p : intersect(p, next);
      }
      if (next != idom[b]) {
        idom[b] = next;
        changed = true;
      }
    }
  }
  for (VertexId v : rpo) {
    if (v != root) t.idom[v] = idom[v];
  }
  return t;
}

}  // namespace detail

// Fixpoint of Dom(v) = {v} ∪ ⋂ Dom(p) over predecessors, in the
// intersection form over reverse postorder.
inline DomTree iterative_dominators(const Cfg& g) {
  return detail::dominators_over(g, reverse_postorder(g));
}

// Explicit Dom sets iterated to a fixpoint. Quadratic; meant for small graphs.
class DomSets {
public:
  explicit DomSets(const Cfg& g) : reach_(reachable_from_root(g)) {
    const std::size_t n = g.num_vertices();
    detail::Bitset all(n);
    for (VertexId v = 0; v < n; ++v) {
      if (reach_[v]) all.set(v);
    }
    sets_.assign(n, all);
    if (n == 0) return;
    sets_[g.root()] = detail::Bitset(n);
    sets_[g.root()].set(g.root());
    for (bool changed = true; changed;) {
      changed = false;
      for (VertexId v = 0; v < n; ++v) {
        if (!reach_[v] || v == g.root()) continue;
        detail::Bitset next = all;
        for (VertexId p : g.predecessors(v)) {
          if (reach_[p]) next &= sets_[p];
        }
        next.set(v);
        if (!(next == sets_[v])) {
          sets_[v] = std::move(next);
          changed = true;
        }
      }
    }
  }

  [[nodiscard]] bool dominates(VertexId d, VertexId v) const {
    return reach_[v] && reach_[d] && sets_[v].test(d);
  }

  // idom(v) is the strict dominator with the largest Dom set.
  [[nodiscard]] DomTree tree() const {
    DomTree t;
    t.idom.assign(sets_.size(), kNone);
    for (VertexId v = 0; v < sets_.size(); ++v) {
      if (!reach_[v]) continue;
      std::size_t best = 0;
      sets_[v].for_each([&](std::size_t d) {
        if (d == v) return;
        const std::size_t c = sets_[d].count();
        if (c > best) {
          best = c;
          t.idom[v] = static_cast<VertexId>(d);
        }
      });
    }
    return t;
  }

private:
  std::vector<char> reach_;
  std::vector<detail::Bitset> sets_;
};

// Per-vertex comparison of the maintained forest against an oracle forest.
inline bool verify_against(const LnfState& s, const StaticLoopForest& oracle) {
  if (s.size() != oracle.header.size()) return false;
  return s.types == oracle.kind && s.headers == oracle.header;
}

}  // namespace lnfdyn

#endif  // LNFDYN_STATIC_ORACLE_HPP
