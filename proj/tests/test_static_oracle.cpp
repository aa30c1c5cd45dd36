#include <gtest/gtest.h>

#include <random>

#include "lnfdyn/static_oracle.hpp"

using namespace lnfdyn;

namespace {

constexpr VertexId r = 0, a = 1, b = 2, c = 3;

Cfg make(std::size_t n, std::initializer_list<std::pair<VertexId, VertexId>> edges) {
  Cfg g(n);
  for (auto [u, v] : edges) g.insert_edge_raw(u, v);
  return g;
}

// Strongly connected components by mutual reachability, for small graphs.
std::vector<std::vector<char>> reach_matrix(const Cfg& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<char>> m(n, std::vector<char>(n, 0));
  for (VertexId s = 0; s < n; ++s) {
    std::vector<VertexId> stack{s};
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      for (VertexId w : g.successors(v)) {
        if (!m[s][w]) {
          m[s][w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return m;
}

}  // namespace

TEST(LoopForest, AcyclicHasNoLoops) {
  const Cfg g = make(4, {{r, a}, {r, b}, {a, c}, {b, c}});
  const auto f = build_loop_forest(g, rebuild_full(g));
  for (VertexId v = 0; v < 4; ++v) {
    EXPECT_EQ(f.kind[v], LoopType::NonHeader);
    EXPECT_EQ(f.header[v], kNone);
  }
}

TEST(LoopForest, SingleLoop) {
  const Cfg g = make(3, {{r, a}, {a, b}, {b, a}});
  const auto f = build_loop_forest(g, rebuild_full(g));
  EXPECT_EQ(f.kind[a], LoopType::Reducible);
  EXPECT_EQ(f.header[b], a);
  EXPECT_EQ(f.header[a], kNone);
  // A single non-trivial SCC {a,b}, whose entry is a.
  const auto m = reach_matrix(g);
  EXPECT_TRUE(m[a][b] && m[b][a]);
  EXPECT_FALSE(m[a][r]);
}

TEST(LoopForest, SelfLoop) {
  const Cfg g = make(2, {{r, a}, {a, a}});
  const auto f = build_loop_forest(g, rebuild_full(g));
  EXPECT_EQ(f.kind[a], LoopType::Self);
}

TEST(LoopForest, IrreducibleTriangleThrows) {
  const Cfg g = make(3, {{r, a}, {r, b}, {a, b}, {b, a}});
  EXPECT_THROW(build_loop_forest(g, rebuild_full(g)), IrreducibleError);
}

TEST(Reducibility, DagIsReducible) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng() % 20;
    Cfg g(n);
    for (int e = 0; e < 40 && n > 1; ++e) {
      auto u = static_cast<VertexId>(rng() % n);
      auto v = static_cast<VertexId>(rng() % n);
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      g.insert_edge_raw(u, v);
    }
    EXPECT_TRUE(reducibility_test(g));
  }
}

TEST(Reducibility, NaturalLoopAndTwoEntryLoop) {
  EXPECT_TRUE(reducibility_test(make(4, {{r, a}, {a, b}, {b, a}, {b, c}, {c, c}})));
  EXPECT_FALSE(reducibility_test(make(3, {{r, a}, {r, b}, {a, b}, {b, a}})));
}

TEST(Reducibility, UnreachablePartIgnored) {
  EXPECT_TRUE(reducibility_test(make(4, {{r, a}, {b, c}, {c, b}, {2, 3}, {3, 2}})));
}

// The loop-forest construction throws exactly when T1/T2 collapse stalls.
TEST(Reducibility, AgreesWithForestConstruction) {
  std::mt19937_64 rng(9);
  int irreducible = 0;
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 1 + rng() % 10;
    Cfg g(n);
    const std::size_t m = rng() % (2 * n + 1);
    for (std::size_t e = 0; e < m; ++e) {
      g.insert_edge_raw(static_cast<VertexId>(rng() % n), static_cast<VertexId>(rng() % n));
    }
    bool threw = false;
    try {
      (void)build_loop_forest(g, rebuild_full(g));
    } catch (const IrreducibleError&) {
      threw = true;
    }
    irreducible += threw;
    EXPECT_EQ(threw, !reducibility_test(g));
  }
  EXPECT_GT(irreducible, 0);
}

TEST(Dominators, Chain) {
  const auto t = iterative_dominators(make(3, {{r, a}, {a, b}}));
  EXPECT_EQ(t.idom[b], a);
  EXPECT_EQ(t.idom[a], r);
  EXPECT_EQ(t.idom[r], kNone);
}

TEST(Dominators, Diamond) {
  const auto t = iterative_dominators(make(4, {{r, a}, {r, b}, {a, c}, {b, c}}));
  EXPECT_EQ(t.idom[c], r);
}

TEST(Dominators, Loop) {
  const auto t = iterative_dominators(make(3, {{r, a}, {a, b}, {b, a}}));
  EXPECT_EQ(t.idom[b], a);
}

TEST(Dominators, IterativeMatchesDomSets) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + rng() % 16;
    Cfg g(n);
    const std::size_t m = rng() % (3 * n + 1);
    for (std::size_t e = 0; e < m; ++e) {
      g.insert_edge_raw(static_cast<VertexId>(rng() % n), static_cast<VertexId>(rng() % n));
    }
    EXPECT_EQ(iterative_dominators(g), DomSets(g).tree());
  }
}
