#include <gtest/gtest.h>

#include "lnfdyn/dominance.hpp"
#include "lnfdyn/dynamic.hpp"

using namespace lnfdyn;

namespace {

constexpr VertexId r = 0, a = 1, b = 2, c = 3, d = 4;

DynamicLnf build(std::size_t n, std::initializer_list<std::pair<VertexId, VertexId>> edges) {
  DynamicLnf dyn(n);
  for (auto [u, v] : edges) dyn.insert_edge(u, v);
  return dyn;
}

}  // namespace

TEST(HeaderDominates, BodyMembership) {
  const DynamicLnf dyn = build(4, {{r, a}, {a, b}, {b, a}, {a, c}});
  EXPECT_TRUE(header_dominates(dyn.lnf(), a, b));
  EXPECT_TRUE(header_dominates(dyn.lnf(), a, a));
  EXPECT_FALSE(header_dominates(dyn.lnf(), a, c));
  EXPECT_THROW((void)header_dominates(dyn.lnf(), c, a), UsageError);
}

TEST(Dominates, RootDominatesEverything) {
  const DynamicLnf dyn = build(4, {{r, a}, {a, b}, {b, a}, {r, c}});
  DominanceIndex idx;
  for (VertexId v = 0; v < 4; ++v) {
    const auto q = idx.dominates(dyn.graph(), dyn.tree(), dyn.lnf(), r, v);
    EXPECT_TRUE(q.answer);
    EXPECT_EQ(q.source, DomSource::LnfFast);
  }
}

TEST(Dominates, NestedHeadersViaChain) {
  const DynamicLnf dyn = build(4, {{r, a}, {a, b}, {b, c}, {c, b}, {c, a}});
  DominanceIndex idx;
  const auto q = idx.dominates(dyn.graph(), dyn.tree(), dyn.lnf(), a, b);
  EXPECT_TRUE(q.answer);
  EXPECT_EQ(q.source, DomSource::LnfFast);
  EXPECT_EQ(iterative_dominators(dyn.graph()).idom[b], a);
}

TEST(Dominates, SiblingsViaFallback) {
  const DynamicLnf dyn = build(3, {{r, a}, {r, b}});
  DominanceIndex idx;
  const auto q = idx.dominates(dyn.graph(), dyn.tree(), dyn.lnf(), a, b);
  EXPECT_FALSE(q.answer);
  EXPECT_EQ(q.source, DomSource::Fallback);
}

TEST(Dominates, NonHeaderDominatorViaFallback) {
  const DynamicLnf dyn = build(5, {{r, a}, {a, b}, {a, c}, {b, d}, {c, d}});
  DominanceIndex idx;
  EXPECT_TRUE(idx.dominates(dyn.graph(), dyn.tree(), dyn.lnf(), a, d).answer);
  EXPECT_FALSE(idx.dominates(dyn.graph(), dyn.tree(), dyn.lnf(), b, d).answer);
}

TEST(Dominates, DetachedIsError) {
  const DynamicLnf dyn = build(3, {{r, a}});
  DominanceIndex idx;
  EXPECT_THROW((void)idx.dominates(dyn.graph(), dyn.tree(), dyn.lnf(), r, b), UsageError);
}

TEST(Materialize, EqualsOracle) {
  const DynamicLnf chain = build(3, {{r, a}, {a, b}});
  const DynamicLnf loop = build(4, {{r, a}, {a, b}, {b, a}, {b, c}});
  DominanceIndex i1, i2;
  EXPECT_EQ(i1.materialize(chain.graph(), chain.tree(), chain.lnf()), iterative_dominators(chain.graph()));
  EXPECT_EQ(i2.materialize(loop.graph(), loop.tree(), loop.lnf()), iterative_dominators(loop.graph()));
}

TEST(Materialize, CacheInvalidatedByUpdates) {
  DynamicLnf dyn = build(4, {{r, a}, {a, b}, {r, c}});
  DominanceIndex idx;
  (void)idx.materialize(dyn.graph(), dyn.tree(), dyn.lnf());
  (void)idx.materialize(dyn.graph(), dyn.tree(), dyn.lnf());
  EXPECT_EQ(idx.rebuilds(), 1u);
  dyn.insert_edge(c, b);
  EXPECT_EQ(idx.materialize(dyn.graph(), dyn.tree(), dyn.lnf()).idom[b], r);
  EXPECT_EQ(idx.rebuilds(), 2u);
  idx.invalidate();
  (void)idx.materialize(dyn.graph(), dyn.tree(), dyn.lnf());
  EXPECT_EQ(idx.rebuilds(), 3u);
}

TEST(Materialize, LatchedIsError) {
  DynamicLnf dyn(3, 0, IrreduciblePolicy::Latch);
  for (auto [u, v] : {std::pair<VertexId, VertexId>{r, a}, {r, b}, {a, b}, {b, a}}) dyn.insert_edge(u, v);
  ASSERT_TRUE(dyn.lnf().irreducible);
  DominanceIndex idx;
  EXPECT_THROW((void)idx.materialize(dyn.graph(), dyn.tree(), dyn.lnf()), UsageError);
}
