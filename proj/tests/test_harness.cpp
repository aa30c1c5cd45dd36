#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lnfdyn/fuzz.hpp"
#include "lnfdyn/harness.hpp"

using namespace lnfdyn;

namespace {

std::string read_corpus(const std::string& name) {
  std::ifstream in(std::filesystem::path(LNFDYN_CORPUS_DIR) / name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ParseStream, ThreeEvents) {
  const UpdateStream s = parse_stream("n 3\nroot 0\n+ 0 1\n+ 1 2\n+ 2 1\n");
  EXPECT_EQ(s.n, 3u);
  EXPECT_EQ(s.root, 0u);
  ASSERT_EQ(s.events.size(), 3u);
  EXPECT_EQ(s.events[2].kind, UpdateKind::Insert);
  EXPECT_EQ(s.events[2].src, 2u);
  EXPECT_EQ(s.events[2].dst, 1u);
}

TEST(ParseStream, DeleteOfAbsentEdgeIsPositioned) {
  try {
    (void)parse_stream("n 3\nroot 0\n# nothing yet\n- 0 1\n");
    FAIL() << "expected StreamError";
  } catch (const StreamError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(ParseStream, EmptyEventList) {
  const UpdateStream s = parse_stream("n 2\n\n# only a header\n");
  EXPECT_TRUE(s.events.empty());
}

TEST(ParseStream, MalformedLines) {
  EXPECT_THROW((void)parse_stream("+ 0 1\n"), StreamError);
  EXPECT_THROW((void)parse_stream("n 2\n+ 0 2\n"), StreamError);
  EXPECT_THROW((void)parse_stream("n 2\n+ 0\n"), StreamError);
  EXPECT_THROW((void)parse_stream("n 2\n* 0 1\n"), StreamError);
  EXPECT_THROW((void)parse_stream("n x\n"), StreamError);
  EXPECT_THROW((void)parse_stream(""), StreamError);
}

TEST(ParseStream, RoundTrip) {
  const std::string text = "n 4\nroot 1\n+ 1 2\n+ 2 1\n- 2 1\n";
  EXPECT_EQ(format_stream(parse_stream(text)), text);
}

TEST(RunStream, LoopStreamDifferentialHasNoMismatch) {
  const auto s = parse_stream(read_corpus("nested_loops.txt"));
  const RunReport rep = run_stream(s, RunMode::Differential);
  EXPECT_FALSE(rep.mismatch.has_value());
  EXPECT_EQ(rep.rows.size(), s.events.size());
}

TEST(RunStream, LastInsertRejectedKeepsState) {
  const std::string base = "n 4\nroot 0\n+ 0 1\n+ 1 2\n+ 2 1\n+ 0 3\n";
  const RunReport before = run_stream(parse_stream(base), RunMode::Maintain);
  const RunReport after = run_stream(parse_stream(base + "+ 3 2\n"), RunMode::Maintain);
  ASSERT_EQ(after.rows.size(), 5u);
  EXPECT_EQ(after.rows.back().outcome, Outcome::IrreducibleRejected);
  EXPECT_EQ(after.lnf_dump, before.lnf_dump);
  EXPECT_EQ(after.dfst_dump, before.dfst_dump);
  EXPECT_EQ(after.rejected, 1u);
}

TEST(RunStream, LatchPolicyMarksLaterEvents) {
  const auto s = parse_stream("n 4\n+ 0 1\n+ 1 2\n+ 2 1\n+ 0 3\n+ 3 2\n+ 0 2\n");
  const RunReport rep = run_stream(s, RunMode::Differential, IrreduciblePolicy::Latch);
  EXPECT_FALSE(rep.mismatch.has_value());
  EXPECT_EQ(rep.latched, 2u);
  EXPECT_EQ(rep.rows.back().outcome, Outcome::IrreducibleLatched);
}

TEST(RunStream, NestedStreamMaintainVsRecompute) {
  const auto s = parse_stream(read_corpus("nested_1000.txt"));
  const RunReport m = run_stream(s, RunMode::Maintain);
  const RunReport rc = run_stream(s, RunMode::Recompute);
  EXPECT_EQ(m.digest, rc.digest);
  EXPECT_LE(m.total_k, rc.total_work);
}

TEST(RunStream, DeleteOfRejectedEdgeIsUsageError) {
  const auto s = parse_stream("n 3\n+ 0 1\n+ 0 2\n+ 1 2\n+ 2 1\n- 2 1\n");
  EXPECT_EQ(run_stream(parse_stream("n 3\n+ 0 1\n+ 0 2\n+ 1 2\n+ 2 1\n"), RunMode::Maintain).rejected, 1u);
  EXPECT_THROW((void)run_stream(s, RunMode::Maintain), UsageError);
}

TEST(Report, TableAndKeyValues) {
  const auto s = parse_stream(read_corpus("single_loop.txt"));
  const std::string text = format_report(run_stream(s, RunMode::Maintain));
  EXPECT_NE(text.find("   seq kind"), std::string::npos);
  for (const char* key : {"mode=maintain", "policy=reject", "events=5", "total_k=", "max_delta=", "digest="}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}

TEST(Determinism, RepeatedRunsAreIdentical) {
  const auto s = parse_stream(read_corpus("detachment.txt"));
  for (RunMode mode : {RunMode::Maintain, RunMode::Recompute, RunMode::Differential}) {
    const RunReport x = run_stream(s, mode);
    const RunReport y = run_stream(s, mode);
    EXPECT_EQ(format_report(x), format_report(y));
    EXPECT_EQ(x.lnf_dump, y.lnf_dump);
    EXPECT_EQ(x.dfst_dump, y.dfst_dump);
    EXPECT_EQ(x.dot, y.dot);
  }
}

TEST(Dump, DotHasEdgeClassLabels) {
  const auto s = parse_stream(read_corpus("single_loop.txt"));
  const RunReport rep = run_stream(s, RunMode::Maintain);
  EXPECT_EQ(rep.dot.rfind("digraph dfst {", 0), 0u);
  EXPECT_NE(rep.dot.find("label=\"Back\""), std::string::npos);
}

TEST(Digest, StableHex) {
  EXPECT_EQ(digest_of(""), "cbf29ce484222325");
  EXPECT_EQ(digest_of("a"), "af63dc4c8601ec8c");
}

TEST(Fuzz, SmallCasePasses) {
  const FuzzResult r = fuzz(1, 8, 200);
  EXPECT_FALSE(r.failure.has_value());
  EXPECT_EQ(r.stream.events.size(), 200u);
}

TEST(Fuzz, DeterministicInSeed) {
  EXPECT_EQ(format_stream(fuzz(42, 10, 150).stream), format_stream(fuzz(42, 10, 150).stream));
  EXPECT_NE(format_stream(fuzz(42, 10, 150).stream), format_stream(fuzz(43, 10, 150).stream));
}

TEST(Fuzz, SingleVertexOnlySelfLoops) {
  const FuzzResult r = fuzz(5, 1, 100);
  EXPECT_FALSE(r.failure.has_value());
  for (const auto& ev : r.stream.events) {
    EXPECT_EQ(ev.src, 0u);
    EXPECT_EQ(ev.dst, 0u);
  }
  EXPECT_GT(r.stats.deletes, 0u);
}

TEST(Fuzz, LatchPolicyPasses) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_FALSE(fuzz(seed, 12, 300, IrreduciblePolicy::Latch).failure.has_value()) << seed;
  }
}

TEST(Fuzz, InjectedReseedFaultIsCaughtAndShrunk) {
  LnfOptions broken;
  broken.skip_reseed = true;
  bool caught = false;
  for (std::uint64_t seed = 0; seed < 20 && !caught; ++seed) {
    const FuzzResult r = fuzz(seed, 10, 300, IrreduciblePolicy::Reject, broken);
    if (!r.failure) continue;
    caught = true;
    const auto& f = *r.failure;
    EXPECT_LE(f.minimized.events.size(), f.event_index + 1);
    EXPECT_TRUE(replay_checked(f.minimized, IrreduciblePolicy::Reject, broken).has_value());
    EXPECT_FALSE(replay_checked(f.minimized, IrreduciblePolicy::Reject).has_value());
  }
  EXPECT_TRUE(caught);
}
