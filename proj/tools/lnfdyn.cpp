// Command-line harness: replay update streams, fuzz against the oracles.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lnfdyn/fuzz.hpp"
#include "lnfdyn/harness.hpp"

namespace {

using namespace lnfdyn;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

const std::map<std::string, RunMode> kModes{
    {"maintain", RunMode::Maintain}, {"recompute", RunMode::Recompute}, {"differential", RunMode::Differential}};
const std::map<std::string, IrreduciblePolicy> kPolicies{{"reject", IrreduciblePolicy::Reject},
                                                         {"latch", IrreduciblePolicy::Latch}};

int run_command(const std::string& path, const std::string& mode, const std::string& policy,
                const std::string& dump, const std::string& report_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot open " << path << '\n';
    return kUsage;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  UpdateStream stream;
  try {
    stream = parse_stream(buf.str());
  } catch (const StreamError& e) {
    std::cerr << path << ':' << e.what() << '\n';
    return kUsage;
  }

  RunReport rep;
  try {
    rep = run_stream(stream, kModes.at(mode), kPolicies.at(policy));
  } catch (const UsageError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  }

  const std::string text = format_report(rep);
  if (report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(report_path, std::ios::binary);
    out << text;
  }
  if (dump == "lnf") std::cout << rep.lnf_dump;
  if (dump == "dfst") std::cout << rep.dfst_dump;
  if (dump == "dot") std::cout << rep.dot;

  if (rep.mismatch) {
    const auto& m = *rep.mismatch;
    std::cerr << "mismatch at event " << m.event_index << ": " << m.message << "\n--- maintain\n"
              << m.maintain_dump << "--- recompute\n"
              << m.recompute_dump;
    return kCheckFailed;
  }
  return kOk;
}

int fuzz_command(std::uint64_t seed, std::size_t n, std::size_t events, std::size_t cases,
                 const std::string& policy, bool skip_reseed) {
  LnfOptions opts;
  opts.skip_reseed = skip_reseed;
  FuzzStats total;
  for (std::size_t c = 0; c < cases; ++c) {
    const FuzzResult r = fuzz(seed + c, n, events, kPolicies.at(policy), opts);
    total.inserts += r.stats.inserts;
    total.deletes += r.stats.deletes;
    total.rejected += r.stats.rejected;
    total.latched += r.stats.latched;
    total.total_k += r.stats.total_k;
    total.total_delta += r.stats.total_delta;
    if (r.failure) {
      const auto& f = *r.failure;
      std::cout << "FAIL seed=" << r.seed << " n=" << n << " event=" << f.event_index
                << " check=" << f.what.check << '\n'
                << f.what.message << '\n'
                << "# minimized reproducer (" << f.minimized.events.size() << " events)\n"
                << format_stream(f.minimized);
      return kCheckFailed;
    }
  }
  std::cout << "cases=" << cases << '\n'
            << "inserts=" << total.inserts << '\n'
            << "deletes=" << total.deletes << '\n'
            << "rejected=" << total.rejected << '\n'
            << "latched=" << total.latched << '\n'
            << "total_k=" << total.total_k << '\n'
            << "total_delta=" << total.total_delta << '\n'
            << "result=pass\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic loop nesting forest harness"};
  app.require_subcommand(1);

  std::string file, mode = "maintain", policy = "reject", dump, report;
  auto* run = app.add_subcommand("run", "replay an update stream");
  run->add_option("file", file, "stream file")->required();
  run->add_option("--mode", mode)->check(CLI::IsMember({"maintain", "recompute", "differential"}));
  run->add_option("--policy", policy)->check(CLI::IsMember({"reject", "latch"}));
  run->add_option("--dump", dump)->check(CLI::IsMember({"lnf", "dfst", "dot"}));
  run->add_option("--report", report, "write the report here instead of stdout");

  std::uint64_t seed = 1;
  std::size_t n = 8, events = 200, cases = 1;
  bool skip_reseed = false;
  std::string fuzz_policy = "reject";
  auto* fz = app.add_subcommand("fuzz", "random streams checked against the oracles");
  fz->add_option("--seed", seed);
  fz->add_option("--n", n)->check(CLI::PositiveNumber);
  fz->add_option("--events", events);
  fz->add_option("--cases", cases);
  fz->add_option("--policy", fuzz_policy)->check(CLI::IsMember({"reject", "latch"}));
  fz->add_flag("--inject-skip-reseed", skip_reseed, "fault injection: deletions skip reseeding");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*run) return run_command(file, mode, policy, dump, report);
  return fuzz_command(seed, n, events, cases, fuzz_policy, skip_reseed);
}
