#ifndef LNFDYN_HARNESS_HPP
#define LNFDYN_HARNESS_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lnfdyn/dfst.hpp"
#include "lnfdyn/dynamic.hpp"
#include "lnfdyn/graph.hpp"
#include "lnfdyn/lnf.hpp"
#include "lnfdyn/static_oracle.hpp"

namespace lnfdyn {

// ---------------------------------------------------------------------------
// Stream format
//
//   n <count>        vertex count, required before any event
//   root <id>        optional, defaults to 0
//   + <u> <v>        insert one instance of (u,v)
//   - <u> <v>        delete one instance of (u,v)
//   # ...            comment; blank lines are ignored
// ---------------------------------------------------------------------------

struct UpdateStream {
  std::size_t n = 0;
  VertexId root = 0;
  std::vector<UpdateEvent> events;
};

class StreamError : public std::runtime_error {
public:
  StreamError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

// Parses and validates a stream: ids must be below n and every delete must
// name an edge that is live at that point of the stream. Irreducible inserts
// are not known at parse time; a delete of an edge whose insert will later be
// rejected is reported by the engine instead.
inline UpdateStream parse_stream(std::string_view text) {
  UpdateStream s;
  bool have_n = false;
  std::map<std::pair<VertexId, VertexId>, std::size_t> live;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = detail::split_ws(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto num = [&](std::string_view t) {
      const auto v = detail::parse_uint(t);
      if (!v) throw StreamError(lineno, "expected a non-negative integer, got '" + std::string(t) + "'");
      return *v;
    };
    if (tok[0] == "n") {
      if (tok.size() != 2) throw StreamError(lineno, "expected 'n <count>'");
      if (have_n) throw StreamError(lineno, "duplicate 'n' line");
      if (!s.events.empty()) throw StreamError(lineno, "'n' must precede events");
      s.n = num(tok[1]);
      if (s.n == 0) throw StreamError(lineno, "vertex count must be positive");
      have_n = true;
    } else if (tok[0] == "root") {
      if (tok.size() != 2) throw StreamError(lineno, "expected 'root <id>'");
      if (!have_n) throw StreamError(lineno, "'root' before 'n'");
      if (!s.events.empty()) throw StreamError(lineno, "'root' must precede events");
      const auto r = num(tok[1]);
      if (r >= s.n) throw StreamError(lineno, "root id out of range");
      s.root = static_cast<VertexId>(r);
    } else if (tok[0] == "+" || tok[0] == "-") {
      if (tok.size() != 3) throw StreamError(lineno, "expected '" + std::string(tok[0]) + " <u> <v>'");
      if (!have_n) throw StreamError(lineno, "event before 'n'");
      const auto u = num(tok[1]);
      const auto v = num(tok[2]);
      if (u >= s.n || v >= s.n) throw StreamError(lineno, "vertex id out of range");
      UpdateEvent ev;
      ev.kind = tok[0] == "+" ? UpdateKind::Insert : UpdateKind::Delete;
      ev.src = static_cast<VertexId>(u);
      ev.dst = static_cast<VertexId>(v);
      ev.seq = s.events.size();
      auto& count = live[{ev.src, ev.dst}];
      if (ev.kind == UpdateKind::Insert) {
        ++count;
      } else {
        if (count == 0) throw StreamError(lineno, "delete of absent edge");
        --count;
      }
      s.events.push_back(ev);
    } else {
      throw StreamError(lineno, "unknown directive '" + std::string(tok[0]) + "'");
    }
    if (end == text.size()) break;
  }
  if (!have_n) throw StreamError(lineno, "missing 'n' line");
  return s;
}

inline std::string format_stream(const UpdateStream& s) {
  std::ostringstream os;
  os << "n " << s.n << "\nroot " << s.root << '\n';
  for (const auto& e : s.events) {
    os << (e.kind == UpdateKind::Insert ? '+' : '-') << ' ' << e.src << ' ' << e.dst << '\n';
  }
  return os.str();
}

// True iff every delete references an edge live at that point.
inline bool stream_valid(const UpdateStream& s) {
  std::map<std::pair<VertexId, VertexId>, std::size_t> live;
  for (const auto& e : s.events) {
    auto& c = live[{e.src, e.dst}];
    if (e.kind == UpdateKind::Insert) {
      ++c;
    } else if (c == 0) {
      return false;
    } else {
      --c;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Baseline engine: rebuilds DFST and forest from scratch after every event.
// ---------------------------------------------------------------------------

class RecomputeEngine {
public:
  RecomputeEngine(std::size_t n, VertexId root, IrreduciblePolicy policy)
      : g_(n, root), policy_(policy) {
    rebuild();
  }

  // work = vertices visited by the rebuild(s) of this event.
  struct Step {
    Outcome outcome = Outcome::Ok;
    std::optional<EdgeClass> edge_class;
    std::size_t work = 0;
  };

  Step apply(const UpdateEvent& ev) {
    Step st;
    if (ev.kind == UpdateKind::Delete) {
      if (!g_.has_edge(ev.src, ev.dst)) throw UsageError("delete of absent edge");
      if (t_.is_attached(ev.src) && t_.is_attached(ev.dst)) {
        st.edge_class = classify_edge(t_, ev.src, ev.dst, true);
      }
      g_.delete_edge_raw(ev.src, ev.dst);
    } else {
      g_.insert_edge_raw(ev.src, ev.dst);
    }
    const bool ok = rebuild(&st.work);
    if (ev.kind == UpdateKind::Insert && t_.is_attached(ev.src) && t_.is_attached(ev.dst)) {
      st.edge_class = classify_edge(t_, ev.src, ev.dst, true);
    }
    if (!ok) {
      if (policy_ == IrreduciblePolicy::Reject && ev.kind == UpdateKind::Insert && !latched_) {
        g_.delete_edge_raw(ev.src, ev.dst);
        rebuild(&st.work);
        st.outcome = Outcome::IrreducibleRejected;
      } else {
        latched_ = true;
        st.outcome = Outcome::IrreducibleLatched;
      }
    } else if (latched_) {
      st.outcome = Outcome::IrreducibleLatched;
    }
    return st;
  }

  [[nodiscard]] std::string dump_lnf() const { return format_lnf_dump(forest_.kind, forest_.header); }
  [[nodiscard]] const Cfg& graph() const noexcept { return g_; }
  [[nodiscard]] const DfstState& tree() const noexcept { return t_; }
  [[nodiscard]] const StaticLoopForest& forest() const noexcept { return forest_; }

private:
  bool rebuild(std::size_t* work = nullptr) {
    t_ = rebuild_full(g_);
    std::size_t visited = 0;
    for (char a : t_.attached) visited += a ? 1 : 0;
    bool ok = true;
    try {
      StaticLoopForest f = build_loop_forest(g_, t_);
      visited += f.work;
      if (!latched_) forest_ = std::move(f);
    } catch (const IrreducibleError&) {
      ok = false;
    }
    if (work) *work += visited;
    return ok;
  }

  Cfg g_;
  DfstState t_;
  StaticLoopForest forest_;
  IrreduciblePolicy policy_;
  bool latched_ = false;
};

// ---------------------------------------------------------------------------
// Run reports
// ---------------------------------------------------------------------------

enum class RunMode : std::uint8_t { Maintain, Recompute, Differential };

inline std::string_view to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::Maintain: return "maintain";
    case RunMode::Recompute: return "recompute";
    case RunMode::Differential: return "differential";
  }
  return "?";
}

struct EventRow {
  std::uint64_t seq = 0;
  UpdateKind kind = UpdateKind::Insert;
  VertexId src = 0;
  VertexId dst = 0;
  std::optional<EdgeClass> edge_class;
  std::size_t k = 0;
  std::size_t delta = 0;
  Outcome outcome = Outcome::Ok;
};

struct Mismatch {
  std::size_t event_index = 0;
  std::string message;
  std::string maintain_dump;
  std::string recompute_dump;
};

struct RunReport {
  RunMode mode = RunMode::Maintain;
  IrreduciblePolicy policy = IrreduciblePolicy::Reject;
  std::vector<EventRow> rows;
  std::size_t total_k = 0;
  std::size_t total_delta = 0;
  std::size_t max_k = 0;
  std::size_t max_delta = 0;
  std::size_t rejected = 0;
  std::size_t latched = 0;
  // maintain: sum of k + delta; recompute: vertices visited by the rebuilds
  std::size_t total_work = 0;
  std::string digest;
  std::string lnf_dump;
  std::string dfst_dump;
  std::string dot;
  std::optional<Mismatch> mismatch;
};

// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string digest_of(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline void add_row(RunReport& rep, const UpdateEvent& ev, std::optional<EdgeClass> cls, std::size_t k,
                    std::size_t delta, Outcome o) {
  rep.rows.push_back({ev.seq, ev.kind, ev.src, ev.dst, cls, k, delta, o});
  rep.total_k += k;
  rep.total_delta += delta;
  rep.max_k = std::max(rep.max_k, k);
  rep.max_delta = std::max(rep.max_delta, delta);
  if (o == Outcome::IrreducibleRejected) ++rep.rejected;
  if (o == Outcome::IrreducibleLatched) ++rep.latched;
}

}  // namespace detail

// maintain: dynamic algorithms only. recompute: from-scratch baseline, k holds
// the per-event visited-vertex count. differential: both in lockstep, stopping
// at the first event where outcomes or forest dumps differ.
inline RunReport run_stream(const UpdateStream& stream, RunMode mode,
                            IrreduciblePolicy policy = IrreduciblePolicy::Reject,
                            const LnfOptions& opts = {}) {
  RunReport rep;
  rep.mode = mode;
  rep.policy = policy;
  std::optional<DynamicLnf> dyn;
  std::optional<RecomputeEngine> base;
  if (mode != RunMode::Recompute) dyn.emplace(stream.n, stream.root, policy, opts);
  if (mode != RunMode::Maintain) base.emplace(stream.n, stream.root, policy);

  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const UpdateEvent& ev = stream.events[i];
    if (ev.kind == UpdateKind::Delete) {
      const Cfg& g = dyn ? dyn->graph() : base->graph();
      if (!g.has_edge(ev.src, ev.dst)) {
        throw UsageError("event " + std::to_string(i) + ": delete of absent edge (" +
                         std::to_string(ev.src) + "," + std::to_string(ev.dst) + ")");
      }
    }
    if (mode == RunMode::Recompute) {
      const auto st = base->apply(ev);
      detail::add_row(rep, ev, st.edge_class, st.work, 0, st.outcome);
      rep.total_work += st.work;
      continue;
    }
    const EventResult r = dyn->apply(ev);
    detail::add_row(rep, ev, r.edge_class, r.counters.k, r.counters.delta, r.outcome);
    rep.total_work += r.counters.k + r.counters.delta;
    if (mode == RunMode::Differential) {
      const auto st = base->apply(ev);
      const bool latched = r.outcome == Outcome::IrreducibleLatched;
      std::string mine = latched ? std::string() : dump_lnf(dyn->lnf());
      std::string theirs = latched ? std::string() : base->dump_lnf();
      if (st.outcome != r.outcome || mine != theirs) {
        rep.mismatch = Mismatch{i,
                                st.outcome != r.outcome ? "outcome differs" : "forest differs",
                                std::move(mine), std::move(theirs)};
        break;
      }
    }
  }
  if (dyn) {
    rep.lnf_dump = dump_lnf(dyn->lnf());
    rep.dfst_dump = dump_dfst(dyn->tree());
    rep.dot = to_dot(dyn->graph(), dyn->tree());
  } else {
    rep.lnf_dump = base->dump_lnf();
    rep.dfst_dump = dump_dfst(base->tree());
    rep.dot = to_dot(base->graph(), base->tree());
  }
  rep.digest = digest_of(rep.lnf_dump);
  return rep;
}

inline std::string format_report(const RunReport& rep) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%6s %4s %6s %6s %-12s %8s %8s  %s\n", "seq", "kind", "src", "dst",
                "class", "k", "delta", "outcome");
  os << line;
  for (const auto& r : rep.rows) {
    const std::string cls = r.edge_class ? std::string(to_string(*r.edge_class)) : "-";
    std::snprintf(line, sizeof line, "%6llu %4s %6u %6u %-12s %8zu %8zu  %s\n",
                  static_cast<unsigned long long>(r.seq), r.kind == UpdateKind::Insert ? "+" : "-",
                  r.src, r.dst, cls.c_str(), r.k, r.delta, std::string(to_string(r.outcome)).c_str());
    os << line;
  }
  os << "\nmode=" << to_string(rep.mode) << '\n';
  os << "policy=" << (rep.policy == IrreduciblePolicy::Reject ? "reject" : "latch") << '\n';
  os << "events=" << rep.rows.size() << '\n';
  os << "total_k=" << rep.total_k << '\n';
  os << "total_delta=" << rep.total_delta << '\n';
  os << "max_k=" << rep.max_k << '\n';
  os << "max_delta=" << rep.max_delta << '\n';
  os << "total_work=" << rep.total_work << '\n';
  os << "rejected=" << rep.rejected << '\n';
  os << "latched=" << rep.latched << '\n';
  os << "mismatch=" << (rep.mismatch ? std::to_string(rep.mismatch->event_index) : "none") << '\n';
  os << "digest=" << rep.digest << '\n';
  return os.str();
}

}  // namespace lnfdyn

#endif  // LNFDYN_HARNESS_HPP
