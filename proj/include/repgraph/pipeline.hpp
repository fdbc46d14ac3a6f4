#pragma once

// Batch workflows over a data root. Both keep at most one evidence subgraph
// resident: ingest makes two passes over the input (validate and index by
// period, then build one period at a time), and update pages evidence in
// and out around each update_period call.

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repgraph/engine.hpp"
#include "repgraph/error.hpp"
#include "repgraph/ontology.hpp"
#include "repgraph/params.hpp"
#include "repgraph/persistence.hpp"
#include "repgraph/temporal_graph.hpp"

namespace repgraph {

/// Exclusive lock on a data root for mutating commands.
class DataRootLock {
 public:
  explicit DataRootLock(const std::filesystem::path& root) : path_(root / ".lock") {
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST) {
        throw Error(ErrorCode::Locked, "data root in use (remove " + path_.string() + " if stale)");
      }
      throw Error(ErrorCode::IoError, "cannot create " + path_.string() + ": " + std::strerror(errno));
    }
    auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  DataRootLock(const DataRootLock&) = delete;
  DataRootLock& operator=(const DataRootLock&) = delete;
  ~DataRootLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }

 private:
  std::filesystem::path path_;
};

struct PeriodIngestStats {
  PeriodId period;
  std::size_t events = 0;
  RatingDiagnostics diagnostics;
};

struct IngestReport {
  std::size_t events = 0;
  std::vector<PeriodIngestStats> periods;  // includes gap periods with 0 events
  std::size_t peak_resident = 0;
};

/// Parses an event file, buckets events by period, and seals + persists one
/// evidence subgraph per period. Periods between the earliest and latest
/// evidence on disk that have no events are written as empty subgraphs.
/// Periods that already have evidence on disk are sealed and rejected.
inline IngestReport ingest_file(const std::filesystem::path& input, const DataRoot& root,
                                const EngineParams& params) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + input.string());

  struct LineRef {
    PeriodId period;
    std::streamoff offset;
  };
  std::vector<LineRef> refs;
  const std::int64_t period_seconds = params.period_seconds;
  std::string line;
  std::size_t line_no = 0;
  auto context = [&](const Error& e) {
    return Error(e.code(), input.string() + ":" + std::to_string(line_no) + ": " + e.what());
  };

  while (true) {
    std::streamoff offset = in.tellg();
    if (!std::getline(in, line)) break;
    ++line_no;
    if (is_skippable_line(line)) continue;
    try {
      Event ev = parse_event_line(line, params);
      event_to_edges(ev, params);  // surfaces conversion errors in pass one
      refs.push_back({period_of(ev.timestamp, period_seconds), offset});
    } catch (const Error& e) {
      throw context(e);
    }
  }

  std::stable_sort(refs.begin(), refs.end(),
                   [](const LineRef& a, const LineRef& b) { return a.period < b.period; });

  std::vector<PeriodId> existing = root.evidence_periods();
  for (const auto& ref : refs) {
    if (std::binary_search(existing.begin(), existing.end(), ref.period)) {
      throw Error(ErrorCode::SealedPeriod, "period " + std::to_string(ref.period.day_index) +
                                               " already has persisted evidence");
    }
  }

  IngestReport report;
  report.events = refs.size();
  if (refs.empty()) return report;

  PeriodId lo = refs.front().period;
  PeriodId hi = refs.back().period;
  if (!existing.empty()) {
    lo = std::min(lo, existing.front());
    hi = std::max(hi, existing.back());
  }

  GraphStore store(period_seconds, 1);
  in.clear();
  auto next_ref = refs.begin();
  for (PeriodId p = lo; p <= hi; p = p.next()) {
    if (std::binary_search(existing.begin(), existing.end(), p)) continue;
    PeriodIngestStats stats{p, 0, {}};
    store.create_period(p);
    for (; next_ref != refs.end() && next_ref->period == p; ++next_ref) {
      in.seekg(next_ref->offset);
      std::getline(in, line);
      Event ev = parse_event_line(line, params);
      for (auto& e : event_to_edges(ev, params)) {
        store.add_edge(p, e.key.src, e.key.rel, e.key.dst, std::move(e.record));
      }
      ++stats.events;
    }
    store.seal_period(p);
    stats.diagnostics = derive_ratings(store.subgraph(p), params).diagnostics;
    persist_period(store, p, root);
    store.evict_period(p);
    report.periods.push_back(stats);
  }
  report.peak_resident = store.residency_high_water();
  return report;
}

struct UpdateReport {
  std::vector<PeriodId> updated;
  std::size_t peak_resident = 0;  // max over update cycles
};

/// Runs update_period over [from, to], persisting each state. Defaults:
/// from = the period after the latest saved state (or the first evidence
/// period), to = the latest evidence period. The state preceding `from`
/// is read from disk unless `from` is the first evidence period, in which
/// case an empty genesis state is used.
inline UpdateReport update_range(const DataRoot& root, const EngineParams& params,
                                 std::optional<PeriodId> from = std::nullopt,
                                 std::optional<PeriodId> to = std::nullopt) {
  UpdateReport report;
  std::vector<PeriodId> evidence = root.evidence_periods();
  if (evidence.empty()) {
    if (from || to) throw Error(ErrorCode::MissingEvidence, "data root has no evidence");
    return report;
  }
  if (!from) {
    std::vector<PeriodId> states = root.state_periods();
    from = states.empty() || states.back() < evidence.front() ? evidence.front()
                                                              : states.back().next();
  }
  if (!to) to = evidence.back();
  if (*from > *to) return report;

  ReputationState prev = ReputationState::genesis(from->prev());
  if (root.has_state(from->prev())) {
    prev = root.load_state(from->prev());
  } else if (*from > evidence.front()) {
    throw Error(ErrorCode::StateGap,
                "no saved state for period " + std::to_string(from->prev().day_index));
  }

  GraphStore store(params.period_seconds, 3);
  ReputationEngine engine(store, params, root);
  for (PeriodId p = *from; p <= *to; p = p.next()) {
    if (!root.has_evidence(p)) {
      throw Error(ErrorCode::MissingEvidence, "no evidence for period " + std::to_string(p.day_index));
    }
    load_period(store, p, root);
    prev = engine.update_period(p, prev);
    report.peak_resident = std::max(report.peak_resident, store.residency_high_water());
    store.evict_period(p);
    report.updated.push_back(p);
  }
  return report;
}

}  // namespace repgraph
