#pragma once

// On-disk layout under a data root:
//   evidence/<day_index>.tsv   one row per transaction record
//   state/<day_index>.tsv      one row per account
// Both are canonical: loading and re-saving reproduces the file byte for
// byte. Writes go to a temp file and are renamed into place.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "repgraph/decimal.hpp"
#include "repgraph/error.hpp"
#include "repgraph/node.hpp"
#include "repgraph/params.hpp"
#include "repgraph/state.hpp"
#include "repgraph/temporal_graph.hpp"

namespace repgraph {

inline constexpr std::string_view kEvidenceHeader =
    "src\trel\tdst\tts\tamount\tcurrency\trating\tpolarity";
inline constexpr std::string_view kDynamicsHeader = "period,account,reputation";

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "rename " + tmp.string() + ": " + ec.message());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Evidence subgraphs

inline std::string serialize_subgraph(const TemporalSubgraph& g) {
  std::string out(kEvidenceHeader);
  out += '\n';
  for (const auto& [key, value] : g.edges()) {
    std::string prefix = key.src.to_string();
    prefix += '\t';
    prefix += to_string(key.rel);
    prefix += '\t';
    prefix += key.dst.to_string();
    prefix += '\t';
    for (const auto& rec : value.records()) {
      out += prefix;
      out += std::to_string(rec.timestamp);
      out += '\t';
      out += rec.amount.to_string();
      out += '\t';
      out += rec.currency;
      out += '\t';
      if (rec.rating) out += rec.rating->to_string();
      out += '\t';
      if (rec.polarity) out += to_string(*rec.polarity);
      out += '\n';
    }
  }
  return out;
}

/// Parses evidence TSV into a sealed subgraph. Any malformed row, record
/// that fails validation, or non-canonical ordering is CorruptFile.
inline TemporalSubgraph parse_subgraph(std::string_view text, PeriodId period,
                                       std::int64_t period_seconds = kDefaultPeriodSeconds) {
  TemporalSubgraph g(period, period_seconds);
  auto lines = detail::split(text, '\n');
  auto corrupt = [&](std::size_t line_no, const std::string& what) {
    throw Error(ErrorCode::CorruptFile, "evidence " + std::to_string(period.day_index) +
                                            ".tsv line " + std::to_string(line_no) + ": " + what);
  };
  if (lines.empty() || lines[0] != kEvidenceHeader) corrupt(1, "bad header");
  if (lines.back().empty()) lines.pop_back();
  else corrupt(lines.size(), "missing trailing newline");

  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = detail::split(lines[i], '\t');
    if (fields.size() != 8) corrupt(i + 1, "expected 8 fields");
    auto src = NodeId::parse(fields[0]);
    auto rel = parse_relation(fields[1]);
    auto dst = NodeId::parse(fields[2]);
    if (!src || !rel || !dst) corrupt(i + 1, "bad edge key");
    TransactionRecord rec;
    if (!detail::parse_int(fields[3], rec.timestamp)) corrupt(i + 1, "bad timestamp");
    auto amount = Decimal::parse(fields[4]);
    if (!amount) corrupt(i + 1, "bad amount");
    rec.amount = *amount;
    rec.currency = std::string(fields[5]);
    if (!fields[6].empty()) {
      rec.rating = Decimal::parse(fields[6]);
      if (!rec.rating) corrupt(i + 1, "bad rating");
    }
    if (!fields[7].empty()) {
      rec.polarity = parse_polarity(fields[7]);
      if (!rec.polarity) corrupt(i + 1, "bad polarity");
    }
    try {
      g.add_edge(*src, *rel, *dst, std::move(rec));
    } catch (const Error& e) {
      corrupt(i + 1, e.what());
    }
  }
  g.seal();
  if (serialize_subgraph(g) != text) corrupt(0, "rows are not in canonical order");
  return g;
}

// ---------------------------------------------------------------------------
// Reputation states

inline std::string serialize_state(const ReputationState& s) {
  std::string out;
  for (const auto& [account, value] : s.values) {
    out += account.to_string();
    out += '\t';
    out += format_reputation(value);
    out += '\n';
  }
  return out;
}

inline ReputationState parse_state(std::string_view text, PeriodId period) {
  ReputationState s{period, {}};
  auto corrupt = [&](std::size_t line_no, const std::string& what) {
    throw Error(ErrorCode::CorruptFile, "state " + std::to_string(period.day_index) +
                                            ".tsv line " + std::to_string(line_no) + ": " + what);
  };
  if (text.empty()) return s;
  auto lines = detail::split(text, '\n');
  if (!lines.back().empty()) corrupt(lines.size(), "missing trailing newline");
  lines.pop_back();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto fields = detail::split(lines[i], '\t');
    if (fields.size() != 2) corrupt(i + 1, "expected 2 fields");
    auto account = NodeId::parse(fields[0]);
    if (!account || !account->is_account()) corrupt(i + 1, "bad account");
    double value = 0.0;
    if (!detail::parse_double(fields[1], value)) corrupt(i + 1, "bad value");
    if (!(value >= 0.0 && value <= 1.0)) corrupt(i + 1, "value outside [0,1]");
    if (!s.values.emplace(*account, value).second) corrupt(i + 1, "duplicate account");
  }
  if (serialize_state(s) != text) corrupt(0, "non-canonical content");
  return s;
}

// ---------------------------------------------------------------------------

/// Handle on a data root directory.
class DataRoot {
 public:
  explicit DataRoot(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& path() const { return root_; }
  std::filesystem::path evidence_path(PeriodId p) const {
    return root_ / "evidence" / (std::to_string(p.day_index) + ".tsv");
  }
  std::filesystem::path state_path(PeriodId p) const {
    return root_ / "state" / (std::to_string(p.day_index) + ".tsv");
  }

  bool has_evidence(PeriodId p) const { return std::filesystem::exists(evidence_path(p)); }
  bool has_state(PeriodId p) const { return std::filesystem::exists(state_path(p)); }

  std::vector<PeriodId> evidence_periods() const { return list(root_ / "evidence"); }
  std::vector<PeriodId> state_periods() const { return list(root_ / "state"); }

  void save_subgraph(const TemporalSubgraph& g) const {
    if (!g.sealed()) {
      throw Error(ErrorCode::NotSealed, "period " + std::to_string(g.period().day_index));
    }
    detail::write_file_atomic(evidence_path(g.period()), serialize_subgraph(g));
  }

  TemporalSubgraph load_subgraph(PeriodId p,
                                 std::int64_t period_seconds = kDefaultPeriodSeconds) const {
    auto path = evidence_path(p);
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::UnknownPeriod, "no evidence for period " + std::to_string(p.day_index));
    }
    return parse_subgraph(detail::read_file(path), p, period_seconds);
  }

  void save_state(const ReputationState& s) const {
    detail::write_file_atomic(state_path(s.period), serialize_state(s));
  }

  ReputationState load_state(PeriodId p) const {
    auto path = state_path(p);
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::MissingState, "no state for period " + std::to_string(p.day_index));
    }
    return parse_state(detail::read_file(path), p);
  }

 private:
  static std::vector<PeriodId> list(const std::filesystem::path& dir) {
    std::vector<PeriodId> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() != ".tsv") continue;
      std::int64_t index = 0;
      if (detail::parse_int(entry.path().stem().string(), index)) out.emplace_back(index);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::filesystem::path root_;
};

/// Saves a sealed resident period and records it as persisted so that it
/// may be evicted.
inline void persist_period(GraphStore& store, PeriodId p, const DataRoot& root) {
  root.save_subgraph(store.subgraph(p));
  store.mark_persisted(p);
}

inline void load_period(GraphStore& store, PeriodId p, const DataRoot& root) {
  store.restore(root.load_subgraph(p, store.period_seconds()));
}

/// Plot-ready CSV of reputation per (period, account). Accounts absent from
/// a state read as the default reputation.
inline std::string export_dynamics(const DataRoot& root, std::vector<NodeId> accounts,
                                   PeriodId from, PeriodId to,
                                   const EngineParams& params = {}) {
  std::sort(accounts.begin(), accounts.end());
  accounts.erase(std::unique(accounts.begin(), accounts.end()), accounts.end());
  std::string out(kDynamicsHeader);
  out += '\n';
  for (PeriodId p = from; p <= to; p = p.next()) {
    ReputationState s = root.load_state(p);
    for (const auto& account : accounts) {
      out += std::to_string(p.day_index);
      out += ',';
      out += account.to_string();
      out += ',';
      out += format_reputation(get_reputation(s, account, params));
      out += '\n';
    }
  }
  return out;
}

}  // namespace repgraph
