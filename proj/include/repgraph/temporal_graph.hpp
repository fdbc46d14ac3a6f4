#pragma once

// Period-partitioned labeled graph store. Each observation period owns one
// TemporalSubgraph; edges carry the full list of transaction records plus
// exact aggregates. Indexing is temporal first (period), then by vertex and
// relation kind.
//
// Concurrency: sealed subgraphs are immutable and may be read from any
// number of threads. The store itself is single-writer; readers must not
// overlap a write batch on an unsealed period.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "repgraph/decimal.hpp"
#include "repgraph/error.hpp"
#include "repgraph/node.hpp"

namespace repgraph {

inline constexpr std::int64_t kDefaultPeriodSeconds = 86400;

struct PeriodId {
  std::int64_t day_index = 0;

  constexpr PeriodId() = default;
  constexpr explicit PeriodId(std::int64_t index) : day_index(index) {}

  constexpr PeriodId prev() const { return PeriodId{day_index - 1}; }
  constexpr PeriodId next() const { return PeriodId{day_index + 1}; }

  friend constexpr auto operator<=>(PeriodId, PeriodId) = default;
};

/// Owning period of a timestamp: floor(ts / period_seconds).
constexpr PeriodId period_of(std::int64_t timestamp,
                             std::int64_t period_seconds = kDefaultPeriodSeconds) {
  std::int64_t q = timestamp / period_seconds;
  if (timestamp % period_seconds != 0 && timestamp < 0) --q;
  return PeriodId{q};
}

constexpr std::int64_t period_start(PeriodId p,
                                    std::int64_t period_seconds = kDefaultPeriodSeconds) {
  return p.day_index * period_seconds;
}

struct TransactionRecord {
  std::int64_t timestamp = 0;
  Decimal amount;  // base currency units
  std::string currency;
  std::optional<Decimal> rating;
  std::optional<Polarity> polarity;

  friend bool operator==(const TransactionRecord&, const TransactionRecord&) = default;
};

inline void validate_record(const TransactionRecord& rec) {
  if (rec.amount.negative()) {
    throw Error(ErrorCode::InvalidRecord, "negative amount " + rec.amount.to_string());
  }
  if (rec.rating && (rec.rating->negative() || *rec.rating > Decimal::from_integer(1))) {
    throw Error(ErrorCode::InvalidRecord, "rating out of [0,1]: " + rec.rating->to_string());
  }
}

/// Payload of one (src, rel, dst) edge within a period or merged view.
class EdgeValue {
 public:
  const std::vector<TransactionRecord>& records() const { return records_; }
  Decimal agg_amount() const { return agg_amount_; }
  std::size_t agg_count() const { return records_.size(); }

  /// Mean of present ratings weighted by (amount + 1); nullopt when no
  /// record carries a rating. Evaluated over records in stored order.
  std::optional<double> agg_rating() const {
    double weight_sum = 0.0;
    double weighted = 0.0;
    bool any = false;
    for (const auto& rec : records_) {
      if (!rec.rating) continue;
      double w = rec.amount.to_double() + 1.0;
      weight_sum += w;
      weighted += w * rec.rating->to_double();
      any = true;
    }
    if (!any) return std::nullopt;
    return weighted / weight_sum;
  }

  /// Inserts after every record with timestamp <= rec.timestamp, keeping
  /// (timestamp, insertion order).
  void insert(TransactionRecord rec) {
    auto sum = Decimal::checked_add(agg_amount_, rec.amount);
    if (!sum) throw Error(ErrorCode::InvalidRecord, "edge amount overflow");
    auto pos = std::upper_bound(
        records_.begin(), records_.end(), rec.timestamp,
        [](std::int64_t ts, const TransactionRecord& r) { return ts < r.timestamp; });
    records_.insert(pos, std::move(rec));
    agg_amount_ = *sum;
  }

  /// Appends without reordering; used when concatenating period lists.
  void append_all(const EdgeValue& other) {
    for (const auto& rec : other.records_) {
      auto sum = Decimal::checked_add(agg_amount_, rec.amount);
      if (!sum) throw Error(ErrorCode::InvalidRecord, "edge amount overflow");
      records_.push_back(rec);
      agg_amount_ = *sum;
    }
  }

  friend bool operator==(const EdgeValue&, const EdgeValue&) = default;

 private:
  std::vector<TransactionRecord> records_;
  Decimal agg_amount_;
};

struct EdgeKey {
  NodeId src;
  RelationKind rel = RelationKind::Votes;
  NodeId dst;

  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
  friend std::strong_ordering operator<=>(const EdgeKey& a, const EdgeKey& b) {
    if (auto c = a.src <=> b.src; c != 0) return c;
    if (auto c = a.rel <=> b.rel; c != 0) return c;
    return a.dst <=> b.dst;
  }
};

struct EdgeFilter {
  std::optional<NodeId> src;
  std::optional<RelationKind> rel;
  std::optional<NodeId> dst;
};

/// Non-owning handle into an EdgeSet; valid until the set is mutated.
class EdgeRef {
 public:
  EdgeRef(const EdgeKey& key, const EdgeValue& value) : key_(&key), value_(&value) {}
  const EdgeKey& key() const { return *key_; }
  const EdgeValue& value() const { return *value_; }
  const NodeId& src() const { return key_->src; }
  RelationKind rel() const { return key_->rel; }
  const NodeId& dst() const { return key_->dst; }

 private:
  const EdgeKey* key_;
  const EdgeValue* value_;
};

/// Edge map in canonical (src.id, rel, dst.id) order with a secondary
/// destination index. The primary map doubles as the by-source index.
class EdgeSet {
 public:
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const std::map<EdgeKey, EdgeValue>& edges() const { return edges_; }

  const EdgeValue* find(const EdgeKey& key) const {
    auto it = edges_.find(key);
    return it == edges_.end() ? nullptr : &it->second;
  }

  std::vector<EdgeRef> query(const EdgeFilter& f) const {
    std::vector<EdgeRef> out;
    auto matches = [&](const EdgeKey& k) {
      return (!f.src || k.src == *f.src) && (!f.rel || k.rel == *f.rel) &&
             (!f.dst || k.dst == *f.dst);
    };
    if (f.src) {
      // Prefix scan over the primary map; NodeId() is the minimum key.
      auto it = edges_.lower_bound(
          EdgeKey{*f.src, f.rel.value_or(RelationKind::Votes), NodeId()});
      for (; it != edges_.end() && it->first.src == *f.src; ++it) {
        if (f.rel && it->first.rel != *f.rel) break;
        if (matches(it->first)) out.emplace_back(it->first, it->second);
      }
      return out;
    }
    if (f.dst) {
      auto first = by_dst_.lower_bound(std::make_tuple(*f.dst, RelationKind::Votes, NodeId()));
      for (auto it = first; it != by_dst_.end() && std::get<0>(*it) == *f.dst; ++it) {
        EdgeKey key{std::get<2>(*it), std::get<1>(*it), std::get<0>(*it)};
        if (!matches(key)) continue;
        auto e = edges_.find(key);
        out.emplace_back(e->first, e->second);
      }
      std::sort(out.begin(), out.end(),
                [](const EdgeRef& a, const EdgeRef& b) { return a.key() < b.key(); });
      return out;
    }
    for (const auto& [key, value] : edges_) {
      if (matches(key)) out.emplace_back(key, value);
    }
    return out;
  }

  friend bool operator==(const EdgeSet& a, const EdgeSet& b) { return a.edges_ == b.edges_; }

 protected:
  EdgeValue& edge_slot(const EdgeKey& key) {
    auto [it, inserted] = edges_.try_emplace(key);
    if (inserted) by_dst_.emplace(key.dst, key.rel, key.src);
    return it->second;
  }

 private:
  std::map<EdgeKey, EdgeValue> edges_;
  std::set<std::tuple<NodeId, RelationKind, NodeId>> by_dst_;
};

/// All labeled edges of one observation period.
class TemporalSubgraph : public EdgeSet {
 public:
  explicit TemporalSubgraph(PeriodId period,
                            std::int64_t period_seconds = kDefaultPeriodSeconds)
      : period_(period), period_seconds_(period_seconds) {}

  PeriodId period() const { return period_; }
  std::int64_t period_seconds() const { return period_seconds_; }
  bool sealed() const { return sealed_; }
  void seal() { sealed_ = true; }

  bool contains_timestamp(std::int64_t ts) const {
    return period_of(ts, period_seconds_) == period_;
  }

  void add_edge(const NodeId& src, RelationKind rel, const NodeId& dst,
                TransactionRecord rec) {
    if (sealed_) {
      throw Error(ErrorCode::SealedPeriod,
                  "period " + std::to_string(period_.day_index) + " is sealed");
    }
    if (!contains_timestamp(rec.timestamp)) {
      throw Error(ErrorCode::PeriodMismatch,
                  "timestamp " + std::to_string(rec.timestamp) + " outside period " +
                      std::to_string(period_.day_index));
    }
    validate_record(rec);
    edge_slot(EdgeKey{src, rel, dst}).insert(std::move(rec));
  }

  friend bool operator==(const TemporalSubgraph& a, const TemporalSubgraph& b) {
    return a.period_ == b.period_ && a.sealed_ == b.sealed_ &&
           static_cast<const EdgeSet&>(a) == static_cast<const EdgeSet&>(b);
  }

 private:
  PeriodId period_;
  std::int64_t period_seconds_;
  bool sealed_ = false;
};

/// Read-only union of several periods. Record lists are concatenated in
/// ascending period order; aggregates are summed.
class MergedView : public EdgeSet {
 public:
  const std::vector<PeriodId>& periods() const { return periods_; }

 private:
  friend class GraphStore;

  void absorb(const TemporalSubgraph& g) {
    periods_.push_back(g.period());
    for (const auto& [key, value] : g.edges()) edge_slot(key).append_all(value);
  }

  std::vector<PeriodId> periods_;
};

class GraphStore;

/// Scoped marker for a reputation-state graph held in memory during an
/// update cycle; counted by the store's residency monitor.
class StatePin {
 public:
  StatePin(const StatePin&) = delete;
  StatePin& operator=(const StatePin&) = delete;
  StatePin(StatePin&& other) noexcept : store_(std::exchange(other.store_, nullptr)) {}
  StatePin& operator=(StatePin&&) = delete;
  inline ~StatePin();

 private:
  friend class GraphStore;
  explicit StatePin(GraphStore* store) : store_(store) {}
  GraphStore* store_;
};

class GraphStore {
 public:
  explicit GraphStore(std::int64_t period_seconds = kDefaultPeriodSeconds,
                      std::optional<std::size_t> residency_cap = std::nullopt)
      : period_seconds_(period_seconds), residency_cap_(residency_cap) {
    if (period_seconds <= 0) throw Error(ErrorCode::InvalidParams, "period_seconds must be > 0");
  }

  std::int64_t period_seconds() const { return period_seconds_; }
  PeriodId period_of(std::int64_t ts) const { return repgraph::period_of(ts, period_seconds_); }

  /// Creates an empty unsealed subgraph; returns the existing one if
  /// already resident. Periods that were evicted cannot be reopened.
  TemporalSubgraph& create_period(PeriodId p) {
    if (auto it = resident_.find(p); it != resident_.end()) return it->second;
    if (evicted_.contains(p)) {
      throw Error(ErrorCode::SealedPeriod,
                  "period " + std::to_string(p.day_index) + " was sealed and evicted");
    }
    ensure_capacity(1);
    auto& g = resident_.try_emplace(p, p, period_seconds_).first->second;
    note_residency();
    return g;
  }

  void add_edge(PeriodId p, const NodeId& src, RelationKind rel, const NodeId& dst,
                TransactionRecord rec) {
    mutable_subgraph(p).add_edge(src, rel, dst, std::move(rec));
  }

  void seal_period(PeriodId p) {
    auto it = resident_.find(p);
    if (it == resident_.end()) {
      if (evicted_.contains(p)) return;  // evicted periods are sealed already
      throw Error(ErrorCode::UnknownPeriod, "period " + std::to_string(p.day_index));
    }
    it->second.seal();
  }

  std::vector<EdgeRef> query_edges(PeriodId p, const EdgeFilter& filter = {}) const {
    return subgraph(p).query(filter);
  }

  MergedView merge_periods(std::span<const PeriodId> periods) const {
    std::vector<PeriodId> sorted(periods.begin(), periods.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    MergedView view;
    for (PeriodId p : sorted) view.absorb(subgraph(p));
    return view;
  }

  const TemporalSubgraph& subgraph(PeriodId p) const {
    auto it = resident_.find(p);
    if (it == resident_.end()) {
      throw Error(ErrorCode::PeriodNotResident, "period " + std::to_string(p.day_index));
    }
    return it->second;
  }

  bool is_resident(PeriodId p) const { return resident_.contains(p); }
  bool is_persisted(PeriodId p) const { return persisted_.contains(p); }

  std::vector<PeriodId> resident_periods() const {
    std::vector<PeriodId> out;
    for (const auto& [p, g] : resident_) out.push_back(p);
    return out;
  }

  /// Recorded by the persistence layer after a successful save.
  void mark_persisted(PeriodId p) {
    if (!resident_.contains(p) && !evicted_.contains(p)) {
      throw Error(ErrorCode::UnknownPeriod, "period " + std::to_string(p.day_index));
    }
    persisted_.insert(p);
  }

  void evict_period(PeriodId p) {
    auto it = resident_.find(p);
    if (it == resident_.end()) {
      throw Error(ErrorCode::UnknownPeriod, "period " + std::to_string(p.day_index));
    }
    if (!it->second.sealed() || !persisted_.contains(p)) {
      throw Error(ErrorCode::NotPersisted,
                  "period " + std::to_string(p.day_index) + " has not been saved");
    }
    resident_.erase(it);
    evicted_.insert(p);
  }

  /// Installs a sealed subgraph read back from persistent storage.
  void restore(TemporalSubgraph g) {
    if (!g.sealed()) throw Error(ErrorCode::NotSealed, "restored subgraph must be sealed");
    PeriodId p = g.period();
    if (!resident_.contains(p)) ensure_capacity(1);
    resident_.insert_or_assign(p, std::move(g));
    evicted_.erase(p);
    persisted_.insert(p);
    note_residency();
  }

  // Residency monitor: evidence subgraphs plus pinned state graphs.
  std::size_t resident_count() const { return resident_.size() + pinned_states_; }
  std::size_t residency_high_water() const { return high_water_; }
  std::optional<std::size_t> residency_cap() const { return residency_cap_; }

  /// Starts a new update cycle; the high-water mark restarts at the
  /// current resident count.
  void begin_update_cycle() { high_water_ = resident_count(); }

  StatePin pin_state() {
    ensure_capacity(1);
    ++pinned_states_;
    note_residency();
    return StatePin(this);
  }

 private:
  friend class StatePin;

  TemporalSubgraph& mutable_subgraph(PeriodId p) {
    auto it = resident_.find(p);
    if (it == resident_.end()) {
      if (evicted_.contains(p)) {
        throw Error(ErrorCode::SealedPeriod,
                    "period " + std::to_string(p.day_index) + " is sealed");
      }
      throw Error(ErrorCode::UnknownPeriod, "period " + std::to_string(p.day_index));
    }
    return it->second;
  }

  void ensure_capacity(std::size_t extra) const {
    if (residency_cap_ && resident_count() + extra > *residency_cap_) {
      throw Error(ErrorCode::ResidencyExceeded,
                  "resident graphs would exceed cap of " + std::to_string(*residency_cap_));
    }
  }

  void note_residency() { high_water_ = std::max(high_water_, resident_count()); }

  std::int64_t period_seconds_;
  std::optional<std::size_t> residency_cap_;
  std::map<PeriodId, TemporalSubgraph> resident_;
  std::set<PeriodId> evicted_;
  std::set<PeriodId> persisted_;
  std::size_t pinned_states_ = 0;
  std::size_t high_water_ = 0;
};

inline StatePin::~StatePin() {
  if (store_ != nullptr) --store_->pinned_states_;
}

}  // namespace repgraph
