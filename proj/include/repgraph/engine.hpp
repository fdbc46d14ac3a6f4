#pragma once

// Incremental reputation update. One period's step is
//
//   ratings  = derive_ratings(evidence)
//   raw[i]   = sum over ratings into i of rep_prev(rater) * quality * weight
//   dr       = raw / max(raw)
//   new[i]   = (1 - alpha) * prev_or_default(i) + alpha * dr_or_zero(i)
//
// where prev_or_default uses the default reputation only for an account's
// first rated period. Accounts never rated and never stored stay absent.
// Values are quantized to the 12-digit on-disk precision after each step.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "repgraph/error.hpp"
#include "repgraph/ontology.hpp"
#include "repgraph/params.hpp"
#include "repgraph/persistence.hpp"
#include "repgraph/state.hpp"
#include "repgraph/temporal_graph.hpp"

namespace repgraph {

using RawScores = std::map<NodeId, double>;

/// Rater-weighted accumulation. Ratings must be in canonical order; each
/// ratee's terms are summed in that order.
inline RawScores differential(std::span<const DerivedRating> ratings, const ReputationState& prev,
                              const EngineParams& params) {
  RawScores raw;
  for (const auto& r : ratings) {
    raw[r.ratee] += get_reputation(prev, r.rater, params) * r.quality * r.weight;
  }
  return raw;
}

/// Divides by the maximum value. An all-zero map is returned unchanged.
inline RawScores normalize(const RawScores& raw) {
  double max_value = 0.0;
  for (const auto& [account, v] : raw) {
    if (v < 0.0) throw Error(ErrorCode::NegativeInput, account.to_string());
    max_value = std::max(max_value, v);
  }
  if (max_value == 0.0) return raw;
  RawScores out;
  for (const auto& [account, v] : raw) out.emplace_hint(out.end(), account, v / max_value);
  return out;
}

inline ReputationState blend(const ReputationState& prev, const RawScores& normalized,
                             const EngineParams& params) {
  ReputationState next{prev.period.next(), {}};
  const double keep = 1.0 - params.alpha;
  auto store = [&](const NodeId& account, double v) {
    next.values.emplace_hint(next.values.end(), account,
                             quantize_reputation(std::clamp(v, 0.0, 1.0)));
  };

  // Merge-walk the two ordered maps.
  auto p = prev.values.begin();
  auto d = normalized.begin();
  while (p != prev.values.end() || d != normalized.end()) {
    if (d == normalized.end() || (p != prev.values.end() && p->first < d->first)) {
      store(p->first, keep * p->second);
      ++p;
    } else if (p == prev.values.end() || d->first < p->first) {
      store(d->first, keep * params.default_reputation + params.alpha * d->second);
      ++d;
    } else {
      store(p->first, keep * p->second + params.alpha * d->second);
      ++p;
      ++d;
    }
  }
  return next;
}

/// Drives per-period updates against a GraphStore. When a data root is
/// attached, update_period persists each new state and replay_range can
/// page evidence in from disk.
class ReputationEngine {
 public:
  ReputationEngine(GraphStore& store, EngineParams params,
                   std::optional<DataRoot> root = std::nullopt)
      : store_(store), params_(std::move(params)), root_(std::move(root)) {
    params_.validate();
  }

  const EngineParams& params() const { return params_; }
  const RatingDiagnostics& last_diagnostics() const { return diagnostics_; }

  ReputationState update_period(PeriodId period, const ReputationState& prev) {
    ReputationState next = step(period, prev);
    if (root_) root_->save_state(next);
    return next;
  }

  /// Recomputes [from, to] from an empty genesis state without writing
  /// anything. Evidence that is not resident is loaded from the data root
  /// and evicted again afterwards.
  std::vector<ReputationState> replay_range(PeriodId from, PeriodId to) {
    std::vector<ReputationState> out;
    if (from > to) return out;
    ReputationState state = ReputationState::genesis(from.prev());
    for (PeriodId p = from; p <= to; p = p.next()) {
      bool paged_in = false;
      if (!store_.is_resident(p)) {
        if (!root_ || !root_->has_evidence(p)) {
          throw Error(ErrorCode::MissingEvidence, "period " + std::to_string(p.day_index));
        }
        load_period(store_, p, *root_);
        paged_in = true;
      }
      state = step(p, state);
      if (paged_in) store_.evict_period(p);
      out.push_back(state);
    }
    return out;
  }

 private:
  ReputationState step(PeriodId period, const ReputationState& prev) {
    if (prev.period != period.prev()) {
      throw Error(ErrorCode::StateGap, "previous state is for period " +
                                           std::to_string(prev.period.day_index) + ", expected " +
                                           std::to_string(period.prev().day_index));
    }
    store_.begin_update_cycle();
    const TemporalSubgraph& evidence = store_.subgraph(period);
    if (!evidence.sealed()) {
      throw Error(ErrorCode::NotSealed, "evidence period " + std::to_string(period.day_index));
    }
    StatePin prev_pin = store_.pin_state();
    StatePin next_pin = store_.pin_state();

    DerivedRatings derived = derive_ratings(evidence, params_);
    diagnostics_ = derived.diagnostics;
    RawScores raw = differential(derived.ratings, prev, params_);
    return blend(prev, normalize(raw), params_);
  }

  GraphStore& store_;
  EngineParams params_;
  std::optional<DataRoot> root_;
  RatingDiagnostics diagnostics_;
};

}  // namespace repgraph
