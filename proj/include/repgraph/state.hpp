#pragma once

#include <charconv>
#include <cstdio>
#include <map>
#include <string>

#include "repgraph/node.hpp"
#include "repgraph/params.hpp"
#include "repgraph/temporal_graph.hpp"

namespace repgraph {

/// Per-period reputation balance. An account that is absent reads as the
/// default reputation; a stored 0.0 is a real value.
struct ReputationState {
  PeriodId period;
  std::map<NodeId, double> values;

  static ReputationState genesis(PeriodId before_first) { return ReputationState{before_first, {}}; }

  friend bool operator==(const ReputationState&, const ReputationState&) = default;
};

inline double get_reputation(const ReputationState& state, const NodeId& account,
                             const EngineParams& params = {}) {
  auto it = state.values.find(account);
  return it == state.values.end() ? params.default_reputation : it->second;
}

/// Fixed-point text with 12 fractional digits; the on-disk form of a value.
inline std::string format_reputation(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

/// Rounds to the nearest value representable by format_reputation, so that
/// a state read back from disk is bit-identical to the one written.
inline double quantize_reputation(double v) {
  std::string text = format_reputation(v);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

}  // namespace repgraph
