#pragma once

#include <cmath>

#include "repgraph/decimal.hpp"
#include "repgraph/error.hpp"
#include "repgraph/params.hpp"

namespace repgraph {

/// log_base(1 + amount): zero for a zero amount, monotone non-decreasing.
inline double financial_weight(Decimal amount, const EngineParams& params) {
  if (amount.negative()) {
    throw Error(ErrorCode::NegativeAmount, "amount " + amount.to_string());
  }
  double x = 1.0 + amount.to_double();
  if (params.log_base == 10.0) return std::log10(x);
  if (params.log_base == 2.0) return std::log2(x);
  return std::log(x) / std::log(params.log_base);
}

}  // namespace repgraph
