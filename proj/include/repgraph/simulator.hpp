#pragma once

// Synthetic cohort scenarios. Each cohort member receives Poisson-many
// endorsements per period (up-votes on a post it authored that period, or
// payments to it) from a fixed pool of raters while inside its active
// window, and nothing outside it.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "repgraph/decimal.hpp"
#include "repgraph/error.hpp"
#include "repgraph/ontology.hpp"
#include "repgraph/params.hpp"
#include "repgraph/persistence.hpp"
#include "repgraph/temporal_graph.hpp"

namespace repgraph {

struct CohortSpec {
  std::string name;
  std::int64_t size = 0;
  double inbound_rate = 0.0;  // expected endorsements per member per period
  Decimal payment_min = Decimal::from_integer(1);
  Decimal payment_max = Decimal::from_integer(100);
  std::int64_t active_from = 0;  // inclusive
  std::int64_t active_to = 0;    // inclusive
};

struct SimConfig {
  std::uint64_t seed = 0;
  std::int64_t n_periods = 0;
  std::int64_t rater_pool_size = 0;
  double vote_share = 0.5;  // fraction of endorsements that are votes
  std::string currency = "XYZ";
  std::vector<CohortSpec> cohorts;

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (n_periods <= 0) fail("n_periods must be > 0");
    if (rater_pool_size <= 0) fail("rater_pool_size must be > 0");
    if (!(vote_share >= 0.0 && vote_share <= 1.0)) fail("vote_share must be in [0,1]");
    if (cohorts.empty()) fail("at least one cohort required");
    std::set<std::string> names;
    for (const auto& c : cohorts) {
      if (c.name.empty()) fail("cohort name required");
      if (!names.insert(c.name).second) fail("duplicate cohort " + c.name);
      if (c.size <= 0) fail("cohort " + c.name + ": size must be > 0");
      if (!(c.inbound_rate >= 0.0)) fail("cohort " + c.name + ": inbound_rate must be >= 0");
      if (c.payment_min.negative() || c.payment_max < c.payment_min) {
        fail("cohort " + c.name + ": bad payment range");
      }
      if (c.active_from < 0 || c.active_to >= n_periods || c.active_from > c.active_to) {
        fail("cohort " + c.name + ": active window outside [0, n_periods)");
      }
    }
  }
};

/// `key = value` lines; each `[cohort]` header starts a new cohort whose
/// keys follow it.
inline SimConfig parse_sim_config(std::istream& in) {
  SimConfig cfg;
  std::string line;
  int line_no = 0;
  CohortSpec* cohort = nullptr;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto where = "line " + std::to_string(line_no) + ": ";
    if (body == "[cohort]") {
      cohort = &cfg.cohorts.emplace_back();
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::InvalidConfig, where + "expected key = value");
    std::string key(detail::trim(body.substr(0, eq)));
    auto value = detail::trim(body.substr(eq + 1));
    auto bad = [&] { throw Error(ErrorCode::InvalidConfig, where + "bad value for " + key); };
    auto integer = [&](std::int64_t& slot) { if (!detail::parse_int(value, slot)) bad(); };
    auto real = [&](double& slot) { if (!detail::parse_double(value, slot)) bad(); };
    auto decimal = [&](Decimal& slot) {
      auto d = Decimal::parse(value);
      if (!d) bad();
      slot = *d;
    };

    if (cohort == nullptr) {
      if (key == "seed") {
        std::int64_t s = 0;
        integer(s);
        cfg.seed = static_cast<std::uint64_t>(s);
      } else if (key == "n_periods") integer(cfg.n_periods);
      else if (key == "rater_pool_size") integer(cfg.rater_pool_size);
      else if (key == "vote_share") real(cfg.vote_share);
      else if (key == "currency") cfg.currency = std::string(value);
      else throw Error(ErrorCode::InvalidConfig, where + "unknown key " + key);
    } else {
      if (key == "name") cohort->name = std::string(value);
      else if (key == "size") integer(cohort->size);
      else if (key == "inbound_rate") real(cohort->inbound_rate);
      else if (key == "payment_min") decimal(cohort->payment_min);
      else if (key == "payment_max") decimal(cohort->payment_max);
      else if (key == "active_from") integer(cohort->active_from);
      else if (key == "active_to") integer(cohort->active_to);
      else throw Error(ErrorCode::InvalidConfig, where + "unknown cohort key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

inline NodeId cohort_member(const CohortSpec& c, std::int64_t index) {
  return NodeId::account(c.name + "-" + std::to_string(index));
}

struct SimOutput {
  std::vector<Event> events;  // sorted by timestamp, stable
  std::vector<std::pair<NodeId, std::string>> labels;
  std::size_t endorsements = 0;  // votes + payments
};

/// Deterministic in cfg.seed for a given standard library implementation.
inline SimOutput generate_events(const SimConfig& cfg, std::int64_t period_seconds = kDefaultPeriodSeconds) {
  cfg.validate();
  SimOutput out;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::int64_t> pick_rater(0, cfg.rater_pool_size - 1);
  std::uniform_int_distribution<std::int64_t> pick_offset(1, period_seconds - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  for (const auto& c : cfg.cohorts) {
    for (std::int64_t i = 0; i < c.size; ++i) out.labels.emplace_back(cohort_member(c, i), c.name);
  }

  for (std::int64_t period = 0; period < cfg.n_periods; ++period) {
    const std::int64_t start = period * period_seconds;
    for (const auto& c : cfg.cohorts) {
      if (period < c.active_from || period > c.active_to || c.inbound_rate <= 0.0) continue;
      std::poisson_distribution<std::int64_t> arrivals(c.inbound_rate);
      std::uniform_int_distribution<std::int64_t> pick_amount(c.payment_min.units(),
                                                              c.payment_max.units());
      for (std::int64_t i = 0; i < c.size; ++i) {
        NodeId member = cohort_member(c, i);
        NodeId post = NodeId::post(member.id + "-p" + std::to_string(period));
        bool posted = false;
        std::int64_t n = arrivals(rng);
        for (std::int64_t k = 0; k < n; ++k) {
          Event ev;
          ev.actor = NodeId::account("rater-" + std::to_string(pick_rater(rng)));
          ev.timestamp = start + pick_offset(rng);
          if (coin(rng) < cfg.vote_share) {
            if (!posted) {
              Event authored;
              authored.kind = EventKind::Post;
              authored.actor = member;
              authored.target = post;
              authored.timestamp = start;
              out.events.push_back(std::move(authored));
              posted = true;
            }
            ev.kind = EventKind::Vote;
            ev.target = post;
            ev.polarity = Polarity::Up;
          } else {
            ev.kind = EventKind::Payment;
            ev.target = member;
            ev.amount = Decimal::from_units(pick_amount(rng));
            ev.currency = cfg.currency;
          }
          out.events.push_back(std::move(ev));
          ++out.endorsements;
        }
      }
    }
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
  return out;
}

inline std::string format_events(const SimOutput& sim) {
  std::string out;
  for (const auto& ev : sim.events) {
    out += format_event_line(ev);
    out += '\n';
  }
  return out;
}

inline std::string format_labels(const SimOutput& sim) {
  std::string out;
  for (const auto& [account, cohort] : sim.labels) {
    out += account.to_string();
    out += '\t';
    out += cohort;
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

/// account -> cohort, plus cohort names in first-seen order.
struct CohortLabels {
  std::map<NodeId, std::string> cohort_of;
  std::vector<std::string> cohorts;
};

inline CohortLabels parse_labels(std::string_view text) {
  CohortLabels labels;
  std::size_t line_no = 0;
  for (auto line : detail::split(text, '\n')) {
    ++line_no;
    if (is_skippable_line(line)) continue;
    auto fields = detail::split(detail::trim(line), '\t');
    auto account = fields.size() == 2 ? NodeId::parse(fields[0]) : std::nullopt;
    if (!account || fields[1].empty()) {
      throw Error(ErrorCode::ParseError, "labels line " + std::to_string(line_no));
    }
    std::string cohort(fields[1]);
    if (std::find(labels.cohorts.begin(), labels.cohorts.end(), cohort) == labels.cohorts.end()) {
      labels.cohorts.push_back(cohort);
    }
    labels.cohort_of[*account] = cohort;
  }
  return labels;
}

struct DynamicsReport {
  std::int64_t first_period = 0;
  std::int64_t last_period = -1;
  std::vector<std::string> cohorts;
  std::map<std::string, std::vector<double>> mean;  // per period, from first_period
  std::map<std::string, std::optional<std::int64_t>> half_life;
  std::string positive;
  std::string negative;
  std::optional<double> auc;
};

/// Probability that a positive sample outranks a negative one; ties 0.5.
inline double rank_auc(std::span<const double> positive, std::span<const double> negative) {
  double wins = 0.0;
  for (double p : positive) {
    for (double n : negative) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(positive.size()) * static_cast<double>(negative.size()));
}

/// Periods after the peak until the series first drops below half the
/// peak; nullopt if it never does.
inline std::optional<std::int64_t> half_life(std::span<const double> series) {
  if (series.empty()) return std::nullopt;
  auto peak = std::max_element(series.begin(), series.end());
  for (auto it = peak + 1; it != series.end(); ++it) {
    if (*it < *peak / 2.0) return static_cast<std::int64_t>(it - peak);
  }
  return std::nullopt;
}

/// Scores a dynamics CSV. AUC compares `positive` against `negative`
/// (default: the first two cohorts in label order) at the final period.
inline DynamicsReport evaluate_dynamics(std::string_view csv, const CohortLabels& labels,
                                        std::optional<std::string> positive = std::nullopt,
                                        std::optional<std::string> negative = std::nullopt) {
  auto lines = detail::split(csv, '\n');
  if (lines.empty() || detail::trim(lines[0]) != kDynamicsHeader) {
    throw Error(ErrorCode::ParseError, "dynamics CSV: bad header");
  }
  std::map<NodeId, std::map<std::int64_t, double>> series;
  std::set<std::int64_t> periods;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto line = detail::trim(lines[i]);
    if (line.empty()) continue;
    auto fields = detail::split(line, ',');
    std::int64_t period = 0;
    double value = 0.0;
    std::optional<NodeId> account;
    if (fields.size() == 3) account = NodeId::parse(fields[1]);
    if (!account || !detail::parse_int(fields[0], period) || !detail::parse_double(fields[2], value)) {
      throw Error(ErrorCode::ParseError, "dynamics CSV line " + std::to_string(i + 1));
    }
    if (!labels.cohort_of.contains(*account)) {
      throw Error(ErrorCode::UnlabeledAccount, account->to_string());
    }
    series[*account][period] = value;
    periods.insert(period);
  }

  DynamicsReport report;
  report.cohorts = labels.cohorts;
  if (periods.empty()) return report;
  report.first_period = *periods.begin();
  report.last_period = *periods.rbegin();
  const auto n = static_cast<std::size_t>(report.last_period - report.first_period + 1);
  if (periods.size() != n) throw Error(ErrorCode::MissingPeriods, "period range has holes");
  for (const auto& [account, by_period] : series) {
    if (by_period.size() != n) throw Error(ErrorCode::MissingPeriods, account.to_string());
  }

  std::map<std::string, std::vector<double>> sums;
  std::map<std::string, std::size_t> members;
  for (const auto& [account, by_period] : series) {
    const auto& cohort = labels.cohort_of.at(account);
    auto& s = sums[cohort];
    s.resize(n, 0.0);
    std::size_t k = 0;
    for (const auto& [period, value] : by_period) s[k++] += value;
    ++members[cohort];
  }
  for (const auto& cohort : labels.cohorts) {
    auto it = sums.find(cohort);
    if (it == sums.end()) continue;
    std::vector<double> m = it->second;
    for (double& v : m) v /= static_cast<double>(members[cohort]);
    report.half_life[cohort] = half_life(m);
    report.mean[cohort] = std::move(m);
  }

  if (!positive && labels.cohorts.size() >= 2) positive = labels.cohorts[0];
  if (!negative && labels.cohorts.size() >= 2) negative = labels.cohorts[1];
  if (positive && negative) {
    std::vector<double> pos, neg;
    for (const auto& [account, by_period] : series) {
      const auto& cohort = labels.cohort_of.at(account);
      if (cohort == *positive) pos.push_back(by_period.rbegin()->second);
      if (cohort == *negative) neg.push_back(by_period.rbegin()->second);
    }
    report.positive = *positive;
    report.negative = *negative;
    if (!pos.empty() && !neg.empty()) report.auc = rank_auc(pos, neg);
  }
  return report;
}

inline std::string format_report(const DynamicsReport& r) {
  std::string out;
  char buf[64];
  auto fixed = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  out += "periods: " + std::to_string(r.first_period) + ".." + std::to_string(r.last_period) + "\n";
  for (const auto& cohort : r.cohorts) {
    auto it = r.mean.find(cohort);
    if (it == r.mean.end()) continue;
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      out += "mean." + cohort + "." + std::to_string(r.first_period + static_cast<std::int64_t>(k)) +
             ": " + fixed(it->second[k]) + "\n";
    }
    const auto& hl = r.half_life.at(cohort);
    out += "half_life." + cohort + ": " + (hl ? std::to_string(*hl) : std::string("none")) + "\n";
  }
  if (r.auc) out += "auc." + r.positive + "_vs_" + r.negative + ": " + fixed(*r.auc) + "\n";
  return out;
}

}  // namespace repgraph
