#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "repgraph/decimal.hpp"
#include "repgraph/error.hpp"
#include "repgraph/temporal_graph.hpp"

namespace repgraph {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

inline bool parse_int(std::string_view text, std::int64_t& out) {
  text = trim(text);
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace detail

struct EngineParams {
  double alpha = 0.2;
  double default_reputation = 0.5;
  double log_base = 10.0;
  double q_vote_up = 1.0;
  double q_vote_down = 0.0;
  double q_comment = 0.5;
  double q_payment = 1.0;
  std::int64_t period_seconds = kDefaultPeriodSeconds;
  /// Currency code -> multiplier into base units.
  std::map<std::string, Decimal> currency_table{{"XYZ", Decimal::from_integer(1)}};

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidParams, what); };
    if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must be in (0,1]");
    if (!(default_reputation >= 0.0 && default_reputation <= 1.0)) {
      fail("default_reputation must be in [0,1]");
    }
    if (!(log_base > 1.0)) fail("log_base must be > 1");
    for (double q : {q_vote_up, q_vote_down, q_comment, q_payment}) {
      if (!(q >= 0.0 && q <= 1.0)) fail("quality values must be in [0,1]");
    }
    if (period_seconds <= 0) fail("period_seconds must be > 0");
    for (const auto& [code, mult] : currency_table) {
      if (code.empty()) fail("empty currency code");
      if (mult.negative()) fail("negative multiplier for " + code);
    }
  }
};

/// Reads `key = value` lines. Blank lines and `#` comments are skipped.
/// `currency_table` takes a comma-separated list of `CODE:multiplier`
/// and replaces the default table.
inline EngineParams parse_params(std::istream& in) {
  EngineParams p;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto eq = body.find('=');
    auto where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidParams, where + ": expected key = value");
    }
    auto key = detail::trim(body.substr(0, eq));
    auto value = detail::trim(body.substr(eq + 1));

    auto number = [&](double& slot) {
      if (!detail::parse_double(value, slot)) {
        throw Error(ErrorCode::InvalidParams, where + ": bad number for " + std::string(key));
      }
    };
    if (key == "alpha") number(p.alpha);
    else if (key == "default_reputation") number(p.default_reputation);
    else if (key == "log_base") number(p.log_base);
    else if (key == "q_vote_up") number(p.q_vote_up);
    else if (key == "q_vote_down") number(p.q_vote_down);
    else if (key == "q_comment") number(p.q_comment);
    else if (key == "q_payment") number(p.q_payment);
    else if (key == "period_seconds") {
      if (!detail::parse_int(value, p.period_seconds)) {
        throw Error(ErrorCode::InvalidParams, where + ": bad integer for period_seconds");
      }
    } else if (key == "currency_table") {
      p.currency_table.clear();
      std::stringstream entries{std::string(value)};
      std::string entry;
      while (std::getline(entries, entry, ',')) {
        auto e = detail::trim(entry);
        if (e.empty()) continue;
        auto colon = e.find(':');
        std::optional<Decimal> mult;
        if (colon != std::string_view::npos) mult = Decimal::parse(detail::trim(e.substr(colon + 1)));
        if (!mult) {
          throw Error(ErrorCode::InvalidParams, where + ": bad currency entry '" + std::string(e) + "'");
        }
        p.currency_table[std::string(detail::trim(e.substr(0, colon)))] = *mult;
      }
    } else {
      throw Error(ErrorCode::InvalidParams, where + ": unknown key '" + std::string(key) + "'");
    }
  }
  p.validate();
  return p;
}

inline EngineParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open params file " + path);
  return parse_params(in);
}

}  // namespace repgraph
