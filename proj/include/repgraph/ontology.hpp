#pragma once

// Event ingestion: parse line-delimited JSON events, map them onto ontology
// edges, and project multi-hop evidence into direct rater -> ratee ratings.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "repgraph/decimal.hpp"
#include "repgraph/error.hpp"
#include "repgraph/node.hpp"
#include "repgraph/params.hpp"
#include "repgraph/temporal_graph.hpp"
#include "repgraph/weighting.hpp"

namespace repgraph {

enum class EventKind { Vote, Comment, Post, Payment, Follow, Create, Call, Mention, Provide, Relate };

inline constexpr std::array<std::pair<EventKind, std::string_view>, 10> kEventNames{{
    {EventKind::Vote, "vote"},
    {EventKind::Comment, "comment"},
    {EventKind::Post, "post"},
    {EventKind::Payment, "payment"},
    {EventKind::Follow, "follow"},
    {EventKind::Create, "create"},
    {EventKind::Call, "call"},
    {EventKind::Mention, "mention"},
    {EventKind::Provide, "provide"},
    {EventKind::Relate, "relate"},
}};

constexpr std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kEventNames) {
    if (k == kind) return name;
  }
  return "?";
}

inline std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (const auto& [k, n] : kEventNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

struct Event {
  EventKind kind = EventKind::Vote;
  NodeId actor;
  NodeId target;
  std::optional<NodeId> parent;
  std::int64_t timestamp = 0;
  std::optional<Decimal> amount;  // in `currency`, not yet converted
  std::optional<std::string> currency;
  std::optional<Decimal> rating;
  std::optional<Polarity> polarity;

  friend bool operator==(const Event&, const Event&) = default;
};

namespace detail {

// Actor is always an Account. Comment additionally needs a Post parent.
inline bool target_allowed(EventKind kind, EntityKind target) {
  using E = EntityKind;
  switch (kind) {
    case EventKind::Vote:
    case EventKind::Comment:
    case EventKind::Post: return target == E::Post;
    case EventKind::Payment:
      return target == E::Account || target == E::SmartContract || target == E::Product;
    case EventKind::Follow:
    case EventKind::Mention: return target == E::Account;
    case EventKind::Create:
    case EventKind::Call: return target == E::SmartContract;
    case EventKind::Provide: return target == E::Product;
    case EventKind::Relate: return target == E::Tag;
  }
  return false;
}

inline std::optional<Decimal> decimal_field(const nlohmann::json& v) {
  if (v.is_string()) return Decimal::parse(v.get<std::string>());
  if (v.is_number()) return Decimal::parse(v.dump());
  return std::nullopt;
}

}  // namespace detail

/// True for blank lines and `#` comments in an event file.
inline bool is_skippable_line(std::string_view line) {
  auto body = detail::trim(line);
  return body.empty() || body.front() == '#';
}

/// Parses and validates one event line. Unknown JSON fields are ignored.
inline Event parse_event_line(std::string_view line, const EngineParams& params = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "event must be a JSON object");

  auto invalid = [](const std::string& what) { throw Error(ErrorCode::ValidationError, what); };
  auto present = [&](const char* key) { return j.contains(key) && !j[key].is_null(); };
  auto node_field = [&](const char* key) {
    if (!present(key) || !j[key].is_string()) invalid(std::string("missing or non-string '") + key + "'");
    auto n = NodeId::parse(j[key].get<std::string>());
    if (!n) invalid(std::string("bad node id in '") + key + "'");
    return *n;
  };

  Event ev;
  if (!present("kind") || !j["kind"].is_string()) invalid("missing 'kind'");
  auto kind = parse_event_kind(j["kind"].get<std::string>());
  if (!kind) invalid("unknown kind '" + j["kind"].get<std::string>() + "'");
  ev.kind = *kind;
  std::string kind_name(to_string(ev.kind));

  ev.actor = node_field("actor");
  ev.target = node_field("target");
  if (!ev.actor.is_account()) invalid(kind_name + ": actor must be an account");
  if (!detail::target_allowed(ev.kind, ev.target.kind)) {
    invalid(kind_name + ": target kind '" + std::string(prefix_of(ev.target.kind)) + "' not allowed");
  }

  if (!present("ts") || !j["ts"].is_number_integer()) invalid("missing or non-integer 'ts'");
  ev.timestamp = j["ts"].get<std::int64_t>();

  if (present("parent")) {
    if (ev.kind != EventKind::Comment) invalid(kind_name + ": 'parent' only valid for comment");
    ev.parent = node_field("parent");
    if (ev.parent->kind != EntityKind::Post) invalid("comment parent must be a post");
    if (*ev.parent == ev.target) invalid("comment cannot reply to itself");
  } else if (ev.kind == EventKind::Comment) {
    invalid("comment requires 'parent'");
  }

  if (present("polarity")) {
    if (ev.kind != EventKind::Vote) invalid(kind_name + ": 'polarity' only valid for vote");
    if (!j["polarity"].is_string()) invalid("'polarity' must be a string");
    ev.polarity = parse_polarity(j["polarity"].get<std::string>());
    if (!ev.polarity) invalid("polarity must be 'up' or 'down'");
  } else if (ev.kind == EventKind::Vote) {
    invalid("vote requires 'polarity'");
  }

  if (present("rating")) {
    if (ev.kind != EventKind::Payment) invalid(kind_name + ": 'rating' only valid for payment");
    ev.rating = detail::decimal_field(j["rating"]);
    if (!ev.rating || ev.rating->negative() || *ev.rating > Decimal::from_integer(1)) {
      invalid("rating must be a decimal in [0,1]");
    }
  }

  bool has_amount = present("amount");
  bool has_currency = present("currency");
  if (ev.kind == EventKind::Payment) {
    if (!has_amount) invalid("payment requires 'amount'");
    if (!has_currency) invalid("payment requires 'currency'");
  } else if (has_amount || has_currency) {
    invalid(kind_name + ": 'amount'/'currency' only valid for payment");
  }
  if (has_amount) {
    ev.amount = detail::decimal_field(j["amount"]);
    if (!ev.amount) invalid("'amount' must be a decimal string");
    if (ev.amount->negative()) invalid("'amount' must be non-negative");
  }
  if (has_currency) {
    if (!j["currency"].is_string()) invalid("'currency' must be a string");
    ev.currency = j["currency"].get<std::string>();
    if (!params.currency_table.contains(*ev.currency)) {
      throw Error(ErrorCode::UnknownCurrency, "currency '" + *ev.currency + "'");
    }
  }
  return ev;
}

/// Renders an event in the line format accepted by parse_event_line.
inline std::string format_event_line(const Event& ev) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(ev.kind);
  j["actor"] = ev.actor.to_string();
  j["target"] = ev.target.to_string();
  if (ev.parent) j["parent"] = ev.parent->to_string();
  j["ts"] = ev.timestamp;
  if (ev.amount) j["amount"] = ev.amount->to_string();
  if (ev.currency) j["currency"] = *ev.currency;
  if (ev.rating) j["rating"] = ev.rating->to_string();
  if (ev.polarity) j["polarity"] = to_string(*ev.polarity);
  return j.dump();
}

struct EdgeInsert {
  EdgeKey key;
  TransactionRecord record;
};

/// Maps an event onto its ontology edges. Payment amounts are converted
/// into base units through the params currency table.
inline std::vector<EdgeInsert> event_to_edges(const Event& ev, const EngineParams& params = {}) {
  TransactionRecord rec;
  rec.timestamp = ev.timestamp;
  auto edge = [&](const NodeId& src, RelationKind rel, const NodeId& dst) {
    return EdgeInsert{EdgeKey{src, rel, dst}, rec};
  };

  switch (ev.kind) {
    case EventKind::Vote:
      rec.polarity = ev.polarity;
      return {edge(ev.actor, RelationKind::Votes, ev.target)};
    case EventKind::Post:
      return {edge(ev.actor, RelationKind::Authors, ev.target)};
    case EventKind::Comment:
      return {edge(ev.actor, RelationKind::Authors, ev.target),
              edge(ev.target, RelationKind::Relates, *ev.parent)};
    case EventKind::Payment: {
      auto it = params.currency_table.find(ev.currency.value_or(""));
      if (it == params.currency_table.end()) {
        throw Error(ErrorCode::UnknownCurrency, "currency '" + ev.currency.value_or("") + "'");
      }
      auto base = Decimal::checked_mul(ev.amount.value_or(Decimal{}), it->second);
      if (!base) throw Error(ErrorCode::ValidationError, "amount overflow after conversion");
      rec.amount = *base;
      rec.currency = *ev.currency;
      rec.rating = ev.rating;
      return {edge(ev.actor, RelationKind::Pays, ev.target)};
    }
    case EventKind::Follow: return {edge(ev.actor, RelationKind::Follows, ev.target)};
    case EventKind::Create: return {edge(ev.actor, RelationKind::Creates, ev.target)};
    case EventKind::Call: return {edge(ev.actor, RelationKind::Calls, ev.target)};
    case EventKind::Mention: return {edge(ev.actor, RelationKind::Mentions, ev.target)};
    case EventKind::Provide: return {edge(ev.actor, RelationKind::Provides, ev.target)};
    case EventKind::Relate: return {edge(ev.actor, RelationKind::Relates, ev.target)};
  }
  return {};
}

struct DerivedRating {
  NodeId rater;
  NodeId ratee;
  double quality = 0.0;
  double weight = 0.0;
  EventKind source_kind = EventKind::Vote;

  friend bool operator==(const DerivedRating&, const DerivedRating&) = default;
};

struct RatingDiagnostics {
  std::size_t self_pairs = 0;
  std::size_t dangling = 0;
};

struct DerivedRatings {
  std::vector<DerivedRating> ratings;
  RatingDiagnostics diagnostics;
};

/// Projects evidence into direct account -> account ratings:
///   votes on a post rate its author (quality by polarity, weight 1);
///   a comment rates the parent post's author (q_comment, weight 1);
///   a payment to an account rates the payee (explicit rating or
///   q_payment, weighted by financial_weight of the amount).
/// Self-pairs are dropped and votes/comments without an authorship join are
/// tallied as dangling. Output is stably sorted by (rater, ratee, kind).
inline DerivedRatings derive_ratings(const EdgeSet& evidence, const EngineParams& params) {
  DerivedRatings out;
  auto& diag = out.diagnostics;

  std::map<NodeId, std::vector<NodeId>> authors_of;
  for (const auto& [key, value] : evidence.edges()) {
    if (key.rel == RelationKind::Authors && key.src.is_account()) {
      authors_of[key.dst].push_back(key.src);
    }
  }
  auto authors = [&](const NodeId& post) -> const std::vector<NodeId>* {
    auto it = authors_of.find(post);
    return it == authors_of.end() ? nullptr : &it->second;
  };
  auto emit = [&](const NodeId& rater, const NodeId& ratee, double q, double w, EventKind kind) {
    if (rater == ratee) {
      ++diag.self_pairs;
      return;
    }
    out.ratings.push_back(DerivedRating{rater, ratee, q, w, kind});
  };

  for (const auto& [key, value] : evidence.edges()) {
    if (!key.src.is_account()) {
      // Comment reply edges: Relates(comment -> parent post).
      if (key.rel == RelationKind::Relates && key.src.kind == EntityKind::Post &&
          key.dst.kind == EntityKind::Post) {
        const auto* commenters = authors(key.src);
        if (commenters == nullptr) continue;
        const auto* parent_authors = authors(key.dst);
        if (parent_authors == nullptr) {
          diag.dangling += commenters->size();
          continue;
        }
        for (const auto& c : *commenters) {
          for (const auto& a : *parent_authors) emit(c, a, params.q_comment, 1.0, EventKind::Comment);
        }
      }
      continue;
    }
    switch (key.rel) {
      case RelationKind::Votes: {
        const auto* post_authors = authors(key.dst);
        if (post_authors == nullptr) {
          diag.dangling += value.agg_count();
          break;
        }
        for (const auto& rec : value.records()) {
          double q = rec.polarity == Polarity::Down ? params.q_vote_down : params.q_vote_up;
          for (const auto& a : *post_authors) emit(key.src, a, q, 1.0, EventKind::Vote);
        }
        break;
      }
      case RelationKind::Pays: {
        if (!key.dst.is_account()) break;
        for (const auto& rec : value.records()) {
          double q = rec.rating ? rec.rating->to_double() : params.q_payment;
          emit(key.src, key.dst, q, financial_weight(rec.amount, params), EventKind::Payment);
        }
        break;
      }
      default: break;
    }
  }

  std::stable_sort(out.ratings.begin(), out.ratings.end(),
                   [](const DerivedRating& a, const DerivedRating& b) {
                     if (auto c = a.rater <=> b.rater; c != 0) return c < 0;
                     if (auto c = a.ratee <=> b.ratee; c != 0) return c < 0;
                     return a.source_kind < b.source_kind;
                   });
  return out;
}

inline DerivedRatings derive_ratings(const TemporalSubgraph& evidence, const EngineParams& params) {
  if (!evidence.sealed()) {
    throw Error(ErrorCode::NotSealed,
                "evidence period " + std::to_string(evidence.period().day_index));
  }
  return derive_ratings(static_cast<const EdgeSet&>(evidence), params);
}

}  // namespace repgraph
