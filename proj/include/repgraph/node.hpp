#pragma once

#include <array>
#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "repgraph/error.hpp"

namespace repgraph {

enum class EntityKind { Account, SmartContract, Product, Post, Word, Tag };

inline constexpr std::array<std::pair<EntityKind, std::string_view>, 6>
    kEntityPrefixes{{
        {EntityKind::Account, "acct"},
        {EntityKind::SmartContract, "sc"},
        {EntityKind::Product, "prod"},
        {EntityKind::Post, "post"},
        {EntityKind::Word, "word"},
        {EntityKind::Tag, "tag"},
    }};

constexpr std::string_view prefix_of(EntityKind kind) {
  for (const auto& [k, prefix] : kEntityPrefixes) {
    if (k == kind) return prefix;
  }
  return "?";
}

/// A vertex identity: the (kind, id) pair. Ordering is by id first and kind
/// second, which is the canonical order used by queries and files.
struct NodeId {
  EntityKind kind = EntityKind::Account;
  std::string id;

  NodeId() = default;
  NodeId(EntityKind k, std::string i) : kind(k), id(std::move(i)) {
    if (id.empty()) throw Error(ErrorCode::ValidationError, "empty node id");
  }

  static NodeId account(std::string i) { return {EntityKind::Account, std::move(i)}; }
  static NodeId post(std::string i) { return {EntityKind::Post, std::move(i)}; }

  /// Parses `<prefix>:<id>`; nullopt on unknown prefix or empty id.
  static std::optional<NodeId> parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos || colon + 1 >= text.size()) return std::nullopt;
    auto prefix = text.substr(0, colon);
    for (const auto& [kind, p] : kEntityPrefixes) {
      if (p == prefix) return NodeId{kind, std::string(text.substr(colon + 1))};
    }
    return std::nullopt;
  }

  std::string to_string() const {
    std::string out(prefix_of(kind));
    out += ':';
    out += id;
    return out;
  }

  bool is_account() const { return kind == EntityKind::Account; }

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend std::strong_ordering operator<=>(const NodeId& a, const NodeId& b) {
    if (auto c = a.id <=> b.id; c != 0) return c;
    return a.kind <=> b.kind;
  }
  friend std::ostream& operator<<(std::ostream& os, const NodeId& n) {
    return os << n.to_string();
  }
};

// Declaration order is the canonical relation order.
enum class RelationKind {
  Votes,
  Authors,
  Mentions,
  Uses,
  Relates,
  Provides,
  Follows,
  Creates,
  Calls,
  Pays,
};

inline constexpr std::array<std::pair<RelationKind, std::string_view>, 10>
    kRelationNames{{
        {RelationKind::Votes, "Votes"},
        {RelationKind::Authors, "Authors"},
        {RelationKind::Mentions, "Mentions"},
        {RelationKind::Uses, "Uses"},
        {RelationKind::Relates, "Relates"},
        {RelationKind::Provides, "Provides"},
        {RelationKind::Follows, "Follows"},
        {RelationKind::Creates, "Creates"},
        {RelationKind::Calls, "Calls"},
        {RelationKind::Pays, "Pays"},
    }};

constexpr std::string_view to_string(RelationKind rel) {
  for (const auto& [r, name] : kRelationNames) {
    if (r == rel) return name;
  }
  return "?";
}

inline std::optional<RelationKind> parse_relation(std::string_view name) {
  for (const auto& [rel, n] : kRelationNames) {
    if (n == name) return rel;
  }
  return std::nullopt;
}

inline std::ostream& operator<<(std::ostream& os, RelationKind rel) {
  return os << to_string(rel);
}

enum class Polarity { Up, Down };

constexpr std::string_view to_string(Polarity p) {
  return p == Polarity::Up ? "up" : "down";
}

inline std::optional<Polarity> parse_polarity(std::string_view text) {
  if (text == "up") return Polarity::Up;
  if (text == "down") return Polarity::Down;
  return std::nullopt;
}

}  // namespace repgraph
