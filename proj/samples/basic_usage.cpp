// Two days of activity, updated in memory and printed.
//
//   ./basic_usage

#include <cstdio>

#include "repgraph.hpp"

using namespace repgraph;

int main() {
  const char* day0[] = {
      R"({"kind":"post","actor":"acct:alice","target":"post:hello","ts":60})",
      R"({"kind":"vote","actor":"acct:bob","target":"post:hello","ts":120,"polarity":"up"})",
      R"({"kind":"payment","actor":"acct:carol","target":"acct:bob","ts":300,"amount":"99","currency":"XYZ"})",
  };
  // Ratings are derived from one period's evidence at a time, so a comment
  // only rates the parent's author if the post was made in the same period.
  const char* day1[] = {
      R"({"kind":"post","actor":"acct:alice","target":"post:again","ts":86460})",
      R"({"kind":"comment","actor":"acct:bob","target":"post:reply","parent":"post:again","ts":86500})",
  };

  EngineParams params;
  GraphStore store(params.period_seconds);
  ReputationEngine engine(store, params);

  auto load = [&](PeriodId p, auto& lines) {
    store.create_period(p);
    for (const char* line : lines) {
      for (auto& e : event_to_edges(parse_event_line(line, params), params)) {
        store.add_edge(p, e.key.src, e.key.rel, e.key.dst, e.record);
      }
    }
    store.seal_period(p);
  };

  ReputationState state = ReputationState::genesis(PeriodId{-1});
  load(PeriodId{0}, day0);
  load(PeriodId{1}, day1);
  for (PeriodId p : {PeriodId{0}, PeriodId{1}}) {
    state = engine.update_period(p, state);
    std::printf("period %lld\n", static_cast<long long>(p.day_index));
    for (const char* who : {"alice", "bob", "carol"}) {
      double v = get_reputation(state, NodeId::account(who), params);
      std::printf("  %-6s %s\n", who, format_reputation(v).c_str());
    }
  }
  return 0;
}
