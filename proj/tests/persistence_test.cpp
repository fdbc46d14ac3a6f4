#include <gtest/gtest.h>

#include <random>

#include "repgraph/persistence.hpp"
#include "repgraph/pipeline.hpp"
#include "test_support.hpp"

namespace repgraph {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

const std::string kHeader = std::string(kEvidenceHeader) + "\n";

TemporalSubgraph random_subgraph(std::mt19937_64& rng, PeriodId p) {
  TemporalSubgraph g(p);
  for (auto ev : testing::random_events(rng, 8, 1, 60)) {
    ev.timestamp += p.day_index * kDefaultPeriodSeconds;
    for (auto& e : event_to_edges(ev)) g.add_edge(e.key.src, e.key.rel, e.key.dst, e.record);
  }
  g.seal();
  return g;
}

TEST(SubgraphFile, SaveLoadSaveIsByteIdentical) {
  testing::TempDir dir;
  DataRoot root(dir.path());
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    PeriodId p{i % 7 - 2};
    auto g = random_subgraph(rng, p);
    root.save_subgraph(g);
    std::string first = detail::read_file(root.evidence_path(p));
    auto loaded = root.load_subgraph(p);
    EXPECT_EQ(loaded, g);
    root.save_subgraph(loaded);
    EXPECT_EQ(detail::read_file(root.evidence_path(p)), first);
  }
}

TEST(SubgraphFile, EmptyIsHeaderOnly) {
  testing::TempDir dir;
  DataRoot root(dir.path());
  TemporalSubgraph g(PeriodId{4});
  g.seal();
  root.save_subgraph(g);
  EXPECT_EQ(detail::read_file(root.evidence_path(PeriodId{4})), kHeader);
  auto loaded = root.load_subgraph(PeriodId{4});
  EXPECT_TRUE(loaded.sealed());
  EXPECT_EQ(loaded.edge_count(), 0u);
}

TEST(SubgraphFile, RowFormat) {
  TemporalSubgraph g(PeriodId{0});
  g.add_edge(NodeId::account("a"), RelationKind::Pays, NodeId::account("b"),
             {.timestamp = 100, .amount = Decimal::from_integer(10), .currency = "XYZ"});
  g.add_edge(NodeId::account("a"), RelationKind::Votes, NodeId::post("p"),
             {.timestamp = 50, .polarity = Polarity::Down});
  g.seal();
  EXPECT_EQ(serialize_subgraph(g), kHeader +
                                       "acct:a\tVotes\tpost:p\t50\t0\t\t\tdown\n"
                                       "acct:a\tPays\tacct:b\t100\t10\tXYZ\t\t\n");
}

TEST(SubgraphFile, UnsealedCannotBeSaved) {
  testing::TempDir dir;
  TemporalSubgraph g(PeriodId{0});
  EXPECT_EQ(code_of([&] { DataRoot(dir.path()).save_subgraph(g); }), ErrorCode::NotSealed);
}

TEST(SubgraphFile, CorruptInputsRejected) {
  const std::string good_row = "acct:a\tPays\tacct:b\t100\t10\tXYZ\t\t\n";
  const std::vector<std::string> bad{
      "",
      "src\trel\n",
      kHeader + "acct:a\tPays\tacct:b\t100\t-1\tXYZ\t\t\n",
      kHeader + "acct:a\tPays\tacct:b\t100\tten\tXYZ\t\t\n",
      kHeader + "acct:a\tPays\tacct:b\t86400\t10\tXYZ\t\t\n",
      kHeader + "acct:a\tPays\tacct:b\t100\t10\tXYZ\t1.5\t\n",
      kHeader + "acct:a\tPays\tacct:b\t100\t10\tXYZ\t\tmaybe\n",
      kHeader + "acct:a\tPaid\tacct:b\t100\t10\tXYZ\t\t\n",
      kHeader + "bogus\tPays\tacct:b\t100\t10\tXYZ\t\t\n",
      kHeader + "acct:a\tPays\tacct:b\t100\t10\tXYZ\t\n",
      kHeader + "acct:a\tPays\tacct:b\t100\t10.0\tXYZ\t\t\n",
      kHeader + "acct:a\tPays\tacct:b\t100\t10\tXYZ\t\t",
      kHeader + "acct:b\tPays\tacct:a\t100\t10\tXYZ\t\t\n" + good_row,
      kHeader + good_row + good_row.substr(0, 20) + "\n",
  };
  for (const auto& text : bad) {
    EXPECT_EQ(code_of([&] { parse_subgraph(text, PeriodId{0}); }), ErrorCode::CorruptFile) << text;
  }
  EXPECT_NO_THROW(parse_subgraph(kHeader + good_row, PeriodId{0}));
}

TEST(SubgraphFile, MissingFileIsUnknownPeriod) {
  testing::TempDir dir;
  EXPECT_EQ(code_of([&] { DataRoot(dir.path()).load_subgraph(PeriodId{9}); }),
            ErrorCode::UnknownPeriod);
}

TEST(SubgraphFile, InsertionOrderDoesNotChangeBytes) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    auto events = testing::random_events(rng, 6, 1, 60);
    // Distinct timestamps so record order is fully determined by content.
    for (std::size_t i = 0; i < events.size(); ++i) events[i].timestamp = static_cast<std::int64_t>(i * 7);
    auto build = [](const std::vector<Event>& evs) {
      TemporalSubgraph g(PeriodId{0});
      for (const auto& ev : evs) {
        for (auto& e : event_to_edges(ev)) g.add_edge(e.key.src, e.key.rel, e.key.dst, e.record);
      }
      g.seal();
      return serialize_subgraph(g);
    };
    auto shuffled = events;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(build(events), build(shuffled));
  }
}

TEST(StateFile, RowFormat) {
  ReputationState s{PeriodId{0}, {{NodeId::account("b"), 0.6}}};
  EXPECT_EQ(serialize_state(s), "acct:b\t0.600000000000\n");
}

TEST(StateFile, FuzzedRoundTrip) {
  testing::TempDir dir;
  DataRoot root(dir.path());
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    ReputationState s{PeriodId{i}, {}};
    int n = static_cast<int>(unit(rng) * 30);
    for (int k = 0; k < n; ++k) {
      double v = unit(rng);
      if (k % 7 == 0) v = 0.0;
      if (k % 11 == 0) v = 1.0;
      s.values[NodeId::account("x" + std::to_string(static_cast<int>(unit(rng) * 1000)))] =
          quantize_reputation(v);
    }
    root.save_state(s);
    std::string first = detail::read_file(root.state_path(s.period));
    auto loaded = root.load_state(s.period);
    EXPECT_EQ(loaded, s);
    root.save_state(loaded);
    EXPECT_EQ(detail::read_file(root.state_path(s.period)), first);
  }
}

TEST(StateFile, CorruptInputsRejected) {
  const std::vector<std::string> bad{
      "acct:b\t1.500000000000\n", "acct:b\t-0.100000000000\n", "acct:b\t0.6\n",
      "post:b\t0.600000000000\n", "acct:b 0.600000000000\n",   "acct:b\t0.600000000000",
      "acct:c\t0.100000000000\nacct:b\t0.200000000000\n",
      "acct:b\t0.100000000000\nacct:b\t0.100000000000\n",     "acct:b\tnan\n",
  };
  for (const auto& text : bad) {
    EXPECT_EQ(code_of([&] { parse_state(text, PeriodId{0}); }), ErrorCode::CorruptFile) << text;
  }
  EXPECT_TRUE(parse_state("", PeriodId{0}).values.empty());
}

TEST(StateFile, MissingFileIsMissingState) {
  testing::TempDir dir;
  EXPECT_EQ(code_of([&] { DataRoot(dir.path()).load_state(PeriodId{0}); }), ErrorCode::MissingState);
}

TEST(DataRootListing, SortedPeriodIndices) {
  testing::TempDir dir;
  DataRoot root(dir.path());
  for (int p : {10, -1, 2}) root.save_state(ReputationState{PeriodId{p}, {}});
  testing::write_text(dir.path() / "state" / "notes.txt", "x");
  EXPECT_EQ(root.state_periods(), (std::vector<PeriodId>{PeriodId{-1}, PeriodId{2}, PeriodId{10}}));
  EXPECT_TRUE(root.evidence_periods().empty());
}

TEST(ExportDynamics, Rows) {
  testing::TempDir dir;
  DataRoot root(dir.path());
  NodeId b = NodeId::account("b");
  root.save_state(ReputationState{PeriodId{0}, {{b, 0.5}}});
  root.save_state(ReputationState{PeriodId{1}, {{b, 0.4}}});
  EXPECT_EQ(export_dynamics(root, {b}, PeriodId{0}, PeriodId{1}),
            "period,account,reputation\n0,acct:b,0.500000000000\n1,acct:b,0.400000000000\n");
  EXPECT_EQ(export_dynamics(root, {NodeId::account("ghost"), b, b}, PeriodId{1}, PeriodId{1}),
            "period,account,reputation\n1,acct:b,0.400000000000\n1,acct:ghost,0.500000000000\n");
  EXPECT_EQ(export_dynamics(root, {b}, PeriodId{1}, PeriodId{0}), "period,account,reputation\n");
  EXPECT_EQ(code_of([&] { export_dynamics(root, {b}, PeriodId{0}, PeriodId{2}); }),
            ErrorCode::MissingState);
}

TEST(GraphStorePaging, PersistEvictLoad) {
  testing::TempDir dir;
  DataRoot root(dir.path());
  std::mt19937_64 rng(53);
  GraphStore store(kDefaultPeriodSeconds, 1);
  auto g = random_subgraph(rng, PeriodId{3});
  std::string bytes = serialize_subgraph(g);
  store.restore(g);
  EXPECT_EQ(code_of([&] { store.create_period(PeriodId{4}); }), ErrorCode::ResidencyExceeded);
  root.save_subgraph(store.subgraph(PeriodId{3}));
  store.evict_period(PeriodId{3});
  load_period(store, PeriodId{3}, root);
  EXPECT_EQ(serialize_subgraph(store.subgraph(PeriodId{3})), bytes);
}

TEST(WriteFileAtomic, LeavesNoTempFile) {
  testing::TempDir dir;
  auto path = dir.path() / "nested" / "f.txt";
  detail::write_file_atomic(path, "one");
  detail::write_file_atomic(path, "two");
  EXPECT_EQ(detail::read_file(path), "two");
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(path.parent_path())) ++n;
  EXPECT_EQ(n, 1u);
}

}  // namespace
}  // namespace repgraph
