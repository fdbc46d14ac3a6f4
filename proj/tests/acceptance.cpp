// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "repgraph.hpp"
#include "repgraph/cli.hpp"
#include "test_support.hpp"

using namespace repgraph;
namespace fs = std::filesystem;

namespace {

const fs::path kTestDir = REPGRAPH_TEST_DIR;
const fs::path kSamplesDir = REPGRAPH_SAMPLES_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PeriodId period_of_event(const Event& ev) { return period_of(ev.timestamp); }

void write_events(const fs::path& path, const std::vector<Event>& events) {
  testing::write_text(path, testing::events_to_text(events));
}

// ---------------------------------------------------------------------------

// Incremental runs split the stream at a random period: ingest + update the
// first part, then ingest + update the rest. Batch replays everything from
// genesis in a fresh store. States must match byte for byte.
Outcome incremental_equals_batch(std::size_t& values_checked, bool& all_in_range) {
  Outcome o;
  const int instances = 150;
  std::size_t periods_compared = 0;
  for (int i = 0; i < instances && o.pass; ++i) {
    std::mt19937_64 rng(1000 + i);
    int accounts = std::uniform_int_distribution<int>(2, 20)(rng);
    int periods = std::uniform_int_distribution<int>(1, 10)(rng);
    auto events = testing::random_events(rng, accounts, periods, 200);
    EngineParams params;
    params.alpha = std::array{0.2, 0.2, 0.5, 0.05, 1.0}[i % 5];

    PeriodId lo = period_of_event(events.front()), hi = lo;
    for (const auto& ev : events) {
      lo = std::min(lo, period_of_event(ev));
      hi = std::max(hi, period_of_event(ev));
    }
    PeriodId split{std::uniform_int_distribution<std::int64_t>(lo.day_index, hi.day_index)(rng)};
    std::vector<Event> head, tail;
    for (const auto& ev : events) (period_of_event(ev) <= split ? head : tail).push_back(ev);

    testing::TempDir dir("repgraph-acc1");
    DataRoot root(dir.path() / "root");
    write_events(dir.path() / "head.jsonl", head);
    ingest_file(dir.path() / "head.jsonl", root, params);
    update_range(root, params);
    if (!tail.empty()) {
      write_events(dir.path() / "tail.jsonl", tail);
      ingest_file(dir.path() / "tail.jsonl", root, params);
      update_range(root, params);
    }

    GraphStore store(params.period_seconds, 3);
    ReputationEngine engine(store, params, root);
    auto evidence = root.evidence_periods();
    auto batch = engine.replay_range(evidence.front(), evidence.back());
    o.require(batch.size() == evidence.size(), fmt("instance %d: replay length", i));
    for (const auto& s : batch) {
      std::string on_disk = detail::read_file(root.state_path(s.period));
      o.require(serialize_state(s) == on_disk,
                fmt("instance %d: period %lld differs", i, static_cast<long long>(s.period.day_index)));
      for (const auto& [account, v] : s.values) {
        ++values_checked;
        if (!(v >= 0.0 && v <= 1.0)) all_in_range = false;
      }
      ++periods_compared;
    }
  }
  if (o.pass) o.detail = fmt("%d instances, %zu period states byte-identical", instances, periods_compared);
  return o;
}

// 90-period run with a store capped at 3 resident graphs; the high-water mark
// is sampled after every update.
Outcome memory_contract() {
  Outcome o;
  testing::TempDir dir("repgraph-acc2");
  std::ifstream cfg_in(kSamplesDir / "cohorts.cfg");
  SimOutput sim = generate_events(parse_sim_config(cfg_in));
  write_events(dir.path() / "events.jsonl", sim.events);
  DataRoot root(dir.path() / "root");
  EngineParams params;
  ingest_file(dir.path() / "events.jsonl", root, params);

  GraphStore store(params.period_seconds, 3);
  ReputationEngine engine(store, params, root);
  ReputationState state = ReputationState::genesis(PeriodId{-1});
  std::size_t worst = 0;
  int updates = 0;
  for (PeriodId p{0}; p <= PeriodId{89}; p = p.next()) {
    load_period(store, p, root);
    state = engine.update_period(p, state);
    worst = std::max(worst, store.residency_high_water());
    store.evict_period(p);
    ++updates;
  }
  o.require(updates == 90, "did not run 90 periods");
  o.require(worst <= 3, fmt("high-water %zu", worst));
  if (o.pass) o.detail = fmt("%d updates, max resident graphs %zu (cap 3)", updates, worst);
  return o;
}

Outcome defaults(std::size_t values_checked, bool all_in_range) {
  Outcome o;
  EngineParams params;
  o.require(params.default_reputation == 0.5, "default_reputation");
  ReputationState s{PeriodId{0}, {{NodeId::account("seen"), 0.0}}};
  o.require(get_reputation(s, NodeId::account("unseen"), params) == 0.5, "unseen account");
  o.require(get_reputation(s, NodeId::account("seen"), params) == 0.0, "stored zero");
  {
    testing::TempDir dir("repgraph-acc3");
    DataRoot root(dir.path());
    root.save_state(s);
    auto csv = export_dynamics(root, {NodeId::account("unseen")}, PeriodId{0}, PeriodId{0});
    o.require(csv == "period,account,reputation\n0,acct:unseen,0.500000000000\n", "export default");
  }

  o.require(all_in_range && values_checked > 0, "value outside [0,1]");

  o.require(params.period_seconds == 86400 && GraphStore().period_seconds() == 86400,
            "default period length");
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> ts(-20'000'000'000LL, 20'000'000'000LL);
  for (int i = 0; i < 200000; ++i) {
    std::int64_t t = ts(rng);
    auto expected = static_cast<std::int64_t>(std::floor(static_cast<long double>(t) / 86400.0L));
    if (period_of(t).day_index != expected) {
      o.require(false, fmt("period_of(%lld)", static_cast<long long>(t)));
      break;
    }
  }
  for (std::int64_t t : {0LL, 86399LL, 86400LL, -1LL, -86400LL, -86401LL}) {
    auto expected = static_cast<std::int64_t>(std::floor(static_cast<long double>(t) / 86400.0L));
    o.require(period_of(t).day_index == expected, "period boundary");
  }
  if (o.pass) {
    o.detail = fmt("unseen = 0.5, %zu fuzzed values in [0,1], period = floor(ts/86400)", values_checked);
  }
  return o;
}

struct CohortRun {
  DynamicsReport report;
  std::map<NodeId, std::vector<double>> trajectories;
  double seconds = 0.0;
};

CohortRun run_cohort_scenario() {
  CohortRun run;
  auto t0 = std::chrono::steady_clock::now();
  testing::TempDir dir("repgraph-acc4");
  std::ifstream cfg_in(kSamplesDir / "cohorts.cfg");
  SimOutput sim = generate_events(parse_sim_config(cfg_in));
  write_events(dir.path() / "events.jsonl", sim.events);
  DataRoot root(dir.path() / "root");
  EngineParams params;
  ingest_file(dir.path() / "events.jsonl", root, params);
  update_range(root, params);

  std::vector<NodeId> accounts;
  for (const auto& [account, cohort] : sim.labels) accounts.push_back(account);
  std::string csv = export_dynamics(root, accounts, PeriodId{0}, PeriodId{89}, params);
  run.report = evaluate_dynamics(csv, parse_labels(format_labels(sim)));
  for (PeriodId p{0}; p <= PeriodId{89}; p = p.next()) {
    auto s = root.load_state(p);
    for (const auto& a : accounts) run.trajectories[a].push_back(get_reputation(s, a, params));
  }
  run.seconds = seconds_since(t0);
  return run;
}

Outcome cohort_dynamics(const CohortRun& run) {
  Outcome o;
  const auto& whale = run.report.mean.at("whale");
  const auto& black = run.report.mean.at("blacklist");
  o.require(whale.size() == 90 && black.size() == 90, "expected 90 periods");
  double min_gap = 1.0;
  for (std::size_t p = 35; p < whale.size(); ++p) {
    min_gap = std::min(min_gap, whale[p] - black[p]);
    o.require(whale[p] >= black[p], fmt("whale below blacklist at period %zu", p));
  }
  std::optional<std::size_t> crossed;
  for (std::size_t p = 30; p < black.size(); ++p) {
    if (black[p] < 0.05) {
      crossed = p;
      break;
    }
  }
  o.require(crossed && *crossed <= 29 + 20, "blacklist mean not below 0.05 within 20 periods");
  o.require(run.report.auc && *run.report.auc >= 0.95, "AUC below 0.95");
  o.require(run.seconds < 10.0, fmt("took %.2f s", run.seconds));
  if (o.pass) {
    o.detail = fmt("min whale-blacklist gap (p>=35) %.4f, blacklist < 0.05 at period %zu, AUC %.3f, %.2f s",
                   min_gap, *crossed, *run.report.auc, run.seconds);
  }
  return o;
}

// Exact per-step law on fuzzed streams, then the closed form (1-alpha)^k
// over 20 idle periods for fixed starting values and for the blacklist
// cohort after its endorsements stop.
Outcome decay_law(const CohortRun& run) {
  Outcome o;
  std::size_t steps = 0;
  for (int i = 0; i < 100 && o.pass; ++i) {
    std::mt19937_64 rng(5000 + i);
    EngineParams params;
    params.alpha = std::array{0.2, 0.1, 0.5, 0.9}[i % 4];
    auto events = testing::random_events(rng, 12, 8, 150);
    GraphStore store;
    for (int p = 0; p < 8; ++p) store.create_period(PeriodId{p});
    for (const auto& ev : events) {
      for (auto& e : event_to_edges(ev)) {
        store.add_edge(period_of_event(ev), e.key.src, e.key.rel, e.key.dst, e.record);
      }
    }
    ReputationEngine engine(store, params);
    ReputationState prev = ReputationState::genesis(PeriodId{-1});
    for (int p = 0; p < 8; ++p) {
      store.seal_period(PeriodId{p});
      std::set<NodeId> rated;
      for (const auto& r : derive_ratings(store.subgraph(PeriodId{p}), params).ratings) rated.insert(r.ratee);
      auto next = engine.update_period(PeriodId{p}, prev);
      for (const auto& [account, v] : prev.values) {
        if (rated.contains(account)) continue;
        ++steps;
        o.require(format_reputation(next.values.at(account)) ==
                      format_reputation((1.0 - params.alpha) * v),
                  fmt("instance %d period %d: %s", i, p, account.to_string().c_str()));
      }
      prev = next;
    }
  }

  // States are stored to 12 decimal places, so each step adds up to 5e-13
  // of rounding, damped by (1 - alpha): the accumulated error stays below
  // 5e-13 / alpha. The relative bound is checked while the value keeps at
  // least 9 significant digits at that precision (value >= 1e-3); the
  // absolute bound is checked for every k.
  double worst_rel = 0.0;
  std::size_t rel_checks = 0, abs_checks = 0;
  auto check = [&](double expected, double actual, double alpha, const std::string& what) {
    double err = std::abs(actual - expected);
    ++abs_checks;
    o.require(err <= 5e-13 / alpha + 1e-15, what + fmt(" abs error %.3g", err));
    if (expected >= 1e-3) {
      double rel = err / expected;
      worst_rel = std::max(worst_rel, rel);
      ++rel_checks;
      o.require(rel <= 1e-9, what + fmt(" rel error %.3g", rel));
    }
  };
  for (double alpha : {0.2, 0.1, 0.05, 0.5}) {
    EngineParams params;
    params.alpha = alpha;
    GraphStore store;
    ReputationEngine engine(store, params);
    ReputationState state{PeriodId{0}, {}};
    for (int k = 0; k <= 5; ++k) state.values[NodeId::account("v" + std::to_string(k))] = 0.5 + 0.1 * k;
    const ReputationState start = state;
    for (int k = 1; k <= 90; ++k) {
      store.create_period(PeriodId{k});
      store.seal_period(PeriodId{k});
      state = engine.update_period(PeriodId{k}, state);
      for (const auto& [account, v0] : start.values) {
        check(v0 * std::pow(1.0 - alpha, k), state.values.at(account), alpha,
              fmt("alpha %.2f k %d", alpha, k));
      }
    }
  }
  for (const auto& [account, series] : run.trajectories) {
    if (account.id.rfind("blacklist-", 0) != 0) continue;
    for (int k = 1; 29 + k < static_cast<int>(series.size()); ++k) {
      check(series[29] * std::pow(0.8, k), series[29 + k], 0.2, account.to_string() + fmt(" k %d", k));
    }
  }
  if (o.pass) {
    o.detail = fmt("%zu idle steps exact; closed form: %zu checks within 1e-9 rel (value >= 1e-3, "
                   "max %.2e), %zu within 5e-13/alpha abs (k <= 90)",
                   steps, rel_checks, worst_rel, abs_checks);
  }
  return o;
}

Outcome audit_round_trip() {
  Outcome o;
  testing::TempDir dir("repgraph-acc6");
  DataRoot root(dir.path() / "fuzz");
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 200;
  for (int i = 0; i < n && o.pass; ++i) {
    PeriodId p{i};
    TemporalSubgraph g(p);
    for (auto ev : testing::random_events(rng, 15, 1, 200)) {
      ev.timestamp += p.day_index * kDefaultPeriodSeconds;
      for (auto& e : event_to_edges(ev)) g.add_edge(e.key.src, e.key.rel, e.key.dst, e.record);
    }
    g.seal();
    root.save_subgraph(g);
    std::string first = detail::read_file(root.evidence_path(p));
    root.save_subgraph(root.load_subgraph(p));
    o.require(detail::read_file(root.evidence_path(p)) == first, fmt("subgraph %d", i));

    ReputationState s{p, {}};
    int accounts = static_cast<int>(unit(rng) * 50);
    for (int k = 0; k < accounts; ++k) {
      s.values[NodeId::account("a" + std::to_string(k))] = quantize_reputation(unit(rng));
    }
    root.save_state(s);
    first = detail::read_file(root.state_path(p));
    auto loaded = root.load_state(p);
    root.save_state(loaded);
    o.require(loaded == s && detail::read_file(root.state_path(p)) == first, fmt("state %d", i));
  }

  // ingest -> update -> export on the fixture corpus against frozen files.
  auto data = dir.path() / "fixture";
  auto params = (kTestDir / "fixtures" / "params.cfg").string();
  auto csv = dir.path() / "dynamics.csv";
  auto cli_run = [](std::vector<std::string> args) {
    args.insert(args.begin(), "repgraph");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  o.require(cli_run({"ingest", "--data", data.string(), "--input",
                     (kTestDir / "fixtures" / "corpus.jsonl").string(), "--params", params}) == 0,
            "fixture ingest");
  o.require(cli_run({"update", "--data", data.string(), "--params", params}) == 0, "fixture update");
  o.require(cli_run({"export", "--data", data.string(), "--accounts",
                     (kTestDir / "fixtures" / "accounts.txt").string(), "--from", "0", "--to", "3",
                     "--out", csv.string(), "--params", params}) == 0,
            "fixture export");
  std::size_t golden_files = 0;
  if (o.pass) {
    const fs::path golden = kTestDir / "golden";
    o.require(detail::read_file(csv) == detail::read_file(golden / "dynamics.csv"), "dynamics.csv");
    ++golden_files;
    for (const char* sub : {"evidence", "state"}) {
      for (const auto& entry : fs::directory_iterator(golden / sub)) {
        auto mine = data / sub / entry.path().filename();
        o.require(fs::exists(mine) && detail::read_file(mine) == detail::read_file(entry.path()),
                  std::string(sub) + "/" + entry.path().filename().string());
        ++golden_files;
      }
      o.require(DataRoot(data).evidence_periods().size() == 4 && DataRoot(data).state_periods().size() == 4,
                "unexpected extra periods");
    }
  }
  if (o.pass) {
    o.detail = fmt("%d subgraphs + %d states byte-identical; %zu golden files match", n, n, golden_files);
  }
  return o;
}

Outcome throughput() {
  Outcome o;
  testing::TempDir dir("repgraph-acc7");
  SimConfig cfg;
  cfg.seed = 77;
  cfg.n_periods = 90;
  cfg.rater_pool_size = 2000;
  cfg.cohorts.push_back({.name = "steady", .size = 300, .inbound_rate = 3.0, .active_from = 0, .active_to = 89});
  cfg.cohorts.push_back({.name = "early", .size = 100, .inbound_rate = 3.0, .active_from = 0, .active_to = 44});
  SimOutput sim = generate_events(cfg);
  write_events(dir.path() / "events.jsonl", sim.events);

  DataRoot root(dir.path() / "root");
  EngineParams params;
  auto t0 = std::chrono::steady_clock::now();
  IngestReport ingested = ingest_file(dir.path() / "events.jsonl", root, params);
  double t_ingest = seconds_since(t0);
  UpdateReport updated = update_range(root, params);
  double total = seconds_since(t0);

  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);

  o.require(ingested.events >= 100000, fmt("only %zu events", ingested.events));
  o.require(updated.updated.size() == 90, "expected 90 updated periods");
  o.require(total < 10.0, fmt("took %.2f s", total));
  o.require(ingested.peak_resident <= 1, fmt("ingest held %zu subgraphs", ingested.peak_resident));
  o.require(updated.peak_resident <= 3, fmt("update held %zu graphs", updated.peak_resident));
  if (o.pass) {
    o.detail = fmt("%zu events / 90 periods: ingest %.2f s + update %.2f s = %.2f s; "
                   "resident graphs ingest %zu, update %zu; max RSS %ld MiB",
                   ingested.events, t_ingest, total - t_ingest, total, ingested.peak_resident,
                   updated.peak_resident, usage.ru_maxrss / 1024);
  }
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  std::size_t values_checked = 0;
  bool all_in_range = true;
  CohortRun cohort_run;
  bool cohort_ok = true;
  try {
    cohort_run = run_cohort_scenario();
  } catch (const std::exception& e) {
    cohort_ok = false;
    std::printf("cohort scenario failed to run: %s\n", e.what());
  }

  report(1, "incremental == batch", [&] { return incremental_equals_batch(values_checked, all_in_range); });
  report(2, "memory contract", memory_contract);
  report(3, "defaults", [&] { return defaults(values_checked, all_in_range); });
  report(4, "cohort dynamics", [&] {
    if (!cohort_ok) return Outcome{false, "scenario did not run"};
    return cohort_dynamics(cohort_run);
  });
  report(5, "decay law", [&] {
    if (!cohort_ok) return Outcome{false, "scenario did not run"};
    return decay_law(cohort_run);
  });
  report(6, "audit round-trip", audit_round_trip);
  report(7, "desk-scale throughput", throughput);

  std::printf("%d of 7 criteria passed\n", 7 - failures);
  return failures == 0 ? 0 : 1;
}
