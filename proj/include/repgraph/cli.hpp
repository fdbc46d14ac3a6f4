#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data or
// validation error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "repgraph/engine.hpp"
#include "repgraph/error.hpp"
#include "repgraph/params.hpp"
#include "repgraph/persistence.hpp"
#include "repgraph/pipeline.hpp"
#include "repgraph/simulator.hpp"

namespace repgraph::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

inline EngineParams params_or_default(const std::string& path) {
  return path.empty() ? EngineParams{} : load_params(path);
}

inline std::vector<NodeId> read_accounts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<NodeId> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable_line(line)) continue;
    auto account = NodeId::parse(repgraph::detail::trim(line));
    if (!account || !account->is_account()) {
      throw Error(ErrorCode::ValidationError, path + ":" + std::to_string(line_no) + ": bad account");
    }
    out.push_back(*account);
  }
  return out;
}

inline void write_output(const std::string& path, std::string_view content) {
  repgraph::detail::write_file_atomic(std::filesystem::absolute(path), content);
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Incremental reputation engine over a period-partitioned graph store", "repgraph"};
  app.require_subcommand(1);

  std::string data, input, params_path, account, accounts_path, out_path, config_path,
      dynamics_path, labels_path, labels_out, positive, negative;
  std::optional<std::int64_t> from, to;
  std::int64_t period = 0;

  auto* ingest = app.add_subcommand("ingest", "Parse events into sealed per-period evidence");
  ingest->add_option("--data", data, "Data root directory")->required();
  ingest->add_option("--input", input, "Line-delimited JSON event file")->required();
  ingest->add_option("--params", params_path, "Engine parameters (for the currency table)");

  auto* update = app.add_subcommand("update", "Compute reputation states period by period");
  update->add_option("--data", data, "Data root directory")->required();
  update->add_option("--params", params_path, "Engine parameters file")->required();
  update->add_option("--from", from, "First period (default: after last saved state)");
  update->add_option("--to", to, "Last period (default: last evidence period)");

  auto* query = app.add_subcommand("query", "Print one account's reputation at a period");
  query->add_option("--data", data, "Data root directory")->required();
  query->add_option("--account", account, "Account id, e.g. acct:alice")->required();
  query->add_option("--period", period, "Period (day index)")->required();
  query->add_option("--params", params_path, "Engine parameters (for the default reputation)");

  auto* exporter = app.add_subcommand("export", "Write reputation dynamics as CSV");
  exporter->add_option("--data", data, "Data root directory")->required();
  exporter->add_option("--accounts", accounts_path, "File with one account per line")->required();
  exporter->add_option("--from", from, "First period")->required();
  exporter->add_option("--to", to, "Last period")->required();
  exporter->add_option("--out", out_path, "Output CSV")->required();
  exporter->add_option("--params", params_path, "Engine parameters (for the default reputation)");

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic cohort event stream");
  simulate->add_option("--config", config_path, "Simulation config")->required();
  simulate->add_option("--out", out_path, "Output event file")->required();
  simulate->add_option("--labels", labels_out, "Also write account<TAB>cohort labels here");

  auto* eval = app.add_subcommand("eval", "Score cohort dynamics");
  eval->add_option("--dynamics", dynamics_path, "CSV from export")->required();
  eval->add_option("--labels", labels_path, "account<TAB>cohort file")->required();
  eval->add_option("--positive", positive, "Cohort expected to rank high (default: first)");
  eval->add_option("--negative", negative, "Cohort expected to rank low (default: second)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      EngineParams params = detail::params_or_default(params_path);
      DataRoot root(data);
      DataRootLock lock(root.path());
      IngestReport report = ingest_file(input, root, params);
      for (const auto& p : report.periods) {
        out << "period " << p.period.day_index << ": events " << p.events << ", dangling "
            << p.diagnostics.dangling << ", self_pairs " << p.diagnostics.self_pairs << "\n";
      }
      out << "events: " << report.events << "\n";
    } else if (update->parsed()) {
      EngineParams params = load_params(params_path);
      DataRoot root(data);
      DataRootLock lock(root.path());
      std::optional<PeriodId> first, last;
      if (from) first = PeriodId{*from};
      if (to) last = PeriodId{*to};
      UpdateReport report = update_range(root, params, first, last);
      if (report.updated.empty()) {
        out << "up to date\n";
      } else {
        out << "updated periods " << report.updated.front().day_index << ".."
            << report.updated.back().day_index << " (" << report.updated.size() << ")\n";
      }
    } else if (query->parsed()) {
      EngineParams params = detail::params_or_default(params_path);
      auto id = NodeId::parse(account);
      if (!id || !id->is_account()) {
        err << "error: --account must look like acct:<id>\n";
        return kExitUsage;
      }
      ReputationState s = DataRoot(data).load_state(PeriodId{period});
      out << format_reputation(get_reputation(s, *id, params)) << "\n";
    } else if (exporter->parsed()) {
      EngineParams params = detail::params_or_default(params_path);
      auto accounts = detail::read_accounts(accounts_path);
      std::string csv = export_dynamics(DataRoot(data), accounts, PeriodId{*from}, PeriodId{*to}, params);
      detail::write_output(out_path, csv);
    } else if (simulate->parsed()) {
      std::ifstream in(config_path);
      if (!in) throw Error(ErrorCode::IoError, "cannot open " + config_path);
      SimOutput sim = generate_events(parse_sim_config(in));
      detail::write_output(out_path, format_events(sim));
      if (!labels_out.empty()) detail::write_output(labels_out, format_labels(sim));
      out << "events: " << sim.events.size() << "\n";
    } else if (eval->parsed()) {
      CohortLabels labels = parse_labels(repgraph::detail::read_file(labels_path));
      std::string csv = repgraph::detail::read_file(dynamics_path);
      auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional(s); };
      out << format_report(evaluate_dynamics(csv, labels, opt(positive), opt(negative)));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: IoError: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace repgraph::cli
