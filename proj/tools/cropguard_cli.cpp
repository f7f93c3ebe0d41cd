// cropguard: plan sensor layouts, calibrate the radio model, run intrusion
// simulations and print the reference tables.
//
// Exit codes: 0 success, 1 domain failure, 2 usage or configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "cropguard/config.hpp"
#include "cropguard/engine.hpp"
#include "cropguard/errors.hpp"
#include "cropguard/geometry.hpp"
#include "cropguard/radio.hpp"
#include "cropguard/report.hpp"

namespace fs = std::filesystem;
using namespace cropguard;

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;
constexpr std::uint64_t kDefaultSeed = 42;

enum class LogLevel { Quiet, Info, Debug };

LogLevel log_level() {
  const char* env = std::getenv("SENTINEL_LOG");
  if (env == nullptr) return LogLevel::Info;
  const std::string v(env);
  if (v == "quiet" || v == "0" || v == "error") return LogLevel::Quiet;
  if (v == "debug" || v == "2" || v == "trace") return LogLevel::Debug;
  return LogLevel::Info;
}

template <typename... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() >= LogLevel::Info) fmt::print(stderr, "{}\n", fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void debug(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() >= LogLevel::Debug) fmt::print(stderr, "debug: {}\n", fmt::format(f, std::forward<Args>(args)...));
}

// Writes to `path`, or stdout when empty or "-".
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
  write(out);
}

int cmd_plan(const std::string& config_path, const std::string& strategy, const std::string& out_path) {
  auto scenario = load_scenario(config_path);
  if (!strategy.empty()) scenario.strategy = parse_placement_strategy(strategy);
  if (scenario.strategy == PlacementStrategy::Explicit) {
    throw ConfigError("plan needs --strategy grid or perimeter");
  }
  scenario.field.validate();

  const auto placement = resolve_placement(scenario);
  if (scenario.max_sensors > 0 && static_cast<int>(placement.size()) > scenario.max_sensors) {
    fmt::print(stderr, "cannot cover the field: {} sensors needed, max_sensors = {}\n", placement.size(),
               scenario.max_sensors);
    return kDomainFailure;
  }
  if (scenario.strategy == PlacementStrategy::Grid) {
    const double covered = coverage_fraction(placement, scenario.field, 0.5);
    if (covered < 1.0) {
      fmt::print(stderr, "grid placement leaves {:.2f}% uncovered\n", 100.0 * (1.0 - covered));
      return kDomainFailure;
    }
  }
  emit(out_path, [&](std::ostream& out) { write_placement_csv(out, placement); });
  fmt::print("sensors: {}\n", placement.size());
  fmt::print("estimated cost: {:.2f}\n", sensor_count_cost(placement, scenario.sensor_unit_cost));
  return kOk;
}

int cmd_calibrate(const std::string& csv_path, const std::string& out_path) {
  std::vector<RssiSample> corpus;
  if (csv_path.empty()) {
    info("no measurements given, using the bundled reference corpus");
    corpus = reference_rssi_corpus();
  } else {
    std::ifstream in(csv_path);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", csv_path));
    corpus = read_rssi_csv(in);
  }
  PathLossModel model;
  try {
    model = fit_pathloss(corpus);
  } catch (const DegenerateFit& e) {
    fmt::print(stderr, "calibration failed: {}\n", e.what());
    return kDomainFailure;
  }
  const auto rows = rssi_comparison(model, corpus);
  emit(out_path, [&](std::ostream& out) { write_pathloss_config(out, model); });
  fmt::print("exponent n: {:.4f}\n", model.exponent_n);
  fmt::print("ref rssi @10m: {:.4f} dBm\n", model.ref_rssi_dbm);
  fmt::print("max residual: {:.4f} dB\n", max_abs_residual(rows));
  return kOk;
}

int cmd_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  auto scenario = load_scenario(scenario_path);
  if (seed) {
    scenario.seed = *seed;
    info("seed={}", scenario.seed);
  } else {
    info("seed={} (from scenario or default {})", scenario.seed, kDefaultSeed);
  }

  const auto findings = validate(scenario);
  for (const auto& f : findings) {
    fmt::print(stderr, "{}: [{}] {}\n", to_string(f.severity), f.code, f.message);
  }
  if (has_errors(findings)) return kDomainFailure;

  const auto result = run(scenario);
  debug("{} events executed", result.events.size());

  const fs::path dir(out_dir.empty() ? "." : out_dir);
  fs::create_directories(dir);
  emit((dir / "events.csv").string(), [&](std::ostream& out) { write_event_log_csv(out, result.events); });
  emit((dir / "metrics.json").string(), [&](std::ostream& out) { out << metrics_json(result.metrics) << '\n'; });
  emit((dir / "sms.csv").string(), [&](std::ostream& out) { write_sms_csv(out, result.sms_log); });
  emit((dir / "energy.csv").string(), [&](std::ostream& out) { write_energy_csv(out, result.energy); });
  emit((dir / "tree.json").string(), [&](std::ostream& out) { write_tree_json(out, result.tree); });

  const auto summary = run_summary(result);
  emit((dir / "summary.json").string(), [&](std::ostream& out) { out << summary_json(summary) << '\n'; });
  std::cout << summary.text;
  return kOk;
}

int cmd_tables(int which, const std::string& out_path) {
  switch (which) {
    case 2:
      emit(out_path, [](std::ostream& out) { write_table2_csv(out, table2_replica(reference_latency_table())); });
      return kOk;
    case 3:
      emit(out_path, [](std::ostream& out) {
        write_rssi_comparison_csv(out, rssi_comparison(calibrated_pathloss()));
      });
      return kOk;
    case 4:
      emit(out_path, [](std::ostream& out) {
        write_table4_csv(out, table4_replica(reference_throughput_steps()));
      });
      return kOk;
    default:
      fmt::print(stderr, "unknown table {}; expected 2, 3 or 4\n", which);
      return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cropguard: wireless crop-protection network simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string strategy;
  std::string out_path;
  auto* plan = app.add_subcommand("plan", "Plan a sensor placement and print its size and cost");
  plan->add_option("config", config_path, "Scenario file with [field] and [placement]")->required();
  plan->add_option("--strategy", strategy, "grid or perimeter (overrides the config)")
      ->check(CLI::IsMember({"grid", "perimeter"}));
  plan->add_option("--out", out_path, "Placement CSV (stdout when omitted)");

  std::string csv_path;
  auto* calibrate = app.add_subcommand("calibrate", "Fit the path-loss model to RSSI measurements");
  calibrate->add_option("measurements", csv_path, "CSV distance_m,bytes,hops,rssi_dbm (bundled corpus when omitted)");
  calibrate->add_option("--out", out_path, "Model file in scenario format (stdout when omitted)");

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run an intrusion scenario");
  simulate->add_option("scenario", scenario_path, "Scenario file")->required();
  simulate->add_option("--seed", seed, "Random seed (scenario's [sim] seed, else 42, when omitted)");
  simulate->add_option("--out", out_dir, "Output directory")->default_val(".");

  int which = 0;
  auto* tables = app.add_subcommand("tables", "Emit a reference table replica as CSV");
  tables->add_option("--which", which, "2 latency, 3 RSSI fit, 4 throughput")->required();
  tables->add_option("--out", out_path, "CSV path (stdout when omitted)");

  auto* figures = app.add_subcommand("figures", "Write gnuplot data for the latency, RSSI and throughput curves");
  figures->add_option("--out", out_dir, "Output directory")->default_val(".");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*plan) return cmd_plan(config_path, strategy, out_path);
    if (*calibrate) return cmd_calibrate(csv_path, out_path);
    if (*simulate) return cmd_simulate(scenario_path, seed, out_dir);
    if (*tables) return cmd_tables(which, out_path);
    if (*figures) {
      write_figure_data(out_dir, RadioModels{});
      return kOk;
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kUsage;
  } catch (const InvalidArgument& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return kUsage;
  } catch (const ScenarioInvalid& e) {
    fmt::print(stderr, "{}\n", e.what());
    return kDomainFailure;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kDomainFailure;
  }
  return kUsage;
}
