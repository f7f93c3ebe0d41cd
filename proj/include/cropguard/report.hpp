#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cropguard/engine.hpp"
#include "cropguard/radio.hpp"

namespace cropguard {

/// Spacing between neighbouring nodes on the reference chain.
inline constexpr double kReferenceNodeSpacing = 10.0;

struct LatencyRow {
  double distance_m;
  int bytes;
  int hops;
  double seconds;
};

/// One row per (hops, payload anchor); distance is hops * 10 m.
[[nodiscard]] std::vector<LatencyRow> table2_replica(const LatencyTable& table);
void write_table2_csv(std::ostream& out, const std::vector<LatencyRow>& rows);

struct ThroughputRow {
  std::string band;
  int hops;
  int bits_per_sec;
};

/// Six bands from "< -50" (stronger than -50 dBm) to "> -80" (weaker than -80 dBm),
/// each evaluated through throughput_for at a representative reading.
[[nodiscard]] std::vector<ThroughputRow> table4_replica(const ThroughputSteps& steps);
void write_table4_csv(std::ostream& out, const std::vector<ThroughputRow>& rows);

struct RssiComparisonRow {
  double distance_m;
  double measured_mean_dbm;
  double predicted_dbm;
  double residual_db;  // measured - predicted
};

/// Per-distance measured means against the model's deterministic prediction.
[[nodiscard]] std::vector<RssiComparisonRow> rssi_comparison(
    const PathLossModel& model, const std::vector<RssiSample>& corpus = reference_rssi_corpus());
[[nodiscard]] double max_abs_residual(const std::vector<RssiComparisonRow>& rows);
void write_rssi_comparison_csv(std::ostream& out, const std::vector<RssiComparisonRow>& rows);

struct RunSummary {
  std::optional<double> protection_rate;  // repelled / intrusions; empty when no intrusions
  Metrics metrics;
  double total_consumed_mah = 0.0;
  std::vector<NodeEnergy> energy;
  std::string text;
};

[[nodiscard]] RunSummary run_summary(const SimResult& result);
[[nodiscard]] std::string summary_json(const RunSummary& summary);
[[nodiscard]] std::string metrics_json(const Metrics& metrics);

/// Gnuplot-friendly whitespace-separated data for the latency, RSSI and
/// throughput curves. Writes latency.dat, rssi.dat and throughput.dat into `dir`.
void write_figure_data(const std::filesystem::path& dir, const RadioModels& models);

}  // namespace cropguard
