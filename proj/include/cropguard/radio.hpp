#pragma once

#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace cropguard {

using Rng = std::mt19937_64;

/// Measured end-to-end delivery times indexed by hop count and payload size.
///
/// Rows are hop counts 1..N, columns are the payload anchors in `byte_anchors`.
/// Between payload anchors the time is interpolated linearly at fixed hops; below
/// the first anchor it is clamped, above the last it follows the last segment's
/// slope. Beyond the last measured hop count every extra hop adds the increment
/// between the last two hop rows (evaluated at the requested payload).
struct LatencyTable {
  std::vector<int> byte_anchors;
  std::vector<std::vector<double>> seconds;  // [hops - 1][byte anchor index]

  /// Throws InvalidArgument if the table is not strictly increasing in both axes.
  void validate() const;
  [[nodiscard]] int max_hops() const { return static_cast<int>(seconds.size()); }
};

/// 1..3 hops at 10, 50 and 100 bytes, as measured on the reference tree.
[[nodiscard]] LatencyTable reference_latency_table();

[[nodiscard]] double hop_latency_total(int bytes, int hops, const LatencyTable& table);

/// Log-distance path loss referenced to 10 m.
struct PathLossModel {
  static constexpr double kReferenceDistance = 10.0;

  double ref_rssi_dbm = -65.56;
  double exponent_n = 3.896;
  double noise_sigma_db = 2.5;
  double max_link_range_m = 800.0;

  void validate() const;
};

/// Deterministic RSSI. Throws InvalidArgument for distance <= 0 and
/// LinkOutOfRange beyond max_link_range_m.
[[nodiscard]] double rssi_at(double distance_m, const PathLossModel& model);
/// Same, plus zero-mean Gaussian shadowing drawn from `rng`.
[[nodiscard]] double rssi_at(double distance_m, const PathLossModel& model, Rng& rng);

struct RssiSample {
  double distance_m = 0.0;
  double rssi_dbm = 0.0;
  int bytes = 0;
  int hops = 0;
};

/// Least-squares fit of ref_rssi_dbm and exponent_n over log10(d / 10 m).
/// Other fields keep their defaults. Throws DegenerateFit if fewer than two
/// distinct distances are present.
[[nodiscard]] PathLossModel fit_pathloss(const std::vector<RssiSample>& samples);

/// The nine reference RSSI measurements (10/20/30 m at 10/50/100 bytes).
[[nodiscard]] std::vector<RssiSample> reference_rssi_corpus();

/// Reference corpus fit; the default model used by scenarios.
[[nodiscard]] PathLossModel calibrated_pathloss();

/// CSV `distance_m,bytes,hops,rssi_dbm`.
[[nodiscard]] std::vector<RssiSample> read_rssi_csv(std::istream& in);
void write_rssi_csv(std::ostream& out, const std::vector<RssiSample>& samples);

/// Throughput as a step function of RSSI. A reading strictly stronger than a
/// band's `above_dbm` gets that band's rate; the first matching band wins and
/// anything weaker than every band gets `floor_bps`.
struct ThroughputSteps {
  struct Band {
    double above_dbm;
    int bits_per_sec;
  };
  std::vector<Band> bands;  // strongest first
  int floor_bps = 20000;
};

[[nodiscard]] ThroughputSteps reference_throughput_steps();
[[nodiscard]] int throughput_for(double rssi_dbm, const ThroughputSteps& steps);

struct LinkPolicy {
  double disconnect_threshold_dbm = -90.0;
};

/// Inclusive at the threshold.
[[nodiscard]] inline bool link_viable(double rssi_dbm, const LinkPolicy& policy) {
  return rssi_dbm >= policy.disconnect_threshold_dbm;
}

/// Everything the network layer needs to evaluate a link or a path.
struct RadioModels {
  LatencyTable latency = reference_latency_table();
  PathLossModel pathloss = calibrated_pathloss();
  ThroughputSteps throughput = reference_throughput_steps();
  LinkPolicy policy{};
  bool stochastic_rssi = false;
};

}  // namespace cropguard
