#include "cropguard/radio.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cropguard/errors.hpp"

namespace cropguard {

void LatencyTable::validate() const {
  if (byte_anchors.size() < 2 || seconds.size() < 2) {
    throw InvalidArgument("latency table needs at least two payload anchors and two hop rows");
  }
  for (std::size_t b = 1; b < byte_anchors.size(); ++b) {
    if (byte_anchors[b] <= byte_anchors[b - 1]) {
      throw InvalidArgument("latency payload anchors must be strictly increasing");
    }
  }
  for (std::size_t h = 0; h < seconds.size(); ++h) {
    if (seconds[h].size() != byte_anchors.size()) {
      throw InvalidArgument(fmt::format("latency row {} has {} entries, expected {}", h + 1,
                                        seconds[h].size(), byte_anchors.size()));
    }
    for (std::size_t b = 0; b < seconds[h].size(); ++b) {
      if (!(seconds[h][b] > 0.0)) throw InvalidArgument("latency anchors must be positive");
      if (b > 0 && !(seconds[h][b] > seconds[h][b - 1])) {
        throw InvalidArgument("latency must increase with payload at fixed hops");
      }
      if (h > 0 && !(seconds[h][b] > seconds[h - 1][b])) {
        throw InvalidArgument("latency must increase with hops at fixed payload");
      }
    }
  }
}

LatencyTable reference_latency_table() {
  // The 1-hop small-payload row is printed as 1 byte in the source table; the
  // surrounding rows are 10 bytes and it is treated as such.
  return LatencyTable{
      .byte_anchors = {10, 50, 100},
      .seconds = {{0.048, 0.090, 0.114}, {0.082, 0.120, 0.200}, {0.115, 0.224, 0.411}},
  };
}

namespace {

double row_at(const LatencyTable& table, std::size_t row, int bytes) {
  const auto& anchors = table.byte_anchors;
  const auto& times = table.seconds[row];
  if (bytes <= anchors.front()) return times.front();

  const auto it = std::lower_bound(anchors.begin(), anchors.end(), bytes);
  if (it != anchors.end() && *it == bytes) {
    return times[static_cast<std::size_t>(it - anchors.begin())];
  }
  // Past the last anchor the last segment is reused.
  const std::size_t hi =
      it == anchors.end() ? anchors.size() - 1 : static_cast<std::size_t>(it - anchors.begin());
  const std::size_t lo = hi - 1;
  const double slope = (times[hi] - times[lo]) / (anchors[hi] - anchors[lo]);
  return times[lo] + slope * (bytes - anchors[lo]);
}

}  // namespace

double hop_latency_total(int bytes, int hops, const LatencyTable& table) {
  if (bytes < 1) throw InvalidArgument(fmt::format("payload must be >= 1 byte, got {}", bytes));
  if (hops < 1) throw InvalidArgument(fmt::format("hop count must be >= 1, got {}", hops));
  if (table.seconds.size() < 2) throw InvalidArgument("latency table needs two hop rows");

  const int measured = table.max_hops();
  if (hops <= measured) return row_at(table, static_cast<std::size_t>(hops - 1), bytes);

  const auto last = static_cast<std::size_t>(measured - 1);
  const double top = row_at(table, last, bytes);
  const double increment = top - row_at(table, last - 1, bytes);
  return top + increment * (hops - measured);
}

void PathLossModel::validate() const {
  if (!(exponent_n > 0.0)) throw InvalidArgument("path-loss exponent must be positive");
  if (!(max_link_range_m > 0.0)) throw InvalidArgument("max link range must be positive");
  if (!(noise_sigma_db >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
}

double rssi_at(double distance_m, const PathLossModel& model) {
  if (!(distance_m > 0.0)) {
    throw InvalidArgument(fmt::format("link distance must be positive, got {}", distance_m));
  }
  if (distance_m > model.max_link_range_m) {
    throw LinkOutOfRange(fmt::format("link distance {:.1f} m exceeds max range {:.1f} m",
                                     distance_m, model.max_link_range_m));
  }
  return model.ref_rssi_dbm -
         10.0 * model.exponent_n * std::log10(distance_m / PathLossModel::kReferenceDistance);
}

double rssi_at(double distance_m, const PathLossModel& model, Rng& rng) {
  const double mean = rssi_at(distance_m, model);
  if (model.noise_sigma_db == 0.0) return mean;
  std::normal_distribution<double> shadowing(0.0, model.noise_sigma_db);
  return mean + shadowing(rng);
}

PathLossModel fit_pathloss(const std::vector<RssiSample>& samples) {
  if (samples.empty()) throw DegenerateFit("no calibration samples");

  const auto n = static_cast<double>(samples.size());
  double sum_x = 0.0;
  double sum_y = 0.0;
  for (const auto& s : samples) {
    if (!(s.distance_m > 0.0)) {
      throw InvalidArgument(fmt::format("calibration distance must be positive, got {}", s.distance_m));
    }
    sum_x += std::log10(s.distance_m / PathLossModel::kReferenceDistance);
    sum_y += s.rssi_dbm;
  }
  const double mean_x = sum_x / n;
  const double mean_y = sum_y / n;

  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& s : samples) {
    const double dx = std::log10(s.distance_m / PathLossModel::kReferenceDistance) - mean_x;
    sxx += dx * dx;
    sxy += dx * (s.rssi_dbm - mean_y);
  }
  if (sxx <= 1e-15) {
    throw DegenerateFit("calibration needs at least two distinct distances");
  }
  const double slope = sxy / sxx;

  PathLossModel model;
  model.ref_rssi_dbm = mean_y - slope * mean_x;
  model.exponent_n = -slope / 10.0;
  return model;
}

std::vector<RssiSample> reference_rssi_corpus() {
  return {
      {10, -67, 10, 1},  {10, -68, 50, 1},  {10, -62, 100, 1},
      {20, -77, 10, 2},  {20, -79, 50, 2},  {20, -75, 100, 2},
      {30, -82, 10, 3},  {30, -85, 50, 3},  {30, -86, 100, 3},
  };
}

PathLossModel calibrated_pathloss() {
  static const PathLossModel model = fit_pathloss(reference_rssi_corpus());
  return model;
}

std::vector<RssiSample> read_rssi_csv(std::istream& in) {
  std::vector<RssiSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line_no == 1 && line.rfind("distance_m", 0) == 0) continue;

    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) {
      throw ConfigError(fmt::format("line {}: expected 4 columns, got {}", line_no, cells.size()));
    }
    try {
      samples.push_back({.distance_m = std::stod(cells[0]),
                         .rssi_dbm = std::stod(cells[3]),
                         .bytes = std::stoi(cells[1]),
                         .hops = std::stoi(cells[2])});
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("line {}: malformed number", line_no));
    }
  }
  return samples;
}

void write_rssi_csv(std::ostream& out, const std::vector<RssiSample>& samples) {
  out << "distance_m,bytes,hops,rssi_dbm\n";
  for (const auto& s : samples) {
    fmt::print(out, "{},{},{},{}\n", s.distance_m, s.bytes, s.hops, s.rssi_dbm);
  }
}

ThroughputSteps reference_throughput_steps() {
  return ThroughputSteps{
      .bands = {{-50.0, 40000}, {-60.0, 35000}, {-70.0, 28000}, {-80.0, 25000}},
      .floor_bps = 20000,
  };
}

int throughput_for(double rssi_dbm, const ThroughputSteps& steps) {
  for (const auto& band : steps.bands) {
    if (rssi_dbm > band.above_dbm) return band.bits_per_sec;
  }
  return steps.floor_bps;
}

}  // namespace cropguard
