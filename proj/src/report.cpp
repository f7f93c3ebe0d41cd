#include "cropguard/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cropguard/errors.hpp"
#include "json.hpp"

namespace cropguard {

std::vector<LatencyRow> table2_replica(const LatencyTable& table) {
  table.validate();
  std::vector<LatencyRow> rows;
  for (int hops = 1; hops <= table.max_hops(); ++hops) {
    for (int bytes : table.byte_anchors) {
      rows.push_back({.distance_m = hops * kReferenceNodeSpacing,
                      .bytes = bytes,
                      .hops = hops,
                      .seconds = hop_latency_total(bytes, hops, table)});
    }
  }
  return rows;
}

void write_table2_csv(std::ostream& out, const std::vector<LatencyRow>& rows) {
  out << "distance_m,bytes,hops,seconds\n";
  for (const auto& r : rows) fmt::print(out, "{:.0f},{},{},{:.3f}\n", r.distance_m, r.bytes, r.hops, r.seconds);
}

std::vector<ThroughputRow> table4_replica(const ThroughputSteps& steps) {
  struct Band {
    const char* label;
    double probe_dbm;
  };
  static constexpr Band kBands[] = {
      {"< -50", -45.0}, {"-50", -50.0}, {"-60", -60.0}, {"-70", -70.0}, {"-80", -80.0}, {"> -80", -85.0},
  };
  std::vector<ThroughputRow> rows;
  for (const auto& band : kBands) rows.push_back({band.label, 1, throughput_for(band.probe_dbm, steps)});
  return rows;
}

void write_table4_csv(std::ostream& out, const std::vector<ThroughputRow>& rows) {
  out << "rssi_dbm,hops,throughput_bps\n";
  for (const auto& r : rows) fmt::print(out, "{},{},{}\n", r.band, r.hops, r.bits_per_sec);
}

std::vector<RssiComparisonRow> rssi_comparison(const PathLossModel& model,
                                               const std::vector<RssiSample>& corpus) {
  std::map<double, std::pair<double, int>> by_distance;
  for (const auto& s : corpus) {
    auto& [sum, count] = by_distance[s.distance_m];
    sum += s.rssi_dbm;
    ++count;
  }
  std::vector<RssiComparisonRow> rows;
  for (const auto& [d, acc] : by_distance) {
    const double mean = acc.first / acc.second;
    const double predicted = rssi_at(d, model);
    rows.push_back({d, mean, predicted, mean - predicted});
  }
  return rows;
}

double max_abs_residual(const std::vector<RssiComparisonRow>& rows) {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(r.residual_db));
  return worst;
}

void write_rssi_comparison_csv(std::ostream& out, const std::vector<RssiComparisonRow>& rows) {
  out << "distance_m,measured_mean_dbm,predicted_dbm,residual_db\n";
  for (const auto& r : rows) {
    fmt::print(out, "{:.0f},{:.2f},{:.2f},{:.2f}\n", r.distance_m, r.measured_mean_dbm, r.predicted_dbm,
               r.residual_db);
  }
}

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["intrusions"] = m.intrusions;
  j["detections"] = m.detections;
  j["delivered"] = m.delivered;
  j["repelled"] = m.repelled;
  j["reached_core"] = m.reached_core;
  j["still_active"] = m.still_active;
  j["repeller_activations"] = m.repeller_activations;
  j["mean_repel_latency_s"] = optional_number(m.mean_repel_latency_s);
  j["max_repel_latency_s"] = optional_number(m.max_repel_latency_s);
  j["sms_sent"] = m.sms_sent;
  j["sms_suppressed"] = m.sms_suppressed;
  return j;
}

}  // namespace

RunSummary run_summary(const SimResult& result) {
  RunSummary s;
  s.metrics = result.metrics;
  s.energy = result.energy;
  const auto& m = result.metrics;
  if (m.intrusions > 0) s.protection_rate = static_cast<double>(m.repelled) / m.intrusions;
  for (const auto& e : result.energy) s.total_consumed_mah += e.consumed_mah;

  auto fmt_opt = [](const std::optional<double>& v, const char* spec) -> std::string {
    return v ? fmt::format(fmt::runtime(spec), *v) : std::string("n/a");
  };
  std::string text;
  text += fmt::format("intrusions       {}\n", m.intrusions);
  text += fmt::format("  repelled       {}\n", m.repelled);
  text += fmt::format("  reached core   {}\n", m.reached_core);
  text += fmt::format("  still active   {}\n", m.still_active);
  text += fmt::format("protection rate  {}\n", fmt_opt(s.protection_rate, "{:.3f}"));
  text += fmt::format("detections       {} ({} delivered)\n", m.detections, m.delivered);
  text += fmt::format("repel latency    mean {} s, max {} s\n", fmt_opt(m.mean_repel_latency_s, "{:.3f}"),
                      fmt_opt(m.max_repel_latency_s, "{:.3f}"));
  text += fmt::format("repeller on      {} times\n", m.repeller_activations);
  text += fmt::format("sms              {} sent, {} suppressed\n", m.sms_sent, m.sms_suppressed);
  text += fmt::format("energy           {:.4f} mAh across {} nodes\n", s.total_consumed_mah, s.energy.size());
  for (const auto& e : s.energy) {
    text += fmt::format("  node {:>3}  {:.4f} mAh used, {:.2f} mAh left{}\n", e.node_id, e.consumed_mah,
                        e.remaining_mah, e.depleted ? " DEPLETED" : "");
  }
  s.text = std::move(text);
  return s;
}

std::string metrics_json(const Metrics& metrics) { return metrics_to_json(metrics).dump(2); }

std::string summary_json(const RunSummary& summary) {
  nlohmann::ordered_json j;
  j["protection_rate"] = summary.protection_rate ? nlohmann::ordered_json(*summary.protection_rate)
                                                 : nlohmann::ordered_json("n/a");
  j["metrics"] = metrics_to_json(summary.metrics);
  j["total_consumed_mah"] = summary.total_consumed_mah;
  auto energy = nlohmann::ordered_json::array();
  for (const auto& e : summary.energy) {
    energy.push_back({{"node_id", e.node_id},
                      {"consumed_mah", e.consumed_mah},
                      {"remaining_mah", e.remaining_mah},
                      {"depleted", e.depleted}});
  }
  j["energy"] = std::move(energy);
  return j.dump(2);
}

void write_figure_data(const std::filesystem::path& dir, const RadioModels& models) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw ConfigError(fmt::format("cannot write {}", (dir / name).string()));
    return out;
  };

  {
    auto out = open("latency.dat");
    out << "# hops";
    for (int bytes : models.latency.byte_anchors) fmt::print(out, " t_{}B", bytes);
    out << '\n';
    for (int hops = 1; hops <= models.latency.max_hops(); ++hops) {
      fmt::print(out, "{}", hops);
      for (int bytes : models.latency.byte_anchors) {
        fmt::print(out, " {:.3f}", hop_latency_total(bytes, hops, models.latency));
      }
      out << '\n';
    }
  }
  {
    auto out = open("rssi.dat");
    out << "# distance_m model_dbm\n";
    for (int d = 5; d <= 60; ++d) fmt::print(out, "{} {:.2f}\n", d, rssi_at(d, models.pathloss));
    out << "\n\n# distance_m measured_dbm\n";
    for (const auto& s : reference_rssi_corpus()) fmt::print(out, "{} {}\n", s.distance_m, s.rssi_dbm);
  }
  {
    auto out = open("throughput.dat");
    out << "# rssi_dbm throughput_bps\n";
    for (int r = -40; r >= -95; --r) fmt::print(out, "{} {}\n", r, throughput_for(r, models.throughput));
  }
}

}  // namespace cropguard
