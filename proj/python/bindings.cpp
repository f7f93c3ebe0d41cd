#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cropguard/config.hpp"
#include "cropguard/energy.hpp"
#include "cropguard/engine.hpp"
#include "cropguard/errors.hpp"
#include "cropguard/geometry.hpp"
#include "cropguard/radio.hpp"
#include "cropguard/report.hpp"
#include "cropguard/rns.hpp"
#include "cropguard/wildlife.hpp"

namespace py = pybind11;
using namespace cropguard;

namespace {

using XY = std::pair<double, double>;

std::vector<XY> to_xy(const Placement& p) {
  std::vector<XY> out;
  for (const auto& q : p.positions) out.emplace_back(q.x, q.y);
  return out;
}

Placement from_xy(const std::vector<XY>& pts, double radius) {
  Placement p;
  p.sensor_radius = radius;
  for (const auto& [x, y] : pts) p.positions.push_back({x, y});
  return p;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["intrusions"] = m.intrusions;
  d["detections"] = m.detections;
  d["delivered"] = m.delivered;
  d["repelled"] = m.repelled;
  d["reached_core"] = m.reached_core;
  d["still_active"] = m.still_active;
  d["repeller_activations"] = m.repeller_activations;
  d["mean_repel_latency_s"] = m.mean_repel_latency_s;
  d["max_repel_latency_s"] = m.max_repel_latency_s;
  d["sms_sent"] = m.sms_sent;
  d["sms_suppressed"] = m.sms_suppressed;
  return d;
}

py::dict result_dict(const SimResult& r) {
  py::dict d;
  d["metrics"] = metrics_dict(r.metrics);
  py::list events;
  for (const auto& ev : r.events) {
    events.append(py::make_tuple(ev.time, ev.seq, std::string(to_string(ev.kind)), ev.node_id, ev.animal_id, ev.detail));
  }
  d["events"] = events;
  std::ostringstream csv;
  write_event_log_csv(csv, r.events);
  d["events_csv"] = csv.str();
  py::list energy;
  for (const auto& e : r.energy) energy.append(py::make_tuple(e.node_id, e.consumed_mah, e.remaining_mah, e.depleted));
  d["energy"] = energy;
  py::list sms;
  for (const auto& s : r.sms_log) sms.append(py::make_tuple(s.timestamp, s.delivered_at, s.sensor_id, s.message, s.suppressed));
  d["sms"] = sms;
  py::list findings;
  for (const auto& f : r.findings) findings.append(py::make_tuple(std::string(to_string(f.severity)), f.code, f.message));
  d["findings"] = findings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "cropguard simulation core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DegenerateFit>(m, "DegenerateFit", PyExc_ValueError);
  py::register_exception<TopologyError>(m, "TopologyError", PyExc_RuntimeError);
  py::register_exception<ScenarioInvalid>(m, "ScenarioInvalid", PyExc_ValueError);
  py::register_exception<UndefinedLatency>(m, "UndefinedLatency", PyExc_ArithmeticError);
  py::register_exception<LinkOutOfRange>(m, "LinkOutOfRange", PyExc_ValueError);

  m.def(
      "plan_grid",
      [](double width, double height, double radius) { return to_xy(plan_grid_placement({width, height, 0}, radius)); },
      py::arg("width"), py::arg("height"), py::arg("radius") = 10.0);
  m.def(
      "plan_perimeter",
      [](double width, double height, double radius) {
        return to_xy(plan_perimeter_placement({width, height, 0}, radius));
      },
      py::arg("width"), py::arg("height"), py::arg("radius") = 10.0);
  m.def(
      "coverage_fraction",
      [](const std::vector<XY>& sensors, double width, double height, double radius, double step) {
        return coverage_fraction(from_xy(sensors, radius), {width, height, 0}, step);
      },
      py::arg("sensors"), py::arg("width"), py::arg("height"), py::arg("radius") = 10.0, py::arg("step") = 0.5);

  m.def(
      "hop_latency",
      [](int bytes, int hops) { return hop_latency_total(bytes, hops, reference_latency_table()); },
      py::arg("bytes"), py::arg("hops"));
  m.def(
      "rssi_at",
      [](double distance, std::optional<XY> model) {
        auto pl = calibrated_pathloss();
        if (model) std::tie(pl.ref_rssi_dbm, pl.exponent_n) = *model;
        return rssi_at(distance, pl);
      },
      py::arg("distance_m"), py::arg("model") = std::nullopt,
      "Deterministic RSSI; model is (ref_rssi_dbm, exponent), the calibrated fit when omitted.");
  m.def(
      "fit_pathloss",
      [](const std::vector<XY>& points) {
        std::vector<RssiSample> samples;
        for (const auto& [d, r] : points) samples.push_back({.distance_m = d, .rssi_dbm = r});
        const auto model = fit_pathloss(samples);
        return XY{model.ref_rssi_dbm, model.exponent_n};
      },
      py::arg("points"), "Fit (distance_m, rssi_dbm) pairs; returns (ref_rssi_dbm, exponent).");
  m.def(
      "throughput",
      [](double rssi) { return throughput_for(rssi, reference_throughput_steps()); }, py::arg("rssi_dbm"));

  m.def(
      "repel_effective",
      [](const std::string& species, double freq) {
        return repel_effective(find_species(default_species_table(), species), freq);
      },
      py::arg("species"), py::arg("frequency_hz") = 15000.0);
  m.def(
      "repeller_radius", [](double area) { return repeller_radius(Repeller{.coverage_area_m2 = area}); },
      py::arg("coverage_m2") = 300.0);
  m.def(
      "lifetime_hours",
      [](double capacity, double sleep, double rx, double tx, double repeller, double solar) {
        return lifetime_estimate(full_battery(capacity, solar), PowerProfile{},
                                 {.sleep = sleep, .rx = rx, .tx = tx, .repeller = repeller});
      },
      py::arg("capacity_mah") = 2000.0, py::arg("sleep") = 1.0, py::arg("rx") = 0.0, py::arg("tx") = 0.0,
      py::arg("repeller") = 0.0, py::arg("solar_ma") = 0.0, "Hours until empty, or None when indefinite.");

  m.def(
      "table",
      [](int which) {
        std::ostringstream out;
        switch (which) {
          case 2: write_table2_csv(out, table2_replica(reference_latency_table())); break;
          case 3: write_rssi_comparison_csv(out, rssi_comparison(calibrated_pathloss())); break;
          case 4: write_table4_csv(out, table4_replica(reference_throughput_steps())); break;
          default: throw py::value_error("table must be 2, 3 or 4");
        }
        return out.str();
      },
      py::arg("which"));

  m.def(
      "simulate",
      [](const std::filesystem::path& scenario, std::optional<std::uint64_t> seed) {
        auto s = load_scenario(scenario);
        if (seed) s.seed = *seed;
        SimResult r;
        {
          py::gil_scoped_release release;
          r = run(s);
        }
        return result_dict(r);
      },
      py::arg("scenario"), py::arg("seed") = std::nullopt);
  m.def(
      "simulate_batch",
      [](const std::vector<std::filesystem::path>& scenarios, int parallelism) {
        std::vector<Scenario> loaded;
        for (const auto& p : scenarios) loaded.push_back(load_scenario(p));
        std::vector<BatchItem> items;
        {
          py::gil_scoped_release release;
          items = run_batch(loaded, parallelism);
        }
        py::list out;
        for (const auto& item : items) {
          if (item.result) {
            out.append(result_dict(*item.result));
          } else {
            out.append(py::str(item.error));
          }
        }
        return out;
      },
      py::arg("scenarios"), py::arg("parallelism") = 1);
}
