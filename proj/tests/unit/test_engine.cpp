#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "cropguard/config.hpp"
#include "cropguard/engine.hpp"
#include "cropguard/errors.hpp"
#include "../support/oracles.hpp"
#include "../support/scenarios.hpp"

using namespace cropguard;
using testing_scenarios::chain_scenario;
using testing_scenarios::random_scenario;

namespace {

std::vector<const SimEvent*> of_kind(const SimResult& r, EventKind kind) {
  std::vector<const SimEvent*> out;
  for (const auto& ev : r.events) {
    if (ev.kind == kind) out.push_back(&ev);
  }
  return out;
}

std::string csv_of(const std::vector<SimEvent>& events) {
  std::ostringstream out;
  write_event_log_csv(out, events);
  return out.str();
}

}  // namespace

TEST_CASE("no intrusions gives an empty run") {
  Scenario s;
  s.duration_s = 30;
  const auto r = run(s);
  CHECK(r.metrics == Metrics{});
  CHECK(of_kind(r, EventKind::Detection).empty());
  REQUIRE_FALSE(r.events.empty());
  CHECK(r.events.back().kind == EventKind::End);
  CHECK(r.events.back().time == 30.0);
  for (const auto& e : r.energy) CHECK(e.consumed_mah == doctest::Approx(0.05 * 30 / 3600.0));
}

TEST_CASE("chain timeline") {
  const auto r = run(chain_scenario());

  const auto det = of_kind(r, EventKind::Detection);
  REQUIRE(det.size() == 1);
  CHECK(det[0]->time == 0.0);
  CHECK(det[0]->node_id == 1);
  CHECK(detail_value(det[0]->detail, "path") == "1>3>2>0");
  CHECK(detail_value(det[0]->detail, "hops") == "3");
  CHECK(detail_value(det[0]->detail, "latency") == "0.411");
  CHECK(detail_value(det[0]->detail, "delivered") == "1");

  const auto arrival = of_kind(r, EventKind::DeliveryArrival);
  REQUIRE(arrival.size() == 1);
  CHECK(arrival[0]->time == doctest::Approx(0.411));
  CHECK(arrival[0]->animal_id == -1);
  CHECK(std::stod(*detail_value(arrival[0]->detail, "repel_latency")) == doctest::Approx(0.421));

  const auto on = of_kind(r, EventKind::RepellerOn);
  const auto off = of_kind(r, EventKind::RepellerOff);
  REQUIRE(on.size() == 1);
  REQUIRE(off.size() == 1);
  CHECK(on[0]->time == doctest::Approx(0.421));
  CHECK(off[0]->time == doctest::Approx(30.421));
  CHECK(detail_value(on[0]->detail, "hosts") == "1");

  const auto sms = of_kind(r, EventKind::SmsDispatch);
  REQUIRE(sms.size() == 1);
  CHECK(std::stod(*detail_value(sms[0]->detail, "delivered_at")) == doctest::Approx(5.411));
  REQUIRE(r.sms_log.size() == 1);
  CHECK(r.sms_log[0].message == "INTRUSION sensor=1 t=0.000");

  // Walking north at 1 m/s the cow enters the repeller disk long before the
  // first tick after switch-on, so it turns at 0.5 s.
  bool fled = false;
  for (const auto& ev : r.events) {
    if (ev.kind == EventKind::MoveTick && detail_value(ev.detail, "state") == "fleeing") {
      CHECK(ev.time == doctest::Approx(0.5));
      CHECK(detail_value(ev.detail, "outcome") == "repelled");
      fled = true;
    }
  }
  CHECK(fled);
  CHECK(r.metrics.intrusions == 1);
  CHECK(r.metrics.repelled == 1);
  CHECK(r.metrics.reached_core == 0);
  CHECK(r.metrics.repeller_activations == 1);
  CHECK(*r.metrics.max_repel_latency_s == doctest::Approx(0.421));
  CHECK(r.outcomes == std::vector<Outcome>{Outcome::Repelled});
  CHECK(r.animals[0].state == AnimalState::Gone);
  CHECK(r.events.back().kind == EventKind::End);
  CHECK(r.events.back().time == 60.0);
}

TEST_CASE("payload sweep over the three-hop chain") {
  const double expected[] = {0.115, 0.224, 0.411};
  const int payloads[] = {10, 50, 100};
  for (int i = 0; i < 3; ++i) {
    auto s = chain_scenario();
    s.payload_bytes = payloads[i];
    const auto r = run(s);
    const auto det = of_kind(r, EventKind::Detection);
    REQUIRE(det.size() == 1);
    CHECK(std::stod(*detail_value(det[0]->detail, "latency")) == expected[i]);
  }
}

TEST_CASE("inaudible repeller lets the animal through") {
  auto s = chain_scenario();
  s.repeller.frequency_hz = 50000;
  const auto findings = validate(s);
  const auto it = std::find_if(findings.begin(), findings.end(), [](const Finding& f) { return f.code == "inaudible"; });
  REQUIRE(it != findings.end());
  CHECK(it->severity == Finding::Severity::Warning);
  CHECK(it->message == "Cow will not be repelled: hearing range 23-35,000 Hz excludes the repeller at 50,000 Hz");
  const auto r = run(s);
  CHECK(r.metrics.repelled == 0);
  CHECK(r.metrics.reached_core == 1);
}

TEST_CASE("validation errors stop the run") {
  SUBCASE("unknown species") {
    auto s = chain_scenario();
    s.intrusions[0].species = "Unicorn";
    CHECK(has_errors(validate(s)));
    CHECK_THROWS_AS((void)run(s), ScenarioInvalid);
  }
  SUBCASE("unattachable sensor") {
    auto s = chain_scenario();
    s.relays.clear();
    s.field = {400, 20, 5};
    s.explicit_sensors = {{300, 0}};
    s.intrusions.clear();
    try {
      (void)run(s);
      FAIL("expected ScenarioInvalid");
    } catch (const ScenarioInvalid& e) {
      const auto& f = e.findings();
      CHECK(std::any_of(f.begin(), f.end(), [](const Finding& x) { return x.code == "unattachable"; }));
    }
  }
  SUBCASE("grid must cover") {
    Scenario s;
    s.sensor_radius = 0;
    CHECK(has_errors(validate(s)));
  }
  SUBCASE("repeller over the current bound") {
    Scenario s;
    s.repeller.active_current_ma = 250;
    CHECK(has_errors(validate(s)));
  }
}

TEST_CASE("runs are deterministic per seed") {
  std::ifstream probe(CROPGUARD_DATA_DIR "/demo.ini");
  REQUIRE(probe.good());
  const auto demo = load_scenario(CROPGUARD_DATA_DIR "/demo.ini");
  const auto a = run(demo);
  const auto b = run(demo);
  CHECK(a.events == b.events);
  CHECK(a.metrics == b.metrics);
  auto other = demo;
  other.seed = demo.seed + 1;
  CHECK(run(other).events != a.events);
}

TEST_CASE("metrics are reproducible from the log alone") {
  std::mt19937_64 gen(31);
  for (int i = 0; i < 15; ++i) {
    const auto s = random_scenario(gen);
    const auto r = run(s);
    CHECK(replay_metrics(r.events) == r.metrics);

    const auto csv = csv_of(r.events);
    std::istringstream in(csv);
    const auto back = read_event_log_csv(in);
    REQUIRE(back.size() == r.events.size());
    CHECK(replay_metrics(back).intrusions == r.metrics.intrusions);

    const auto tally = oracle::tally_event_csv(csv);
    CHECK(tally.intrusions == r.metrics.intrusions);
    CHECK(tally.detections == r.metrics.detections);
    CHECK(tally.delivered == r.metrics.delivered);
    CHECK(tally.repelled == r.metrics.repelled);
    CHECK(tally.reached_core == r.metrics.reached_core);
    CHECK(tally.repeller_on == r.metrics.repeller_activations);
    CHECK(tally.sms_suppressed == r.metrics.sms_suppressed);
    if (tally.delivered > 0) {
      CHECK(tally.latency_max == doctest::Approx(*r.metrics.max_repel_latency_s));
      CHECK(tally.latency_sum / tally.delivered == doctest::Approx(*r.metrics.mean_repel_latency_s));
    }
  }
}

TEST_CASE("energy agrees with an independent integration of the log") {
  std::mt19937_64 gen(77);
  auto scenarios = std::vector<Scenario>{chain_scenario()};
  for (int i = 0; i < 10; ++i) scenarios.push_back(random_scenario(gen));
  for (const auto& s : scenarios) {
    const auto r = run(s);
    const auto expected = oracle::integrate_energy(csv_of(r.events), r.tree.size(), s.duration_s, s.power.sleep_ma,
                                                   s.power.rx_ma, s.power.tx_ma, s.power.repeller_ma);
    REQUIRE(r.energy.size() == expected.size());
    for (std::size_t n = 0; n < expected.size(); ++n) {
      CHECK(r.energy[n].consumed_mah == doctest::Approx(expected[n]).epsilon(1e-6));
    }
  }
}

TEST_CASE("property: log ordering, state monotonicity and battery monotonicity") {
  std::mt19937_64 gen(4242);
  for (int i = 0; i < 25; ++i) {
    const auto s = random_scenario(gen);
    const auto r = run(s);
    for (std::size_t k = 1; k < r.events.size(); ++k) {
      const auto& a = r.events[k - 1];
      const auto& b = r.events[k];
      CHECK(a.seq < b.seq);
      CHECK(a.time <= b.time);
    }
    for (const auto& ev : r.events) CHECK(ev.time <= s.duration_s);

    std::map<int, int> last_state;
    for (const auto& ev : r.events) {
      if (ev.kind != EventKind::MoveTick || ev.animal_id < 0) continue;
      const auto st = detail_value(ev.detail, "state");
      if (!st) continue;
      const int rank = *st == "approaching" ? 0 : *st == "inside" ? 1 : *st == "fleeing" ? 2 : 3;
      if (last_state.count(ev.animal_id)) CHECK(rank >= last_state[ev.animal_id]);
      last_state[ev.animal_id] = rank;
    }

    REQUIRE(r.battery_trace.size() == r.events.size());
    for (std::size_t k = 1; k < r.battery_trace.size(); ++k) {
      for (std::size_t n = 0; n < r.battery_trace[k].size(); ++n) {
        CHECK(r.battery_trace[k][n] <= r.battery_trace[k - 1][n] + 1e-12);
      }
    }

    // Every delivered detection switches the repeller on or extends it.
    CHECK(r.metrics.delivered <= r.metrics.detections);
    if (r.metrics.delivered > 0) CHECK(r.metrics.repeller_activations >= 1);
    CHECK(r.metrics.repelled + r.metrics.reached_core + r.metrics.still_active == r.metrics.intrusions);
  }
}

TEST_CASE("run_batch") {
  std::mt19937_64 gen(5);
  std::vector<Scenario> scenarios;
  for (int i = 0; i < 8; ++i) scenarios.push_back(random_scenario(gen));
  auto broken = chain_scenario();
  broken.intrusions[0].species = "Unicorn";
  scenarios.insert(scenarios.begin() + 3, broken);

  const auto serial = run_batch(scenarios, 1);
  const auto parallel = run_batch(scenarios, 3);
  REQUIRE(serial.size() == scenarios.size());
  REQUIRE(parallel.size() == scenarios.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    CHECK(serial[i].result.has_value() == parallel[i].result.has_value());
    if (serial[i].result) {
      CHECK(serial[i].result->events == parallel[i].result->events);
      CHECK(serial[i].result->events == run(scenarios[i]).events);
    }
  }
  CHECK_FALSE(parallel[3].result);
  CHECK_FALSE(parallel[3].error.empty());
  CHECK(run_batch({}, 4).empty());
}

TEST_CASE("gateway outage queues notifications") {
  auto s = chain_scenario();
  s.gateway_outage = true;
  const auto r = run(s);
  REQUIRE(r.sms_log.size() == 1);
  CHECK(r.sms_log[0].retry);
  CHECK_FALSE(r.sms_log[0].delivered_at);
  CHECK(detail_value(r.events.back().detail, "sms_queued") == "1");
}

TEST_CASE("enum parsing") {
  CHECK(parse_event_kind("SmsDispatch") == EventKind::SmsDispatch);
  CHECK(parse_placement_strategy("perimeter") == PlacementStrategy::Perimeter);
  CHECK(parse_repeller_sites("sensors") == RepellerSites::Sensors);
  CHECK(detail_value("a=1 bb=two", "bb") == "two");
  CHECK_FALSE(detail_value("a=1", "b"));
}
