#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cropguard/energy.hpp"
#include "cropguard/geometry.hpp"
#include "cropguard/nettree.hpp"
#include "cropguard/radio.hpp"
#include "cropguard/rns.hpp"
#include "cropguard/wildlife.hpp"

namespace cropguard {

enum class EventKind { MoveTick, Detection, DeliveryArrival, RepellerOn, RepellerOff, SmsDispatch, End };

[[nodiscard]] std::string_view to_string(EventKind kind);
[[nodiscard]] EventKind parse_event_kind(std::string_view text);

/// One executed event. `seq` is unique and increases with execution order, so
/// the log is strictly ordered by (time, seq). `detail` is a space separated
/// list of key=value pairs.
struct SimEvent {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::MoveTick;
  int node_id = -1;
  int animal_id = -1;
  std::string detail;

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

/// Value of `key` in a detail string, or nullopt.
[[nodiscard]] std::optional<std::string> detail_value(std::string_view detail, std::string_view key);

struct Intrusion {
  double time = 0.0;
  std::string species;
  Edge edge = Edge::North;
  /// When both are set the animal is placed deterministically instead of
  /// drawing from the scenario's random stream.
  std::optional<Point> entry;
  std::optional<Point> target;
};

enum class PlacementStrategy { Grid, Perimeter, Explicit };
enum class RepellerSites { Coordinator, Sensors, Explicit };

[[nodiscard]] PlacementStrategy parse_placement_strategy(std::string_view text);
[[nodiscard]] RepellerSites parse_repeller_sites(std::string_view text);

struct Scenario {
  Field field{40.0, 40.0, 5.0};

  PlacementStrategy strategy = PlacementStrategy::Grid;
  double sensor_radius = 10.0;
  std::vector<Point> explicit_sensors;
  double sensor_unit_cost = 0.0;
  /// Planning cap; 0 means unlimited.
  int max_sensors = 0;
  double refractory_s = 5.0;

  Point coordinator{0.0, 0.0};
  Role sensor_role = Role::Router;
  /// Extra routers without a motion sensor.
  std::vector<Point> relays;
  Topology topology = Topology::Tree;
  TreeParams tree{};

  RadioModels radio{};
  int payload_bytes = 100;

  std::vector<SpeciesProfile> species = default_species_table();
  std::vector<Intrusion> intrusions;

  Repeller repeller{};
  RepellerSites repeller_sites = RepellerSites::Coordinator;
  std::vector<Point> explicit_repellers;
  double wake_delay_s = 0.010;
  SmsGateway::Config sms{};
  bool gateway_outage = false;
  double reaction_time_s = 1.0;

  PowerProfile power{};
  double battery_capacity_mah = 2000.0;
  double initial_charge_fraction = 1.0;
  double solar_recharge_ma = 0.0;
  double daylight_fraction = 0.5;

  double tick_dt = 0.1;
  double duration_s = 120.0;
  std::uint64_t seed = 42;
};

/// Sensor positions for the scenario's placement strategy.
[[nodiscard]] Placement resolve_placement(const Scenario& scenario);

/// Sensor nodes first (ids 1..S), then relays.
[[nodiscard]] std::vector<NodeSpec> scenario_nodes(const Scenario& scenario, const Placement& placement);

/// Repeller positions and the node whose battery powers each.
struct RepellerSite {
  Point position{};
  NodeId host = 0;
};
[[nodiscard]] std::vector<RepellerSite> resolve_repeller_sites(const Scenario& scenario,
                                                               const Placement& placement);

struct Finding {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Warning;
  std::string code;
  std::string message;
};

[[nodiscard]] std::string_view to_string(Finding::Severity severity);

/// Problems that would make a run meaningless (errors) or surprising (warnings).
[[nodiscard]] std::vector<Finding> validate(const Scenario& scenario);
[[nodiscard]] bool has_errors(const std::vector<Finding>& findings);

enum class Outcome { Active, Repelled, ReachedCore };

struct Metrics {
  int intrusions = 0;
  int detections = 0;
  int delivered = 0;
  int repelled = 0;
  int reached_core = 0;
  int still_active = 0;
  int repeller_activations = 0;
  std::optional<double> mean_repel_latency_s;
  std::optional<double> max_repel_latency_s;
  int sms_sent = 0;
  int sms_suppressed = 0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct SimResult {
  std::vector<SimEvent> events;
  Metrics metrics;
  std::vector<SmsRecord> sms_log;
  std::vector<NodeEnergy> energy;
  std::vector<Animal> animals;
  std::vector<Outcome> outcomes;
  std::vector<Finding> findings;
  NetworkTree tree;
  /// Remaining charge of every node (mAh, indexed by node id) right after each
  /// logged event; parallel to `events`.
  std::vector<std::vector<double>> battery_trace;
};

/// Raised by run() when validation reports errors; no event has executed.
class ScenarioInvalid : public std::runtime_error {
 public:
  explicit ScenarioInvalid(std::vector<Finding> findings);
  [[nodiscard]] const std::vector<Finding>& findings() const { return findings_; }

 private:
  std::vector<Finding> findings_;
};

/// Runs the scenario to `duration_s`. Movement advances on fixed ticks;
/// detections, deliveries, repeller switching and SMS dispatch are discrete
/// events. All random draws come from one stream seeded with scenario.seed.
[[nodiscard]] SimResult run(const Scenario& scenario);

/// Recomputes every count and latency statistic from the event log alone.
[[nodiscard]] Metrics replay_metrics(const std::vector<SimEvent>& events);

struct BatchItem {
  std::optional<SimResult> result;
  std::string error;
};

/// Runs scenarios on up to `parallelism` threads. Results are in input order
/// and identical to sequential execution; a failing scenario reports its error
/// without affecting the others.
[[nodiscard]] std::vector<BatchItem> run_batch(const std::vector<Scenario>& scenarios, int parallelism);

/// CSV `time_s,seq,kind,node_id,animal_id,detail`.
void write_event_log_csv(std::ostream& out, const std::vector<SimEvent>& events);
[[nodiscard]] std::vector<SimEvent> read_event_log_csv(std::istream& in);

}  // namespace cropguard
