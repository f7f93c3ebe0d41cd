#include "cropguard/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cropguard/errors.hpp"

namespace cropguard {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::MoveTick: return "MoveTick";
    case EventKind::Detection: return "Detection";
    case EventKind::DeliveryArrival: return "DeliveryArrival";
    case EventKind::RepellerOn: return "RepellerOn";
    case EventKind::RepellerOff: return "RepellerOff";
    case EventKind::SmsDispatch: return "SmsDispatch";
    case EventKind::End: return "End";
  }
  return "Unknown";
}

EventKind parse_event_kind(std::string_view text) {
  for (auto kind : {EventKind::MoveTick, EventKind::Detection, EventKind::DeliveryArrival,
                    EventKind::RepellerOn, EventKind::RepellerOff, EventKind::SmsDispatch,
                    EventKind::End}) {
    if (to_string(kind) == text) return kind;
  }
  throw ConfigError(fmt::format("unknown event kind '{}'", text));
}

std::optional<std::string> detail_value(std::string_view detail, std::string_view key) {
  std::size_t pos = 0;
  while (pos < detail.size()) {
    auto end = detail.find(' ', pos);
    if (end == std::string_view::npos) end = detail.size();
    const auto token = detail.substr(pos, end - pos);
    const auto eq = token.find('=');
    if (eq != std::string_view::npos && token.substr(0, eq) == key) {
      return std::string(token.substr(eq + 1));
    }
    pos = end + 1;
  }
  return std::nullopt;
}

PlacementStrategy parse_placement_strategy(std::string_view text) {
  if (text == "grid") return PlacementStrategy::Grid;
  if (text == "perimeter") return PlacementStrategy::Perimeter;
  if (text == "explicit") return PlacementStrategy::Explicit;
  throw ConfigError(fmt::format("unknown placement strategy '{}'", text));
}

RepellerSites parse_repeller_sites(std::string_view text) {
  if (text == "coordinator") return RepellerSites::Coordinator;
  if (text == "sensors") return RepellerSites::Sensors;
  if (text == "explicit") return RepellerSites::Explicit;
  throw ConfigError(fmt::format("unknown repeller sites '{}'", text));
}

std::string_view to_string(Finding::Severity severity) {
  return severity == Finding::Severity::Error ? "error" : "warning";
}

Placement resolve_placement(const Scenario& scenario) {
  switch (scenario.strategy) {
    case PlacementStrategy::Grid:
      return plan_grid_placement(scenario.field, scenario.sensor_radius);
    case PlacementStrategy::Perimeter:
      return plan_perimeter_placement(scenario.field, scenario.sensor_radius);
    case PlacementStrategy::Explicit:
      return Placement{.positions = scenario.explicit_sensors, .sensor_radius = scenario.sensor_radius};
  }
  throw InvalidArgument("unknown placement strategy");
}

std::vector<NodeSpec> scenario_nodes(const Scenario& scenario, const Placement& placement) {
  std::vector<NodeSpec> nodes;
  nodes.reserve(placement.size() + scenario.relays.size());
  for (const auto& p : placement.positions) nodes.push_back({p, scenario.sensor_role});
  for (const auto& p : scenario.relays) nodes.push_back({p, Role::Router});
  return nodes;
}

std::vector<RepellerSite> resolve_repeller_sites(const Scenario& scenario, const Placement& placement) {
  std::vector<RepellerSite> sites;
  switch (scenario.repeller_sites) {
    case RepellerSites::Coordinator:
      sites.push_back({scenario.coordinator, 0});
      break;
    case RepellerSites::Sensors:
      for (std::size_t i = 0; i < placement.size(); ++i) {
        sites.push_back({placement.positions[i], static_cast<NodeId>(i + 1)});
      }
      break;
    case RepellerSites::Explicit:
      // Stand-alone speakers are wired to the controller's supply.
      for (const auto& p : scenario.explicit_repellers) sites.push_back({p, 0});
      break;
  }
  return sites;
}

namespace {

void add(std::vector<Finding>& out, Finding::Severity severity, std::string code, std::string message) {
  out.push_back({severity, std::move(code), std::move(message)});
}

std::string format_hz(double hz) {
  const auto whole = static_cast<long long>(std::llround(hz));
  std::string digits = std::to_string(whole);
  for (int i = static_cast<int>(digits.size()) - 3; i > 0; i -= 3) digits.insert(static_cast<std::size_t>(i), ",");
  return digits;
}

}  // namespace

std::vector<Finding> validate(const Scenario& s) {
  using Sev = Finding::Severity;
  std::vector<Finding> out;

  if (!(s.duration_s > 0.0)) add(out, Sev::Error, "duration", "duration must be positive");
  if (!(s.tick_dt > 0.0)) add(out, Sev::Error, "tick", "tick_dt must be positive");
  if (s.payload_bytes < 1) add(out, Sev::Error, "payload", "payload must be at least 1 byte");
  if (!(s.refractory_s >= 0.0)) add(out, Sev::Error, "refractory", "refractory must be non-negative");
  if (!(s.wake_delay_s >= 0.0)) add(out, Sev::Error, "wake_delay", "wake delay must be non-negative");

  const auto check = [&](std::string code, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      add(out, Sev::Error, std::move(code), e.what());
    }
  };
  check("field", [&] { s.field.validate(); });
  check("tree_params", [&] { s.tree.validate(); });
  check("radio", [&] {
    s.radio.pathloss.validate();
    s.radio.latency.validate();
  });
  check("repeller", [&] { s.repeller.validate(); });
  check("power", [&] { s.power.validate(); });
  for (const auto& sp : s.species) check("species", [&] { sp.validate(); });

  if (has_errors(out)) return out;

  Placement placement;
  try {
    placement = resolve_placement(s);
  } catch (const std::exception& e) {
    add(out, Sev::Error, "placement", e.what());
    return out;
  }
  if (placement.positions.empty()) add(out, Sev::Error, "placement", "no sensors placed");
  for (const auto& p : placement.positions) {
    if (!s.field.contains(p)) {
      add(out, Sev::Error, "placement",
          fmt::format("sensor at ({:.1f},{:.1f}) lies outside the field", p.x, p.y));
    }
  }
  if (!placement.positions.empty()) {
    const double covered = coverage_fraction(placement, s.field, 0.5);
    if (covered < 1.0) {
      const auto sev = s.strategy == PlacementStrategy::Grid ? Sev::Error : Sev::Warning;
      add(out, sev, "coverage",
          fmt::format("{:.1f}% of the field is outside every sensor's range", 100.0 * (1.0 - covered)));
    }
  }

  try {
    (void)build_network(s.topology, s.coordinator, scenario_nodes(s, placement), s.tree,
                        s.radio.pathloss, s.radio.policy);
  } catch (const TopologyError& e) {
    add(out, Sev::Error, "unattachable", e.what());
  } catch (const std::exception& e) {
    add(out, Sev::Error, "tree", e.what());
  }

  std::vector<std::string> checked;
  for (const auto& intr : s.intrusions) {
    if (std::find(checked.begin(), checked.end(), intr.species) != checked.end()) continue;
    checked.push_back(intr.species);
    try {
      const auto& sp = find_species(s.species, intr.species);
      if (!repel_effective(sp, s.repeller.frequency_hz)) {
        add(out, Sev::Warning, "inaudible",
            fmt::format("{} will not be repelled: hearing range {}-{} Hz excludes the repeller at {} Hz",
                        sp.name, format_hz(sp.hear_min_hz), format_hz(sp.hear_max_hz),
                        format_hz(s.repeller.frequency_hz)));
      }
    } catch (const NotFound& e) {
      add(out, Sev::Error, "species", e.what());
    }
    if (!(intr.time >= 0.0)) add(out, Sev::Error, "intrusion", "intrusion time must be non-negative");
  }

  if (!(s.battery_capacity_mah > 0.0) || !(s.initial_charge_fraction > 0.0)) {
    add(out, Sev::Warning, "depleted", "node batteries are depleted at start");
  }
  return out;
}

bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Finding::Severity::Error; });
}

ScenarioInvalid::ScenarioInvalid(std::vector<Finding> findings)
    : std::runtime_error([&] {
        std::string msg = "scenario failed validation:";
        for (const auto& f : findings) {
          if (f.severity == Finding::Severity::Error) msg += fmt::format(" [{}] {};", f.code, f.message);
        }
        return msg;
      }()),
      findings_(std::move(findings)) {}

namespace {

struct Pending {
  double time;
  std::uint64_t order;
  EventKind kind;
  int node = -1;
  int animal = -1;
  DetectionEvent detection{};
  std::uint64_t detection_seq = 0;
  double repel_latency = 0.0;
};

struct Later {
  bool operator()(const Pending& a, const Pending& b) const {
    return a.time != b.time ? a.time > b.time : a.order > b.order;
  }
};

std::string join_path(const std::vector<NodeId>& path, char sep) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(path[i]);
  }
  return out;
}

class Simulation {
 public:
  explicit Simulation(const Scenario& s) : s_(s), rng_(s.seed) {}

  SimResult execute() {
    setup();
    schedule({.time = 0.0, .order = 0, .kind = EventKind::MoveTick});
    while (!queue_.empty()) {
      const Pending ev = queue_.top();
      if (ev.time > s_.duration_s) break;
      queue_.pop();
      settle_energy(ev.time);
      dispatch(ev);
    }
    finish();
    return std::move(result_);
  }

 private:
  void setup() {
    placement_ = resolve_placement(s_);
    result_.tree = build_network(s_.topology, s_.coordinator, scenario_nodes(s_, placement_), s_.tree,
                                 s_.radio.pathloss, s_.radio.policy);
    for (std::size_t i = 0; i < placement_.size(); ++i) {
      sensors_.push_back({.node_id = static_cast<int>(i + 1),
                          .position = placement_.positions[i],
                          .detection_radius = placement_.sensor_radius,
                          .refractory = s_.refractory_s,
                          .last_trigger = {}});
    }
    sites_ = resolve_repeller_sites(s_, placement_);
    repeller_radius_ = repeller_radius(s_.repeller);

    const double charge = std::max(0.0, s_.battery_capacity_mah * s_.initial_charge_fraction);
    batteries_.assign(result_.tree.size(),
                      Battery{s_.battery_capacity_mah, std::min(charge, s_.battery_capacity_mah),
                              s_.solar_recharge_ma});
    consumed_.assign(result_.tree.size(), 0.0);

    rns_.wake_delay_s = s_.wake_delay_s;
    rns_.repel_duration_s = s_.repeller.repel_duration_s;
    gateway_ = SmsGateway(s_.sms);
    gateway_.set_outage(s_.gateway_outage);

    intrusions_ = s_.intrusions;
    std::stable_sort(intrusions_.begin(), intrusions_.end(),
                     [](const Intrusion& a, const Intrusion& b) { return a.time < b.time; });
  }

  void schedule(Pending p) {
    p.order = next_order_++;
    queue_.push(p);
  }

  void log(double time, EventKind kind, int node, int animal, std::string detail) {
    result_.events.push_back({.time = time,
                              .seq = next_seq_++,
                              .kind = kind,
                              .node_id = node,
                              .animal_id = animal,
                              .detail = std::move(detail)});
    auto& charges = result_.battery_trace.emplace_back();
    charges.reserve(batteries_.size());
    for (const auto& b : batteries_) charges.push_back(b.charge_mah);
  }

  void dispatch(const Pending& ev) {
    switch (ev.kind) {
      case EventKind::MoveTick: on_tick(ev); break;
      case EventKind::Detection: on_detection_event(ev); break;
      case EventKind::DeliveryArrival: on_arrival(ev); break;
      case EventKind::RepellerOn: on_repeller_on(ev); break;
      case EventKind::RepellerOff: on_repeller_off(ev); break;
      case EventKind::SmsDispatch: on_sms(ev); break;
      case EventKind::End: break;
    }
  }

  // Coulomb counting between consecutive executed events: every node draws its
  // sleep current, repeller hosts add the repeller current while it is on.
  void settle_energy(double now) {
    const double dt = now - energy_clock_;
    if (dt <= 0.0) return;
    for (std::size_t n = 0; n < batteries_.size(); ++n) {
      double current = s_.power.sleep_ma;
      if (rns_.repeller_active()) {
        for (const auto& site : sites_) {
          if (site.host == static_cast<NodeId>(n)) current += s_.power.repeller_ma;
        }
      }
      draw(n, current, dt);
      if (batteries_[n].solar_recharge_ma > 0.0) {
        const double sun = daylight_seconds(energy_clock_, now, s_.daylight_fraction);
        batteries_[n] = recharge(batteries_[n], batteries_[n].solar_recharge_ma, sun);
      }
    }
    energy_clock_ = now;
  }

  void draw(std::size_t node, double current_ma, double duration_s) {
    const double before = batteries_[node].charge_mah;
    batteries_[node] = consume(batteries_[node], current_ma, duration_s);
    consumed_[node] += before - batteries_[node].charge_mah;
  }

  void on_tick(const Pending& ev) {
    const double t = ev.time;

    while (next_intrusion_ < intrusions_.size() && intrusions_[next_intrusion_].time <= t) {
      spawn(intrusions_[next_intrusion_++], t);
    }

    for (auto& sensor : sensors_) {
      if (batteries_[static_cast<std::size_t>(sensor.node_id)].depleted()) continue;
      for (const auto& animal : result_.animals) {
        if (const auto hit = detect(sensor, animal, t)) {
          sensor.record(t);
          schedule({.time = t, .order = 0, .kind = EventKind::Detection, .node = sensor.node_id,
                    .animal = animal.id, .detection = *hit});
          break;
        }
      }
    }

    for (std::size_t i = 0; i < result_.animals.size(); ++i) {
      auto& animal = result_.animals[i];
      if (animal.state == AnimalState::Gone) continue;
      const auto before = animal.state;
      animal = step_animal(animal, s_.tick_dt, nearest_active_repeller(animal.position), s_.field);
      if (animal.state == before) {
        if (result_.outcomes[i] == Outcome::Active && animal.state != AnimalState::Fleeing &&
            s_.field.in_core(animal.position)) {
          result_.outcomes[i] = Outcome::ReachedCore;
          log(t, EventKind::MoveTick, -1, animal.id,
              fmt::format("state={} outcome=reached_core", to_string(animal.state)));
        }
        continue;
      }
      std::string detail = fmt::format("state={}", to_string(animal.state));
      if (result_.outcomes[i] == Outcome::Active) {
        if (animal.state == AnimalState::Fleeing) {
          result_.outcomes[i] = Outcome::Repelled;
          detail += " outcome=repelled";
        } else if (s_.field.in_core(animal.position) && animal.state != AnimalState::Gone) {
          result_.outcomes[i] = Outcome::ReachedCore;
          detail += " outcome=reached_core";
        }
      }
      log(t, EventKind::MoveTick, -1, animal.id, std::move(detail));
    }

    const auto next = static_cast<double>(++tick_index_) * s_.tick_dt;
    if (next <= s_.duration_s + 1e-9) {
      schedule({.time = std::min(next, s_.duration_s), .order = 0, .kind = EventKind::MoveTick});
    }
  }

  void spawn(const Intrusion& intr, double t) {
    const auto& species = find_species(s_.species, intr.species);
    const int id = static_cast<int>(result_.animals.size());
    Animal animal = (intr.entry && intr.target)
                        ? place_intrusion(species, *intr.entry, *intr.target, id)
                        : spawn_intrusion(s_.field, species, intr.edge, rng_, id);
    log(t, EventKind::MoveTick, -1, id,
        fmt::format("spawn species={} edge={} x={:.3f} y={:.3f}", species.name, to_string(intr.edge),
                    animal.position.x, animal.position.y));
    result_.animals.push_back(std::move(animal));
    result_.outcomes.push_back(Outcome::Active);
  }

  std::optional<ActiveRepeller> nearest_active_repeller(Point p) const {
    if (!rns_.repeller_active() || sites_.empty()) return std::nullopt;
    const auto it = std::min_element(sites_.begin(), sites_.end(), [&](const auto& a, const auto& b) {
      return distance(a.position, p) < distance(b.position, p);
    });
    return ActiveRepeller{it->position, repeller_radius_, s_.repeller.frequency_hz};
  }

  void on_detection_event(const Pending& ev) {
    const auto path = route_to_root(result_.tree, ev.node);
    auto report = deliver(result_.tree, ev.node, s_.payload_bytes, s_.radio, &rng_);

    bool relay_dead = false;
    for (std::size_t i = 1; i < path.size(); ++i) {
      relay_dead = relay_dead || batteries_[static_cast<std::size_t>(path[i])].depleted();
    }
    if (relay_dead) report.delivered = false;

    // Radio activity is charged on top of the sleep baseline.
    const double link_s = report.hops > 0 ? report.total_latency / report.hops : 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      draw(static_cast<std::size_t>(path[i]), s_.power.tx_ma, link_s);
      draw(static_cast<std::size_t>(path[i + 1]), s_.power.rx_ma, link_s);
    }

    double min_rssi = 0.0;
    for (const auto& hop : report.per_hop) min_rssi = std::min(min_rssi, hop.rssi_dbm);

    const auto det_seq = next_seq_;
    log(ev.time, EventKind::Detection, ev.node, ev.animal,
        fmt::format("path={} hops={} latency={} link_s={} min_rssi={:.2f} throughput={} delivered={}",
                    join_path(path, '>'), report.hops, report.total_latency, link_s, min_rssi,
                    report.min_throughput, report.delivered ? 1 : 0));
    ++metrics_.detections;

    if (report.delivered) {
      schedule({.time = ev.time + report.total_latency, .order = 0, .kind = EventKind::DeliveryArrival,
                .node = ev.node, .animal = ev.animal, .detection = ev.detection,
                .detection_seq = det_seq,
                .repel_latency = detection_to_repel_latency(report, rns_)});
    }
  }

  void on_arrival(const Pending& ev) {
    log(ev.time, EventKind::DeliveryArrival, ev.node, -1,
        fmt::format("detection_seq={} repel_latency={}", ev.detection_seq, ev.repel_latency));
    ++metrics_.delivered;
    latency_sum_ += ev.repel_latency;
    latency_max_ = std::max(latency_max_, ev.repel_latency);

    auto transition = on_detection(rns_, ev.detection, ev.time);
    rns_ = std::move(transition.state);
    for (const auto& action : transition.actions) {
      switch (action.kind) {
        case RnsAction::Kind::RepellerOn:
          schedule({.time = action.at, .order = 0, .kind = EventKind::RepellerOn});
          break;
        case RnsAction::Kind::ExtendRepeller:
          schedule({.time = action.at, .order = 0, .kind = EventKind::RepellerOff});
          break;
        case RnsAction::Kind::Notify:
          schedule({.time = ev.time, .order = 0, .kind = EventKind::SmsDispatch, .node = ev.node,
                    .animal = ev.animal, .detection = action.event});
          break;
      }
    }
  }

  std::string host_list() const {
    std::vector<NodeId> hosts;
    for (const auto& site : sites_) hosts.push_back(site.host);
    return join_path(hosts, ';');
  }

  void on_repeller_on(const Pending& ev) {
    const auto next = on_wake_complete(rns_, ev.time);
    if (next.mode == rns_.mode) return;
    rns_ = next;
    ++metrics_.repeller_activations;
    log(ev.time, EventKind::RepellerOn, 0, -1, fmt::format("hosts={}", host_list()));
  }

  void on_repeller_off(const Pending& ev) {
    const auto next = on_repel_timer(rns_, ev.time);
    if (next.mode == rns_.mode) return;  // superseded by an extension
    rns_ = next;
    log(ev.time, EventKind::RepellerOff, 0, -1, fmt::format("hosts={}", host_list()));
  }

  void on_sms(const Pending& ev) {
    auto& pending = rns_.pending_notifications;
    const auto it = std::find_if(pending.begin(), pending.end(), [&](const DetectionEvent& d) {
      return d.sensor_id == ev.detection.sensor_id && d.time == ev.detection.time;
    });
    if (it != pending.end()) pending.erase(it);
    dispatch_sms(ev.time, ev.node, ev.detection);
  }

  void dispatch_sms(double now, int node, const DetectionEvent& detection) {
    const auto record = send_sms(gateway_, detection, now);
    std::string detail;
    if (!record) {
      detail = "status=suppressed";
      ++metrics_.sms_suppressed;
    } else if (record->delivered_at) {
      detail = fmt::format("status=sent delivered_at={}", *record->delivered_at);
      ++metrics_.sms_sent;
    } else {
      detail = "status=queued";
      ++metrics_.sms_sent;
    }
    log(now, EventKind::SmsDispatch, node, -1, std::move(detail));
  }

  void finish() {
    const double end = s_.duration_s;
    settle_energy(end);
    for (const auto& det : rns_.pending_notifications) dispatch_sms(end, det.sensor_id, det);
    rns_.pending_notifications.clear();
    log(end, EventKind::End, -1, -1,
        fmt::format("rns={} sms_queued={}", to_string(rns_.mode), gateway_.queued_count()));

    auto& m = metrics_;
    m.intrusions = static_cast<int>(result_.animals.size());
    m.repelled = static_cast<int>(std::count(result_.outcomes.begin(), result_.outcomes.end(), Outcome::Repelled));
    m.reached_core =
        static_cast<int>(std::count(result_.outcomes.begin(), result_.outcomes.end(), Outcome::ReachedCore));
    m.still_active = m.intrusions - m.repelled - m.reached_core;
    if (m.delivered > 0) {
      m.mean_repel_latency_s = latency_sum_ / m.delivered;
      m.max_repel_latency_s = latency_max_;
    }
    result_.metrics = m;
    result_.sms_log = gateway_.log();
    for (std::size_t n = 0; n < batteries_.size(); ++n) {
      result_.energy.push_back({.node_id = static_cast<int>(n),
                                .consumed_mah = consumed_[n],
                                .remaining_mah = batteries_[n].charge_mah,
                                .depleted = batteries_[n].depleted()});
    }
  }

  const Scenario& s_;
  Rng rng_;
  Placement placement_;
  std::vector<MotionSensor> sensors_;
  std::vector<RepellerSite> sites_;
  double repeller_radius_ = 0.0;
  std::vector<Battery> batteries_;
  std::vector<double> consumed_;
  double energy_clock_ = 0.0;
  RnsState rns_;
  SmsGateway gateway_;
  std::vector<Intrusion> intrusions_;
  std::size_t next_intrusion_ = 0;
  std::uint64_t tick_index_ = 0;

  std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
  std::uint64_t next_order_ = 0;
  std::uint64_t next_seq_ = 0;

  Metrics metrics_;
  double latency_sum_ = 0.0;
  double latency_max_ = 0.0;
  SimResult result_;
};

}  // namespace

SimResult run(const Scenario& scenario) {
  auto findings = validate(scenario);
  if (has_errors(findings)) throw ScenarioInvalid(std::move(findings));
  Simulation sim(scenario);
  auto result = sim.execute();
  result.findings = std::move(findings);
  return result;
}

Metrics replay_metrics(const std::vector<SimEvent>& events) {
  Metrics m;
  double latency_sum = 0.0;
  double latency_max = 0.0;
  for (const auto& ev : events) {
    switch (ev.kind) {
      case EventKind::MoveTick: {
        if (ev.detail.rfind("spawn ", 0) == 0) ++m.intrusions;
        const auto outcome = detail_value(ev.detail, "outcome");
        if (outcome == "repelled") ++m.repelled;
        if (outcome == "reached_core") ++m.reached_core;
        break;
      }
      case EventKind::Detection: ++m.detections; break;
      case EventKind::DeliveryArrival: {
        ++m.delivered;
        const double latency = std::stod(detail_value(ev.detail, "repel_latency").value_or("0"));
        latency_sum += latency;
        latency_max = std::max(latency_max, latency);
        break;
      }
      case EventKind::RepellerOn: ++m.repeller_activations; break;
      case EventKind::SmsDispatch:
        if (detail_value(ev.detail, "status") == "suppressed") {
          ++m.sms_suppressed;
        } else {
          ++m.sms_sent;
        }
        break;
      case EventKind::RepellerOff:
      case EventKind::End: break;
    }
  }
  m.still_active = m.intrusions - m.repelled - m.reached_core;
  if (m.delivered > 0) {
    m.mean_repel_latency_s = latency_sum / m.delivered;
    m.max_repel_latency_s = latency_max;
  }
  return m;
}

std::vector<BatchItem> run_batch(const std::vector<Scenario>& scenarios, int parallelism) {
  std::vector<BatchItem> results(scenarios.size());
  if (scenarios.empty()) return results;

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        results[i].result = run(scenarios[i]);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };

  const auto threads = static_cast<std::size_t>(std::clamp<long>(parallelism, 1, static_cast<long>(scenarios.size())));
  if (threads == 1) {
    worker();
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  return results;
}

void write_event_log_csv(std::ostream& out, const std::vector<SimEvent>& events) {
  out << "time_s,seq,kind,node_id,animal_id,detail\n";
  for (const auto& ev : events) {
    const std::string node = ev.node_id >= 0 ? std::to_string(ev.node_id) : "";
    const std::string animal = ev.animal_id >= 0 ? std::to_string(ev.animal_id) : "";
    fmt::print(out, "{:.6f},{},{},{},{},{}\n", ev.time, ev.seq, to_string(ev.kind), node, animal, ev.detail);
  }
}

std::vector<SimEvent> read_event_log_csv(std::istream& in) {
  std::vector<SimEvent> events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("time_s", 0) == 0) continue;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t pos = 0;
    for (int c = 0; c < 5; ++c) {
      const auto comma = line.find(',', pos);
      if (comma == std::string::npos) throw ConfigError(fmt::format("event log line {} is truncated", line_no));
      cells.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    SimEvent ev;
    ev.time = std::stod(cells[0]);
    ev.seq = std::stoull(cells[1]);
    ev.kind = parse_event_kind(cells[2]);
    ev.node_id = cells[3].empty() ? -1 : std::stoi(cells[3]);
    ev.animal_id = cells[4].empty() ? -1 : std::stoi(cells[4]);
    ev.detail = line.substr(pos);
    events.push_back(std::move(ev));
  }
  return events;
}

}  // namespace cropguard
