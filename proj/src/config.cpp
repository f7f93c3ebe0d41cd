#include "cropguard/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cropguard/errors.hpp"

namespace cropguard {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"field", {"width", "height", "core_margin"}},
      {"placement", {"strategy", "radius", "sensors", "unit_cost", "refractory_s", "max_sensors"}},
      {"tree",
       {"coordinator", "sensor_role", "relays", "topology", "max_children", "max_depth",
        "max_routers_per_parent"}},
      {"radio",
       {"calibration", "ref_rssi_dbm", "exponent", "noise_sigma_db", "max_link_range_m",
        "disconnect_threshold_dbm", "stochastic", "payload_bytes"}},
      {"species", {"file"}},
      {"rns",
       {"frequency_hz", "coverage_m2", "current_ma", "repel_duration_s", "wake_delay_s", "sites",
        "repellers", "sms_latency_s", "dedup_window_s", "gateway_outage", "reaction_time_s"}},
      {"energy",
       {"sleep_ma", "rx_ma", "tx_ma", "repeller_ma", "capacity_mah", "initial_charge_fraction",
        "solar_recharge_ma", "daylight_fraction"}},
      {"sim", {"duration_s", "tick_dt", "seed"}},
  };
  return keys;
}

class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  [[nodiscard]] bool present() const { return tree_ != nullptr; }

  [[nodiscard]] std::optional<std::string> raw(const std::string& key) const {
    if (!tree_) return std::nullopt;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return boost::trim_copy(it->second.data());
  }

  [[nodiscard]] std::string require(const std::string& key) const {
    auto v = raw(key);
    if (!v) throw ConfigError(fmt::format("missing required key [{}] {}", name_, key));
    return *v;
  }

  [[nodiscard]] double number(const std::string& key, double fallback) const {
    const auto v = raw(key);
    return v ? to_number(key, *v) : fallback;
  }

  [[nodiscard]] double required_number(const std::string& key) const { return to_number(key, require(key)); }

  [[nodiscard]] int integer(const std::string& key, int fallback) const {
    const double v = number(key, fallback);
    if (v != static_cast<int>(v)) throw ConfigError(fmt::format("[{}] {} must be an integer", name_, key));
    return static_cast<int>(v);
  }

  [[nodiscard]] bool flag(const std::string& key, bool fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    const auto lower = boost::to_lower_copy(*v);
    if (lower == "true" || lower == "yes" || lower == "1" || lower == "on") return true;
    if (lower == "false" || lower == "no" || lower == "0" || lower == "off") return false;
    throw ConfigError(fmt::format("[{}] {}: expected a boolean, got '{}'", name_, key, *v));
  }

  [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const {
    return raw(key).value_or(fallback);
  }

 private:
  double to_number(const std::string& key, const std::string& value) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("[{}] {}: expected a number, got '{}'", name_, key, value));
    }
  }

  std::string name_;
  const pt::ptree* tree_;
};

template <typename Fn>
auto wrap(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
}

Intrusion parse_intrusion(const std::string& key, const std::string& value) {
  std::vector<std::string> parts;
  boost::split(parts, boost::trim_copy(value), boost::is_any_of(" \t"), boost::token_compress_on);
  if (parts.size() != 3 && parts.size() != 5) {
    throw ConfigError(fmt::format(
        "[intrusions] {}: expected '<time> <species> <edge> [<entry x:y> <target x:y>]'", key));
  }
  Intrusion intr;
  try {
    intr.time = std::stod(parts[0]);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("[intrusions] {}: bad time '{}'", key, parts[0]));
  }
  intr.species = parts[1];
  intr.edge = parse_edge(parts[2]);
  if (parts.size() == 5) {
    intr.entry = parse_point_list(parts[3]).at(0);
    intr.target = parse_point_list(parts[4]).at(0);
  }
  return intr;
}

}  // namespace

std::vector<Point> parse_point_list(const std::string& text) {
  std::vector<Point> points;
  std::vector<std::string> items;
  boost::split(items, text, boost::is_any_of(",;"));
  for (auto item : items) {
    boost::trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError(fmt::format("point '{}' is not x:y", item));
    try {
      points.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("point '{}' is not x:y", item));
    }
  }
  return points;
}

std::string format_point_list(const std::vector<Point>& points) {
  std::string out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) out += ", ";
    out += fmt::format("{}:{}", points[i].x, points[i].y);
  }
  return out;
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("scenario syntax error at line {}: {}", e.line(), e.message()));
  }

  for (const auto& [name, body] : root) {
    if (name == "intrusions") continue;
    const auto known = known_keys().find(name);
    if (known == known_keys().end()) throw ConfigError(fmt::format("unknown section [{}]", name));
    for (const auto& [key, value] : body) {
      if (!known->second.contains(key)) throw ConfigError(fmt::format("unknown key [{}] {}", name, key));
    }
  }
  const auto section = [&](const std::string& name) {
    const auto child = root.get_child_optional(pt::ptree::path_type(name, '\0'));
    return Section(name, child ? &*child : nullptr);
  };
  const auto resolve = [&](const std::string& file) {
    std::filesystem::path p(file);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };

  Scenario s;

  const auto field = section("field");
  if (!field.present()) throw ConfigError("missing [field] section");
  s.field.width = field.required_number("width");
  s.field.height = field.required_number("height");
  s.field.core_margin = field.number("core_margin", 0.0);

  const auto placement = section("placement");
  s.strategy = wrap("[placement] strategy", [&] { return parse_placement_strategy(placement.text("strategy", "grid")); });
  s.sensor_radius = placement.number("radius", 10.0);
  s.explicit_sensors = parse_point_list(placement.text("sensors", ""));
  s.sensor_unit_cost = placement.number("unit_cost", 0.0);
  s.refractory_s = placement.number("refractory_s", s.refractory_s);
  s.max_sensors = placement.integer("max_sensors", 0);
  if (s.strategy == PlacementStrategy::Explicit && s.explicit_sensors.empty()) {
    throw ConfigError("[placement] strategy = explicit needs a sensors list");
  }

  const auto tree = section("tree");
  if (const auto c = tree.raw("coordinator")) {
    const auto pts = parse_point_list(*c);
    if (pts.size() != 1) throw ConfigError("[tree] coordinator must be a single x:y point");
    s.coordinator = pts.front();
  } else {
    s.coordinator = {s.field.width / 2.0, 0.0};
  }
  s.sensor_role = wrap("[tree] sensor_role", [&] { return parse_role(tree.text("sensor_role", "router")); });
  if (s.sensor_role == Role::Coordinator) throw ConfigError("[tree] sensor_role cannot be coordinator");
  s.relays = parse_point_list(tree.text("relays", ""));
  s.topology = wrap("[tree] topology", [&] { return parse_topology(tree.text("topology", "tree")); });
  s.tree.max_children = tree.integer("max_children", s.tree.max_children);
  s.tree.max_depth = tree.integer("max_depth", s.tree.max_depth);
  s.tree.max_routers_per_parent = tree.integer("max_routers_per_parent", s.tree.max_routers_per_parent);

  const auto radio = section("radio");
  if (const auto corpus = radio.raw("calibration")) {
    std::ifstream file(resolve(*corpus));
    if (!file) throw ConfigError(fmt::format("[radio] calibration: cannot open '{}'", *corpus));
    s.radio.pathloss = wrap("[radio] calibration", [&] { return fit_pathloss(read_rssi_csv(file)); });
  }
  auto& pl = s.radio.pathloss;
  pl.ref_rssi_dbm = radio.number("ref_rssi_dbm", pl.ref_rssi_dbm);
  pl.exponent_n = radio.number("exponent", pl.exponent_n);
  pl.noise_sigma_db = radio.number("noise_sigma_db", pl.noise_sigma_db);
  pl.max_link_range_m = radio.number("max_link_range_m", pl.max_link_range_m);
  s.radio.policy.disconnect_threshold_dbm =
      radio.number("disconnect_threshold_dbm", s.radio.policy.disconnect_threshold_dbm);
  s.radio.stochastic_rssi = radio.flag("stochastic", false);
  s.payload_bytes = radio.integer("payload_bytes", s.payload_bytes);

  const auto species = section("species");
  if (const auto file = species.raw("file")) {
    std::ifstream in(resolve(*file));
    if (!in) throw ConfigError(fmt::format("[species] file: cannot open '{}'", *file));
    s.species = read_species_csv(in);
  }

  const auto rns = section("rns");
  s.repeller.frequency_hz = rns.number("frequency_hz", s.repeller.frequency_hz);
  s.repeller.coverage_area_m2 = rns.number("coverage_m2", s.repeller.coverage_area_m2);
  s.repeller.active_current_ma = rns.number("current_ma", s.repeller.active_current_ma);
  s.repeller.repel_duration_s = rns.number("repel_duration_s", s.repeller.repel_duration_s);
  s.wake_delay_s = rns.number("wake_delay_s", s.wake_delay_s);
  s.repeller_sites = wrap("[rns] sites", [&] { return parse_repeller_sites(rns.text("sites", "coordinator")); });
  s.explicit_repellers = parse_point_list(rns.text("repellers", ""));
  if (s.repeller_sites == RepellerSites::Explicit && s.explicit_repellers.empty()) {
    throw ConfigError("[rns] sites = explicit needs a repellers list");
  }
  s.sms.delivery_latency_s = rns.number("sms_latency_s", s.sms.delivery_latency_s);
  s.sms.dedup_window_s = rns.number("dedup_window_s", s.sms.dedup_window_s);
  s.gateway_outage = rns.flag("gateway_outage", false);
  s.reaction_time_s = rns.number("reaction_time_s", s.reaction_time_s);

  const auto energy = section("energy");
  s.power.sleep_ma = energy.number("sleep_ma", s.power.sleep_ma);
  s.power.rx_ma = energy.number("rx_ma", s.power.rx_ma);
  s.power.tx_ma = energy.number("tx_ma", s.power.tx_ma);
  s.power.repeller_ma = energy.number("repeller_ma", s.repeller.active_current_ma);
  s.battery_capacity_mah = energy.number("capacity_mah", s.battery_capacity_mah);
  s.initial_charge_fraction = energy.number("initial_charge_fraction", s.initial_charge_fraction);
  s.solar_recharge_ma = energy.number("solar_recharge_ma", s.solar_recharge_ma);
  s.daylight_fraction = energy.number("daylight_fraction", s.daylight_fraction);

  const auto sim = section("sim");
  s.duration_s = sim.number("duration_s", s.duration_s);
  s.tick_dt = sim.number("tick_dt", s.tick_dt);
  const double seed = sim.number("seed", static_cast<double>(s.seed));
  if (seed < 0) throw ConfigError("[sim] seed must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);

  if (const auto intr = root.get_child_optional("intrusions")) {
    for (const auto& [key, value] : *intr) s.intrusions.push_back(parse_intrusion(key, value.data()));
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open scenario '{}'", path.string()));
  return parse_scenario(in, path.parent_path());
}

void write_pathloss_config(std::ostream& out, const PathLossModel& model) {
  out << "[radio]\n";
  fmt::print(out, "ref_rssi_dbm = {}\n", model.ref_rssi_dbm);
  fmt::print(out, "exponent = {}\n", model.exponent_n);
  fmt::print(out, "noise_sigma_db = {}\n", model.noise_sigma_db);
  fmt::print(out, "max_link_range_m = {}\n", model.max_link_range_m);
}

void write_placement_config(std::ostream& out, const Placement& placement) {
  out << "[placement]\n";
  out << "strategy = explicit\n";
  fmt::print(out, "radius = {}\n", placement.sensor_radius);
  fmt::print(out, "sensors = {}\n", format_point_list(placement.positions));
}

}  // namespace cropguard
