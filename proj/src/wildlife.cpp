#include "cropguard/wildlife.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cropguard/errors.hpp"

namespace cropguard {

void SpeciesProfile::validate() const {
  if (!(hear_min_hz > 0.0) || !(hear_min_hz < hear_max_hz)) {
    throw InvalidArgument(fmt::format("species '{}': hearing range {}..{} Hz is invalid", name,
                                      hear_min_hz, hear_max_hz));
  }
  if (!(approach_speed > 0.0) || !(flee_speed > 0.0)) {
    throw InvalidArgument(fmt::format("species '{}': speeds must be positive", name));
  }
}

std::vector<SpeciesProfile> default_species_table() {
  return {
      {"Cow", 23, 35000},  {"Horse", 55, 33500}, {"Sheep", 100, 30000}, {"Dog", 67, 45000},
      {"Cat", 45, 64000},  {"Goat", 78, 34000},  {"Donkey", 10, 40000},
  };
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

Point normalized(Point v, Point fallback) {
  const double len = std::hypot(v.x, v.y);
  if (len < 1e-12) return fallback;
  return {v.x / len, v.y / len};
}

}  // namespace

const SpeciesProfile& find_species(const std::vector<SpeciesProfile>& table, std::string_view name) {
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const SpeciesProfile& s) { return iequals(s.name, name); });
  if (it == table.end()) throw NotFound(fmt::format("unknown species '{}'", name));
  return *it;
}

std::vector<SpeciesProfile> read_species_csv(std::istream& in) {
  std::vector<SpeciesProfile> table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (line.rfind("name,", 0) == 0) continue;

    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != 3 && cells.size() != 5) {
      throw ConfigError(fmt::format("species line {}: expected 3 or 5 columns", line_no));
    }
    SpeciesProfile s;
    try {
      s.name = cells[0];
      s.hear_min_hz = std::stod(cells[1]);
      s.hear_max_hz = std::stod(cells[2]);
      if (cells.size() == 5) {
        s.approach_speed = std::stod(cells[3]);
        s.flee_speed = std::stod(cells[4]);
      }
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("species line {}: malformed number", line_no));
    }
    try {
      s.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(fmt::format("species line {}: {}", line_no, e.what()));
    }
    table.push_back(std::move(s));
  }
  return table;
}

void write_species_csv(std::ostream& out, const std::vector<SpeciesProfile>& table) {
  out << "name,hear_min_hz,hear_max_hz,approach_speed,flee_speed\n";
  for (const auto& s : table) {
    fmt::print(out, "{},{},{},{},{}\n", s.name, s.hear_min_hz, s.hear_max_hz, s.approach_speed,
               s.flee_speed);
  }
}

std::string_view to_string(AnimalState state) {
  switch (state) {
    case AnimalState::Approaching: return "approaching";
    case AnimalState::Inside: return "inside";
    case AnimalState::Fleeing: return "fleeing";
    case AnimalState::Gone: return "gone";
  }
  return "unknown";
}

std::string_view to_string(Edge edge) {
  switch (edge) {
    case Edge::North: return "north";
    case Edge::South: return "south";
    case Edge::East: return "east";
    case Edge::West: return "west";
  }
  return "unknown";
}

Edge parse_edge(std::string_view text) {
  if (iequals(text, "north") || iequals(text, "n")) return Edge::North;
  if (iequals(text, "south") || iequals(text, "s")) return Edge::South;
  if (iequals(text, "east") || iequals(text, "e")) return Edge::East;
  if (iequals(text, "west") || iequals(text, "w")) return Edge::West;
  throw ConfigError(fmt::format("unknown edge '{}'", text));
}

Animal place_intrusion(const SpeciesProfile& species, Point entry, Point target, int id) {
  Animal animal;
  animal.id = id;
  animal.species = species;
  animal.position = entry;
  animal.heading = normalized({target.x - entry.x, target.y - entry.y}, {1.0, 0.0});
  animal.state = AnimalState::Approaching;
  return animal;
}

Animal spawn_intrusion(const Field& field, const SpeciesProfile& species, Edge edge, Rng& rng,
                       int id) {
  field.validate();
  std::uniform_real_distribution<double> along(0.0, 1.0);

  // Draw order is fixed: edge coordinate, then target x, then target y.
  const double u = along(rng);
  Point entry;
  switch (edge) {
    case Edge::North: entry = {u * field.width, field.height + kSpawnOffset}; break;
    case Edge::South: entry = {u * field.width, -kSpawnOffset}; break;
    case Edge::East: entry = {field.width + kSpawnOffset, u * field.height}; break;
    case Edge::West: entry = {-kSpawnOffset, u * field.height}; break;
  }
  const double m = field.core_margin;
  const Point target{m + along(rng) * (field.width - 2 * m), m + along(rng) * (field.height - 2 * m)};
  return place_intrusion(species, entry, target, id);
}

std::optional<DetectionEvent> detect(const MotionSensor& sensor, const Animal& animal, double now) {
  if (animal.state == AnimalState::Gone) return std::nullopt;
  if (distance(sensor.position, animal.position) > sensor.detection_radius) return std::nullopt;
  if (sensor.last_trigger && now - *sensor.last_trigger < sensor.refractory) return std::nullopt;
  return DetectionEvent{.sensor_id = sensor.node_id, .time = now};
}

bool repel_effective(const SpeciesProfile& species, double repeller_freq_hz) {
  return species.hear_min_hz <= repeller_freq_hz && repeller_freq_hz <= species.hear_max_hz;
}

Animal step_animal(const Animal& animal, double dt, const std::optional<ActiveRepeller>& repeller,
                   const Field& field) {
  if (!(dt > 0.0)) throw InvalidArgument(fmt::format("dt must be positive, got {}", dt));
  Animal next = animal;
  if (next.state == AnimalState::Gone) return next;

  const bool susceptible =
      next.state == AnimalState::Approaching || next.state == AnimalState::Inside;
  if (susceptible && repeller &&
      distance(next.position, repeller->position) <= repeller->radius &&
      repel_effective(next.species, repeller->frequency_hz)) {
    next.state = AnimalState::Fleeing;
    next.heading = normalized({next.position.x - repeller->position.x,
                               next.position.y - repeller->position.y},
                              {-next.heading.x, -next.heading.y});
  }

  const double speed =
      next.state == AnimalState::Fleeing ? next.species.flee_speed : next.species.approach_speed;
  next.position.x += next.heading.x * speed * dt;
  next.position.y += next.heading.y * speed * dt;

  const bool beyond_margin = next.position.x < -kExitMargin || next.position.y < -kExitMargin ||
                             next.position.x > field.width + kExitMargin ||
                             next.position.y > field.height + kExitMargin;
  if (next.state == AnimalState::Approaching && field.contains(next.position)) {
    next.state = AnimalState::Inside;
  } else if (next.state != AnimalState::Approaching && beyond_margin) {
    next.state = AnimalState::Gone;
  }
  return next;
}

}  // namespace cropguard
