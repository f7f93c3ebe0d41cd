#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cropguard/geometry.hpp"
#include "cropguard/radio.hpp"

namespace cropguard {

struct SpeciesProfile {
  std::string name;
  double hear_min_hz = 0.0;
  double hear_max_hz = 0.0;
  double approach_speed = 1.0;  // m/s
  double flee_speed = 2.0;      // m/s

  void validate() const;
};

/// Cow, Horse, Sheep, Dog, Cat, Goat, Donkey with their approximate hearing
/// ranges. Birds are not included; supply their range through a species file.
[[nodiscard]] std::vector<SpeciesProfile> default_species_table();

/// Case-insensitive lookup; throws NotFound.
[[nodiscard]] const SpeciesProfile& find_species(const std::vector<SpeciesProfile>& table,
                                                 std::string_view name);

/// CSV `name,hear_min_hz,hear_max_hz,approach_speed,flee_speed`.
[[nodiscard]] std::vector<SpeciesProfile> read_species_csv(std::istream& in);
void write_species_csv(std::ostream& out, const std::vector<SpeciesProfile>& table);

/// Ordered: a state never moves to an earlier enumerator.
enum class AnimalState { Approaching = 0, Inside = 1, Fleeing = 2, Gone = 3 };

[[nodiscard]] std::string_view to_string(AnimalState state);

struct Animal {
  int id = 0;
  SpeciesProfile species;
  Point position{};
  Point heading{1.0, 0.0};  // unit vector
  AnimalState state = AnimalState::Approaching;
};

enum class Edge { North, South, East, West };

[[nodiscard]] std::string_view to_string(Edge edge);
[[nodiscard]] Edge parse_edge(std::string_view text);

/// Distance outside the field at which intruders appear.
inline constexpr double kSpawnOffset = 1.0;
/// Margin beyond the field at which leaving animals are considered gone.
inline constexpr double kExitMargin = 5.0;

/// Places an animal kSpawnOffset outside a uniformly chosen point of `edge`,
/// heading for a uniformly chosen point of the field core.
[[nodiscard]] Animal spawn_intrusion(const Field& field, const SpeciesProfile& species, Edge edge,
                                     Rng& rng, int id = 0);

/// Animal at `entry` heading straight for `target`.
[[nodiscard]] Animal place_intrusion(const SpeciesProfile& species, Point entry, Point target,
                                     int id = 0);

struct MotionSensor {
  int node_id = 0;
  Point position{};
  double detection_radius = 10.0;
  double refractory = 5.0;
  std::optional<double> last_trigger;

  /// Marks the sensor as having fired at `now`.
  void record(double now) { last_trigger = now; }
};

/// Deliberately carries no description of the animal.
struct DetectionEvent {
  int sensor_id = 0;
  double time = 0.0;
};

/// Fires iff the animal is within the radius, not gone, and the sensor has not
/// fired during the last `refractory` seconds. Does not update the sensor.
[[nodiscard]] std::optional<DetectionEvent> detect(const MotionSensor& sensor, const Animal& animal,
                                                   double now);

[[nodiscard]] bool repel_effective(const SpeciesProfile& species, double repeller_freq_hz);

struct ActiveRepeller {
  Point position{};
  double radius = 0.0;
  double frequency_hz = 0.0;
};

/// Advances one animal by dt seconds. An audible repeller in range turns an
/// approaching or inside animal into a fleeing one, heading straight away from
/// the repeller at flee speed. Fleeing or wandering animals beyond the field plus
/// kExitMargin become Gone.
[[nodiscard]] Animal step_animal(const Animal& animal, double dt,
                                 const std::optional<ActiveRepeller>& repeller, const Field& field);

}  // namespace cropguard
