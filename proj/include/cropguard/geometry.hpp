#pragma once

#include <cmath>
#include <iosfwd>
#include <vector>

namespace cropguard {

/// Field coordinates in meters. Origin at the south-west corner, x east, y north.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

[[nodiscard]] inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Rectangular field. The core is the rectangle inset by core_margin on every side.
struct Field {
  double width = 0.0;
  double height = 0.0;
  double core_margin = 0.0;

  /// Throws InvalidArgument unless width, height > 0 and 0 <= core_margin < min(w,h)/2.
  void validate() const;
  [[nodiscard]] bool contains(Point p) const;
  [[nodiscard]] bool in_core(Point p) const;
};

struct Placement {
  std::vector<Point> positions;
  double sensor_radius = 10.0;

  [[nodiscard]] std::size_t size() const { return positions.size(); }
};

/// Square grid with cell side at most radius*sqrt(2); one sensor per cell center.
/// The grid is ceil(w/s) x ceil(h/s) cells, and cells are shrunk evenly so every
/// center stays inside the field.
[[nodiscard]] Placement plan_grid_placement(const Field& field, double radius);

/// Corners first (SW, SE, NE, NW), then evenly spaced points along the S, E, N, W
/// edges so consecutive boundary sensors are at most 2*radius apart.
[[nodiscard]] Placement plan_perimeter_placement(const Field& field, double radius);

/// Fraction of lattice points (step apart, both boundaries included) within
/// sensor_radius of some sensor.
[[nodiscard]] double coverage_fraction(const Placement& placement, const Field& field,
                                       double sample_step);

[[nodiscard]] double sensor_count_cost(const Placement& placement, double unit_cost);

/// CSV with header `sensor_id,x_m,y_m`.
void write_placement_csv(std::ostream& out, const Placement& placement);

}  // namespace cropguard
