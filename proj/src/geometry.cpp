#include "cropguard/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cropguard/errors.hpp"

namespace cropguard {

void Field::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw InvalidArgument(fmt::format("field dimensions must be positive, got {}x{}", width, height));
  }
  if (!(core_margin >= 0.0) || !(core_margin < std::min(width, height) / 2.0)) {
    throw InvalidArgument(fmt::format("core_margin {} must be in [0, {})", core_margin,
                                      std::min(width, height) / 2.0));
  }
}

bool Field::contains(Point p) const {
  return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
}

bool Field::in_core(Point p) const {
  return p.x >= core_margin && p.x <= width - core_margin && p.y >= core_margin &&
         p.y <= height - core_margin;
}

namespace {

void check_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument(fmt::format("sensor radius must be positive, got {}", radius));
  }
}

// Points dividing [0, length] into `segments` equal parts, endpoints excluded.
std::vector<double> interior_stops(double length, double max_gap) {
  const auto segments = static_cast<int>(std::ceil(length / max_gap - 1e-12));
  std::vector<double> stops;
  for (int i = 1; i < segments; ++i) {
    stops.push_back(length * i / segments);
  }
  return stops;
}

}  // namespace

Placement plan_grid_placement(const Field& field, double radius) {
  field.validate();
  check_radius(radius);

  const double side = radius * std::sqrt(2.0);
  const auto nx = std::max(1, static_cast<int>(std::ceil(field.width / side - 1e-12)));
  const auto ny = std::max(1, static_cast<int>(std::ceil(field.height / side - 1e-12)));
  const double cell_w = field.width / nx;
  const double cell_h = field.height / ny;

  Placement placement{.positions = {}, .sensor_radius = radius};
  placement.positions.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      placement.positions.push_back({(i + 0.5) * cell_w, (j + 0.5) * cell_h});
    }
  }
  return placement;
}

Placement plan_perimeter_placement(const Field& field, double radius) {
  field.validate();
  check_radius(radius);

  const double w = field.width;
  const double h = field.height;
  const double gap = 2.0 * radius;

  Placement placement{.positions = {{0, 0}, {w, 0}, {w, h}, {0, h}}, .sensor_radius = radius};
  for (double s : interior_stops(w, gap)) placement.positions.push_back({s, 0});
  for (double s : interior_stops(h, gap)) placement.positions.push_back({w, s});
  for (double s : interior_stops(w, gap)) placement.positions.push_back({w - s, h});
  for (double s : interior_stops(h, gap)) placement.positions.push_back({0, h - s});
  return placement;
}

double coverage_fraction(const Placement& placement, const Field& field, double sample_step) {
  field.validate();
  if (!(sample_step > 0.0)) {
    throw InvalidArgument(fmt::format("sample_step must be positive, got {}", sample_step));
  }
  if (placement.positions.empty()) return 0.0;

  const auto nx = static_cast<long>(std::ceil(field.width / sample_step - 1e-9));
  const auto ny = static_cast<long>(std::ceil(field.height / sample_step - 1e-9));
  const double r2 = placement.sensor_radius * placement.sensor_radius * (1.0 + 1e-12);

  long covered = 0;
  for (long j = 0; j <= ny; ++j) {
    const double y = std::min(j * sample_step, field.height);
    for (long i = 0; i <= nx; ++i) {
      const double x = std::min(i * sample_step, field.width);
      const bool hit = std::any_of(placement.positions.begin(), placement.positions.end(),
                                   [&](Point s) {
                                     const double dx = s.x - x;
                                     const double dy = s.y - y;
                                     return dx * dx + dy * dy <= r2;
                                   });
      covered += hit ? 1 : 0;
    }
  }
  return static_cast<double>(covered) / static_cast<double>((nx + 1) * (ny + 1));
}

double sensor_count_cost(const Placement& placement, double unit_cost) {
  if (!(unit_cost >= 0.0)) {
    throw InvalidArgument(fmt::format("unit_cost must be non-negative, got {}", unit_cost));
  }
  return static_cast<double>(placement.positions.size()) * unit_cost;
}

void write_placement_csv(std::ostream& out, const Placement& placement) {
  out << "sensor_id,x_m,y_m\n";
  for (std::size_t i = 0; i < placement.positions.size(); ++i) {
    fmt::print(out, "{},{:.3f},{:.3f}\n", i + 1, placement.positions[i].x, placement.positions[i].y);
  }
}

}  // namespace cropguard
