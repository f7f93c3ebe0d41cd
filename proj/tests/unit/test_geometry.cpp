#include "doctest.h"

#include <random>
#include <sstream>

#include "cropguard/errors.hpp"
#include "cropguard/geometry.hpp"
#include "../support/oracles.hpp"

using namespace cropguard;

namespace {

std::vector<oracle::Pt> as_oracle(const Placement& p) {
  std::vector<oracle::Pt> out;
  for (const auto& q : p.positions) out.push_back({q.x, q.y});
  return out;
}

}  // namespace

TEST_CASE("grid placement on a 20 x 20 field uses four sensors") {
  const Field field{20, 20, 0};
  const auto p = plan_grid_placement(field, 10);
  REQUIRE(p.size() == 4);
  CHECK(coverage_fraction(p, field, 0.1) == 1.0);
  // Worst lattice point is a corner, 5*sqrt(2) from its cell center.
  CHECK(oracle::worst_interior_distance(as_oracle(p), 20, 20, 0.1) == doctest::Approx(7.0711).epsilon(1e-4));
}

TEST_CASE("grid placement on a tiny field is a single centered sensor") {
  const auto p = plan_grid_placement({1, 1, 0}, 10);
  REQUIRE(p.size() == 1);
  CHECK(p.positions[0] == Point{0.5, 0.5});
}

TEST_CASE("grid placement on 100 x 50 uses 8 x 4 sensors and covers everything") {
  const Field field{100, 50, 0};
  const auto p = plan_grid_placement(field, 10);
  CHECK(p.size() == 32);
  CHECK(oracle::worst_interior_distance(as_oracle(p), 100, 50, 0.1) < 10.0);
  CHECK(coverage_fraction(p, field, 0.1) == 1.0);
}

TEST_CASE("perimeter placement") {
  SUBCASE("40 x 40 needs eight sensors 20 m apart") {
    const auto p = plan_perimeter_placement({40, 40, 0}, 10);
    CHECK(p.size() == 8);
    CHECK(oracle::worst_boundary_distance(as_oracle(p), 40, 40, 0.1) <= 10.0 + 1e-9);
    CHECK(p.positions[0] == Point{0, 0});
    CHECK(p.positions[2] == Point{40, 40});
  }
  SUBCASE("10 x 10 is covered by its corners") {
    const auto p = plan_perimeter_placement({10, 10, 0}, 10);
    CHECK(p.size() == 4);
    CHECK(oracle::worst_boundary_distance(as_oracle(p), 10, 10, 0.1) == doctest::Approx(5.0));
  }
  SUBCASE("degenerate field") {
    CHECK_THROWS_AS((void)plan_perimeter_placement({0, 10, 0}, 10), InvalidArgument);
    CHECK_THROWS_AS((void)plan_grid_placement({10, 0, 0}, 10), InvalidArgument);
    CHECK_THROWS_AS((void)plan_grid_placement({10, 10, 0}, 0), InvalidArgument);
  }
}

TEST_CASE("coverage fraction") {
  const Field field{40, 40, 0};
  CHECK(coverage_fraction(Placement{}, field, 0.5) == 0.0);

  const Placement center{.positions = {{20, 20}}, .sensor_radius = 10};
  const double analytic = 3.141592653589793 * 100.0 / 1600.0;
  CHECK(coverage_fraction(center, field, 0.1) == doctest::Approx(analytic).epsilon(0.01 / analytic));

  CHECK_THROWS_AS((void)coverage_fraction(center, field, 0.0), InvalidArgument);
}

TEST_CASE("sensor cost is count times unit cost") {
  Placement p;
  p.positions.assign(4, Point{});
  CHECK(sensor_count_cost(p, 10) == 40);
  CHECK(sensor_count_cost(Placement{}, 10) == 0);
  p.positions.assign(32, Point{});
  CHECK(sensor_count_cost(p, 12.5) == 400);
  CHECK_THROWS_AS((void)sensor_count_cost(p, -1), InvalidArgument);
}

TEST_CASE("field validation") {
  CHECK_NOTHROW((Field{10, 10, 4.9}.validate()));
  CHECK_THROWS_AS((Field{10, 10, 5}.validate()), InvalidArgument);
  CHECK_THROWS_AS((Field{10, 10, -1}.validate()), InvalidArgument);
}

TEST_CASE("placement csv") {
  std::ostringstream out;
  write_placement_csv(out, Placement{.positions = {{5, 5}, {15, 5}}, .sensor_radius = 10});
  CHECK(out.str() == "sensor_id,x_m,y_m\n1,5.000,5.000\n2,15.000,5.000\n");
}

TEST_CASE("property: grid placement always covers, stays inside and is monotone in radius") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dim(1.0, 80.0);
  std::uniform_real_distribution<double> rad(2.0, 25.0);
  for (int i = 0; i < 40; ++i) {
    const Field field{dim(gen), dim(gen), 0};
    const double r = rad(gen);
    const auto p = plan_grid_placement(field, r);
    INFO("field " << field.width << "x" << field.height << " r=" << r);
    for (const auto& q : p.positions) CHECK(field.contains(q));
    CHECK(oracle::worst_interior_distance(as_oracle(p), field.width, field.height, 0.25) <= r + 1e-9);
    CHECK(plan_grid_placement(field, r * 1.3).size() <= p.size());
    CHECK(plan_grid_placement(field, r).positions == p.positions);

    const auto perim = plan_perimeter_placement(field, r);
    CHECK(oracle::worst_boundary_distance(as_oracle(perim), field.width, field.height, 0.25) <= r + 1e-9);
  }
}

TEST_CASE("property: coverage at 0.1 m on sampled fields") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> dim(5.0, 45.0);
  for (int i = 0; i < 6; ++i) {
    const Field field{dim(gen), dim(gen), 0};
    CHECK(coverage_fraction(plan_grid_placement(field, 10), field, 0.1) == 1.0);
  }
}
