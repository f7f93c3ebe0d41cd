#include "doctest.h"

#include <random>
#include <set>
#include <sstream>

#include "cropguard/errors.hpp"
#include "cropguard/radio.hpp"
#include "../support/oracles.hpp"

using namespace cropguard;

TEST_CASE("latency anchors are reproduced exactly") {
  const auto table = reference_latency_table();
  const int bytes[] = {10, 50, 100};
  const double expected[3][3] = {{0.048, 0.090, 0.114}, {0.082, 0.120, 0.200}, {0.115, 0.224, 0.411}};
  for (int h = 1; h <= 3; ++h) {
    for (int b = 0; b < 3; ++b) CHECK(hop_latency_total(bytes[b], h, table) == expected[h - 1][b]);
  }
  CHECK(hop_latency_total(100, 3, table) == 0.411);
  CHECK(hop_latency_total(50, 1, table) == 0.090);
}

TEST_CASE("latency interpolation and extrapolation") {
  const auto table = reference_latency_table();
  SUBCASE("extra hops add the last per-hop increment") {
    CHECK(hop_latency_total(100, 4, table) == doctest::Approx(0.622).epsilon(1e-12));
    CHECK(hop_latency_total(10, 5, table) == doctest::Approx(0.115 + 2 * 0.033).epsilon(1e-12));
  }
  SUBCASE("small payloads clamp to the first anchor") {
    CHECK(hop_latency_total(1, 1, table) == 0.048);
    CHECK(hop_latency_total(5, 2, table) == 0.082);
  }
  SUBCASE("linear between anchors") {
    CHECK(hop_latency_total(30, 1, table) == doctest::Approx(0.069));
    CHECK(hop_latency_total(75, 3, table) == doctest::Approx(0.3175));
  }
  SUBCASE("past the last anchor the last slope continues") {
    CHECK(hop_latency_total(150, 2, table) == doctest::Approx(0.280));
  }
  SUBCASE("argument errors") {
    CHECK_THROWS_AS((void)hop_latency_total(0, 1, table), InvalidArgument);
    CHECK_THROWS_AS((void)hop_latency_total(10, 0, table), InvalidArgument);
  }
}

TEST_CASE("latency table validation rejects non-monotone anchors") {
  auto table = reference_latency_table();
  CHECK_NOTHROW(table.validate());
  table.seconds[1][1] = 0.05;
  CHECK_THROWS_AS(table.validate(), InvalidArgument);
}

TEST_CASE("property: latency is monotone in payload and hops") {
  const auto table = reference_latency_table();
  for (int h = 1; h <= 8; ++h) {
    for (int b = 1; b <= 300; ++b) {
      const double t = hop_latency_total(b, h, table);
      CHECK(t > 0.0);
      CHECK(hop_latency_total(b + 1, h, table) >= t);
      CHECK(hop_latency_total(b, h + 1, table) >= t);
    }
  }
}

TEST_CASE("rssi at distance") {
  const PathLossModel model{.ref_rssi_dbm = -60, .exponent_n = 2.7, .noise_sigma_db = 0, .max_link_range_m = 800};
  CHECK(rssi_at(10, model) == -60.0);
  CHECK(rssi_at(100, model) == doctest::Approx(-87.0));
  CHECK_THROWS_AS((void)rssi_at(0, model), InvalidArgument);
  CHECK_THROWS_AS((void)rssi_at(-3, model), InvalidArgument);
  CHECK_THROWS_AS((void)rssi_at(900, model), LinkOutOfRange);
  CHECK_NOTHROW((void)rssi_at(800, model));
}

TEST_CASE("calibrated model matches the measured means") {
  const auto model = calibrated_pathloss();
  CHECK(rssi_at(10, model) == doctest::Approx(-65.6).epsilon(0.5 / 65.6));
  CHECK(std::abs(rssi_at(10, model) - (-65.67)) <= 2.0);
  CHECK(std::abs(rssi_at(30, model) - (-84.33)) <= 2.0);
  CHECK(rssi_at(30, model) == doctest::Approx(-84.2).epsilon(0.3 / 84.2));
}

TEST_CASE("fit_pathloss") {
  SUBCASE("reference corpus agrees with the normal-equation oracle") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : reference_rssi_corpus()) pts.emplace_back(s.distance_m, s.rssi_dbm);
    const auto expected = oracle::least_squares_pathloss(pts);
    const auto model = fit_pathloss(reference_rssi_corpus());
    CHECK(model.exponent_n == doctest::Approx(expected.exponent).epsilon(1e-10));
    CHECK(model.ref_rssi_dbm == doctest::Approx(expected.intercept).epsilon(1e-10));
    // Frozen from the oracle: n = 3.89647, ref = -65.55986 dBm.
    CHECK(model.exponent_n == doctest::Approx(3.89647).epsilon(1e-5));
    CHECK(model.ref_rssi_dbm == doctest::Approx(-65.55986).epsilon(1e-6));
  }
  SUBCASE("two points fit exactly") {
    const auto model = fit_pathloss({{10, -60, 0, 0}, {100, -80, 0, 0}});
    CHECK(model.exponent_n == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(model.ref_rssi_dbm == doctest::Approx(-60.0).epsilon(1e-12));
  }
  SUBCASE("a single distance is degenerate") {
    CHECK_THROWS_AS((void)fit_pathloss({{20, -70, 0, 0}, {20, -72, 0, 0}, {20, -75, 0, 0}}), DegenerateFit);
    CHECK_THROWS_AS((void)fit_pathloss({}), DegenerateFit);
  }
}

TEST_CASE("stochastic rssi is reproducible for a fixed seed") {
  const auto model = calibrated_pathloss();
  Rng a(1234), b(1234), c(99);
  std::vector<double> xs, ys, zs;
  for (int i = 0; i < 50; ++i) {
    xs.push_back(rssi_at(20, model, a));
    ys.push_back(rssi_at(20, model, b));
    zs.push_back(rssi_at(20, model, c));
  }
  CHECK(xs == ys);
  CHECK(xs != zs);
  double mean = 0;
  for (double x : xs) mean += x / xs.size();
  CHECK(mean == doctest::Approx(rssi_at(20, model)).epsilon(0.05));
}

TEST_CASE("property: deterministic rssi strictly decreases with distance") {
  const auto model = calibrated_pathloss();
  double prev = rssi_at(0.5, model);
  for (double d = 1.0; d <= 800.0; d += 0.5) {
    const double r = rssi_at(d, model);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("throughput step function") {
  const auto steps = reference_throughput_steps();
  CHECK(throughput_for(-50, steps) == 35000);
  CHECK(throughput_for(-60, steps) == 28000);
  CHECK(throughput_for(-85, steps) == 20000);
  CHECK(throughput_for(-45, steps) == 40000);
  CHECK(throughput_for(-70, steps) == 25000);
  CHECK(throughput_for(-80, steps) == 20000);
  CHECK(throughput_for(-79.99, steps) == 25000);
}

TEST_CASE("property: throughput is monotone with a fixed range") {
  const auto steps = reference_throughput_steps();
  std::set<int> seen;
  int prev = throughput_for(0, steps);
  for (double r = 0; r >= -120; r -= 0.05) {
    const int t = throughput_for(r, steps);
    CHECK(t <= prev);
    prev = t;
    seen.insert(t);
  }
  CHECK(seen == std::set<int>{20000, 25000, 28000, 35000, 40000});
}

TEST_CASE("link viability is inclusive at the threshold") {
  const LinkPolicy policy{};
  CHECK(link_viable(-86, policy));
  CHECK_FALSE(link_viable(-95, policy));
  CHECK(link_viable(-90, policy));
}

TEST_CASE("rssi corpus csv") {
  std::istringstream in("distance_m,bytes,hops,rssi_dbm\n10,10,1,-67\n20,50,2,-79\n");
  const auto samples = read_rssi_csv(in);
  REQUIRE(samples.size() == 2);
  CHECK(samples[1].distance_m == 20);
  CHECK(samples[1].rssi_dbm == -79);
  CHECK(samples[1].hops == 2);

  std::istringstream bad("10,10,1\n");
  CHECK_THROWS_AS((void)read_rssi_csv(bad), ConfigError);
}
