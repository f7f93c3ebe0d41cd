#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "cropguard/report.hpp"
#include "json.hpp"
#include "../support/scenarios.hpp"

using namespace cropguard;

TEST_CASE("latency table replica") {
  const auto rows = table2_replica(reference_latency_table());
  REQUIRE(rows.size() == 9);
  CHECK(rows.back().hops == 3);
  CHECK(rows.back().bytes == 100);
  CHECK(rows.back().distance_m == 30);
  CHECK(rows.back().seconds == 0.411);

  std::ostringstream out;
  write_table2_csv(out, rows);
  const auto text = out.str();
  CHECK(text.rfind("distance_m,bytes,hops,seconds\n10,10,1,0.048\n", 0) == 0);
  CHECK(text.find("30,100,3,0.411\n") != std::string::npos);
}

TEST_CASE("throughput table replica") {
  const auto rows = table4_replica(reference_throughput_steps());
  REQUIRE(rows.size() == 6);
  CHECK(rows.front().band == "< -50");
  CHECK(rows.front().bits_per_sec == 40000);
  CHECK(rows[1].bits_per_sec == 35000);
  CHECK(rows[2].bits_per_sec == 28000);
  CHECK(rows[3].bits_per_sec == 25000);
  CHECK(rows[4].bits_per_sec == 20000);
  CHECK(rows.back().bits_per_sec == 20000);
}

TEST_CASE("rssi comparison against the fitted model") {
  const auto rows = rssi_comparison(calibrated_pathloss());
  REQUIRE(rows.size() == 3);
  // Frozen residuals of the least-squares fit at 10, 20 and 30 m.
  CHECK(rows[0].residual_db == doctest::Approx(-0.107).epsilon(0.01));
  CHECK(rows[1].residual_db == doctest::Approx(0.289).epsilon(0.01));
  CHECK(rows[2].residual_db == doctest::Approx(-0.183).epsilon(0.01));
  CHECK(max_abs_residual(rows) < 2.0);
  double sum = 0;
  for (const auto& r : rows) sum += r.residual_db;
  CHECK(sum == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("run summary") {
  const auto r = run(testing_scenarios::chain_scenario());
  const auto summary = run_summary(r);
  REQUIRE(summary.protection_rate);
  CHECK(*summary.protection_rate == 1.0);
  CHECK(summary.total_consumed_mah > 0.0);
  const auto doc = nlohmann::json::parse(summary_json(summary));
  CHECK(doc["protection_rate"] == 1.0);
  CHECK(nlohmann::json::parse(metrics_json(r.metrics))["intrusions"] == 1);

  Scenario quiet;
  quiet.duration_s = 5;
  const auto empty = run_summary(run(quiet));
  CHECK_FALSE(empty.protection_rate);
  CHECK(nlohmann::json::parse(summary_json(empty))["protection_rate"] == "n/a");
}

TEST_CASE("figure data files") {
  const auto dir = std::filesystem::temp_directory_path() / "cropguard_fig_test";
  std::filesystem::remove_all(dir);
  write_figure_data(dir, RadioModels{});
  for (const char* name : {"latency.dat", "rssi.dat", "throughput.dat"}) {
    CHECK(std::filesystem::file_size(dir / name) > 0);
  }
  std::filesystem::remove_all(dir);
}
