#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
};

Outcome cli(const std::string& args) {
  const auto capture = fs::temp_directory_path() / "cropguard_cli_stdout.txt";
  const std::string cmd = std::string("SENTINEL_LOG=quiet \"") + CROPGUARD_CLI_PATH + "\" " + args + " > \"" +
                          capture.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cropguard_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("tables") {
  const auto t2 = cli("tables --which 2");
  CHECK(t2.code == 0);
  CHECK(t2.out.find("30,100,3,0.411") != std::string::npos);
  CHECK(cli("tables --which 3").code == 0);
  CHECK(cli("tables --which 4").out.find("40000") != std::string::npos);
  CHECK(cli("tables --which 7").code == 2);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("simulate").code == 2);
  CHECK(cli("simulate /nonexistent.ini").code == 2);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("plan") {
  const auto dir = scratch("plan");
  write(dir / "f.ini", "[field]\nwidth = 20\nheight = 20\n[placement]\nunit_cost = 10\n");
  const auto ok = cli("plan " + (dir / "f.ini").string() + " --strategy grid --out " + (dir / "p.csv").string());
  CHECK(ok.code == 0);
  CHECK(ok.out.find("sensors: 4") != std::string::npos);
  CHECK(ok.out.find("estimated cost: 40.00") != std::string::npos);
  CHECK(fs::exists(dir / "p.csv"));

  write(dir / "capped.ini", "[field]\nwidth = 100\nheight = 100\n[placement]\nmax_sensors = 5\n");
  CHECK(cli("plan " + (dir / "capped.ini").string()).code == 1);
  CHECK(cli("plan " + (dir / "f.ini").string() + " --strategy hexagon").code == 2);
}

TEST_CASE("calibrate") {
  const auto dir = scratch("cal");
  const auto bundled = cli("calibrate");
  CHECK(bundled.code == 0);
  CHECK(bundled.out.find("exponent n: 3.8965") != std::string::npos);

  write(dir / "flat.csv", "distance_m,bytes,hops,rssi_dbm\n20,10,1,-70\n20,50,1,-72\n");
  CHECK(cli("calibrate " + (dir / "flat.csv").string()).code == 1);

  write(dir / "bad.csv", "distance_m,bytes,hops,rssi_dbm\n20,10\n");
  CHECK(cli("calibrate " + (dir / "bad.csv").string()).code == 2);

  CHECK(cli("calibrate --out " + (dir / "model.ini").string()).code == 0);
  CHECK(fs::exists(dir / "model.ini"));
}

TEST_CASE("simulate writes every artifact") {
  const auto dir = scratch("sim");
  const auto r = cli(std::string("simulate ") + CROPGUARD_DATA_DIR + "/chain.ini --seed 3 --out " + dir.string());
  CHECK(r.code == 0);
  for (const char* name : {"events.csv", "metrics.json", "sms.csv", "energy.csv", "tree.json", "summary.json"}) {
    CHECK(fs::exists(dir / name));
  }
  std::ifstream in(dir / "metrics.json");
  const auto metrics = nlohmann::json::parse(in);
  CHECK(metrics["repelled"] == 1);

  write(dir / "bad.ini", "[field]\nwidth = 40\nheight = 40\n[intrusions]\nx = 1 Unicorn north\n");
  CHECK(cli("simulate " + (dir / "bad.ini").string() + " --out " + dir.string()).code == 1);
}

TEST_CASE("figures") {
  const auto dir = scratch("fig");
  CHECK(cli("figures --out " + dir.string()).code == 0);
  CHECK(fs::exists(dir / "latency.dat"));
}
