#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "deadreckon/cli.hpp"
#include "deadreckon/log_io.hpp"
#include "deadreckon/simulator.hpp"

using namespace deadreckon;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "deadreckon");
  std::ostringstream out;
  std::ostringstream err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("deadreckon_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("track on a two-sample log") {
  TempDir dir;
  write_file(dir / "log.csv", std::string(kLogHeader) + "\n0,7,7,,,\n0.5,7,7,,,\n");
  const auto r = run({"track", "--input", dir / "log.csv", "--output", dir / "traj.csv"});
  CHECK(r.status == 0);
  const auto traj = read_file(dir / "traj.csv");
  CHECK(traj == std::string(kTrajectoryHeader) +
                    "\n1,0.500000,0,0,0.000000,0.000000,0.000000,0.000000,0.000000,0.000000,0\n");
}

TEST_CASE("simulate is deterministic per seed") {
  TempDir dir;
  const std::vector<std::string> base{"simulate", "--preset", "test1", "--seed", "42", "--noise", "sigma=3,spike_prob=0.02,spike_mag=350"};
  auto a = base;
  a.insert(a.end(), {"--output", dir / "a.csv", "--truth", dir / "a_truth.csv"});
  auto b = base;
  b.insert(b.end(), {"--output", dir / "b.csv"});
  REQUIRE(run(a).status == 0);
  const auto rb = run(b);
  REQUIRE(rb.status == 0);
  CHECK(rb.err.find("rng=mt19937_64/box-muller") != std::string::npos);
  CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
  CHECK(parse_truth(read_file(dir / "a_truth.csv")).size() == 131);
}

TEST_CASE("analyze a noiseless test1 simulation") {
  TempDir dir;
  REQUIRE(run({"simulate", "--preset", "test1", "--output", dir / "log.csv", "--truth", dir / "truth.csv"}).status == 0);
  const auto r = run({"analyze", "--input", dir / "log.csv", "--preset", "test1", "--truth", dir / "truth.csv",
                      "--plot", dir / "plot.svg"});
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("theoretical_distance_m").get<double>() == doctest::Approx(4.875));
  CHECK(std::abs(j.at("measured_distance_m").get<double>() - 4.875) < 0.002);
  CHECK(j.at("actual_distance_m").get<double>() == doctest::Approx(4.875));
  CHECK(j.at("fit").is_null());
  CHECK(j.at("mode") == "accumulated");
  CHECK(read_file(dir / "plot.svg").find("<svg") != std::string::npos);

  // A trajectory CSV is accepted as well.
  REQUIRE(run({"track", "--input", dir / "log.csv", "--output", dir / "traj.csv"}).status == 0);
  const auto t = run({"analyze", "--input", dir / "traj.csv", "--speed-mm-s", "75", "--duration-s", "65", "--actual-m", "5.83"});
  REQUIRE(t.status == 0);
  const auto k = nlohmann::json::parse(t.out);
  CHECK(k.at("actual_distance_m").get<double>() == 5.83);
  CHECK(k.at("measured_distance_m").get<double>() == doctest::Approx(j.at("measured_distance_m").get<double>()).epsilon(1e-6));
}

TEST_CASE("track output equals the library pipeline") {
  TempDir dir;
  REQUIRE(run({"simulate", "--preset", "square", "--noise", "sigma=2", "--seed", "7", "--output", dir / "log.csv"}).status == 0);
  for (const std::string mode : {"literal", "accumulated"}) {
    REQUIRE(run({"track", "--input", dir / "log.csv", "--output", dir / "traj.csv", "--mode", mode}).status == 0);
    const auto parsed = parse_log(read_file(dir / "log.csv"));
    const auto direct = track(parsed.doc.samples, RobotGeometry::roomba600(), parse_update_mode(mode));
    CHECK(read_file(dir / "traj.csv") == write_trajectory(direct));
  }
}

TEST_CASE("scan, repair and report") {
  TempDir dir;
  const auto sim = simulate(MotionPlan::straight(75, 65), RobotGeometry::roomba600(), NoiseModel{});
  write_file(dir / "spiked.csv", write_log(inject_spike(sim.log, 50, WheelSide::right, 350)));

  const auto s = run({"scan", "--input", dir / "spiked.csv", "--policy", "hold", "--repaired", dir / "fixed.csv"});
  REQUIRE(s.status == 0);
  const auto j = nlohmann::json::parse(s.out);
  REQUIRE(j.at("flagged_steps").size() == 1);
  CHECK(j["flagged_steps"][0]["step"] == 50);
  CHECK(j["flagged_steps"][0]["side"] == "right");
  CHECK(j["policy"] == "hold_last");
  CHECK(j["repaired"] == true);
  CHECK(run({"scan", "--input", dir / "fixed.csv"}).out.find("\"flagged_steps\": []") != std::string::npos);

  const auto flagged = run({"track", "--input", dir / "spiked.csv"});
  REQUIRE(flagged.status == 0);
  const auto pts = parse_trajectory(flagged.out);
  CHECK(pts[49].flagged);
  CHECK_FALSE(pts[48].flagged);

  const auto rep = run({"report", "--input", dir / "spiked.csv", "--preset", "test1", "--policy", "interp",
                        "--output", dir / "report.json", "--plot", dir / "report.svg"});
  REQUIRE(rep.status == 0);
  const auto k = nlohmann::json::parse(read_file(dir / "report.json"));
  CHECK(k.at("anomalies").at("flagged_steps").size() == 1);
  CHECK(k.at("anomalies").at("repaired") == true);
  CHECK(std::abs(k.at("drift_deg").get<double>()) < 0.1);
  const auto svg1 = read_file(dir / "report.svg");
  REQUIRE(run({"report", "--input", dir / "spiked.csv", "--preset", "test1", "--policy", "interp",
               "--output", dir / "report2.json", "--plot", dir / "report.svg"}).status == 0);
  CHECK(read_file(dir / "report.svg") == svg1);
  CHECK(read_file(dir / "report2.json") == read_file(dir / "report.json"));
}

TEST_CASE("smooth adds the filtered heading column") {
  TempDir dir;
  REQUIRE(run({"simulate", "--preset", "test3", "--noise", "sigma=5", "--seed", "3", "--output", dir / "log.csv"}).status == 0);
  const auto r = run({"smooth", "--input", dir / "log.csv", "--q", "1e-6", "--r", "0.0076", "--redrive"});
  REQUIRE(r.status == 0);
  CHECK(r.out.starts_with(std::string(kTrajectoryHeader) + ",theta_smooth_rad\n"));
  CHECK(parse_trajectory(r.out).size() == 82);
}

TEST_CASE("batch processing with several workers") {
  TempDir dir;
  std::vector<std::string> args{"report", "--preset", "test2", "--jobs", "3", "--output", dir / "out"};
  for (int i = 0; i < 5; ++i) {
    const auto name = dir / ("run" + std::to_string(i) + ".csv");
    REQUIRE(run({"simulate", "--preset", "test2", "--noise", "sigma=4", "--seed", std::to_string(i), "--output", name}).status == 0);
    args.insert(args.end(), {"--input", name});
  }
  REQUIRE(run(args).status == 0);
  for (int i = 0; i < 5; ++i) {
    const auto json = nlohmann::json::parse(read_file(dir / ("out/run" + std::to_string(i) + ".report.json")));
    CHECK(json.at("theoretical_distance_m").get<double>() == doctest::Approx(4.875));
  }

  // Same work single-threaded gives the same bytes.
  args[4] = "1";
  args[6] = dir / "serial";
  REQUIRE(run(args).status == 0);
  for (int i = 0; i < 5; ++i) {
    const auto name = "/run" + std::to_string(i) + ".report.json";
    CHECK(read_file(dir / ("out" + name)) == read_file(dir / ("serial" + name)));
  }
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).status == cli::kExitUsage);
  CHECK(run({"fly"}).status == cli::kExitUsage);
  CHECK(run({"track", "--input", "x.csv", "--bogus"}).status == cli::kExitUsage);
  CHECK(run({"track", "--input", "x.csv", "--mode", "sideways"}).status == cli::kExitUsage);
  CHECK(run({"simulate", "--output", "x.csv"}).status == cli::kExitUsage);
  CHECK(run({"simulate", "--preset", "test9"}).status == cli::kExitUsage);
  CHECK(run({"analyze", "--input", "x.csv"}).status == cli::kExitUsage);
  CHECK(run({"--help"}).status == cli::kExitOk);
}

TEST_CASE("data errors exit 2") {
  TempDir dir;
  auto r = run({"track", "--input", dir / "missing.csv"});
  CHECK(r.status == cli::kExitData);
  CHECK_FALSE(r.err.empty());

  write_file(dir / "bad.csv", "time,l,r\n1,2,3\n");
  r = run({"track", "--input", dir / "bad.csv"});
  CHECK(r.status == cli::kExitData);
  CHECK(r.err.find("MalformedHeader") != std::string::npos);

  write_file(dir / "short.csv", std::string(kLogHeader) + "\n0,1,1,,,\n");
  CHECK(run({"track", "--input", dir / "short.csv"}).status == cli::kExitData);

  CHECK(run({"simulate", "--preset", "test1", "--noise", "quantize=0"}).status == cli::kExitData);
  CHECK(run({"simulate", "--preset", "test1", "--noise", "sigma=-2"}).status == cli::kExitData);
}

TEST_CASE("dropped rows are reported on stderr") {
  TempDir dir;
  write_file(dir / "log.csv", std::string(kLogHeader) + "\n0,0,0,,,\n1,10,10,,,\n0.5,20,20,,,\n2,30,30,,,\n");
  const auto r = run({"track", "--input", dir / "log.csv"});
  CHECK(r.status == 0);
  CHECK(r.err.find(":4: error: non-monotonic time") != std::string::npos);
}

TEST_CASE("executable exit codes") {
  TempDir dir;
  const std::string exe = DEADRECKON_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " >" + (dir / "o.txt") + " 2>" + (dir / "e.txt")).c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status("simulate --preset test7 --output " + (dir / "log.csv")) == 0);
  CHECK(status("track --input " + (dir / "log.csv") + " --output " + (dir / "t.csv")) == 0);
  CHECK(status("track --nope") == 1);
  CHECK(status("track --input " + (dir / "nothing.csv")) == 2);
}
