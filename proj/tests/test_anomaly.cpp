#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "deadreckon/anomaly.hpp"
#include "deadreckon/error.hpp"
#include "deadreckon/simulator.hpp"

using namespace deadreckon;

namespace {

std::vector<EncoderSample> ramp(int steps, double per_step, double dt = 0.5) {
  std::vector<EncoderSample> out;
  for (int i = 0; i <= steps; ++i) out.push_back({dt * i, per_step * i, per_step * i, {}});
  return out;
}

double final_error(const std::vector<EncoderSample>& samples, const std::vector<TruthSample>& truth,
                   UpdateMode mode) {
  const auto pts = track(samples, RobotGeometry::roomba600(), mode);
  return std::hypot(pts.back().pose.x - truth.back().pose.x, pts.back().pose.y - truth.back().pose.y);
}

}  // namespace

TEST_CASE("clean constant-speed stream raises no flags") {
  // 75 mm/s * 0.5 s * 2.2494 counts/mm = 84.4 counts per step.
  const auto r = scan(ramp(200, 84), ScanConfig{});
  CHECK(r.flagged_steps.empty());
}

TEST_CASE("a single +350 spike is flagged once") {
  const auto sim = simulate(MotionPlan::straight(75, 65), RobotGeometry::roomba600(), NoiseModel{});
  const auto spiked = inject_spike(sim.log, 10, WheelSide::right, 350);
  const auto r = scan(spiked.samples, ScanConfig{});
  REQUIRE(r.flagged_steps.size() == 1);
  CHECK(r.flagged_steps[0].step == 10);
  CHECK(r.flagged_steps[0].side == WheelSide::right);
  CHECK(r.flagged_steps[0].observed > r.flagged_steps[0].allowed);
  CHECK(r.flagged_steps[0].allowed == 300.0);
}

TEST_CASE("threshold is strict") {
  std::vector<EncoderSample> s{{0, 0, 0, {}}, {0.5, 300, -300, {}}, {1.0, 601, -100, {}}};
  const auto r = scan(s, ScanConfig{});
  REQUIRE(r.flagged_steps.size() == 1);
  CHECK(r.flagged_steps[0].step == 2);
  CHECK(r.flagged_steps[0].side == WheelSide::left);
}

TEST_CASE("threshold scales with the step length") {
  std::vector<EncoderSample> s{{0, 0, 0, {}}, {1.0, 500, 500, {}}, {1.25, 700, 600, {}}};
  const auto r = scan(s, ScanConfig{});
  // 1.0 s allows 600 counts; 0.25 s allows 150.
  REQUIRE(r.flagged_steps.size() == 1);
  CHECK(r.flagged_steps[0].step == 2);
  CHECK(r.flagged_steps[0].allowed == doctest::Approx(150.0));
}

TEST_CASE("scan uses unwrapped deltas") {
  std::vector<EncoderSample> s{{0, 65500, 10, {}}, {0.5, 48, 94, {}}};
  CHECK(scan(s, ScanConfig{}).flagged_steps.empty());
}

TEST_CASE("scan errors") {
  std::vector<EncoderSample> one{{0, 0, 0, {}}};
  CHECK_THROWS_AS(scan(one, ScanConfig{}), Error);
  ScanConfig bad;
  bad.max_delta_per_step = 0;
  CHECK_THROWS_AS(scan(ramp(3, 1), bad), Error);
}

TEST_CASE("repair policies") {
  const auto clean = ramp(20, 84);
  LogDocument doc{clean, "ramp", false};
  const auto spiked = inject_spike(doc, 7, WheelSide::left, 350).samples;

  ScanConfig cfg;
  const auto report = scan(spiked, cfg);
  REQUIRE(report.flagged_steps.size() == 1);

  SUBCASE("no flags leaves input untouched") {
    for (auto p : {RepairPolicy::flag_only, RepairPolicy::hold_last, RepairPolicy::interpolate}) {
      cfg.policy = p;
      CHECK(repair(clean, AnomalyReport{}, cfg).samples == clean);
    }
  }
  SUBCASE("flag_only") {
    cfg.policy = RepairPolicy::flag_only;
    CHECK(repair(spiked, report, cfg).samples == spiked);
  }
  SUBCASE("hold_last zeroes the step") {
    cfg.policy = RepairPolicy::hold_last;
    const auto out = repair(spiked, report, cfg).samples;
    CHECK(out[7].left == out[6].left);
    CHECK(out[7].right == out[6].right);
    for (std::size_t i = 8; i < out.size(); ++i) CHECK(out[i].left - out[i - 1].left == 84.0);
    CHECK(scan(out, cfg).flagged_steps.empty());
  }
  SUBCASE("interpolate reconstructs the ramp") {
    cfg.policy = RepairPolicy::interpolate;
    const auto out = repair(spiked, report, cfg);
    CHECK(out.diagnostics.empty());
    CHECK(out.samples == clean);
  }
}

TEST_CASE("interpolate follows a linear oracle between unflagged neighbours") {
  // Wheel speed ramps linearly; two consecutive corrupted steps in the middle.
  std::vector<EncoderSample> truth{{0, 0, 0, {}}};
  for (int i = 1; i <= 12; ++i) {
    truth.push_back({0.5 * i, truth.back().left + 10.0 * i, truth.back().right + 10.0 * i, {}});
  }
  auto bad = truth;
  for (std::size_t i = 5; i < bad.size(); ++i) bad[i].right += 400;
  for (std::size_t i = 6; i < bad.size(); ++i) bad[i].right -= 900;
  ScanConfig cfg;
  cfg.policy = RepairPolicy::interpolate;
  const auto report = scan(bad, cfg);
  REQUIRE(report.flagged_steps.size() == 2);
  const auto out = repair(bad, report, cfg);
  // Linear-interpolation oracle: deltas at steps 5 and 6 lie on the line
  // through the deltas at steps 4 (40) and 7 (70).
  CHECK(out.samples[5].right - out.samples[4].right == 50.0);
  CHECK(out.samples[6].right - out.samples[5].right == 60.0);
  CHECK(out.samples == truth);
}

TEST_CASE("interpolate falls back to hold at the boundary") {
  auto s = ramp(10, 50);
  for (std::size_t i = 10; i < s.size(); ++i) s[i].left += 1000;
  ScanConfig cfg;
  cfg.policy = RepairPolicy::interpolate;
  const auto report = scan(s, cfg);
  REQUIRE(report.flagged_steps.size() == 1);
  const auto out = repair(s, report, cfg);
  REQUIRE(out.diagnostics.size() == 1);
  CHECK(out.diagnostics[0].find("UnrepairableBoundary") != std::string::npos);
  CHECK(out.samples[10].left == out.samples[9].left);
  CHECK(scan(out.samples, cfg).flagged_steps.empty());
}

TEST_CASE("repair is idempotent under scan and sensitivity is monotone") {
  NoiseModel noise;
  noise.gaussian_sigma = 20;
  noise.spike_prob = 0.03;
  noise.spike_magnitude = 400;
  const auto geom = RobotGeometry::roomba600();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    noise.seed = seed;
    const auto sim = simulate(MotionPlan::straight(75, 65), geom, noise);
    for (auto policy : {RepairPolicy::hold_last, RepairPolicy::interpolate}) {
      ScanConfig cfg;
      cfg.policy = policy;
      const auto report = scan(sim.log.samples, cfg);
      const auto fixed = repair(sim.log.samples, report, cfg);
      CHECK(scan(fixed.samples, cfg).flagged_steps.empty());
    }
    std::size_t previous = 0;
    for (double threshold : {1000.0, 400.0, 300.0, 150.0, 90.0, 50.0}) {
      ScanConfig cfg;
      cfg.max_delta_per_step = threshold;
      const auto n = scan(sim.log.samples, cfg).flagged_steps.size();
      CHECK(n >= previous);
      previous = n;
    }
  }
}

TEST_CASE("a single reading error propagates in accumulated mode") {
  const auto geom = RobotGeometry::roomba600();
  const auto sim = simulate(MotionPlan::straight(75, 65), geom, NoiseModel{});

  double previous = 1e300;
  for (int step : {20, 50, 80, 110}) {
    const auto spiked = inject_spike(sim.log, step, WheelSide::right, 350).samples;
    const double acc = final_error(spiked, sim.truth, UpdateMode::accumulated);
    const double lit = final_error(spiked, sim.truth, UpdateMode::literal);
    CHECK(acc > lit);
    // Earlier errors leave more path to corrupt.
    CHECK(acc < previous);
    previous = acc;

    ScanConfig cfg;
    const auto report = scan(spiked, cfg);
    for (auto policy : {RepairPolicy::hold_last, RepairPolicy::interpolate}) {
      cfg.policy = policy;
      const auto fixed = repair(spiked, report, cfg).samples;
      CHECK(final_error(fixed, sim.truth, UpdateMode::accumulated) <= 0.1 * acc);
    }
  }
}

TEST_CASE("opposite-side spikes perturb distance but not heading") {
  const auto geom = RobotGeometry::roomba600();
  const auto sim = simulate(MotionPlan::straight(75, 10), geom, NoiseModel{});
  auto both = inject_spike(sim.log, 5, WheelSide::left, 350);
  both = inject_spike(both, 5, WheelSide::right, 350);
  const auto clean = track(sim.log.samples, geom);
  const auto pts = track(both.samples, geom);
  CHECK(pts[4].mu == clean[4].mu);
  CHECK(pts[4].beta == doctest::Approx(clean[4].beta + 350.0 / counts_per_mm(geom)));
}

TEST_CASE("mark_flags and JSON") {
  AnomalyReport r;
  r.flagged_steps.push_back({2, WheelSide::right, 434, 300});
  std::vector<TrajectoryPoint> pts(3);
  for (int i = 0; i < 3; ++i) pts[i].n = i + 1;
  mark_flags(pts, r);
  CHECK_FALSE(pts[0].flagged);
  CHECK(pts[1].flagged);
  const auto json = anomaly_report_json(r, RepairPolicy::hold_last);
  CHECK(json.find("\"side\": \"right\"") != std::string::npos);
  CHECK(json.find("\"policy\": \"hold_last\"") != std::string::npos);
  CHECK(parse_repair_policy("interp") == RepairPolicy::interpolate);
  CHECK_THROWS_AS(parse_repair_policy("magic"), Error);
}
