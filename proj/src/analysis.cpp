#include "deadreckon/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

#include "deadreckon/error.hpp"

namespace deadreckon {

RegressionFit linear_fit(std::span<const Point2> points) {
  if (points.size() < 2) throw Error(ErrorCode::DegenerateX, "linear fit needs at least 2 points");

  const double n = static_cast<double>(points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& p : points) {
    mean_x += p.x;
    mean_y += p.y;
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - mean_x;
    const double dy = p.y - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error(ErrorCode::DegenerateX, "all x values are identical");

  RegressionFit fit;
  fit.n_points = static_cast<int>(points.size());
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;

  double ss_res = 0.0;
  for (const auto& p : points) {
    const double r = p.y - (fit.slope * p.x + fit.intercept);
    ss_res += r * r;
  }
  // Constant y is fitted exactly by a flat line; report it as fully explained.
  fit.r2 = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

double theoretical_distance(double speed_mm_s, double duration_s) {
  if (speed_mm_s < 0.0 || duration_s < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "commanded speed and duration must be >= 0");
  }
  return speed_mm_s * duration_s / 1000.0;
}

double measured_distance(std::span<const TrajectoryPoint> points) {
  double total = 0.0;
  for (const auto& p : points) total += std::abs(p.beta);
  return total / 1000.0;
}

double drift_metric(std::span<const TrajectoryPoint> points, const Pose& origin) {
  if (points.empty()) throw Error(ErrorCode::EmptyTrajectory, "drift needs at least one point");
  if (measured_distance(points) == 0.0) throw Error(ErrorCode::ZeroPath, "trajectory never moved");
  const auto& last = points.back().pose;
  return std::atan2(last.x - origin.x, last.y - origin.y) * 180.0 / std::numbers::pi;
}

VelocityStats velocity_stats(std::span<const TrajectoryPoint> points) {
  VelocityStats stats;
  if (points.empty()) return stats;
  for (const auto& p : points) stats.mean_mm_s += p.v;
  stats.mean_mm_s /= static_cast<double>(points.size());
  for (const auto& p : points) stats.stddev_mm_s += (p.v - stats.mean_mm_s) * (p.v - stats.mean_mm_s);
  stats.stddev_mm_s = std::sqrt(stats.stddev_mm_s / static_cast<double>(points.size()));
  for (double a : accelerations(points)) stats.max_abs_accel_mm_s2 = std::max(stats.max_abs_accel_mm_s2, std::abs(a));
  return stats;
}

RunReport build_report(std::span<const TrajectoryPoint> points, double commanded_speed_mm_s,
                       double commanded_duration_s, std::optional<double> actual_m,
                       UpdateMode mode, const RobotGeometry& geometry) {
  if (points.empty()) throw Error(ErrorCode::EmptyTrajectory, "cannot report on an empty trajectory");
  if (actual_m && !(*actual_m >= 0.0)) throw Error(ErrorCode::InvalidConfig, "actual distance must be >= 0");

  RunReport report;
  report.actual_distance_m = actual_m;
  report.theoretical_distance_m = theoretical_distance(commanded_speed_mm_s, commanded_duration_s);
  report.measured_distance_m = measured_distance(points);
  report.drift_deg = drift_metric(points);
  report.mode = mode;
  report.geometry = geometry;
  report.velocity = velocity_stats(points);

  std::vector<Point2> xy;
  xy.reserve(points.size());
  for (const auto& p : points) xy.push_back({p.pose.x, p.pose.y});
  try {
    report.fit = linear_fit(xy);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateX) throw;
  }
  return report;
}

std::string report_json(const RunReport& report, int indent) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["actual_distance_m"] = report.actual_distance_m ? ordered_json(*report.actual_distance_m) : ordered_json();
  j["theoretical_distance_m"] = report.theoretical_distance_m;
  j["measured_distance_m"] = report.measured_distance_m;
  if (report.fit) {
    j["fit"] = {{"slope", report.fit->slope}, {"intercept", report.fit->intercept}, {"r2", report.fit->r2}};
  } else {
    j["fit"] = nullptr;
  }
  j["drift_deg"] = report.drift_deg;
  j["mode"] = to_string(report.mode);
  ordered_json geom;
  geom["wheel_diameter_mm"] = report.geometry.wheel_diameter_mm;
  geom["wheelbase_mm"] = report.geometry.wheelbase_mm;
  geom["counts_per_rev"] = report.geometry.counts_per_rev;
  geom["wrap_modulus"] = report.geometry.wrap_modulus ? ordered_json(*report.geometry.wrap_modulus) : ordered_json();
  geom["counts_per_mm"] = counts_per_mm(report.geometry);
  geom["counts_per_degree"] = counts_per_degree(report.geometry);
  j["geometry"] = geom;
  j["velocity"] = {{"mean_mm_s", report.velocity.mean_mm_s},
                   {"stddev_mm_s", report.velocity.stddev_mm_s},
                   {"max_abs_accel_mm_s2", report.velocity.max_abs_accel_mm_s2}};
  j["final_compass_heading_deg"] =
      report.final_compass_heading_deg ? ordered_json(*report.final_compass_heading_deg) : ordered_json();
  return j.dump(indent) + "\n";
}

}  // namespace deadreckon
