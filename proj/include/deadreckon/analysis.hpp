#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>

#include "deadreckon/geometry.hpp"
#include "deadreckon/odometry.hpp"

namespace deadreckon {

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n_points = 0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Ordinary least squares y = slope*x + intercept.
///
/// Throws DegenerateX when fewer than two points are given or every x is the
/// same. When every y is the same the fit is exact and r2 is reported as 1.
RegressionFit linear_fit(std::span<const Point2> points);

/// Commanded speed times duration, in metres.
double theoretical_distance(double speed_mm_s, double duration_s);

/// Sum of |beta| in metres.
double measured_distance(std::span<const TrajectoryPoint> points);

/// Bearing of the final position seen from the origin, in degrees from +y,
/// positive towards +x. Throws ZeroPath when nothing moved.
double drift_metric(std::span<const TrajectoryPoint> points, const Pose& origin = {});

/// Step-speed fluctuation of a run; accelerations are between consecutive steps.
struct VelocityStats {
  double mean_mm_s = 0.0;
  double stddev_mm_s = 0.0;
  double max_abs_accel_mm_s2 = 0.0;
};

VelocityStats velocity_stats(std::span<const TrajectoryPoint> points);

struct RunReport {
  std::optional<double> actual_distance_m;
  double theoretical_distance_m = 0.0;
  double measured_distance_m = 0.0;
  std::optional<RegressionFit> fit;
  double drift_deg = 0.0;
  UpdateMode mode = UpdateMode::accumulated;
  RobotGeometry geometry;
  VelocityStats velocity;
  std::optional<double> final_compass_heading_deg;
};

/// Assembles the three-distance reconciliation, drift and an (x, y) fit.
/// The fit is omitted when the positions are degenerate (e.g. a perfectly
/// straight run along +y).
RunReport build_report(std::span<const TrajectoryPoint> points, double commanded_speed_mm_s,
                       double commanded_duration_s, std::optional<double> actual_m,
                       UpdateMode mode, const RobotGeometry& geometry);

std::string report_json(const RunReport& report, int indent = 2);

}  // namespace deadreckon
