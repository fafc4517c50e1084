#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "deadreckon/geometry.hpp"

namespace deadreckon {

using MagTriple = std::array<double, 3>;

/// One timestamped raw reading. Counts are cumulative; they are stored as
/// doubles so an unquantized simulation can be decoded exactly, but every
/// count that passes through a log file is integral.
struct EncoderSample {
  double t = 0.0;
  double left = 0.0;
  double right = 0.0;
  std::optional<MagTriple> mag;

  friend bool operator==(const EncoderSample&, const EncoderSample&) = default;
};

/// Planar pose. Heading 0 points along +y; x grows with sin(theta) and y with
/// cos(theta), so theta increases when the right wheel leads.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  friend bool operator==(const Pose&, const Pose&) = default;
};

struct TrajectoryPoint {
  int n = 0;
  double t = 0.0;
  double delta_left = 0.0;
  double delta_right = 0.0;
  double beta = 0.0;  // mm
  double mu = 0.0;    // rad
  Pose pose;
  double v = 0.0;     // mm/s
  bool flagged = false;

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

enum class UpdateMode {
  // x += beta*sin(mu), y += beta*cos(mu): the per-step increment is used as
  // an absolute heading. Only tracks straight-commanded runs.
  literal,
  // theta += mu, then x += beta*sin(theta), y += beta*cos(theta).
  accumulated,
};

const char* to_string(UpdateMode mode);
UpdateMode parse_update_mode(std::string_view text);

struct WheelDeltas {
  double left = 0.0;
  double right = 0.0;
};

/// Per-wheel count differences curr - prev. With a wrap modulus M each
/// difference is mapped to its representative in (-M/2, M/2].
WheelDeltas delta_counts(const EncoderSample& prev, const EncoderSample& curr,
                         const RobotGeometry& geom);

/// Nearest representative of `delta` modulo `modulus` in (-M/2, M/2].
double unwrap_delta(double delta, std::int64_t modulus);

double step_distance(double delta_left, double delta_right, const RobotGeometry& geom);
double step_heading_change(double delta_left, double delta_right, const RobotGeometry& geom);

Pose advance_pose(const Pose& pose, double beta, double mu, UpdateMode mode);

double step_speed(double beta, double dt);
double step_acceleration(double v, double v_prev, double dt);

/// atan2(my, mx) in (-pi, pi].
double heading_from_magnetometer(double mx, double my);

/// Dead-reckons a whole log. Point n is derived from samples n-1 and n.
std::vector<TrajectoryPoint> track(std::span<const EncoderSample> samples,
                                   const RobotGeometry& geom,
                                   UpdateMode mode = UpdateMode::accumulated,
                                   const Pose& origin = {});

/// Accelerations between consecutive points, (v_n - v_{n-1}) / (t_n - t_{n-1}).
/// One entry per point after the first.
std::vector<double> accelerations(std::span<const TrajectoryPoint> points);

}  // namespace deadreckon
