#include "deadreckon/odometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "deadreckon/error.hpp"

namespace deadreckon {

const char* to_string(UpdateMode mode) {
  return mode == UpdateMode::literal ? "literal" : "accumulated";
}

UpdateMode parse_update_mode(std::string_view text) {
  if (text == "literal") return UpdateMode::literal;
  if (text == "accumulated") return UpdateMode::accumulated;
  throw Error(ErrorCode::InvalidConfig, "unknown update mode '" + std::string(text) + "'");
}

double unwrap_delta(double delta, std::int64_t modulus) {
  const double m = static_cast<double>(modulus);
  double r = std::fmod(delta, m);  // (-m, m)
  if (r > m / 2.0) r -= m;
  if (r <= -m / 2.0) r += m;
  return r;
}

WheelDeltas delta_counts(const EncoderSample& prev, const EncoderSample& curr,
                         const RobotGeometry& geom) {
  if (!(curr.t > prev.t)) {
    throw Error(ErrorCode::NonMonotonicTime,
                "sample at t=" + std::to_string(curr.t) + " does not follow t=" + std::to_string(prev.t));
  }
  WheelDeltas d{curr.left - prev.left, curr.right - prev.right};
  if (geom.wrap_modulus) {
    d.left = unwrap_delta(d.left, *geom.wrap_modulus);
    d.right = unwrap_delta(d.right, *geom.wrap_modulus);
  }
  return d;
}

double step_distance(double delta_left, double delta_right, const RobotGeometry& geom) {
  return ((delta_right + delta_left) / 2.0) / counts_per_mm(geom);
}

double step_heading_change(double delta_left, double delta_right, const RobotGeometry& geom) {
  const double degrees = (delta_right - delta_left) / counts_per_degree(geom);
  return degrees * std::numbers::pi / 180.0;
}

Pose advance_pose(const Pose& pose, double beta, double mu, UpdateMode mode) {
  if (mode == UpdateMode::literal) {
    return Pose{pose.x + beta * std::sin(mu), pose.y + beta * std::cos(mu), mu};
  }
  const double theta = pose.theta + mu;
  return Pose{pose.x + beta * std::sin(theta), pose.y + beta * std::cos(theta), theta};
}

double step_speed(double beta, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::ZeroTimeStep, "dt must be > 0");
  return beta / dt;
}

double step_acceleration(double v, double v_prev, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::ZeroTimeStep, "dt must be > 0");
  return (v - v_prev) / dt;
}

double heading_from_magnetometer(double mx, double my) {
  if (mx == 0.0 && my == 0.0) {
    throw Error(ErrorCode::DegenerateField, "magnetometer x and y are both zero");
  }
  const double h = std::atan2(my, mx);
  // atan2 yields -pi for (negative, -0.0); fold it onto the closed end.
  return h == -std::numbers::pi ? std::numbers::pi : h;
}

std::vector<TrajectoryPoint> track(std::span<const EncoderSample> samples,
                                   const RobotGeometry& geom, UpdateMode mode,
                                   const Pose& origin) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::EmptyLog, "need at least 2 samples, got " + std::to_string(samples.size()));
  }
  geom.validate();

  std::vector<TrajectoryPoint> points;
  points.reserve(samples.size() - 1);
  Pose pose = origin;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto& prev = samples[i - 1];
    const auto& curr = samples[i];
    const auto d = delta_counts(prev, curr, geom);

    TrajectoryPoint p;
    p.n = static_cast<int>(i);
    p.t = curr.t;
    p.delta_left = d.left;
    p.delta_right = d.right;
    p.beta = step_distance(d.left, d.right, geom);
    p.mu = step_heading_change(d.left, d.right, geom);
    pose = advance_pose(pose, p.beta, p.mu, mode);
    p.pose = pose;
    p.v = step_speed(p.beta, curr.t - prev.t);
    points.push_back(p);
  }
  return points;
}

std::vector<double> accelerations(std::span<const TrajectoryPoint> points) {
  std::vector<double> out;
  for (std::size_t i = 1; i < points.size(); ++i) {
    out.push_back(step_acceleration(points[i].v, points[i - 1].v, points[i].t - points[i - 1].t));
  }
  return out;
}

}  // namespace deadreckon
