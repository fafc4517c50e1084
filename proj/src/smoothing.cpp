#include "deadreckon/smoothing.hpp"

#include <cmath>
#include <numbers>

#include "deadreckon/error.hpp"

namespace deadreckon {

void KalmanConfig::validate() const {
  if (!(process_variance >= 0.0) || !(measurement_variance >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "q and r must be >= 0");
  }
  if (!(process_variance + measurement_variance > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "q + r must be > 0");
  }
  if (!(initial_variance > 0.0)) throw Error(ErrorCode::InvalidConfig, "initial variance must be > 0");
  if (!std::isfinite(initial_estimate)) throw Error(ErrorCode::InvalidConfig, "initial estimate must be finite");
}

KalmanTrace kalman_filter(std::span<const double> headings, const KalmanConfig& cfg) {
  cfg.validate();
  if (headings.empty()) throw Error(ErrorCode::InvalidConfig, "nothing to filter");

  KalmanTrace trace;
  trace.estimates.reserve(headings.size());
  trace.variances.reserve(headings.size());
  double estimate = cfg.initial_estimate;
  double variance = cfg.initial_variance;
  for (double z : headings) {
    variance += cfg.process_variance;
    const double gain = variance / (variance + cfg.measurement_variance);
    estimate = (1.0 - gain) * estimate + gain * z;  // exact passthrough when gain is 1
    variance *= 1.0 - gain;
    trace.estimates.push_back(estimate);
    trace.variances.push_back(variance);
  }
  return trace;
}

std::vector<double> kalman_smooth(std::span<const double> headings, const KalmanConfig& cfg) {
  return kalman_filter(headings, cfg).estimates;
}

std::vector<double> unwrap_angles(std::span<const double> raw) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i == 0) {
      out.push_back(raw[0]);
      continue;
    }
    double jump = std::remainder(raw[i] - raw[i - 1], two_pi);  // [-pi, pi]
    if (jump == -std::numbers::pi) jump = std::numbers::pi;
    out.push_back(out.back() + jump);
  }
  return out;
}

std::vector<TrajectoryPoint> redrive(std::span<const TrajectoryPoint> points,
                                     std::span<const double> theta, const Pose& origin) {
  if (theta.size() != points.size()) {
    throw Error(ErrorCode::InvalidConfig, "heading count does not match trajectory");
  }
  std::vector<TrajectoryPoint> out(points.begin(), points.end());
  Pose pose = origin;
  for (std::size_t i = 0; i < out.size(); ++i) {
    pose.theta = theta[i];
    pose.x += out[i].beta * std::sin(theta[i]);
    pose.y += out[i].beta * std::cos(theta[i]);
    out[i].pose = pose;
  }
  return out;
}

}  // namespace deadreckon
