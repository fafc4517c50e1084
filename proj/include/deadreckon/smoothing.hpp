#pragma once

#include <span>
#include <vector>

#include "deadreckon/odometry.hpp"

namespace deadreckon {

/// Scalar random-walk model for heading: x_k = x_{k-1} + w, z_k = x_k + v,
/// with var(w) = process_variance and var(v) = measurement_variance.
struct KalmanConfig {
  double process_variance = 1e-6;
  double measurement_variance = 0.0076;
  double initial_estimate = 0.0;
  double initial_variance = 1.0;

  void validate() const;
};

struct KalmanTrace {
  std::vector<double> estimates;
  std::vector<double> variances;  // posterior variance after each update
};

KalmanTrace kalman_filter(std::span<const double> headings, const KalmanConfig& cfg);

/// Filtered headings; same length as the input. Input must be unwrapped.
std::vector<double> kalman_smooth(std::span<const double> headings, const KalmanConfig& cfg);

/// Removes 2*pi jumps so consecutive outputs differ by the minimal equivalent step.
std::vector<double> unwrap_angles(std::span<const double> raw);

/// Rebuilds positions using `theta` as the absolute heading of each step.
/// beta and timing are kept from `points`.
std::vector<TrajectoryPoint> redrive(std::span<const TrajectoryPoint> points,
                                     std::span<const double> theta, const Pose& origin = {});

}  // namespace deadreckon
