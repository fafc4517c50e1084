#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "deadreckon/anomaly.hpp"
#include "deadreckon/geometry.hpp"
#include "deadreckon/log_io.hpp"
#include "deadreckon/rng.hpp"

namespace deadreckon {

struct Straight {
  double speed_mm_s = 0.0;
  double duration_s = 0.0;
};

/// Positive angle turns so that the right wheel leads (theta increases).
struct TurnInPlace {
  double angle_rad = 0.0;
  double angular_speed_rad_s = 0.0;  // magnitude, > 0
};

using Segment = std::variant<Straight, TurnInPlace>;

/// A sequence of constant-velocity segments sampled every `dt_s`. Each segment
/// is split into ceil(duration / dt) steps, the last one possibly shorter, so
/// no sample interval straddles a segment boundary.
struct MotionPlan {
  std::vector<Segment> segments;
  double dt_s = 0.5;

  void validate() const;

  static MotionPlan straight(double speed_mm_s, double duration_s, double dt_s = 0.5);
  /// Four legs of `side_mm` at `speed_mm_s`, each followed by a +90 degree turn.
  static MotionPlan square(double side_mm, double speed_mm_s, double angular_speed_rad_s,
                           double dt_s = 0.5);
};

struct NoiseModel {
  bool quantize = true;          // round cumulative counts to integers
  double gaussian_sigma = 0.0;   // counts per wheel per step
  double spike_prob = 0.0;       // per wheel per step
  double spike_magnitude = 0.0;  // counts, sign drawn at random
  double left_scale = 1.0;       // effective wheel radius multipliers
  double right_scale = 1.0;
  bool magnetometer = false;     // emit a synthetic compass triple
  std::uint64_t seed = 0;

  void validate() const;

  static NoiseModel noiseless(bool quantize = false);
  /// Parses "key=val,..." with keys quantize, sigma, spike_prob, spike_mag,
  /// bias (both wheels), bias_l, bias_r, mag. Unset keys keep `base` values.
  static NoiseModel parse(std::string_view text, NoiseModel base);
  static NoiseModel parse(std::string_view text) { return parse(text, NoiseModel{}); }
};

/// Both-wheel scale that turns the test1 preset's commanded 4.875 m into the
/// 5.83 m that was physically measured.
inline constexpr double kTest1ActualOverTheoretical = 5.83 / 4.875;

struct InjectedSpike {
  int step = 0;
  WheelSide side = WheelSide::left;

  friend bool operator==(const InjectedSpike&, const InjectedSpike&) = default;
};

struct SimulationResult {
  std::vector<TruthSample> truth;
  LogDocument log;
  std::vector<InjectedSpike> injected_spikes;
  std::string_view rng_algorithm = Rng::kAlgorithm;
};

SimulationResult simulate(const MotionPlan& plan, const RobotGeometry& geom,
                          const NoiseModel& noise);

/// Adds `magnitude` counts to one wheel from sample `step` onward: a single
/// bad delta that persists in the cumulative series.
LogDocument inject_spike(const LogDocument& log, int step, WheelSide side, double magnitude);

/// Commanded speed and duration of the seven reference straight runs, tests 1..7.
struct CommandedRun {
  double speed_mm_s;
  double duration_s;
};

CommandedRun straight_run_preset(int test_number);

}  // namespace deadreckon
