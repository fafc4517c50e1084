#include "deadreckon/simulator.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "deadreckon/error.hpp"

namespace deadreckon {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal(double mean, double sigma) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sigma * spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return mean + sigma * radius * std::cos(angle);
}

namespace {

double segment_duration(const Segment& seg) {
  if (const auto* s = std::get_if<Straight>(&seg)) return s->duration_s;
  const auto& t = std::get<TurnInPlace>(seg);
  return std::abs(t.angle_rad) / t.angular_speed_rad_s;
}

// Nominal (unbiased) wheel arc rates in mm/s.
std::pair<double, double> wheel_rates(const Segment& seg, const RobotGeometry& geom) {
  if (const auto* s = std::get_if<Straight>(&seg)) return {s->speed_mm_s, s->speed_mm_s};
  const auto& t = std::get<TurnInPlace>(seg);
  const double rim = 0.5 * geom.wheelbase_mm * t.angular_speed_rad_s * (t.angle_rad >= 0 ? 1.0 : -1.0);
  return {-rim, rim};
}

// Closed-form motion of a differential drive with constant wheel arc rates
// over `dt`: a circular arc, or a straight line when the rates agree.
Pose integrate(const Pose& p, double rate_left, double rate_right, double wheelbase, double dt) {
  const double v = 0.5 * (rate_left + rate_right);
  const double omega = (rate_right - rate_left) / wheelbase;
  const double theta = p.theta + omega * dt;
  if (std::abs(omega * dt) < 1e-12) {
    return Pose{p.x + v * dt * std::sin(p.theta), p.y + v * dt * std::cos(p.theta), theta};
  }
  const double radius = v / omega;
  return Pose{p.x + radius * (std::cos(p.theta) - std::cos(theta)),
              p.y + radius * (std::sin(theta) - std::sin(p.theta)), theta};
}

double round_micro(double t) { return std::nearbyint(t * 1e6) / 1e6; }

constexpr double kFieldStrength = 500.0;

}  // namespace

void MotionPlan::validate() const {
  if (!(dt_s > 0.0) || !std::isfinite(dt_s)) throw Error(ErrorCode::InvalidConfig, "dt must be > 0");
  for (const auto& seg : segments) {
    if (const auto* s = std::get_if<Straight>(&seg)) {
      if (!std::isfinite(s->speed_mm_s)) throw Error(ErrorCode::InvalidConfig, "speed must be finite");
      if (!(s->duration_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "segment duration must be > 0");
    } else {
      const auto& t = std::get<TurnInPlace>(seg);
      if (!std::isfinite(t.angle_rad) || t.angle_rad == 0.0) {
        throw Error(ErrorCode::InvalidConfig, "turn angle must be finite and nonzero");
      }
      if (!(t.angular_speed_rad_s > 0.0) || !std::isfinite(t.angular_speed_rad_s)) {
        throw Error(ErrorCode::InvalidConfig, "angular speed must be > 0");
      }
    }
  }
}

MotionPlan MotionPlan::straight(double speed_mm_s, double duration_s, double dt_s) {
  return MotionPlan{{Straight{speed_mm_s, duration_s}}, dt_s};
}

MotionPlan MotionPlan::square(double side_mm, double speed_mm_s, double angular_speed_rad_s,
                              double dt_s) {
  MotionPlan plan;
  plan.dt_s = dt_s;
  for (int i = 0; i < 4; ++i) {
    plan.segments.emplace_back(Straight{speed_mm_s, side_mm / speed_mm_s});
    plan.segments.emplace_back(TurnInPlace{std::numbers::pi / 2.0, angular_speed_rad_s});
  }
  return plan;
}

void NoiseModel::validate() const {
  if (!(gaussian_sigma >= 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma must be >= 0");
  if (!(spike_prob >= 0.0 && spike_prob <= 1.0)) throw Error(ErrorCode::InvalidConfig, "spike_prob must be in [0,1]");
  if (!std::isfinite(spike_magnitude)) throw Error(ErrorCode::InvalidConfig, "spike magnitude must be finite");
  if (!(left_scale > 0.0) || !(right_scale > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "wheel scales must be > 0");
  }
}

NoiseModel NoiseModel::noiseless(bool quantize) {
  NoiseModel m;
  m.quantize = quantize;
  return m;
}

NoiseModel NoiseModel::parse(std::string_view text, NoiseModel base) {
  NoiseModel m = base;
  std::size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "noise item '" + std::string(item) + "' is not key=value");
    }
    const auto key = item.substr(0, eq);
    const auto val = item.substr(eq + 1);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc{} || p != val.data() + val.size()) {
      throw Error(ErrorCode::InvalidConfig, "noise value for '" + std::string(key) + "' is not a number");
    }
    if (key == "quantize") m.quantize = v != 0.0;
    else if (key == "sigma") m.gaussian_sigma = v;
    else if (key == "spike_prob") m.spike_prob = v;
    else if (key == "spike_mag") m.spike_magnitude = v;
    else if (key == "bias") m.left_scale = m.right_scale = v;
    else if (key == "bias_l") m.left_scale = v;
    else if (key == "bias_r") m.right_scale = v;
    else if (key == "mag") m.magnetometer = v != 0.0;
    else throw Error(ErrorCode::InvalidConfig, "unknown noise key '" + std::string(key) + "'");
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  m.validate();
  return m;
}

SimulationResult simulate(const MotionPlan& plan, const RobotGeometry& geom, const NoiseModel& noise) {
  plan.validate();
  geom.validate();
  noise.validate();

  const double cpm = counts_per_mm(geom);
  Rng rng(noise.seed);
  SimulationResult result;

  Pose pose;
  double t = 0.0;
  double left = 0.0;  // cumulative counts before quantization
  double right = 0.0;

  auto emit = [&] {
    EncoderSample s;
    s.t = round_micro(t);
    s.left = noise.quantize ? std::nearbyint(left) : left;
    s.right = noise.quantize ? std::nearbyint(right) : right;
    if (noise.magnetometer) {
      // Field direction follows the true heading so the compass reads theta.
      s.mag = MagTriple{std::nearbyint(kFieldStrength * std::cos(pose.theta)),
                        std::nearbyint(kFieldStrength * std::sin(pose.theta)), 0.0};
    }
    result.log.samples.push_back(s);
    result.truth.push_back({s.t, pose});
  };

  int step = 0;
  emit();
  for (const auto& seg : plan.segments) {
    const double duration = segment_duration(seg);
    const auto steps = static_cast<long>(std::ceil(duration / plan.dt_s - 1e-9));
    const auto [nominal_left, nominal_right] = wheel_rates(seg, geom);
    const double rate_left = nominal_left * noise.left_scale;
    const double rate_right = nominal_right * noise.right_scale;

    double elapsed = 0.0;
    for (long k = 0; k < steps; ++k) {
      const double dt = std::min(plan.dt_s, duration - elapsed);
      elapsed += dt;
      ++step;

      pose = integrate(pose, rate_left, rate_right, geom.wheelbase_mm, dt);
      t += dt;

      double d_left = rate_left * dt * cpm;
      double d_right = rate_right * dt * cpm;
      if (noise.gaussian_sigma > 0.0) {
        d_left += rng.normal(0.0, noise.gaussian_sigma);
        d_right += rng.normal(0.0, noise.gaussian_sigma);
      }
      if (noise.spike_prob > 0.0) {
        for (const WheelSide side : {WheelSide::left, WheelSide::right}) {
          if (rng.uniform() < noise.spike_prob) {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            (side == WheelSide::left ? d_left : d_right) += sign * noise.spike_magnitude;
            result.injected_spikes.push_back({step, side});
          }
        }
      }
      left += d_left;
      right += d_right;
      emit();
    }
  }
  result.log.has_magnetometer = noise.magnetometer;
  result.log.source_name = "simulation";
  return result;
}

LogDocument inject_spike(const LogDocument& log, int step, WheelSide side, double magnitude) {
  if (step <= 0 || static_cast<std::size_t>(step) >= log.samples.size()) {
    throw Error(ErrorCode::StepOutOfRange, "spike step " + std::to_string(step) + " outside (0, " +
                                               std::to_string(log.samples.size()) + ")");
  }
  LogDocument out = log;
  for (std::size_t i = static_cast<std::size_t>(step); i < out.samples.size(); ++i) {
    (side == WheelSide::left ? out.samples[i].left : out.samples[i].right) += magnitude;
  }
  return out;
}

CommandedRun straight_run_preset(int test_number) {
  static constexpr CommandedRun kRuns[] = {
      {75.0, 65.0}, {75.0, 65.0}, {100.0, 41.0}, {100.0, 52.0},
      {50.0, 91.0}, {50.0, 90.0}, {150.0, 39.0},
  };
  if (test_number < 1 || test_number > 7) {
    throw Error(ErrorCode::InvalidConfig, "straight-run presets are test1..test7");
  }
  return kRuns[test_number - 1];
}

}  // namespace deadreckon
