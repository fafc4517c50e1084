#pragma once

#include <span>
#include <string>
#include <vector>

#include "deadreckon/odometry.hpp"

namespace deadreckon {

enum class RepairPolicy { flag_only, hold_last, interpolate };

const char* to_string(RepairPolicy policy);
/// Accepts "flag", "hold", "interp" and the long enumerator names.
RepairPolicy parse_repair_policy(std::string_view text);

struct ScanConfig {
  double max_delta_per_step = 300.0;  // counts allowed per reference_dt
  double reference_dt = 0.5;          // s
  RepairPolicy policy = RepairPolicy::flag_only;

  void validate() const;
};

enum class WheelSide { left, right };

const char* to_string(WheelSide side);

struct FlaggedStep {
  int step = 0;  // index of the later sample of the pair
  WheelSide side = WheelSide::left;
  double observed = 0.0;
  double allowed = 0.0;

  friend bool operator==(const FlaggedStep&, const FlaggedStep&) = default;
};

struct AnomalyReport {
  std::vector<FlaggedStep> flagged_steps;
  bool repaired = false;
};

/// Flags every wheel whose unwrapped per-step delta exceeds
/// max_delta_per_step * dt / reference_dt (strictly).
AnomalyReport scan(std::span<const EncoderSample> samples, const ScanConfig& cfg,
                   const RobotGeometry& geom = RobotGeometry::roomba600());

struct RepairResult {
  std::vector<EncoderSample> samples;
  std::vector<std::string> diagnostics;
};

/// Rewrites flagged steps in the delta domain and rebuilds the cumulative
/// series, so a corrupted step does not leak into later steps.
///
///  - flag_only:   samples returned unchanged.
///  - hold_last:   the whole reading at a flagged step is rejected; both
///                 wheels repeat the previous count (zero delta).
///  - interpolate: a flagged wheel's rate is linearly interpolated between
///                 the nearest unflagged steps on that wheel and rounded to
///                 whole counts. A flagged first or last step has only one
///                 neighbour; it falls back to hold_last with a diagnostic.
///
/// The output is unwrapped (no modulus applied) even if the input wrapped.
RepairResult repair(std::span<const EncoderSample> samples, const AnomalyReport& report,
                    const ScanConfig& cfg,
                    const RobotGeometry& geom = RobotGeometry::roomba600());

/// Copies the flag marks from `report` onto trajectory points (point n is step n).
void mark_flags(std::span<TrajectoryPoint> points, const AnomalyReport& report);

/// JSON object {"flagged_steps": [...], "policy": ...}.
std::string anomaly_report_json(const AnomalyReport& report, RepairPolicy policy);

}  // namespace deadreckon
