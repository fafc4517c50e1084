#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace deadreckon {

/// Physical description of a differential-drive base.
///
/// Lengths are millimetres. `counts_per_rev` is real-valued because some
/// bases (the Roomba among them) report a non-integer tick count per wheel
/// revolution. `wrap_modulus`, when set, is the modulus of the raw hardware
/// counter; deltas are unwrapped against it.
struct RobotGeometry {
  double wheel_diameter_mm = 72.0;
  double wheelbase_mm = 235.0;
  double counts_per_rev = 508.8;
  std::optional<std::int64_t> wrap_modulus = 65536;

  /// Throws Error{InvalidGeometry} if any invariant is violated.
  void validate() const;

  /// iRobot Create 2 / Roomba 600 series.
  static RobotGeometry roomba600();

  /// Accepts a preset name ("roomba-600") or "D,W,C[,M]".
  static RobotGeometry parse(std::string_view text);

  std::string describe() const;
};

/// Encoder counts per millimetre of wheel travel.
double counts_per_mm(const RobotGeometry& geom);

/// Differential counts (right minus left) per degree of in-place rotation.
double counts_per_degree(const RobotGeometry& geom);

}  // namespace deadreckon
