#include "deadreckon/geometry.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "deadreckon/error.hpp"

namespace deadreckon {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::ZeroTimeStep: return "ZeroTimeStep";
    case ErrorCode::DegenerateField: return "DegenerateField";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::NoValidRows: return "NoValidRows";
    case ErrorCode::NonIntegralCounts: return "NonIntegralCounts";
    case ErrorCode::StepOutOfRange: return "StepOutOfRange";
    case ErrorCode::DegenerateX: return "DegenerateX";
    case ErrorCode::ZeroPath: return "ZeroPath";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

void RobotGeometry::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(wheel_diameter_mm)) throw Error(ErrorCode::InvalidGeometry, "wheel diameter must be > 0");
  if (!positive(wheelbase_mm)) throw Error(ErrorCode::InvalidGeometry, "wheelbase must be > 0");
  if (!positive(counts_per_rev)) throw Error(ErrorCode::InvalidGeometry, "counts per revolution must be > 0");
  if (wrap_modulus && *wrap_modulus < 2) throw Error(ErrorCode::InvalidGeometry, "wrap modulus must be >= 2");
}

RobotGeometry RobotGeometry::roomba600() { return RobotGeometry{}; }

RobotGeometry RobotGeometry::parse(std::string_view text) {
  if (text == "roomba-600" || text == "roomba600") return roomba600();

  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    parts.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3 && parts.size() != 4) {
    throw Error(ErrorCode::InvalidGeometry,
                "expected a preset name or D,W,C[,M], got '" + std::string(text) + "'");
  }
  auto number = [&](std::string_view s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw Error(ErrorCode::InvalidGeometry, "not a number: '" + std::string(s) + "'");
    }
    return v;
  };
  RobotGeometry geom;
  geom.wheel_diameter_mm = number(parts[0]);
  geom.wheelbase_mm = number(parts[1]);
  geom.counts_per_rev = number(parts[2]);
  geom.wrap_modulus.reset();
  if (parts.size() == 4) {
    std::int64_t m = 0;
    const auto s = parts[3];
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), m);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw Error(ErrorCode::InvalidGeometry, "wrap modulus must be an integer");
    }
    geom.wrap_modulus = m;
  }
  geom.validate();
  return geom;
}

std::string RobotGeometry::describe() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << wheel_diameter_mm << ',' << wheelbase_mm << ',' << counts_per_rev;
  if (wrap_modulus) os << ',' << *wrap_modulus;
  return os.str();
}

double counts_per_mm(const RobotGeometry& geom) {
  return geom.counts_per_rev / (std::numbers::pi * geom.wheel_diameter_mm);
}

// An in-place revolution moves each wheel along a circle of diameter
// `wheelbase`, in opposite directions, so the differential count for 360
// degrees is twice that circumference in counts.
double counts_per_degree(const RobotGeometry& geom) {
  return geom.wheelbase_mm * std::numbers::pi * counts_per_mm(geom) * 2.0 / 360.0;
}

}  // namespace deadreckon
