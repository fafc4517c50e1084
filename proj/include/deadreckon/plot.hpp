#pragma once

#include <optional>
#include <span>
#include <string>

#include "deadreckon/analysis.hpp"
#include "deadreckon/odometry.hpp"

namespace deadreckon {

/// Standalone SVG scatter of (x_mm, y_mm) with an optional fitted line.
/// Markers are <circle> elements; the fit, if any, is the only <line>.
std::string emit_plot(std::span<const TrajectoryPoint> points,
                      const std::optional<RegressionFit>& fit = std::nullopt);

}  // namespace deadreckon
