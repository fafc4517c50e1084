#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "deadreckon/odometry.hpp"

namespace deadreckon {

inline constexpr std::string_view kLogHeader = "t_s,left_counts,right_counts,mag_x,mag_y,mag_z";
inline constexpr std::string_view kTrajectoryHeader =
    "n,t_s,delta_left,delta_right,beta_mm,mu_rad,theta_rad,x_mm,y_mm,v_mm_s,flagged";
inline constexpr std::string_view kTruthHeader = "t_s,x_mm,y_mm,theta_rad";

struct LogDocument {
  std::vector<EncoderSample> samples;
  std::string source_name;
  bool has_magnetometer = false;
};

enum class Severity { warning, error };

struct ParseDiagnostic {
  int line_number = 1;
  Severity severity = Severity::error;
  std::string message;
};

struct ParsedLog {
  LogDocument doc;
  std::vector<ParseDiagnostic> diagnostics;
};

/// Parses the canonical encoder CSV. Bad rows are dropped and reported;
/// throws MalformedHeader for a wrong header and NoValidRows when rows were
/// present but none survived.
ParsedLog parse_log(std::string_view text, std::string source_name = {});

/// Throws NonIntegralCounts if a count or magnetometer value is not integral.
std::string write_log(const LogDocument& doc);

std::string write_trajectory(std::span<const TrajectoryPoint> points);

/// Trajectory CSV with a trailing theta_smooth_rad column.
std::string write_trajectory(std::span<const TrajectoryPoint> points,
                             std::span<const double> theta_smooth);

/// Reads back a trajectory CSV produced by write_trajectory (the optional
/// smoothed column is ignored). Throws MalformedHeader / NoValidRows.
std::vector<TrajectoryPoint> parse_trajectory(std::string_view text);

struct TruthSample {
  double t = 0.0;
  Pose pose;
};

std::string write_truth(std::span<const TruthSample> truth);
std::vector<TruthSample> parse_truth(std::string_view text);

std::string format_fixed(double value, int decimals = 6);

// Whole-file helpers; throw std::runtime_error on I/O failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace deadreckon
