#include "deadreckon/log_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "deadreckon/error.hpp"

namespace deadreckon {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Splits on LF, strips a trailing CR, and drops the empty tail left by a
// final newline. Line numbers are 1-based.
std::vector<std::string_view> lines_of(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return lines;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size() && std::isfinite(out);
}

bool parse_integer(std::string_view s, double& out) {
  std::int64_t v = 0;
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return false;
  out = static_cast<double>(v);
  return true;
}

bool is_integral(double v) { return std::isfinite(v) && std::nearbyint(v) == v; }

std::string format_integer(double v) {
  std::array<char, 64> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v + 0.0,
                                     std::chars_format::fixed, 0);
  std::string s(buf.data(), p);
  if (s == "-0") s = "0";
  return s;
}

// Fixed notation with trailing zeros (and a bare point) removed.
std::string format_time(double t) {
  std::string s = format_fixed(t, 6);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

std::string format_count(double v) { return is_integral(v) ? format_integer(v) : format_fixed(v); }

[[noreturn]] void bad_header(std::string_view expected, std::string_view got) {
  throw Error(ErrorCode::MalformedHeader,
              "expected '" + std::string(expected) + "', got '" + std::string(got) + "'");
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  std::array<char, 128> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                     std::chars_format::fixed, decimals);
  if (ec != std::errc{}) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  std::string s(buf.data(), p);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

ParsedLog parse_log(std::string_view text, std::string source_name) {
  ParsedLog result;
  result.doc.source_name = std::move(source_name);

  const auto lines = lines_of(text);
  if (lines.empty()) bad_header(kLogHeader, "");
  if (lines[0] != kLogHeader) bad_header(kLogHeader, lines[0]);

  auto diag = [&](std::size_t index, Severity sev, std::string msg) {
    result.diagnostics.push_back({static_cast<int>(index + 1), sev, std::move(msg)});
  };

  bool saw_error = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != 6) {
      diag(i, Severity::error, "expected 6 fields, got " + std::to_string(fields.size()));
      saw_error = true;
      continue;
    }
    EncoderSample s;
    if (!parse_double(fields[0], s.t) || s.t < 0.0) {
      diag(i, Severity::error, "t_s must be a non-negative decimal");
      saw_error = true;
      continue;
    }
    if (!parse_integer(fields[1], s.left) || !parse_integer(fields[2], s.right)) {
      diag(i, Severity::error, "wheel counts must be integers");
      saw_error = true;
      continue;
    }
    const int present = !fields[3].empty() + !fields[4].empty() + !fields[5].empty();
    if (present == 3) {
      MagTriple m{};
      if (!parse_integer(fields[3], m[0]) || !parse_integer(fields[4], m[1]) ||
          !parse_integer(fields[5], m[2])) {
        diag(i, Severity::error, "magnetometer values must be integers");
        saw_error = true;
        continue;
      }
      s.mag = m;
    } else if (present != 0) {
      diag(i, Severity::warning, "partial magnetometer triple ignored");
    }
    if (!result.doc.samples.empty() && !(s.t > result.doc.samples.back().t)) {
      diag(i, Severity::error,
           "non-monotonic time " + std::string(fields[0]) + " (previous " +
               format_time(result.doc.samples.back().t) + "); row dropped");
      saw_error = true;
      continue;
    }
    result.doc.has_magnetometer = result.doc.has_magnetometer || s.mag.has_value();
    result.doc.samples.push_back(s);
  }

  if (saw_error && result.doc.samples.empty()) {
    throw Error(ErrorCode::NoValidRows, "no valid rows in " +
                                            (result.doc.source_name.empty() ? std::string("log")
                                                                            : result.doc.source_name));
  }
  return result;
}

std::string write_log(const LogDocument& doc) {
  std::string out(kLogHeader);
  out += '\n';
  for (const auto& s : doc.samples) {
    if (!is_integral(s.left) || !is_integral(s.right)) {
      throw Error(ErrorCode::NonIntegralCounts, "counts at t=" + format_time(s.t) + " are not integral");
    }
    out += format_time(s.t);
    out += ',';
    out += format_integer(s.left);
    out += ',';
    out += format_integer(s.right);
    if (s.mag) {
      for (double m : *s.mag) {
        if (!is_integral(m)) {
          throw Error(ErrorCode::NonIntegralCounts,
                      "magnetometer at t=" + format_time(s.t) + " is not integral");
        }
        out += ',';
        out += format_integer(m);
      }
    } else {
      out += ",,,";
    }
    out += '\n';
  }
  return out;
}

namespace {

void append_point(std::string& out, const TrajectoryPoint& p) {
  out += std::to_string(p.n);
  out += ',';
  out += format_fixed(p.t);
  out += ',';
  out += format_count(p.delta_left);
  out += ',';
  out += format_count(p.delta_right);
  for (double v : {p.beta, p.mu, p.pose.theta, p.pose.x, p.pose.y, p.v}) {
    out += ',';
    out += format_fixed(v);
  }
  out += ',';
  out += p.flagged ? '1' : '0';
}

}  // namespace

std::string write_trajectory(std::span<const TrajectoryPoint> points) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& p : points) {
    append_point(out, p);
    out += '\n';
  }
  return out;
}

std::string write_trajectory(std::span<const TrajectoryPoint> points,
                             std::span<const double> theta_smooth) {
  if (theta_smooth.size() != points.size()) {
    throw Error(ErrorCode::InvalidConfig, "smoothed heading count does not match trajectory");
  }
  std::string out(kTrajectoryHeader);
  out += ",theta_smooth_rad\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    append_point(out, points[i]);
    out += ',';
    out += format_fixed(theta_smooth[i]);
    out += '\n';
  }
  return out;
}

std::vector<TrajectoryPoint> parse_trajectory(std::string_view text) {
  const auto lines = lines_of(text);
  const std::string smooth_header = std::string(kTrajectoryHeader) + ",theta_smooth_rad";
  if (lines.empty()) bad_header(kTrajectoryHeader, "");
  if (lines[0] != kTrajectoryHeader && lines[0] != smooth_header) bad_header(kTrajectoryHeader, lines[0]);

  std::vector<TrajectoryPoint> points;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() < 11) {
      throw Error(ErrorCode::NoValidRows, "trajectory line " + std::to_string(i + 1) + " is short");
    }
    TrajectoryPoint p;
    double n = 0.0;
    double flagged = 0.0;
    const bool ok = parse_integer(f[0], n) && parse_double(f[1], p.t) &&
                    parse_double(f[2], p.delta_left) && parse_double(f[3], p.delta_right) &&
                    parse_double(f[4], p.beta) && parse_double(f[5], p.mu) &&
                    parse_double(f[6], p.pose.theta) && parse_double(f[7], p.pose.x) &&
                    parse_double(f[8], p.pose.y) && parse_double(f[9], p.v) &&
                    parse_integer(f[10], flagged);
    if (!ok) {
      throw Error(ErrorCode::NoValidRows, "trajectory line " + std::to_string(i + 1) + " is malformed");
    }
    p.n = static_cast<int>(n);
    p.flagged = flagged != 0.0;
    points.push_back(p);
  }
  return points;
}

std::string write_truth(std::span<const TruthSample> truth) {
  std::string out(kTruthHeader);
  out += '\n';
  for (const auto& s : truth) {
    out += format_time(s.t);
    for (double v : {s.pose.x, s.pose.y, s.pose.theta}) {
      out += ',';
      out += format_fixed(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<TruthSample> parse_truth(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kTruthHeader) bad_header(kTruthHeader, lines.empty() ? "" : lines[0]);
  std::vector<TruthSample> truth;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    TruthSample s;
    if (f.size() != 4 || !parse_double(f[0], s.t) || !parse_double(f[1], s.pose.x) ||
        !parse_double(f[2], s.pose.y) || !parse_double(f[3], s.pose.theta)) {
      throw Error(ErrorCode::NoValidRows, "truth line " + std::to_string(i + 1) + " is malformed");
    }
    truth.push_back(s);
  }
  return truth;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace deadreckon
