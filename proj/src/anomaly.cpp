#include "deadreckon/anomaly.hpp"

#include <cmath>
#include <set>
#include <string>

#include "json.hpp"

#include "deadreckon/error.hpp"

namespace deadreckon {

const char* to_string(RepairPolicy policy) {
  switch (policy) {
    case RepairPolicy::flag_only: return "flag_only";
    case RepairPolicy::hold_last: return "hold_last";
    case RepairPolicy::interpolate: return "interpolate";
  }
  return "flag_only";
}

RepairPolicy parse_repair_policy(std::string_view text) {
  if (text == "flag" || text == "flag_only") return RepairPolicy::flag_only;
  if (text == "hold" || text == "hold_last") return RepairPolicy::hold_last;
  if (text == "interp" || text == "interpolate") return RepairPolicy::interpolate;
  throw Error(ErrorCode::InvalidConfig, "unknown repair policy '" + std::string(text) + "'");
}

const char* to_string(WheelSide side) { return side == WheelSide::left ? "left" : "right"; }

void ScanConfig::validate() const {
  if (!(max_delta_per_step > 0.0) || !std::isfinite(max_delta_per_step)) {
    throw Error(ErrorCode::InvalidConfig, "max_delta_per_step must be > 0");
  }
  if (!(reference_dt > 0.0) || !std::isfinite(reference_dt)) {
    throw Error(ErrorCode::InvalidConfig, "reference_dt must be > 0");
  }
}

namespace {

double allowed_delta(const ScanConfig& cfg, double dt) {
  return cfg.max_delta_per_step * (dt / cfg.reference_dt);
}

}  // namespace

AnomalyReport scan(std::span<const EncoderSample> samples, const ScanConfig& cfg,
                   const RobotGeometry& geom) {
  cfg.validate();
  if (samples.size() < 2) throw Error(ErrorCode::EmptyLog, "scan needs at least 2 samples");

  AnomalyReport report;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto d = delta_counts(samples[i - 1], samples[i], geom);
    const double allowed = allowed_delta(cfg, samples[i].t - samples[i - 1].t);
    const int step = static_cast<int>(i);
    if (std::abs(d.left) > allowed) report.flagged_steps.push_back({step, WheelSide::left, d.left, allowed});
    if (std::abs(d.right) > allowed) report.flagged_steps.push_back({step, WheelSide::right, d.right, allowed});
  }
  return report;
}

RepairResult repair(std::span<const EncoderSample> samples, const AnomalyReport& report,
                    const ScanConfig& cfg, const RobotGeometry& geom) {
  cfg.validate();
  RepairResult result;
  result.samples.assign(samples.begin(), samples.end());
  if (cfg.policy == RepairPolicy::flag_only || report.flagged_steps.empty()) return result;

  const std::size_t n = samples.size();
  for (const auto& f : report.flagged_steps) {
    if (f.step < 1 || static_cast<std::size_t>(f.step) >= n) {
      throw Error(ErrorCode::StepOutOfRange, "flagged step " + std::to_string(f.step) +
                                                 " is outside a log of " + std::to_string(n) + " samples");
    }
  }

  // deltas[w][i] is the step ending at sample i; index 0 is unused.
  std::vector<double> deltas[2] = {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<double> dts(n, 0.0);
  bool integral = true;
  for (std::size_t i = 1; i < n; ++i) {
    const auto d = delta_counts(samples[i - 1], samples[i], geom);
    deltas[0][i] = d.left;
    deltas[1][i] = d.right;
    dts[i] = samples[i].t - samples[i - 1].t;
    integral = integral && std::nearbyint(d.left) == d.left && std::nearbyint(d.right) == d.right;
  }

  std::vector<bool> flagged[2] = {std::vector<bool>(n, false), std::vector<bool>(n, false)};
  for (const auto& f : report.flagged_steps) flagged[f.side == WheelSide::right][f.step] = true;

  auto hold = [&](std::size_t i) {
    deltas[0][i] = 0.0;
    deltas[1][i] = 0.0;
  };

  if (cfg.policy == RepairPolicy::hold_last) {
    for (std::size_t i = 1; i < n; ++i) {
      if (flagged[0][i] || flagged[1][i]) hold(i);
    }
  } else {
    std::set<std::size_t> held;
    for (int w = 0; w < 2; ++w) {
      for (std::size_t i = 1; i < n; ++i) {
        if (!flagged[w][i]) continue;
        std::size_t lo = i - 1;
        while (lo >= 1 && flagged[w][lo]) --lo;
        std::size_t hi = i + 1;
        while (hi < n && flagged[w][hi]) ++hi;
        if (lo < 1 || hi >= n) {
          held.insert(i);
          continue;
        }
        const double rate_lo = deltas[w][lo] / dts[lo];
        const double rate_hi = deltas[w][hi] / dts[hi];
        const double frac = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
        const double allowed = allowed_delta(cfg, dts[i]);
        double value = (rate_lo + frac * (rate_hi - rate_lo)) * dts[i];
        if (integral) {
          value = std::nearbyint(value);
          if (std::abs(value) > allowed) value = std::trunc(value);
        }
        deltas[w][i] = value;
      }
    }
    for (std::size_t i : held) {
      result.diagnostics.push_back("UnrepairableBoundary: step " + std::to_string(i) +
                                   " has no unflagged neighbour on both sides; held last reading");
      hold(i);
    }
  }

  for (std::size_t i = 1; i < n; ++i) {
    result.samples[i].left = result.samples[i - 1].left + deltas[0][i];
    result.samples[i].right = result.samples[i - 1].right + deltas[1][i];
  }
  return result;
}

void mark_flags(std::span<TrajectoryPoint> points, const AnomalyReport& report) {
  std::set<int> steps;
  for (const auto& f : report.flagged_steps) steps.insert(f.step);
  for (auto& p : points) {
    if (steps.contains(p.n)) p.flagged = true;
  }
}

std::string anomaly_report_json(const AnomalyReport& report, RepairPolicy policy) {
  nlohmann::ordered_json j;
  j["flagged_steps"] = nlohmann::ordered_json::array();
  for (const auto& f : report.flagged_steps) {
    j["flagged_steps"].push_back(
        {{"step", f.step}, {"side", to_string(f.side)}, {"observed", f.observed}, {"allowed", f.allowed}});
  }
  j["policy"] = to_string(policy);
  j["repaired"] = report.repaired;
  return j.dump(2) + "\n";
}

}  // namespace deadreckon
