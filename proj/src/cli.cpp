#include "deadreckon/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "deadreckon/analysis.hpp"
#include "deadreckon/anomaly.hpp"
#include "deadreckon/error.hpp"
#include "deadreckon/log_io.hpp"
#include "deadreckon/plot.hpp"
#include "deadreckon/simulator.hpp"
#include "deadreckon/smoothing.hpp"

namespace deadreckon::cli {

namespace {

// Thrown for option combinations CLI11 cannot express (mutually required
// flags, bad preset names); mapped to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> inputs;
  std::string output;
  std::string truth;
  std::string plot;
  std::string repaired;
  std::string geometry = "roomba-600";
  std::string mode = "accumulated";
  double max_delta = 300.0;
  std::string policy = "flag";
  std::optional<double> speed_mm_s;
  std::optional<double> duration_s;
  double dt_s = 0.5;
  std::string noise;
  std::uint64_t seed = 0;
  std::string preset;
  double q = 1e-6;
  double r = 0.0076;
  std::optional<double> actual_m;
  unsigned jobs = 1;
  bool redrive = false;
};

struct Preset {
  MotionPlan plan;
  CommandedRun commanded;
};

// test1..test7 are the seven reference straight runs; "square" is a
// 1 m closed square used for closure checks.
Preset resolve_preset(const std::string& name, double dt_s) {
  if (name == "square") {
    constexpr double side = 1000.0;
    constexpr double speed = 100.0;
    return {MotionPlan::square(side, speed, std::numbers::pi / 8.0, dt_s), {speed, 4.0 * side / speed}};
  }
  if (name.size() == 5 && name.starts_with("test") && name[4] >= '1' && name[4] <= '7') {
    const auto run = straight_run_preset(name[4] - '0');
    return {MotionPlan::straight(run.speed_mm_s, run.duration_s, dt_s), run};
  }
  throw UsageError("unknown preset '" + name + "' (expected test1..test7 or square)");
}

CommandedRun commanded_run(const Options& o) {
  if (!o.preset.empty()) return resolve_preset(o.preset, o.dt_s).commanded;
  if (!o.speed_mm_s || !o.duration_s) {
    throw UsageError("commanded run unknown: pass --preset or both --speed-mm-s and --duration-s");
  }
  return {*o.speed_mm_s, *o.duration_s};
}

ScanConfig scan_config(const Options& o) {
  ScanConfig cfg;
  cfg.max_delta_per_step = o.max_delta;
  cfg.policy = parse_repair_policy(o.policy);
  cfg.validate();
  return cfg;
}

ParsedLog load_log(const std::string& path, std::ostream& err) {
  auto parsed = parse_log(read_file(path), path);
  for (const auto& d : parsed.diagnostics) {
    err << path << ':' << d.line_number << ": " << (d.severity == Severity::error ? "error" : "warning")
        << ": " << d.message << '\n';
  }
  return parsed;
}

struct Tracked {
  std::vector<EncoderSample> samples;  // after repair
  AnomalyReport anomalies;             // of the raw log
  std::vector<TrajectoryPoint> points;
};

Tracked track_log(const LogDocument& doc, const RobotGeometry& geom, UpdateMode mode,
                  const ScanConfig& cfg, std::ostream& err) {
  Tracked out;
  out.anomalies = scan(doc.samples, cfg, geom);
  auto repaired = repair(doc.samples, out.anomalies, cfg, geom);
  for (const auto& d : repaired.diagnostics) err << doc.source_name << ": " << d << '\n';
  out.anomalies.repaired = cfg.policy != RepairPolicy::flag_only && !out.anomalies.flagged_steps.empty();
  out.samples = std::move(repaired.samples);
  out.points = track(out.samples, geom, mode);
  mark_flags(out.points, out.anomalies);
  return out;
}

std::optional<double> final_compass_heading_deg(const LogDocument& doc) {
  for (auto it = doc.samples.rbegin(); it != doc.samples.rend(); ++it) {
    if (it->mag && ((*it->mag)[0] != 0.0 || (*it->mag)[1] != 0.0)) {
      return heading_from_magnetometer((*it->mag)[0], (*it->mag)[1]) * 180.0 / std::numbers::pi;
    }
  }
  return std::nullopt;
}

// Straight-line distance from the first to the last truth pose, i.e. what a
// tape measure between start and stop would read.
double truth_displacement_m(const std::string& path) {
  const auto truth = parse_truth(read_file(path));
  if (truth.empty()) throw Error(ErrorCode::NoValidRows, "truth file '" + path + "' is empty");
  const auto& a = truth.front().pose;
  const auto& b = truth.back().pose;
  return std::hypot(b.x - a.x, b.y - a.y) / 1000.0;
}

void emit(const std::string& path, std::string_view contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    write_file(path, contents);
  }
}

// Runs `job` once per input. With more than one input `--output` names a
// directory and each input writes <stem><suffix> inside it.
int for_each_input(const Options& o, const std::string& suffix, std::ostream& out, std::ostream& err,
                   const std::function<void(const std::string&, const std::string&, std::ostream&, std::ostream&)>& job) {
  if (o.inputs.size() == 1) {
    job(o.inputs[0], o.output, out, err);
    return kExitOk;
  }
  if (o.output.empty() || o.output == "-") throw UsageError("several inputs need --output <directory>");
  std::filesystem::create_directories(o.output);

  const std::size_t count = o.inputs.size();
  std::vector<std::string> errors(count);
  std::vector<std::string> messages(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      const auto& in = o.inputs[i];
      const auto dest = (std::filesystem::path(o.output) / (std::filesystem::path(in).stem().string() + suffix)).string();
      std::ostringstream local_out;
      std::ostringstream local_err;
      try {
        job(in, dest, local_out, local_err);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      messages[i] = local_err.str();
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(count)));
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  }

  int status = kExitOk;
  for (std::size_t i = 0; i < count; ++i) {
    err << messages[i];
    if (!errors[i].empty()) {
      err << o.inputs[i] << ": " << errors[i] << '\n';
      status = kExitData;
    }
  }
  return status;
}

int cmd_track(const Options& o, std::ostream& out, std::ostream& err) {
  const auto geom = RobotGeometry::parse(o.geometry);
  const auto mode = parse_update_mode(o.mode);
  const auto cfg = scan_config(o);
  return for_each_input(o, ".traj.csv", out, err,
                        [&](const std::string& in, const std::string& dest, std::ostream& jout, std::ostream& jerr) {
                          const auto parsed = load_log(in, jerr);
                          const auto tracked = track_log(parsed.doc, geom, mode, cfg, jerr);
                          emit(dest, write_trajectory(tracked.points), jout);
                        });
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto geom = RobotGeometry::parse(o.geometry);
  MotionPlan plan;
  if (!o.preset.empty()) {
    plan = resolve_preset(o.preset, o.dt_s).plan;
  } else if (o.speed_mm_s && o.duration_s) {
    plan = MotionPlan::straight(*o.speed_mm_s, *o.duration_s, o.dt_s);
  } else {
    throw UsageError("simulate needs --preset or both --speed-mm-s and --duration-s");
  }
  NoiseModel base;
  base.seed = o.seed;
  const auto noise = NoiseModel::parse(o.noise, base);
  if (!noise.quantize) throw Error(ErrorCode::NonIntegralCounts, "log files hold integer counts; quantize=0 cannot be written");

  const auto result = simulate(plan, geom, noise);
  emit(o.output, write_log(result.log), out);
  if (!o.truth.empty()) write_file(o.truth, write_truth(result.truth));
  err << "simulate: samples=" << result.log.samples.size() << " seed=" << noise.seed
      << " rng=" << result.rng_algorithm << " spikes=" << result.injected_spikes.size() << '\n';
  return kExitOk;
}

int cmd_scan(const Options& o, std::ostream& out, std::ostream& err) {
  const auto geom = RobotGeometry::parse(o.geometry);
  auto cfg = scan_config(o);
  cfg.reference_dt = o.dt_s;
  cfg.validate();
  const auto parsed = load_log(o.inputs.at(0), err);
  auto report = scan(parsed.doc.samples, cfg, geom);
  if (cfg.policy != RepairPolicy::flag_only && !o.repaired.empty()) {
    auto repaired = repair(parsed.doc.samples, report, cfg, geom);
    for (const auto& d : repaired.diagnostics) err << o.inputs[0] << ": " << d << '\n';
    LogDocument doc = parsed.doc;
    doc.samples = std::move(repaired.samples);
    write_file(o.repaired, write_log(doc));
    report.repaired = !report.flagged_steps.empty();
  }
  emit(o.output, anomaly_report_json(report, cfg.policy), out);
  err << "scan: " << report.flagged_steps.size() << " flagged wheel-steps\n";
  return kExitOk;
}

int cmd_smooth(const Options& o, std::ostream& out, std::ostream& err) {
  const auto geom = RobotGeometry::parse(o.geometry);
  const auto cfg = scan_config(o);
  const auto parsed = load_log(o.inputs.at(0), err);
  const auto tracked = track_log(parsed.doc, geom, UpdateMode::accumulated, cfg, err);

  std::vector<double> headings;
  headings.reserve(tracked.points.size());
  for (const auto& p : tracked.points) headings.push_back(p.pose.theta);
  headings = unwrap_angles(headings);

  KalmanConfig kcfg;
  kcfg.process_variance = o.q;
  kcfg.measurement_variance = o.r;
  kcfg.initial_estimate = headings.front();
  const auto smoothed = kalman_smooth(headings, kcfg);

  const auto points = o.redrive ? redrive(tracked.points, smoothed) : tracked.points;
  emit(o.output, write_trajectory(points, smoothed), out);
  return kExitOk;
}

// Accepts either a raw encoder log or a trajectory CSV.
struct AnalysisInput {
  std::vector<TrajectoryPoint> points;
  std::optional<LogDocument> log;
  AnomalyReport anomalies;
};

AnalysisInput load_for_analysis(const std::string& path, const RobotGeometry& geom, UpdateMode mode,
                                const ScanConfig& cfg, std::ostream& err) {
  const auto text = read_file(path);
  AnalysisInput in;
  if (text.starts_with(kTrajectoryHeader)) {
    in.points = parse_trajectory(text);
    return in;
  }
  auto parsed = parse_log(text, path);
  for (const auto& d : parsed.diagnostics) {
    err << path << ':' << d.line_number << ": " << (d.severity == Severity::error ? "error" : "warning")
        << ": " << d.message << '\n';
  }
  auto tracked = track_log(parsed.doc, geom, mode, cfg, err);
  in.points = std::move(tracked.points);
  in.anomalies = std::move(tracked.anomalies);
  in.log = std::move(parsed.doc);
  return in;
}

RunReport analysis_report(const AnalysisInput& in, const Options& o, const RobotGeometry& geom, UpdateMode mode) {
  const auto run = commanded_run(o);
  auto actual = o.actual_m;
  if (!actual && !o.truth.empty()) actual = truth_displacement_m(o.truth);
  auto report = build_report(in.points, run.speed_mm_s, run.duration_s, actual, mode, geom);
  if (in.log) report.final_compass_heading_deg = final_compass_heading_deg(*in.log);
  return report;
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err) {
  const auto geom = RobotGeometry::parse(o.geometry);
  const auto mode = parse_update_mode(o.mode);
  const auto cfg = scan_config(o);
  commanded_run(o);
  const auto in = load_for_analysis(o.inputs.at(0), geom, mode, cfg, err);
  const auto report = analysis_report(in, o, geom, mode);
  emit(o.output, report_json(report), out);
  if (!o.plot.empty()) write_file(o.plot, emit_plot(in.points, report.fit));
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const auto geom = RobotGeometry::parse(o.geometry);
  const auto mode = parse_update_mode(o.mode);
  const auto cfg = scan_config(o);
  commanded_run(o);
  return for_each_input(o, ".report.json", out, err,
                        [&](const std::string& path, const std::string& dest, std::ostream& jout, std::ostream& jerr) {
                          const auto in = load_for_analysis(path, geom, mode, cfg, jerr);
                          const auto report = analysis_report(in, o, geom, mode);
                          auto j = nlohmann::ordered_json::parse(report_json(report));
                          j["anomalies"] = nlohmann::ordered_json::parse(anomaly_report_json(in.anomalies, cfg.policy));
                          emit(dest, j.dump(2) + "\n", jout);
                          if (!o.plot.empty()) {
                            auto plot_path = o.plot;
                            if (o.inputs.size() > 1) {
                              plot_path = (std::filesystem::path(o.output) /
                                           (std::filesystem::path(path).stem().string() + ".svg")).string();
                            }
                            write_file(plot_path, emit_plot(in.points, report.fit));
                          }
                        });
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Dead-reckoning odometry toolkit for differential-drive encoder logs", "deadreckon"};
  app.require_subcommand(1);

  auto add_geometry = [&](CLI::App* c) {
    c->add_option("--geometry", o.geometry, "Preset name (roomba-600) or D,W,C[,M] in mm, mm, counts/rev")
        ->capture_default_str();
  };
  auto add_mode = [&](CLI::App* c) {
    c->add_option("--mode", o.mode, "Pose update rule")
        ->check(CLI::IsMember({"literal", "accumulated"}))
        ->capture_default_str();
  };
  auto add_scan = [&](CLI::App* c) {
    c->add_option("--max-delta", o.max_delta, "Counts allowed per 0.5 s step before a wheel is flagged")
        ->capture_default_str();
    c->add_option("--policy", o.policy, "Repair applied to flagged steps")
        ->check(CLI::IsMember({"flag", "hold", "interp"}))
        ->capture_default_str();
  };
  auto add_commanded = [&](CLI::App* c) {
    c->add_option("--preset", o.preset, "Commanded run: test1..test7 (reference straight runs) or square");
    c->add_option("--speed-mm-s", o.speed_mm_s, "Commanded speed [mm/s]");
    c->add_option("--duration-s", o.duration_s, "Commanded duration [s]");
  };

  auto* track_cmd = app.add_subcommand("track", "Dead-reckon an encoder log into a trajectory CSV");
  track_cmd->add_option("--input", o.inputs, "Encoder log CSV (repeatable)")->required();
  track_cmd->add_option("--output", o.output, "Trajectory CSV, or a directory for several inputs");
  track_cmd->add_option("--jobs", o.jobs, "Parallel workers for several inputs")->check(CLI::PositiveNumber);
  add_geometry(track_cmd);
  add_mode(track_cmd);
  add_scan(track_cmd);

  auto* sim_cmd = app.add_subcommand("simulate", "Synthesize an encoder log from a motion plan");
  add_commanded(sim_cmd);
  sim_cmd->add_option("--dt-s", o.dt_s, "Sample period [s]")->capture_default_str();
  sim_cmd->add_option("--noise", o.noise, "key=val,... (quantize, sigma, spike_prob, spike_mag, bias, bias_l, bias_r, mag)");
  sim_cmd->add_option("--seed", o.seed, "Seed for the mt19937_64 noise source")->capture_default_str();
  sim_cmd->add_option("--output", o.output, "Encoder log CSV");
  sim_cmd->add_option("--truth", o.truth, "Ground-truth pose CSV");
  add_geometry(sim_cmd);

  auto* scan_cmd = app.add_subcommand("scan", "Flag encoder steps that exceed the per-step threshold");
  scan_cmd->add_option("--input", o.inputs, "Encoder log CSV")->required()->expected(1);
  scan_cmd->add_option("--output", o.output, "Anomaly report JSON (stdout if omitted)");
  scan_cmd->add_option("--dt-s", o.dt_s, "Step length the threshold refers to [s]")->capture_default_str();
  scan_cmd->add_option("--repaired", o.repaired, "Write the repaired log here (with --policy hold|interp)");
  add_geometry(scan_cmd);
  add_scan(scan_cmd);

  auto* smooth_cmd = app.add_subcommand("smooth", "Kalman-filter the dead-reckoned heading");
  smooth_cmd->add_option("--input", o.inputs, "Encoder log CSV")->required()->expected(1);
  smooth_cmd->add_option("--output", o.output, "Trajectory CSV with theta_smooth_rad");
  smooth_cmd->add_option("--q", o.q, "Process variance [rad^2/step]")->capture_default_str();
  smooth_cmd->add_option("--r", o.r, "Measurement variance [rad^2]")->capture_default_str();
  smooth_cmd->add_flag("--redrive", o.redrive, "Recompute positions from the smoothed heading");
  add_geometry(smooth_cmd);
  add_scan(smooth_cmd);

  auto* analyze_cmd = app.add_subcommand("analyze", "Distance reconciliation, drift and regression report");
  analyze_cmd->add_option("--input", o.inputs, "Encoder log or trajectory CSV")->required()->expected(1);
  analyze_cmd->add_option("--output", o.output, "Report JSON (stdout if omitted)");
  analyze_cmd->add_option("--truth", o.truth, "Truth CSV; its start-to-end distance becomes the actual distance");
  analyze_cmd->add_option("--actual-m", o.actual_m, "Physically measured distance [m]");
  analyze_cmd->add_option("--plot", o.plot, "Write an SVG scatter with the fitted line");
  add_commanded(analyze_cmd);
  add_geometry(analyze_cmd);
  add_mode(analyze_cmd);
  add_scan(analyze_cmd);

  auto* report_cmd = app.add_subcommand("report", "track + scan + analyze in one pass");
  report_cmd->add_option("--input", o.inputs, "Encoder log CSV (repeatable)")->required();
  report_cmd->add_option("--output", o.output, "Report JSON, or a directory for several inputs");
  report_cmd->add_option("--truth", o.truth, "Truth CSV; its start-to-end distance becomes the actual distance");
  report_cmd->add_option("--actual-m", o.actual_m, "Physically measured distance [m]");
  report_cmd->add_option("--plot", o.plot, "Write an SVG scatter with the fitted line");
  report_cmd->add_option("--jobs", o.jobs, "Parallel workers for several inputs")->check(CLI::PositiveNumber);
  add_commanded(report_cmd);
  add_geometry(report_cmd);
  add_mode(report_cmd);
  add_scan(report_cmd);

  std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (track_cmd->parsed()) return cmd_track(o, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(o, out, err);
    if (scan_cmd->parsed()) return cmd_scan(o, out, err);
    if (smooth_cmd->parsed()) return cmd_smooth(o, out, err);
    if (analyze_cmd->parsed()) return cmd_analyze(o, out, err);
    if (report_cmd->parsed()) return cmd_report(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace deadreckon::cli
