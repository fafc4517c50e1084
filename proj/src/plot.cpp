#include "deadreckon/plot.hpp"

#include <algorithm>
#include <string>

#include "deadreckon/error.hpp"
#include "deadreckon/log_io.hpp"

namespace deadreckon {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;
constexpr int kTicks = 5;

std::string num(double v) { return format_fixed(v, 2); }

struct Range {
  double lo;
  double hi;

  void pad() {
    if (hi - lo < 1e-9) {
      lo -= 1.0;
      hi += 1.0;
    }
    const double extra = 0.05 * (hi - lo);
    lo -= extra;
    hi += extra;
  }
};

}  // namespace

std::string emit_plot(std::span<const TrajectoryPoint> points, const std::optional<RegressionFit>& fit) {
  if (points.empty()) throw Error(ErrorCode::EmptyTrajectory, "nothing to plot");

  Range xr{points[0].pose.x, points[0].pose.x};
  Range yr{points[0].pose.y, points[0].pose.y};
  for (const auto& p : points) {
    xr.lo = std::min(xr.lo, p.pose.x);
    xr.hi = std::max(xr.hi, p.pose.x);
    yr.lo = std::min(yr.lo, p.pose.y);
    yr.hi = std::max(yr.hi, p.pose.y);
  }
  xr.pad();
  yr.pad();

  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  auto sx = [&](double x) { return kMargin + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto sy = [&](double y) { return kHeight - kMargin - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  svg += "<defs><clipPath id=\"plot-area\"><rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) +
         "\" width=\"" + num(plot_w) + "\" height=\"" + num(plot_h) + "\"/></clipPath></defs>\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes frame and ticks are paths so that <line> stays reserved for the fit.
  svg += "<path d=\"M" + num(kMargin) + " " + num(kMargin) + " V" + num(kHeight - kMargin) + " H" +
         num(kWidth - kMargin) + "\" fill=\"none\" stroke=\"black\"/>\n";
  std::string ticks;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    ticks += "M" + num(sx(fx)) + " " + num(kHeight - kMargin) + " v5 ";
    ticks += "M" + num(kMargin) + " " + num(sy(fy)) + " h-5 ";
    svg += "<text x=\"" + num(sx(fx)) + "\" y=\"" + num(kHeight - kMargin + 18) +
           "\" font-size=\"10\" text-anchor=\"middle\">" + num(fx) + "</text>\n";
    svg += "<text x=\"" + num(kMargin - 8) + "\" y=\"" + num(sy(fy) + 3) +
           "\" font-size=\"10\" text-anchor=\"end\">" + num(fy) + "</text>\n";
  }
  svg += "<path d=\"" + ticks + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 15) +
         "\" font-size=\"12\" text-anchor=\"middle\">x [mm]</text>\n";
  svg += "<text x=\"15\" y=\"" + num(kHeight / 2) + "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
         num(kHeight / 2) + ")\">y [mm]</text>\n";

  svg += "<g fill=\"steelblue\">\n";
  for (const auto& p : points) {
    svg += "<circle cx=\"" + num(sx(p.pose.x)) + "\" cy=\"" + num(sy(p.pose.y)) + "\" r=\"2\"/>\n";
  }
  svg += "</g>\n";

  if (fit) {
    svg += "<line x1=\"" + num(sx(xr.lo)) + "\" y1=\"" + num(sy(fit->slope * xr.lo + fit->intercept)) +
           "\" x2=\"" + num(sx(xr.hi)) + "\" y2=\"" + num(sy(fit->slope * xr.hi + fit->intercept)) +
           "\" stroke=\"firebrick\" clip-path=\"url(#plot-area)\"/>\n";
    svg += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(kMargin - 10) +
           "\" font-size=\"11\" text-anchor=\"end\">y = " + format_fixed(fit->slope, 4) + "x + " +
           format_fixed(fit->intercept, 4) + ", R2 = " + format_fixed(fit->r2, 4) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace deadreckon
