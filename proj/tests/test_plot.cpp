#include <string>
#include <vector>

#include "doctest.h"

#include "deadreckon/error.hpp"
#include "deadreckon/plot.hpp"

using namespace deadreckon;

namespace {

std::size_t occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<TrajectoryPoint> sample_points() {
  std::vector<TrajectoryPoint> pts(30);
  for (int i = 0; i < 30; ++i) {
    pts[i].n = i + 1;
    pts[i].pose = {2.0 * i, 16.828 * 2.0 * i + 20.0 * (i % 3), 0};
  }
  return pts;
}

}  // namespace

TEST_CASE("single point plot") {
  std::vector<TrajectoryPoint> one(1);
  const auto svg = emit_plot(one);
  CHECK(svg.starts_with("<?xml"));
  CHECK(svg.ends_with("</svg>\n"));
  CHECK(occurrences(svg, "<circle") == 1);
  CHECK(occurrences(svg, "<line") == 0);
  CHECK(svg.find("x [mm]") != std::string::npos);
  CHECK(svg.find("y [mm]") != std::string::npos);
}

TEST_CASE("fit adds exactly one line") {
  const auto pts = sample_points();
  const RegressionFit fit{16.828, 2705, 0.5783, 30};
  const auto svg = emit_plot(pts, fit);
  CHECK(occurrences(svg, "<circle") == pts.size());
  CHECK(occurrences(svg, "<line") == 1);
  CHECK(svg.find("R2 = 0.5783") != std::string::npos);
}

TEST_CASE("plot bytes are deterministic") {
  const auto pts = sample_points();
  const RegressionFit fit{1.0, 2.0, 0.9, 30};
  CHECK(emit_plot(pts, fit) == emit_plot(pts, fit));
  CHECK(emit_plot(pts) == emit_plot(pts));
}

TEST_CASE("empty trajectory is rejected") {
  try {
    emit_plot({});
    FAIL("expected EmptyTrajectory");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyTrajectory);
  }
}
