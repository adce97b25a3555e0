#include "core/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "core/error.hpp"
#include "core/run_store.hpp"

namespace cbo {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

struct Frame {
  double x0, x1, y0, y1;

  double px(double v) const { return kMargin + (v - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double v) const { return kHeight - kMargin - (v - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

Frame frame_for(const std::vector<FrontierPoint>& pts) {
  Frame f{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : pts) {
    f.x0 = std::min(f.x0, p.bv);
    f.x1 = std::max(f.x1, p.bv);
    f.y0 = std::min(f.y0, p.fom);
    f.y1 = std::max(f.y1, p.fom);
  }
  if (pts.empty()) f = {0.0, 1.0, 0.0, 1.0};
  // Pad, and give degenerate extents a unit width.
  auto pad = [](double& lo, double& hi) {
    const double span = hi - lo;
    const double m = span > 0.0 ? 0.05 * span : 0.5 * std::max(1.0, std::abs(lo));
    lo -= m;
    hi += m;
  };
  pad(f.x0, f.x1);
  pad(f.y0, f.y1);
  return f;
}

std::string svg_open(const Frame& f, const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
                  "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + title + "</text>\n";
  const double left = kMargin, right = kWidth - kMargin, top = kMargin, bottom = kHeight - kMargin;
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(bottom) + "\" x2=\"" + fmt(right) + "\" y2=\"" + fmt(bottom) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(bottom) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(top) +
       "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"" + fmt(kHeight - 15) +
       "\" text-anchor=\"middle\" font-size=\"13\">BV (V)</text>\n";
  s += "<text x=\"18\" y=\"" + fmt(kHeight / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
       fmt(kHeight / 2) + ")\">FOM (kW/mm&#178;)</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = i / 4.0;
    const double xv = f.x0 + t * (f.x1 - f.x0);
    const double yv = f.y0 + t * (f.y1 - f.y0);
    s += "<text x=\"" + fmt(f.px(xv)) + "\" y=\"" + fmt(bottom + 16) + "\" text-anchor=\"middle\" font-size=\"10\">" +
         fmt(xv) + "</text>\n";
    s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(f.py(yv) + 3) + "\" text-anchor=\"end\" font-size=\"10\">" +
         fmt(yv) + "</text>\n";
  }
  return s;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

}  // namespace

std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  constexpr int a[3] = {0x00, 0x42, 0x9d};
  constexpr int b[3] = {0xd7, 0x19, 0x1c};
  char buf[8];
  int c[3];
  for (int i = 0; i < 3; ++i) c[i] = static_cast<int>(std::lround(a[i] + t * (b[i] - a[i])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

std::string scatter_svg(const Dataset& ds) {
  const auto pts = ds.frontier_points();
  const Frame f = frame_for(pts);
  std::string s = svg_open(f, "FOM vs BV, colored by evaluation order");
  const double denom = pts.size() > 1 ? static_cast<double>(pts.size() - 1) : 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& r = ds.records[pts[i].source_index];
    s += "<circle cx=\"" + fmt(f.px(pts[i].bv)) + "\" cy=\"" + fmt(f.py(pts[i].fom)) + "\" r=\"4\" fill=\"" +
         ramp_color(static_cast<double>(i) / denom) + "\" data-iteration=\"" + std::to_string(r.iteration) +
         "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string frontier_svg(const Dataset& ds, const UpperHull& hull) {
  const auto pts = ds.frontier_points();
  const Frame f = frame_for(pts);
  std::string s = svg_open(f, "FOM vs BV frontier (upper hull)");
  for (const auto& p : pts)
    s += "<circle cx=\"" + fmt(f.px(p.bv)) + "\" cy=\"" + fmt(f.py(p.fom)) +
         "\" r=\"3\" fill=\"#b0b0b0\" class=\"sample\"/>\n";
  std::string poly;
  for (const auto& h : hull.points) poly += fmt(f.px(h.bv)) + "," + fmt(f.py(h.fom)) + " ";
  if (!poly.empty()) poly.pop_back();
  s += "<polyline points=\"" + poly + "\" fill=\"none\" stroke=\"#d7191c\" stroke-width=\"2\"/>\n";
  for (const auto& h : hull.points)
    s += "<rect x=\"" + fmt(f.px(h.bv) - 4) + "\" y=\"" + fmt(f.py(h.fom) - 4) +
         "\" width=\"8\" height=\"8\" fill=\"#d7191c\" class=\"hull\"/>\n";
  s += "</svg>\n";
  return s;
}

std::string frontier_csv(const UpperHull& hull) {
  std::string s = "bv,fom,source_index\n";
  for (const auto& p : hull.points)
    s += format_real(p.bv) + "," + format_real(p.fom) + "," + std::to_string(p.source_index) + "\n";
  return s;
}

std::string convergence_csv(const Dataset& ds) {
  const auto target = ds.config.fixed_target();
  std::string s = target ? "iteration,fom,best_fom,best_feasible_fom\n" : "iteration,fom,best_fom\n";
  double best = -std::numeric_limits<double>::infinity();
  double best_feasible = -std::numeric_limits<double>::infinity();
  for (const auto& r : ds.records) {
    if (!r.eval.valid) continue;
    best = std::max(best, r.eval.fom);
    s += std::to_string(r.iteration) + "," + format_real(r.eval.fom) + "," + format_real(best);
    if (target) {
      if (ds.config.feasibility.satisfied(r.eval.bv, *target)) best_feasible = std::max(best_feasible, r.eval.fom);
      s += ",";
      if (std::isfinite(best_feasible)) s += format_real(best_feasible);
    }
    s += "\n";
  }
  return s;
}

void report_run_dir(const fs::path& run_dir) {
  const auto run = read_run_dir(run_dir);
  const auto& ds = run.dataset;
  if (ds.valid_count() == 0) throw RunInputError("records.csv has no valid records");
  const auto hull = frontier_report(ds);
  write_text(run_dir / "scatter.svg", scatter_svg(ds));
  write_text(run_dir / "frontier.svg", frontier_svg(ds, hull));
  write_text(run_dir / "frontier.csv", frontier_csv(hull));
  write_text(run_dir / "convergence.csv", convergence_csv(ds));
}

}  // namespace cbo
