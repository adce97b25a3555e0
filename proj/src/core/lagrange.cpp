#include "core/lagrange.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace cbo {

namespace {

// > 0 when o -> a -> b turns counter-clockwise.
double cross(const FrontierPoint& o, const FrontierPoint& a, const FrontierPoint& b) {
  return (a.bv - o.bv) * (b.fom - o.fom) - (a.fom - o.fom) * (b.bv - o.bv);
}

}  // namespace

double UpperHull::value_at(double bv) const {
  if (points.empty()) throw DomainError("empty hull");
  if (bv <= points.front().bv) return points.front().fom;
  if (bv >= points.back().bv) return points.back().fom;
  const auto it = std::upper_bound(points.begin(), points.end(), bv,
                                   [](double v, const FrontierPoint& p) { return v < p.bv; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  return a.fom + (b.fom - a.fom) * (bv - a.bv) / (b.bv - a.bv);
}

UpperHull upper_hull(std::span<const FrontierPoint> points) {
  if (points.empty()) throw DomainError("upper hull of an empty point set");
  std::vector<FrontierPoint> pts(points.begin(), points.end());
  for (const auto& p : pts)
    if (!std::isfinite(p.bv) || !std::isfinite(p.fom)) throw DomainError("non-finite hull point");

  std::sort(pts.begin(), pts.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    if (a.bv != b.bv) return a.bv < b.bv;
    if (a.fom != b.fom) return a.fom > b.fom;
    return a.source_index < b.source_index;
  });
  // Keep the first (largest fom) of each run of equal bv.
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const FrontierPoint& a, const FrontierPoint& b) { return a.bv == b.bv; }),
            pts.end());

  UpperHull hull;
  auto& h = hull.points;
  for (const auto& p : pts) {
    while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), p) >= 0.0) h.pop_back();
    h.push_back(p);
  }
  return hull;
}

LagrangeState multiplier(const UpperHull& hull, double bv_target) {
  if (hull.empty()) throw DomainError("multiplier needs a nonempty hull");
  LagrangeState s;
  s.bv_target = bv_target;
  s.hull = hull;
  const auto& p = hull.points;
  s.clamped = bv_target < p.front().bv || bv_target > p.back().bv;
  if (p.size() < 2) return s;

  std::size_t j = 0;
  if (bv_target >= p.back().bv) {
    j = p.size() - 2;
  } else if (bv_target > p.front().bv) {
    const auto it = std::upper_bound(p.begin(), p.end(), bv_target,
                                     [](double v, const FrontierPoint& q) { return v < q.bv; });
    j = static_cast<std::size_t>(it - p.begin()) - 1;
  }
  s.segment = std::make_pair(j, j + 1);
  s.lambda = -(p[j + 1].fom - p[j].fom) / (p[j + 1].bv - p[j].bv);
  return s;
}

LagrangeState zero_multiplier(double bv_target) {
  LagrangeState s;
  s.bv_target = bv_target;
  return s;
}

double lagrangian(double fom, double bv, double lambda, double bv_target) {
  return fom + lambda * (bv - bv_target);
}

double lagrangian(double fom, double bv, const LagrangeState& state) {
  return lagrangian(fom, bv, state.lambda, state.bv_target);
}

}  // namespace cbo
