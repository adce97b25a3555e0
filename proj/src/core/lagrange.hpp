#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cbo {

// One observed (breakdown voltage, figure of merit) pair. source_index points
// back into the campaign's record list.
struct FrontierPoint {
  double bv = 0.0;
  double fom = 0.0;
  std::size_t source_index = 0;

  bool operator==(const FrontierPoint&) const = default;
};

// Vertices of the least concave majorant of a (bv, fom) scatter, ordered by
// strictly increasing bv. Consecutive segment slopes strictly decrease.
struct UpperHull {
  std::vector<FrontierPoint> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  /// Piecewise-linear interpolant; outside the span, the end value.
  double value_at(double bv) const;
  bool operator==(const UpperHull&) const = default;
};

/// Collapses equal bv to the largest fom (earliest source on a tie), then runs
/// the upper chain of Andrew's monotone chain. Collinear interior points are
/// dropped. Throws DomainError on empty or non-finite input.
UpperHull upper_hull(std::span<const FrontierPoint> points);

struct LagrangeState {
  double lambda = 0.0;
  double bv_target = 0.0;
  // Hull indices (j, j+1) of the segment used; none for a hull of < 2 points.
  std::optional<std::pair<std::size_t, std::size_t>> segment;
  bool clamped = false;  // target outside [first bv, last bv]
  UpperHull hull;
};

/// lambda = -(fom[j+1] - fom[j]) / (bv[j+1] - bv[j]) for the hull segment
/// holding the target. A target on a vertex takes the segment to its right;
/// a target outside the span takes the nearest end segment. Throws
/// DomainError for an empty hull.
LagrangeState multiplier(const UpperHull& hull, double bv_target);

/// A state with lambda = 0 (warmup, unconstrained, or forced).
LagrangeState zero_multiplier(double bv_target);

/// fom + lambda * (bv - bv_target), constant term retained.
double lagrangian(double fom, double bv, const LagrangeState& state);
double lagrangian(double fom, double bv, double lambda, double bv_target);

}  // namespace cbo
