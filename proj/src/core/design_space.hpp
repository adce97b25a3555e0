#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/random.hpp"

namespace cbo {

enum class Scale { kLinear, kLog10 };

struct Dimension {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  Scale scale = Scale::kLinear;

  bool operator==(const Dimension&) const = default;
};

// Values in native units, one per dimension of the space they belong to.
using DesignPoint = std::vector<double>;
// Unit-cube coordinates.
using UnitPoint = std::vector<double>;

struct Violation {
  enum class Kind { kLengthMismatch, kBelowLower, kAboveUpper, kNotFinite };
  Kind kind;
  std::string dimension;  // empty for kLengthMismatch
  std::string message;
};

/// Ordered, named, bounded box. Bounds are inclusive.
class DesignSpace {
 public:
  /// Throws ConfigError when a dimension has lower >= upper, a duplicate
  /// name, or a log10 scale with a nonpositive lower bound.
  explicit DesignSpace(std::vector<Dimension> dims);

  /// The nine LDMOS inputs with their published bounds.
  static DesignSpace ldmos9();
  /// Two linear dimensions x1, x2 on [0, 1].
  static DesignSpace toy2d();

  std::size_t size() const { return dims_.size(); }
  const std::vector<Dimension>& dims() const { return dims_; }
  const Dimension& operator[](std::size_t i) const { return dims_[i]; }
  /// Index of the dimension with the given name, or size() when absent.
  std::size_t index_of(std::string_view name) const;
  std::vector<std::string> names() const;

  std::vector<Violation> validate(std::span<const double> x) const;
  bool contains(std::span<const double> x) const { return validate(x).empty(); }

  /// Throws DomainError if x is invalid.
  UnitPoint normalize(std::span<const double> x) const;
  /// u is clamped into [0, 1]^d; the result is always a valid point.
  DesignPoint denormalize(std::span<const double> u) const;

  /// n points i.i.d. uniform in normalized coordinates.
  std::vector<DesignPoint> sample_uniform(Rng& rng, std::size_t n) const;

  bool operator==(const DesignSpace&) const = default;

 private:
  std::vector<Dimension> dims_;
};

std::string to_string(Scale s);
Scale parse_scale(std::string_view s);

struct DerivedGeometry {
  double d_drift_um = 0.0;  // drift region depth
  double l_step_nm = 0.0;   // LOCOS taper length
};

/// Drift depth from the Gaussian profile (peak at 0.3 um) and LOCOS taper
/// length T_FOX * R. Needs the ldmos9 dimension names in `space`.
/// Throws DomainError when N_drift1 <= N_surface.
DerivedGeometry derived_geometry(const DesignSpace& space, std::span<const double> x);
DerivedGeometry derived_geometry(double n_drift1, double n_surface, double t_fox_nm, double shape_ratio);

}  // namespace cbo
