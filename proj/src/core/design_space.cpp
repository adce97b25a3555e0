#include "core/design_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "core/error.hpp"

namespace cbo {

namespace {

std::string describe(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DesignSpace::DesignSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ConfigError("design space has no dimensions");
  std::set<std::string> seen;
  for (const auto& d : dims_) {
    if (d.name.empty()) throw ConfigError("design space dimension with empty name");
    if (!seen.insert(d.name).second) throw ConfigError("duplicate dimension name '" + d.name + "'");
    if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || !(d.lower < d.upper))
      throw ConfigError("dimension '" + d.name + "' needs finite lower < upper");
    if (d.scale == Scale::kLog10 && !(d.lower > 0.0))
      throw ConfigError("log10 dimension '" + d.name + "' needs a positive lower bound");
  }
}

DesignSpace DesignSpace::ldmos9() {
  return DesignSpace({
      {"N_drift1", 7e16, 2.5e17, Scale::kLog10},  // cm^-3
      {"L_drift1", 250.0, 2700.0, Scale::kLinear},  // nm
      {"L_drift2", 0.0, 500.0, Scale::kLinear},     // nm
      {"GP", 10.0, 99.0, Scale::kLinear},           // % of FOX under gate
      {"L_JFET", 0.0, 700.0, Scale::kLinear},       // nm
      {"L_FOX", 750.0, 2000.0, Scale::kLinear},     // nm
      {"N_surface", 1e16, 6e16, Scale::kLog10},     // cm^-3
      {"T_FOX", 50.0, 150.0, Scale::kLinear},       // nm
      {"R", 0.5, 5.0, Scale::kLinear},              // L_step / T_FOX
  });
}

DesignSpace DesignSpace::toy2d() {
  return DesignSpace({{"x1", 0.0, 1.0, Scale::kLinear}, {"x2", 0.0, 1.0, Scale::kLinear}});
}

std::size_t DesignSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (dims_[i].name == name) return i;
  return dims_.size();
}

std::vector<std::string> DesignSpace::names() const {
  std::vector<std::string> out;
  out.reserve(dims_.size());
  for (const auto& d : dims_) out.push_back(d.name);
  return out;
}

std::vector<Violation> DesignSpace::validate(std::span<const double> x) const {
  std::vector<Violation> out;
  if (x.size() != dims_.size()) {
    out.push_back({Violation::Kind::kLengthMismatch, "",
                   "expected " + std::to_string(dims_.size()) + " values, got " + std::to_string(x.size())});
    return out;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& d = dims_[i];
    if (!std::isfinite(x[i])) {
      out.push_back({Violation::Kind::kNotFinite, d.name, d.name + " is not finite"});
    } else if (x[i] < d.lower) {
      out.push_back({Violation::Kind::kBelowLower, d.name,
                     d.name + " = " + describe(x[i]) + " below lower bound " + describe(d.lower)});
    } else if (x[i] > d.upper) {
      out.push_back({Violation::Kind::kAboveUpper, d.name,
                     d.name + " = " + describe(x[i]) + " above upper bound " + describe(d.upper)});
    }
  }
  return out;
}

UnitPoint DesignSpace::normalize(std::span<const double> x) const {
  const auto violations = validate(x);
  if (!violations.empty()) throw DomainError("invalid design point: " + violations.front().message);
  UnitPoint u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& d = dims_[i];
    if (d.scale == Scale::kLog10) {
      const double lo = std::log10(d.lower);
      u[i] = (std::log10(x[i]) - lo) / (std::log10(d.upper) - lo);
    } else {
      u[i] = (x[i] - d.lower) / (d.upper - d.lower);
    }
    u[i] = std::clamp(u[i], 0.0, 1.0);
  }
  return u;
}

DesignPoint DesignSpace::denormalize(std::span<const double> u) const {
  if (u.size() != dims_.size())
    throw DomainError("expected " + std::to_string(dims_.size()) + " unit coordinates, got " +
                      std::to_string(u.size()));
  DesignPoint x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& d = dims_[i];
    const double t = std::clamp(u[i], 0.0, 1.0);
    if (t == 0.0) {
      x[i] = d.lower;
    } else if (t == 1.0) {
      x[i] = d.upper;
    } else if (d.scale == Scale::kLog10) {
      const double lo = std::log10(d.lower);
      x[i] = std::pow(10.0, lo + t * (std::log10(d.upper) - lo));
    } else {
      x[i] = d.lower + t * (d.upper - d.lower);
    }
    x[i] = std::clamp(x[i], d.lower, d.upper);
  }
  return x;
}

std::vector<DesignPoint> DesignSpace::sample_uniform(Rng& rng, std::size_t n) const {
  std::vector<DesignPoint> out;
  out.reserve(n);
  UnitPoint u(dims_.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (auto& v : u) v = rng.uniform();
    out.push_back(denormalize(u));
  }
  return out;
}

std::string to_string(Scale s) { return s == Scale::kLog10 ? "log10" : "linear"; }

Scale parse_scale(std::string_view s) {
  if (s == "linear") return Scale::kLinear;
  if (s == "log10") return Scale::kLog10;
  throw ConfigError("unknown scale '" + std::string(s) + "' (expected linear or log10)");
}

DerivedGeometry derived_geometry(double n_drift1, double n_surface, double t_fox_nm, double shape_ratio) {
  if (!(n_surface > 0.0) || !(n_drift1 > n_surface))
    throw DomainError("drift depth needs N_drift1 > N_surface > 0");
  DerivedGeometry g;
  g.d_drift_um = 0.3 + 3.0 * std::sqrt(0.045 / std::log(n_drift1 / n_surface));
  g.l_step_nm = t_fox_nm * shape_ratio;
  return g;
}

DerivedGeometry derived_geometry(const DesignSpace& space, std::span<const double> x) {
  if (x.size() != space.size()) throw DomainError("design point length does not match space");
  auto at = [&](std::string_view name) {
    const auto i = space.index_of(name);
    if (i == space.size()) throw DomainError("space has no dimension '" + std::string(name) + "'");
    return x[i];
  };
  return derived_geometry(at("N_drift1"), at("N_surface"), at("T_FOX"), at("R"));
}

}  // namespace cbo
