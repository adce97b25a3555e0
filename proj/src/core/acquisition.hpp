#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/gp.hpp"

namespace cbo {

double normal_pdf(double z);
double normal_cdf(double z);

/// Analytic EI for maximization. With delta = mean - best_y - xi:
/// std == 0 gives max(delta, 0), otherwise delta*Phi(delta/std) + std*phi(delta/std).
double expected_improvement(const GpPrediction& pred, double best_y, double xi);

/// log of expected_improvement, finite wherever EI > 0 mathematically, also
/// where EI itself underflows to 0. -inf when std == 0 and delta <= 0.
double log_expected_improvement(const GpPrediction& pred, double best_y, double xi);

struct AcquisitionConfig {
  enum class Gradient { kAnalytic, kFiniteDifference };

  int n_restarts = 20;
  int lbfgs_max_iterations = 20;
  int candidate_pool = 1000;
  double xi = 0.0;
  Gradient gradient = Gradient::kAnalytic;
  double fd_step = 1e-6;

  void check() const;
};

// Scalar field over the unit cube that the acquisition maximizer climbs.
class AcquisitionSurface {
 public:
  virtual ~AcquisitionSurface() = default;
  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> u) const = 0;
  /// Defaults to central finite differences with the given step.
  virtual double value_and_gradient(std::span<const double> u, std::span<double> grad, double fd_step) const;
};

// EI of a fitted GP against the best training target, climbed on a log
// scale: same argmax, and no ties at 0 once EI underflows far from the data.
class ExpectedImprovementSurface final : public AcquisitionSurface {
 public:
  ExpectedImprovementSurface(const GpModel& model, double xi, bool analytic_gradient);
  std::size_t dimension() const override { return model_.dimension(); }
  /// log EI
  double value(std::span<const double> u) const override;
  double value_and_gradient(std::span<const double> u, std::span<double> grad, double fd_step) const override;
  double expected_improvement(std::span<const double> u) const;
  double best_y() const { return best_y_; }

 private:
  const GpModel& model_;
  double best_y_;
  double xi_;
  bool analytic_;
};

struct AcquisitionResult {
  std::vector<double> u;
  double value = 0.0;  // surface value at u (log EI for the EI surface)
  std::size_t pool_index = 0;  // pool candidate the result came from
  bool refined = false;        // true if quasi-Newton beat the best candidate
};

/// Random pool of candidates, bounded quasi-Newton refinement of the best
/// n_restarts, argmax over everything seen. Ties go to the lowest pool index;
/// starts whose value is not finite are not refined.
AcquisitionResult maximize(const AcquisitionSurface& surface, const AcquisitionConfig& cfg, std::uint64_t seed);
AcquisitionResult maximize(const GpModel& model, const AcquisitionConfig& cfg, std::uint64_t seed);

}  // namespace cbo
