#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cbo {

struct GpConfig {
  double length_scale = 1.0;
  double jitter_start = 1e-10;
  double jitter_max = 1e-6;
  // Maximum-likelihood refit of the shared length-scale before each fit.
  bool optimize_length_scale = false;
  double length_scale_min = 1e-2;
  double length_scale_max = 1e1;

  /// Throws ConfigError when the invariants do not hold.
  void check() const;
};

struct GpPrediction {
  double mean = 0.0;
  double std = 0.0;
};

struct GpGradient {
  std::vector<double> mean;  // d mean / d u
  std::vector<double> std;   // d std / d u, zero where std == 0
};

// Zero-mean squared-exponential GP on standardized targets. Inputs live in
// the unit cube; outputs are reported in the caller's units.
class GpModel {
 public:
  /// Throws SingularFitError if K + jitter*I cannot be factorized for any
  /// jitter up to cfg.jitter_max, DomainError on bad shapes or values.
  static GpModel fit(const std::vector<std::vector<double>>& inputs, std::span<const double> targets,
                     const GpConfig& cfg);

  GpPrediction predict(std::span<const double> u) const;
  GpPrediction predict(std::span<const double> u, GpGradient& grad) const;

  std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(inputs_.cols()); }
  double length_scale() const { return length_scale_; }
  double jitter() const { return jitter_; }
  double target_mean() const { return y_mean_; }
  double target_scale() const { return y_scale_; }
  double best_target() const { return best_target_; }
  /// Log marginal likelihood of the standardized targets.
  double log_marginal_likelihood() const;

  const Eigen::MatrixXd& cholesky_factor() const { return chol_; }
  Eigen::MatrixXd kernel_matrix() const;

 private:
  GpModel() = default;
  static GpModel fit_fixed(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& z, double y_mean,
                           double y_scale, double best, double length_scale, const GpConfig& cfg);
  Eigen::VectorXd cross_kernel(std::span<const double> u) const;

  Eigen::MatrixXd inputs_;  // n x d
  Eigen::VectorXd z_;       // standardized targets
  Eigen::MatrixXd chol_;    // lower factor of K + jitter I
  Eigen::VectorXd alpha_;   // (K + jitter I)^-1 z
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double best_target_ = 0.0;
  double length_scale_ = 1.0;
  double jitter_ = 0.0;
};

/// Squared-exponential kernel exp(-|a-b|^2 / (2 l^2)).
double se_kernel(std::span<const double> a, std::span<const double> b, double length_scale);

}  // namespace cbo
