#include "core/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "core/error.hpp"

namespace cbo {

namespace {

constexpr double kScaleFloor = 1e-12;

}  // namespace

void GpConfig::check() const {
  if (!(length_scale > 0.0) || !std::isfinite(length_scale)) throw ConfigError("gp length_scale must be > 0");
  if (!(jitter_start > 0.0) || !(jitter_start <= jitter_max))
    throw ConfigError("gp jitter must satisfy 0 < jitter_start <= jitter_max");
  if (optimize_length_scale && !(0.0 < length_scale_min && length_scale_min < length_scale_max))
    throw ConfigError("gp length-scale search range is empty");
}

double se_kernel(std::span<const double> a, std::span<const double> b, double length_scale) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d2 += t * t;
  }
  return std::exp(-d2 / (2.0 * length_scale * length_scale));
}

GpModel GpModel::fit(const std::vector<std::vector<double>>& inputs, std::span<const double> targets,
                     const GpConfig& cfg) {
  cfg.check();
  const std::size_t n = inputs.size();
  if (n == 0) throw DomainError("gp fit needs at least one observation");
  if (targets.size() != n) throw DomainError("gp fit: input and target counts differ");
  const std::size_t d = inputs.front().size();
  if (d == 0) throw DomainError("gp fit: zero-dimensional inputs");

  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (inputs[i].size() != d) throw DomainError("gp fit: ragged inputs");
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(inputs[i][j])) throw DomainError("gp fit: non-finite input");
      x(i, j) = inputs[i][j];
    }
  }

  double mean = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (double y : targets) {
    if (!std::isfinite(y)) throw DomainError("gp fit: non-finite target");
    mean += y;
    best = std::max(best, y);
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  if (n > 1) {
    for (double y : targets) var += (y - mean) * (y - mean);
    var /= static_cast<double>(n - 1);
  }
  const double scale = std::max(std::sqrt(var), kScaleFloor);

  Eigen::VectorXd z(n);
  for (std::size_t i = 0; i < n; ++i) z(i) = (targets[i] - mean) / scale;

  if (!cfg.optimize_length_scale) return fit_fixed(x, z, mean, scale, best, cfg.length_scale, cfg);

  // Golden-section search on log(length_scale) for the marginal-likelihood
  // maximum. Length-scales that cannot be factorized score -inf.
  auto score = [&](double log_l) {
    try {
      return fit_fixed(x, z, mean, scale, best, std::exp(log_l), cfg).log_marginal_likelihood();
    } catch (const SingularFitError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(cfg.length_scale_min);
  double b = std::log(cfg.length_scale_max);
  double c = b - phi * (b - a);
  double e = a + phi * (b - a);
  double fc = score(c);
  double fe = score(e);
  for (int it = 0; it < 40; ++it) {
    if (fc >= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - phi * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + phi * (b - a);
      fe = score(e);
    }
  }
  const double best_log_l = fc >= fe ? c : e;
  return fit_fixed(x, z, mean, scale, best, std::exp(best_log_l), cfg);
}

GpModel GpModel::fit_fixed(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& z, double y_mean,
                           double y_scale, double best, double length_scale, const GpConfig& cfg) {
  GpModel m;
  m.inputs_ = inputs;
  m.z_ = z;
  m.y_mean_ = y_mean;
  m.y_scale_ = y_scale;
  m.best_target_ = best;
  m.length_scale_ = length_scale;

  const Eigen::MatrixXd k = m.kernel_matrix();
  const auto n = k.rows();
  // 1e-10, 1e-9, ... up to jitter_max. Stepping by exponent avoids the
  // accumulated round-off of repeated multiplication skipping the last rung.
  for (int step = 0;; ++step) {
    const double jitter = cfg.jitter_start * std::pow(10.0, step);
    if (jitter > cfg.jitter_max * (1.0 + 1e-9)) break;
    Eigen::MatrixXd a = k;
    a.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd l = llt.matrixL();
    if (!l.diagonal().allFinite() || (l.diagonal().array() <= 0.0).any()) continue;
    m.chol_ = std::move(l);
    m.alpha_ = llt.solve(z);
    m.jitter_ = jitter;
    return m;
  }
  throw SingularFitError("kernel matrix of " + std::to_string(n) + " points is not positive definite at jitter " +
                         std::to_string(cfg.jitter_max));
}

Eigen::MatrixXd GpModel::kernel_matrix() const {
  const auto n = inputs_.rows();
  const double inv = 1.0 / (2.0 * length_scale_ * length_scale_);
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d2 = (inputs_.row(i) - inputs_.row(j)).squaredNorm();
      k(i, j) = k(j, i) = std::exp(-d2 * inv);
    }
  }
  return k;
}

Eigen::VectorXd GpModel::cross_kernel(std::span<const double> u) const {
  if (u.size() != dimension())
    throw DomainError("gp predict: expected " + std::to_string(dimension()) + " coordinates, got " +
                      std::to_string(u.size()));
  const auto n = inputs_.rows();
  const auto d = inputs_.cols();
  const double inv = 1.0 / (2.0 * length_scale_ * length_scale_);
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double d2 = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double t = u[static_cast<std::size_t>(j)] - inputs_(i, j);
      d2 += t * t;
    }
    k(i) = std::exp(-d2 * inv);
  }
  return k;
}

GpPrediction GpModel::predict(std::span<const double> u) const {
  const Eigen::VectorXd k = cross_kernel(u);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
  const double var = std::max(0.0, 1.0 - v.squaredNorm());
  return {y_mean_ + y_scale_ * k.dot(alpha_), y_scale_ * std::sqrt(var)};
}

GpPrediction GpModel::predict(std::span<const double> u, GpGradient& grad) const {
  const Eigen::VectorXd k = cross_kernel(u);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
  const Eigen::VectorXd w = chol_.transpose().triangularView<Eigen::Upper>().solve(v);
  const double var = std::max(0.0, 1.0 - v.squaredNorm());
  const double sd = std::sqrt(var);

  // dk_i/du = -k_i (u - u_i) / l^2
  const auto n = inputs_.rows();
  const auto d = inputs_.cols();
  const double inv_l2 = 1.0 / (length_scale_ * length_scale_);
  grad.mean.assign(static_cast<std::size_t>(d), 0.0);
  grad.std.assign(static_cast<std::size_t>(d), 0.0);
  std::vector<double> dvar(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ca = -alpha_(i) * k(i) * inv_l2;
    const double cw = 2.0 * w(i) * k(i) * inv_l2;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double diff = u[static_cast<std::size_t>(j)] - inputs_(i, j);
      grad.mean[static_cast<std::size_t>(j)] += ca * diff;
      dvar[static_cast<std::size_t>(j)] += cw * diff;
    }
  }
  for (std::size_t j = 0; j < grad.mean.size(); ++j) {
    grad.mean[j] *= y_scale_;
    if (sd > 0.0) grad.std[j] = y_scale_ * dvar[j] / (2.0 * sd);
  }
  return {y_mean_ + y_scale_ * k.dot(alpha_), y_scale_ * sd};
}

double GpModel::log_marginal_likelihood() const {
  const double n = static_cast<double>(z_.size());
  return -0.5 * z_.dot(alpha_) - chol_.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace cbo
