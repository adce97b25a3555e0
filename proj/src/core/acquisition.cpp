#include "core/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/box_minimizer.hpp"
#include "core/error.hpp"
#include "core/random.hpp"

namespace cbo {

double normal_pdf(double z) {
  constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double expected_improvement(const GpPrediction& pred, double best_y, double xi) {
  const double delta = pred.mean - best_y - xi;
  if (!(pred.std > 0.0)) return std::max(delta, 0.0);
  const double z = delta / pred.std;
  // Above the incumbent, write EI as delta plus a positive remainder so the
  // large-z limit does not cancel.
  if (z > 0.0) return delta + pred.std * (normal_pdf(z) - z * normal_cdf(-z));
  return std::max(0.0, pred.std * (normal_pdf(z) + z * normal_cdf(z)));
}

namespace {

constexpr double kTailStart = -10.0;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

// 1 - x*R(x) = (1/x^2) * tail_series(x) for the Mills ratio R, x >= 10.
// Eight terms of the asymptotic expansion; relative error < 1e-8 at x = 10.
double tail_series(double x) {
  const double r = 1.0 / (x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 7; ++k) {
    term *= -static_cast<double>(2 * k + 1) * r;
    sum += term;
  }
  return sum;
}

// h(z) = phi(z) + z*Phi(z), so that EI = std * h(delta / std).
double h(double z) {
  if (z > 0.0) return z + (normal_pdf(z) - z * normal_cdf(-z));
  return normal_pdf(z) + z * normal_cdf(z);
}

double log_h(double z) {
  if (z >= kTailStart) return std::log(h(z));
  const double x = -z;
  return -0.5 * z * z - kLogSqrt2Pi + std::log(tail_series(x)) - 2.0 * std::log(x);
}

// Phi(z)/h(z) and phi(z)/h(z): d log EI = (Phi dmean + phi dstd) / (std h).
void h_ratios(double z, double& cdf_over_h, double& pdf_over_h) {
  if (z >= kTailStart) {
    const double hz = h(z);
    cdf_over_h = normal_cdf(z) / hz;
    pdf_over_h = normal_pdf(z) / hz;
    return;
  }
  const double x = -z;
  const double s = tail_series(x);
  pdf_over_h = x * x / s;
  cdf_over_h = (1.0 - s / (x * x)) / x * pdf_over_h;
}

}  // namespace

double log_expected_improvement(const GpPrediction& pred, double best_y, double xi) {
  const double delta = pred.mean - best_y - xi;
  if (!(pred.std > 0.0))
    return delta > 0.0 ? std::log(delta) : -std::numeric_limits<double>::infinity();
  return std::log(pred.std) + log_h(delta / pred.std);
}

void AcquisitionConfig::check() const {
  if (n_restarts < 1 || lbfgs_max_iterations < 1 || candidate_pool < 1)
    throw ConfigError("acquisition counts must be >= 1");
  if (!(xi >= 0.0)) throw ConfigError("acquisition xi must be >= 0");
  if (!(fd_step > 0.0)) throw ConfigError("acquisition fd_step must be > 0");
}

double AcquisitionSurface::value_and_gradient(std::span<const double> u, std::span<double> grad,
                                              double fd_step) const {
  std::vector<double> probe(u.begin(), u.end());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double hi = std::min(1.0, u[j] + fd_step);
    const double lo = std::max(0.0, u[j] - fd_step);
    probe[j] = hi;
    const double f_hi = value(probe);
    probe[j] = lo;
    const double f_lo = value(probe);
    probe[j] = u[j];
    grad[j] = hi > lo ? (f_hi - f_lo) / (hi - lo) : 0.0;
  }
  return value(u);
}

ExpectedImprovementSurface::ExpectedImprovementSurface(const GpModel& model, double xi, bool analytic_gradient)
    : model_(model), best_y_(model.best_target()), xi_(xi), analytic_(analytic_gradient) {}

double ExpectedImprovementSurface::value(std::span<const double> u) const {
  return log_expected_improvement(model_.predict(u), best_y_, xi_);
}

double ExpectedImprovementSurface::expected_improvement(std::span<const double> u) const {
  return cbo::expected_improvement(model_.predict(u), best_y_, xi_);
}

double ExpectedImprovementSurface::value_and_gradient(std::span<const double> u, std::span<double> grad,
                                                      double fd_step) const {
  if (!analytic_) return AcquisitionSurface::value_and_gradient(u, grad, fd_step);
  GpGradient g;
  const auto pred = model_.predict(u, g);
  const double delta = pred.mean - best_y_ - xi_;
  if (!(pred.std > 0.0)) {
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] = delta > 0.0 ? g.mean[j] / delta : 0.0;
    return log_expected_improvement(pred, best_y_, xi_);
  }
  const double z = delta / pred.std;
  double cdf_over_h = 0.0, pdf_over_h = 0.0;
  h_ratios(z, cdf_over_h, pdf_over_h);
  for (std::size_t j = 0; j < grad.size(); ++j)
    grad[j] = (cdf_over_h * g.mean[j] + pdf_over_h * g.std[j]) / pred.std;
  return log_expected_improvement(pred, best_y_, xi_);
}

AcquisitionResult maximize(const AcquisitionSurface& surface, const AcquisitionConfig& cfg, std::uint64_t seed) {
  cfg.check();
  const std::size_t d = surface.dimension();
  const auto pool_size = static_cast<std::size_t>(cfg.candidate_pool);
  Rng rng(seed);

  std::vector<std::vector<double>> pool(pool_size, std::vector<double>(d));
  std::vector<double> scores(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) {
    for (auto& v : pool[i]) v = rng.uniform();
    scores[i] = surface.value(pool[i]);
  }

  std::vector<std::size_t> order(pool_size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  AcquisitionResult best{pool[order[0]], scores[order[0]], order[0], false};

  const std::vector<double> lower(d, 0.0);
  const std::vector<double> upper(d, 1.0);
  BoxMinimizerOptions opt;
  opt.max_iterations = cfg.lbfgs_max_iterations;
  const ObjectiveWithGradient negated = [&](std::span<const double> u, std::span<double> grad) {
    const double v = surface.value_and_gradient(u, grad, cfg.fd_step);
    for (auto& gj : grad) gj = -gj;
    return -v;
  };

  const std::size_t starts = std::min(pool_size, static_cast<std::size_t>(cfg.n_restarts));
  for (std::size_t r = 0; r < starts; ++r) {
    const std::size_t idx = order[r];
    if (!std::isfinite(scores[idx])) continue;
    const auto res = minimize_box(negated, pool[idx], lower, upper, opt);
    // Re-score through value() so every comparison uses the same code path.
    const double v = surface.value(res.x);
    if (v > best.value) best = {res.x, v, idx, true};
  }
  return best;
}

AcquisitionResult maximize(const GpModel& model, const AcquisitionConfig& cfg, std::uint64_t seed) {
  const ExpectedImprovementSurface ei(model, cfg.xi, cfg.gradient == AcquisitionConfig::Gradient::kAnalytic);
  return maximize(ei, cfg, seed);
}

}  // namespace cbo
