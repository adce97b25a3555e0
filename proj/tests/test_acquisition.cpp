#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/acquisition.hpp"
#include "core/box_minimizer.hpp"
#include "core/error.hpp"
#include "core/random.hpp"

using namespace cbo;

namespace {

constexpr double kPhi0 = 0.3989422804014327;

struct ZeroSurface final : AcquisitionSurface {
  std::size_t d;
  explicit ZeroSurface(std::size_t dim) : d(dim) {}
  std::size_t dimension() const override { return d; }
  double value(std::span<const double>) const override { return 0.0; }
};

// Negative squared distance to a point; the FD gradient path is used.
struct Bowl final : AcquisitionSurface {
  std::vector<double> c;
  std::size_t dimension() const override { return c.size(); }
  double value(std::span<const double> u) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += (u[i] - c[i]) * (u[i] - c[i]);
    return -s;
  }
};

GpModel random_model(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x[i]) v = rng.uniform();
    y[i] = rng.normal();
  }
  return GpModel::fit(x, y, {});
}

}  // namespace

TEST_CASE("normal distribution helpers") {
  CHECK(normal_pdf(0.0) == doctest::Approx(kPhi0).epsilon(1e-15));
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(-40.0) >= 0.0);
}

TEST_CASE("expected improvement closed forms") {
  CHECK(expected_improvement({13.0, 0.0}, 10.0, 0.0) == 3.0);
  CHECK(expected_improvement({7.0, 0.0}, 10.0, 0.0) == 0.0);
  CHECK(expected_improvement({10.0, 1.0}, 10.0, 0.0) == doctest::Approx(0.3989423).epsilon(1e-7));
  // xi shifts the incumbent.
  CHECK(expected_improvement({13.0, 0.0}, 10.0, 1.0) == 2.0);
  CHECK(expected_improvement({1e6, 1.0}, 0.0, 0.0) == 1e6);
}

TEST_CASE("expected improvement against Monte Carlo") {
  Rng rng(1);
  const int n = 1000000;
  const double mean = -1.0, sd = 0.5, best = 0.0;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = std::max(mean + sd * rng.normal() - best, 0.0);
    sum += g;
    sum2 += g * g;
  }
  const double est = sum / n;
  const double se = std::sqrt((sum2 / n - est * est) / n);
  CHECK(std::abs(expected_improvement({mean, sd}, best, 0.0) - est) <= 3.0 * se);
}

TEST_CASE("property: EI is nonnegative and monotone in mean and std") {
  Rng rng(2);
  for (int k = 0; k < 10000; ++k) {
    const double m = rng.uniform(-5, 5), s = rng.uniform(0, 3), b = rng.uniform(-5, 5);
    const double dm = rng.uniform(0, 1), ds = rng.uniform(0, 1);
    const double e = expected_improvement({m, s}, b, 0.0);
    CHECK(e >= 0.0);
    CHECK(expected_improvement({m + dm, s}, b, 0.0) >= e);
    CHECK(expected_improvement({m, s + ds}, b, 0.0) >= e);
  }
}

TEST_CASE("log EI agrees with log of EI and with a long-double tail") {
  Rng rng(12);
  for (int k = 0; k < 10000; ++k) {
    const double sd = rng.uniform(0.01, 5), z = rng.uniform(-8, 8), best = rng.uniform(-10, 10);
    const GpPrediction p{best + z * sd, sd};
    CHECK(log_expected_improvement(p, best, 0.0) ==
          doctest::Approx(std::log(expected_improvement(p, best, 0.0))).epsilon(1e-12));
  }
  // Deep tail, where EI itself underflows: phi(z) + z Phi(z) in long double.
  for (double z = -10.5; z >= -150.0; z -= 0.37) {
    const long double zl = z;
    const long double pdf = std::exp(-0.5L * zl * zl) / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
    const long double cdf = 0.5L * std::erfc(-zl / std::sqrt(2.0L));
    const double want = static_cast<double>(std::log(pdf + zl * cdf));
    CHECK(log_expected_improvement({z, 1.0}, 0.0, 0.0) == doctest::Approx(want).epsilon(1e-9));
  }
  // Continuous across the switch to the asymptotic form.
  const double below = log_expected_improvement({-10.0 - 1e-9, 1.0}, 0.0, 0.0);
  const double above = log_expected_improvement({-10.0 + 1e-9, 1.0}, 0.0, 0.0);
  CHECK(std::abs(above - below) <= 1e-6);
  CHECK(above > below);
  CHECK(log_expected_improvement({-1.0, 0.0}, 0.0, 0.0) == -INFINITY);
  CHECK(log_expected_improvement({2.0, 0.0}, 0.0, 0.0) == std::log(2.0));
}

TEST_CASE("analytic EI gradient matches central differences") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 + trial % 8;
    const auto model = random_model(rng, 3 + trial % 6, d);
    const ExpectedImprovementSurface analytic(model, 0.0, true);
    const ExpectedImprovementSurface fd(model, 0.0, false);
    std::vector<double> u(d);
    for (auto& v : u) v = rng.uniform(0.01, 0.99);
    std::vector<double> ga(d), gf(d);
    const double va = analytic.value_and_gradient(u, ga, 1e-6);
    const double vf = fd.value_and_gradient(u, gf, 1e-6);
    CHECK(va == vf);
    for (std::size_t j = 0; j < d; ++j) CHECK(ga[j] == doctest::Approx(gf[j]).epsilon(1e-4).scale(1e-3));
  }
}

TEST_CASE("analytic gradient in the far tail") {
  // A few well-separated points, one far above the rest. Close to a low
  // point the posterior is tight and z sits deep below -10, while the fit
  // stays well conditioned enough for finite differences to be meaningful.
  GpConfig cfg;
  cfg.length_scale = 0.2;
  const std::vector<std::vector<double>> x = {{0.1, 0.1}, {0.9, 0.2}, {0.5, 0.5}, {0.2, 0.85}, {0.8, 0.9}};
  const double y[] = {0.0, 1.0, 100.0, -2.0, 3.0};
  const auto model = GpModel::fit(x, y, cfg);
  const ExpectedImprovementSurface analytic(model, 0.0, true);
  Rng rng(13);
  int tail = 0;
  for (int k = 0; k < 200; ++k) {
    const auto& c = x[k % 2 == 0 ? 0 : 3];
    const double r = rng.uniform(0.003, 0.03), t = rng.uniform(0, 6.283185307179586);
    std::vector<double> u = {c[0] + r * std::cos(t), c[1] + r * std::sin(t)};
    const auto p = model.predict(u);
    if ((p.mean - model.best_target()) / p.std >= -10.0) continue;
    ++tail;
    std::vector<double> ga(2);
    analytic.value_and_gradient(u, ga, 1e-6);
    for (std::size_t j = 0; j < 2; ++j) {
      auto a = u, b = u;
      a[j] += 1e-7;
      b[j] -= 1e-7;
      const double fd = (analytic.value(a) - analytic.value(b)) / 2e-7;
      CHECK(ga[j] == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
    }
  }
  CHECK(tail > 50);
}

TEST_CASE("maximize: a single observation pushes exploration away") {
  const std::vector<std::vector<double>> x = {{0.2}};
  const double y[] = {1.0};
  const auto model = GpModel::fit(x, y, {});
  const auto r = maximize(model, {}, 11);
  REQUIRE(r.u.size() == 1);
  CHECK(r.u[0] >= 0.95);
}

TEST_CASE("maximize: two equal observations at the ends give the midpoint") {
  const std::vector<std::vector<double>> x = {{0.0}, {1.0}};
  const double y[] = {0.0, 0.0};
  const auto model = GpModel::fit(x, y, {});
  const ExpectedImprovementSurface ei(model, 0.0, true);

  double grid_best = -INFINITY, grid_u = -1.0;
  for (int i = 0; i <= 100000; ++i) {
    const double u[] = {i / 100000.0};
    const double v = ei.value(u);
    if (v > grid_best) {
      grid_best = v;
      grid_u = u[0];
    }
  }
  const auto r = maximize(model, {}, 5);
  CHECK(std::abs(r.u[0] - grid_u) <= 1e-2);
  CHECK(std::abs(r.u[0] - 0.5) <= 1e-2);
}

TEST_CASE("maximize: a flat zero surface returns the first pool candidate") {
  const ZeroSurface zero(3);
  const auto r = maximize(zero, {}, 99);
  Rng rng(99);
  std::vector<double> first(3);
  for (auto& v : first) v = rng.uniform();
  CHECK(r.pool_index == 0);
  CHECK_FALSE(r.refined);
  CHECK(r.u == first);
  CHECK(r.value == 0.0);
}

TEST_CASE("maximize: finite-difference refinement climbs a bowl") {
  Bowl bowl;
  bowl.c = {0.3, 0.7, 0.55};
  AcquisitionConfig cfg;
  cfg.candidate_pool = 50;
  cfg.n_restarts = 3;
  const auto r = maximize(bowl, cfg, 1);
  CHECK(r.refined);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.u[i] - bowl.c[i]) <= 1e-4);
}

TEST_CASE("maximize: result dominates the pool, stays in the cube, is deterministic") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 9;
    const auto model = random_model(rng, 2 + trial, d);
    AcquisitionConfig cfg;
    if (trial % 2) cfg.gradient = AcquisitionConfig::Gradient::kFiniteDifference;
    const std::uint64_t seed = 1000 + trial;
    const auto a = maximize(model, cfg, seed);
    const auto b = maximize(model, cfg, seed);
    CHECK(a.u == b.u);
    CHECK(a.value == b.value);
    for (double v : a.u) CHECK((v >= 0.0 && v <= 1.0));

    const ExpectedImprovementSurface ei(model, 0.0, true);
    Rng pool(seed);
    double pool_best = -INFINITY;
    for (int i = 0; i < cfg.candidate_pool; ++i) {
      std::vector<double> u(d);
      for (auto& v : u) v = pool.uniform();
      pool_best = std::max(pool_best, ei.value(u));
    }
    CHECK(a.value >= pool_best);
    CHECK(ei.value(a.u) == a.value);
  }
}

TEST_CASE("acquisition config checks") {
  AcquisitionConfig c;
  CHECK_NOTHROW(c.check());
  c.n_restarts = 0;
  CHECK_THROWS_AS(c.check(), ConfigError);
  c = {};
  c.xi = -1;
  CHECK_THROWS_AS(c.check(), ConfigError);
}

TEST_CASE("box minimizer") {
  const std::vector<double> lo = {0.0, 0.0}, hi = {1.0, 1.0};

  SUBCASE("unconstrained minimum inside the box") {
    const auto f = [](std::span<const double> x, std::span<double> g) {
      g[0] = 2 * (x[0] - 0.3);
      g[1] = 8 * (x[1] - 0.6);
      return (x[0] - 0.3) * (x[0] - 0.3) + 4 * (x[1] - 0.6) * (x[1] - 0.6);
    };
    const auto r = minimize_box(f, {0.9, 0.1}, lo, hi);
    CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(0.6).epsilon(1e-6));
  }
  SUBCASE("minimum outside the box lands on the face") {
    const auto f = [](std::span<const double> x, std::span<double> g) {
      g[0] = 2 * (x[0] - 1.5);
      g[1] = 2 * (x[1] - 0.4);
      return (x[0] - 1.5) * (x[0] - 1.5) + (x[1] - 0.4) * (x[1] - 0.4);
    };
    const auto r = minimize_box(f, {0.2, 0.9}, lo, hi);
    CHECK(r.x[0] == 1.0);
    CHECK(r.x[1] == doctest::Approx(0.4).epsilon(1e-6));
  }
  SUBCASE("never worse than the start, never outside, respects the cap") {
    const auto rosen = [](std::span<const double> x, std::span<double> g) {
      const double a = 1 - x[0], b = x[1] - x[0] * x[0];
      g[0] = -2 * a - 400 * x[0] * b;
      g[1] = 200 * b;
      return a * a + 100 * b * b;
    };
    Rng rng(1);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x0 = {rng.uniform(), rng.uniform()};
      std::vector<double> g(2);
      const double f0 = rosen(x0, g);
      BoxMinimizerOptions opt;
      opt.max_iterations = 20;
      const auto r = minimize_box(rosen, x0, lo, hi, opt);
      CHECK(r.f <= f0);
      CHECK(r.iterations <= 20);
      for (double v : r.x) CHECK((v >= 0.0 && v <= 1.0));
    }
  }
}
