#include "core/box_minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace cbo {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

}  // namespace

BoxMinimizerResult minimize_box(const ObjectiveWithGradient& f, std::vector<double> x0,
                                std::span<const double> lower, std::span<const double> upper,
                                const BoxMinimizerOptions& opt) {
  const std::size_t d = x0.size();
  auto project = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < d; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };

  BoxMinimizerResult res;
  res.x = std::move(x0);
  project(res.x);
  std::vector<double> g(d);
  res.f = f(res.x, g);
  if (!std::isfinite(res.f)) return res;

  std::deque<Pair> memory;
  std::vector<double> dir(d), x_new(d), g_new(d), step(d);
  std::vector<bool> free(d);

  for (int it = 0; it < opt.max_iterations; ++it) {
    // Variables pinned at a bound with the gradient pushing outward stay put.
    for (std::size_t i = 0; i < d; ++i) {
      const bool at_lower = res.x[i] <= lower[i] && g[i] > 0.0;
      const bool at_upper = res.x[i] >= upper[i] && g[i] < 0.0;
      free[i] = !(at_lower || at_upper);
    }
    std::vector<double> pg(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      if (free[i]) pg[i] = g[i];
    const double pg_norm = inf_norm(pg);
    if (pg_norm == 0.0 || !std::isfinite(pg_norm)) break;

    // Two-loop recursion restricted to the free subspace.
    std::vector<double> q = pg;
    std::vector<double> a(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      double sq = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        if (free[i]) sq += memory[k].s[i] * q[i];
      a[k] = memory[k].rho * sq;
      for (std::size_t i = 0; i < d; ++i)
        if (free[i]) q[i] -= a[k] * memory[k].y[i];
    }
    if (!memory.empty()) {
      const auto& last = memory.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (auto& v : q) v *= gamma;
    } else {
      const double scale = opt.initial_step / pg_norm;
      for (auto& v : q) v *= scale;
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      double yr = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        if (free[i]) yr += memory[k].y[i] * q[i];
      const double b = memory[k].rho * yr;
      for (std::size_t i = 0; i < d; ++i)
        if (free[i]) q[i] += memory[k].s[i] * (a[k] - b);
    }
    for (std::size_t i = 0; i < d; ++i) dir[i] = free[i] ? -q[i] : 0.0;
    if (dot(dir, pg) >= 0.0) {
      memory.clear();
      const double scale = opt.initial_step / pg_norm;
      for (std::size_t i = 0; i < d; ++i) dir[i] = -pg[i] * scale;
    }

    // Backtracking Armijo search along the projected path.
    double t = 1.0;
    bool accepted = false;
    double f_new = res.f;
    for (int ls = 0; ls < opt.max_line_search_steps; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < d; ++i) x_new[i] = res.x[i] + t * dir[i];
      project(x_new);
      for (std::size_t i = 0; i < d; ++i) step[i] = x_new[i] - res.x[i];
      const double decrease = dot(g, step);
      if (inf_norm(step) == 0.0) break;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.f + opt.armijo * decrease && f_new < res.f) {
        accepted = true;
        break;
      }
    }
    res.iterations = it + 1;
    if (!accepted) break;

    std::vector<double> y(d);
    for (std::size_t i = 0; i < d; ++i) y[i] = g_new[i] - g[i];
    const double sy = dot(step, y);
    if (sy > 1e-12 * std::sqrt(dot(step, step) * dot(y, y))) {
      memory.push_back({step, y, 1.0 / sy});
      if (static_cast<int>(memory.size()) > opt.memory) memory.pop_front();
    }
    res.x = x_new;
    res.f = f_new;
    g = g_new;
  }
  return res;
}

}  // namespace cbo
