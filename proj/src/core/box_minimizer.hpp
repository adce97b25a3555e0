#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cbo {

struct BoxMinimizerOptions {
  int max_iterations = 20;
  int memory = 10;
  int max_line_search_steps = 30;
  double armijo = 1e-4;
  double initial_step = 0.1;  // max-norm of the first, steepest-descent move
};

struct BoxMinimizerResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
};

/// f(x, grad) returns the objective and writes its gradient.
using ObjectiveWithGradient = std::function<double(std::span<const double>, std::span<double>)>;

/// Projected limited-memory BFGS on the box [lower, upper]. Every iterate is
/// projected onto the box, so the result is always feasible. The returned
/// point never has a larger objective than the (projected) start.
BoxMinimizerResult minimize_box(const ObjectiveWithGradient& f, std::vector<double> x0,
                                std::span<const double> lower, std::span<const double> upper,
                                const BoxMinimizerOptions& opt = {});

}  // namespace cbo
