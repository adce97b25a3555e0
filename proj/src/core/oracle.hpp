#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "core/design_space.hpp"
#include "core/evaluators.hpp"

namespace cbo {

// Brute-force reference optima for the builtin evaluators.
struct OracleResult {
  std::string evaluator;
  DesignPoint best_x;
  Evaluation best;
  std::optional<double> target;
  // Set when a target was given and some sample met bv >= target.
  std::optional<DesignPoint> constrained_x;
  std::optional<Evaluation> constrained;
  std::size_t evaluations = 0;
};

/// resolution x resolution grid over [0,1]^2, first-in-scan-order on ties.
OracleResult toy2d_grid_oracle(std::size_t resolution, std::optional<double> target);

/// `samples` uniform points (normalized coordinates) followed by coordinate
/// descent: up to 100 sweeps, step halving from 0.05 down to 1e-5.
OracleResult ldmos9_random_oracle(std::size_t samples, std::uint64_t seed, std::optional<double> target);

/// Dispatch by evaluator name. Throws ConfigError for anything else.
OracleResult run_oracle(const std::string& evaluator, std::optional<double> target, std::size_t resolution,
                        std::uint64_t seed, std::size_t samples = 1000000);

}  // namespace cbo
