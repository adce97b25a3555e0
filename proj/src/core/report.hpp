#pragma once

#include <filesystem>
#include <string>

#include "core/driver.hpp"

namespace cbo {

// Iteration-order color ramp endpoints for scatter plots.
inline constexpr const char* kRampStart = "#00429d";
inline constexpr const char* kRampEnd = "#d7191c";

/// Hex color at t in [0, 1] on the blue-to-red ramp.
std::string ramp_color(double t);

std::string scatter_svg(const Dataset& ds);
std::string frontier_svg(const Dataset& ds, const UpperHull& hull);
std::string frontier_csv(const UpperHull& hull);
/// iteration, fom, best_fom (and best_feasible_fom when the run has a fixed target).
std::string convergence_csv(const Dataset& ds);

/// Reads `run_dir` and writes scatter.svg, frontier.svg, frontier.csv and
/// convergence.csv into it. Throws RunInputError on bad input.
void report_run_dir(const std::filesystem::path& run_dir);

}  // namespace cbo
