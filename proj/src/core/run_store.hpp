#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "core/config.hpp"
#include "core/driver.hpp"

namespace cbo {

// A run directory holds
//   config.json   canonical campaign settings
//   records.csv   one row per evaluation, reals with 17 significant digits
//   manifest.json seed, engine version, status, record counts
struct RunDirectory {
  CampaignSettings settings;
  Dataset dataset;
  bool complete = false;
  std::string error;  // abort reason when !complete
};

std::string engine_version();

/// Header row of records.csv for a d-dimensional space (no trailing newline).
std::string records_csv_header(std::size_t dimension);
std::string records_csv(const Dataset& ds);

/// Creates the directory if needed and overwrites the three files.
void write_run_dir(const std::filesystem::path& dir, const CampaignSettings& settings, const Dataset& ds,
                   bool complete, const std::string& error = {});

/// Throws RunInputError naming the file and line of the first defect.
RunDirectory read_run_dir(const std::filesystem::path& dir);

/// printf("%.17g"), with "nan"/"inf" spelled consistently.
std::string format_real(double v);

}  // namespace cbo
