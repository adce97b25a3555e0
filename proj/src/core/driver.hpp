#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/acquisition.hpp"
#include "core/design_space.hpp"
#include "core/evaluators.hpp"
#include "core/gp.hpp"
#include "core/lagrange.hpp"

namespace cbo {

enum class Mode { kUnconstrained, kConstrained, kFrontier };

std::string to_string(Mode m);
Mode parse_mode(std::string_view s);

// When a record counts as meeting a breakdown-voltage target.
struct Feasibility {
  enum class Rule { kAtLeast, kWithin };
  Rule rule = Rule::kAtLeast;
  double tolerance = 0.0;  // kWithin only

  bool satisfied(double bv, double target) const;
  bool operator==(const Feasibility&) const = default;
};

struct RunConfig {
  DesignSpace space = DesignSpace::toy2d();
  EvaluatorSpec evaluator;
  Mode mode = Mode::kUnconstrained;
  double bv_target = 0.0;  // kConstrained
  double bv_low = 0.0;     // kFrontier
  double bv_high = 0.0;    // kFrontier
  std::size_t n_init = 10;
  std::size_t n_total = 100;
  std::uint64_t seed = 0;
  std::size_t warmup_unconstrained = 2;
  Feasibility feasibility;
  GpConfig gp;
  AcquisitionConfig acq;
  // Pins lambda to 0 in every mode; the trajectory then matches an
  // unconstrained run with the same seed.
  bool force_zero_lambda = false;
  // Consecutive invalid evaluations tolerated for one slot before aborting.
  int max_invalid_retries = 3;

  /// Throws ConfigError.
  void check() const;
  std::optional<double> fixed_target() const {
    return mode == Mode::kConstrained ? std::optional<double>(bv_target) : std::nullopt;
  }
};

enum class Phase { kInit, kBo };

struct RunRecord {
  std::size_t iteration = 0;  // 1-based, strictly increasing over all records
  Phase phase = Phase::kInit;
  DesignPoint x;
  Evaluation eval;
  double lambda_used = 0.0;
  std::optional<double> target_used;
  // Label this record received in the fit of its own iteration; NaN when invalid.
  double objective_label = 0.0;
};

struct Dataset {
  RunConfig config;
  std::vector<RunRecord> records;

  std::size_t valid_count() const;
  /// Valid (bv, fom) pairs among records[0, end), indexed by record position.
  std::vector<FrontierPoint> frontier_points(std::size_t end) const;
  std::vector<FrontierPoint> frontier_points() const { return frontier_points(records.size()); }
};

/// Label a record would get under `state`; plain fom when there is no target.
double objective_label(const RunRecord& r, double lambda, std::optional<double> target);

struct Progress {
  std::size_t iteration = 0;
  Phase phase = Phase::kInit;
  bool valid = false;
  std::size_t valid_records = 0;
  double incumbent = 0.0;  // best objective label under this iteration's labels
  double best_fom = 0.0;
  double lambda = 0.0;
  std::optional<double> target;
  // BO iterations only: how many observations the GP was fit on and which
  // records formed the hull that produced lambda.
  std::size_t n_training = 0;
  std::vector<std::size_t> training_sources;  // record positions fed to the GP
  std::vector<double> training_labels;        // their labels, same order
  std::vector<std::size_t> hull_sources;
};

using ProgressSink = std::function<void(const Progress&)>;

// One optimization campaign. run() fills dataset() as it goes, so after an
// exception the partial history is still available for persisting.
class Campaign {
 public:
  explicit Campaign(RunConfig cfg);
  ~Campaign();
  Campaign(const Campaign&) = delete;
  Campaign& operator=(const Campaign&) = delete;

  /// Throws EvaluatorUnavailable when the evaluator cannot be started or
  /// fails more than max_invalid_retries times in a row.
  void run(const ProgressSink& sink = {});
  const Dataset& dataset() const { return data_; }
  bool complete() const { return complete_; }

 private:
  void append(RunRecord r, const ProgressSink& sink, Progress p);

  Dataset data_;
  std::unique_ptr<Evaluator> evaluator_;
  bool complete_ = false;
};

Dataset run(const RunConfig& cfg, const ProgressSink& sink = {});

/// Highest-fom valid record meeting the rule; earliest iteration on ties.
std::optional<RunRecord> best_feasible(const Dataset& ds, double target, const Feasibility& rule);
/// Highest-fom valid record; earliest iteration on ties.
std::optional<RunRecord> best_record(const Dataset& ds);

/// Upper hull over every valid record. Throws DomainError if there is none.
UpperHull frontier_report(const Dataset& ds);

}  // namespace cbo
