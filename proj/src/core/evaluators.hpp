#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/design_space.hpp"
#include "core/subprocess.hpp"

namespace cbo {

// One black-box result. Units: bv in V, rsp_on in mOhm*mm^2, fom in kW/mm^2.
// When `valid` is false the numeric fields are NaN and `error` says why.
struct Evaluation {
  double bv = 0.0;
  double rsp_on = 0.0;
  double fom = 0.0;
  bool valid = false;
  std::optional<double> wall_time;
  std::string error;

  static Evaluation make_valid(double bv, double rsp_on);
  static Evaluation make_invalid(std::string why);
};

/// bv^2 / rsp_on. Throws DomainError when rsp_on <= 0.
double fom(double bv, double rsp_on);

Evaluation toy2d(std::span<const double> x);
/// `x` is in native ldmos9 units.
Evaluation ldmos9_surrogate(std::span<const double> x);

struct EvaluatorSpec {
  enum class Kind { kToy2d, kLdmos9Surrogate, kSubprocess };
  Kind kind = Kind::kToy2d;
  std::vector<std::string> command;  // argv, subprocess only
  double timeout_s = 300.0;

  static EvaluatorSpec builtin(std::string_view name);
  static EvaluatorSpec subprocess(std::vector<std::string> argv, double timeout_s = 300.0);
  /// "toy2d", "ldmos9-surrogate" or "subprocess".
  std::string name() const;
  bool is_builtin() const { return kind != Kind::kSubprocess; }
};

/// The space a builtin evaluator is defined on; nullopt for subprocess.
std::optional<DesignSpace> builtin_space(const EvaluatorSpec& spec);

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual Evaluation evaluate(std::span<const double> x) = 0;
};

class BuiltinEvaluator final : public Evaluator {
 public:
  explicit BuiltinEvaluator(EvaluatorSpec::Kind kind);
  Evaluation evaluate(std::span<const double> x) override;

 private:
  EvaluatorSpec::Kind kind_;
};

// Speaks the line-delimited JSON protocol with one long-lived child:
//   -> {"id": n, "names": [...], "x": [...]}
//   <- {"id": n, "bv": .., "rsp_on": ..}  or  {"id": n, "error": ".."}
// Malformed, error or late replies give an invalid Evaluation. A child that
// timed out is killed; a dead child is respawned on the next request. A
// spawn that fails twice in a row throws EvaluatorUnavailable.
class SubprocessEvaluator final : public Evaluator {
 public:
  SubprocessEvaluator(std::vector<std::string> argv, std::vector<std::string> names, double timeout_s);
  ~SubprocessEvaluator() override;

  Evaluation evaluate(std::span<const double> x) override;
  std::uint64_t spawn_count() const { return spawns_; }

 private:
  void ensure_running();

  std::vector<std::string> argv_;
  std::vector<std::string> names_;
  double timeout_s_;
  ChildProcess child_;
  std::uint64_t next_id_ = 1;
  std::uint64_t spawns_ = 0;
};

std::unique_ptr<Evaluator> make_evaluator(const EvaluatorSpec& spec, const DesignSpace& space);

/// One-shot evaluation; builtins only (a subprocess needs a campaign handle).
Evaluation evaluate(const EvaluatorSpec& spec, std::span<const double> x);

}  // namespace cbo
