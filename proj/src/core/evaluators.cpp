#include "core/evaluators.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include <sys/wait.h>

#include <json.hpp>

#include "core/error.hpp"

namespace cbo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_in(const DesignSpace& space, std::span<const double> x, const char* who) {
  const auto v = space.validate(x);
  if (!v.empty()) throw DomainError(std::string(who) + ": " + v.front().message);
}

}  // namespace

Evaluation Evaluation::make_valid(double bv, double rsp_on) {
  Evaluation e;
  e.bv = bv;
  e.rsp_on = rsp_on;
  e.fom = cbo::fom(bv, rsp_on);
  e.valid = true;
  return e;
}

Evaluation Evaluation::make_invalid(std::string why) {
  Evaluation e;
  e.bv = e.rsp_on = e.fom = kNaN;
  e.valid = false;
  e.error = std::move(why);
  return e;
}

double fom(double bv, double rsp_on) {
  if (!(rsp_on > 0.0)) throw DomainError("specific on-resistance must be positive");
  return bv * bv / rsp_on;
}

Evaluation toy2d(std::span<const double> x) {
  static const DesignSpace space = DesignSpace::toy2d();
  require_in(space, x, "toy2d");
  const double x1 = x[0];
  const double x2 = x[1];
  const double ridge = x2 - 0.3 - 0.4 * x1;
  const double bv = 30.0 + 25.0 * x1;
  const double rsp_on = 1.0 + 4.0 * x1 * x1 + 3.0 * ridge * ridge;
  return Evaluation::make_valid(bv, rsp_on);
}

Evaluation ldmos9_surrogate(std::span<const double> x) {
  static const DesignSpace space = DesignSpace::ldmos9();
  require_in(space, x, "ldmos9-surrogate");
  const auto u = space.normalize(x);
  const double n_drift1 = u[0];
  const double l_drift1 = u[1];
  const double l_drift2 = u[2];
  const double gp = u[3];
  const double l_jfet = u[4];
  const double l_fox = u[5];
  const double n_surf = u[6];
  const double t_fox = u[7];
  const double r = u[8];

  const double bv = 25.0 + 20.0 * l_drift1 + 5.0 * l_fox + 6.0 * t_fox - 12.0 * n_drift1 - 4.0 * n_surf +
                    3.0 * std::sin(std::numbers::pi * r) * (1.0 - n_drift1) + 2.0 * l_drift2;
  const double rsp_on = 1.5 + 4.0 * l_drift1 + 1.5 * l_fox + 1.0 * l_jfet + 3.0 * (1.0 - n_drift1) +
                        0.8 * (1.0 - n_surf) + 0.5 * t_fox + 0.3 * (gp - 0.6) * (gp - 0.6) + 0.5 * l_drift2;
  return Evaluation::make_valid(bv, rsp_on);
}

EvaluatorSpec EvaluatorSpec::builtin(std::string_view name) {
  EvaluatorSpec s;
  if (name == "toy2d") {
    s.kind = Kind::kToy2d;
  } else if (name == "ldmos9-surrogate") {
    s.kind = Kind::kLdmos9Surrogate;
  } else {
    throw ConfigError("unknown evaluator '" + std::string(name) + "' (expected toy2d or ldmos9-surrogate)");
  }
  return s;
}

EvaluatorSpec EvaluatorSpec::subprocess(std::vector<std::string> argv, double timeout_s) {
  if (argv.empty()) throw ConfigError("subprocess evaluator needs a command");
  if (!(timeout_s > 0.0)) throw ConfigError("evaluator timeout must be positive");
  EvaluatorSpec s;
  s.kind = Kind::kSubprocess;
  s.command = std::move(argv);
  s.timeout_s = timeout_s;
  return s;
}

std::string EvaluatorSpec::name() const {
  switch (kind) {
    case Kind::kToy2d: return "toy2d";
    case Kind::kLdmos9Surrogate: return "ldmos9-surrogate";
    case Kind::kSubprocess: return "subprocess";
  }
  return "?";
}

std::optional<DesignSpace> builtin_space(const EvaluatorSpec& spec) {
  switch (spec.kind) {
    case EvaluatorSpec::Kind::kToy2d: return DesignSpace::toy2d();
    case EvaluatorSpec::Kind::kLdmos9Surrogate: return DesignSpace::ldmos9();
    case EvaluatorSpec::Kind::kSubprocess: return std::nullopt;
  }
  return std::nullopt;
}

BuiltinEvaluator::BuiltinEvaluator(EvaluatorSpec::Kind kind) : kind_(kind) {
  if (kind == EvaluatorSpec::Kind::kSubprocess) throw ConfigError("not a builtin evaluator");
}

Evaluation BuiltinEvaluator::evaluate(std::span<const double> x) {
  return kind_ == EvaluatorSpec::Kind::kToy2d ? toy2d(x) : ldmos9_surrogate(x);
}

SubprocessEvaluator::SubprocessEvaluator(std::vector<std::string> argv, std::vector<std::string> names,
                                         double timeout_s)
    : argv_(std::move(argv)), names_(std::move(names)), timeout_s_(timeout_s) {}

SubprocessEvaluator::~SubprocessEvaluator() = default;

void SubprocessEvaluator::ensure_running() {
  if (child_.running()) return;
  std::string error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (child_.spawn(argv_, error)) {
      ++spawns_;
      return;
    }
  }
  throw EvaluatorUnavailable("cannot start evaluator: " + error);
}

Evaluation SubprocessEvaluator::evaluate(std::span<const double> x) {
  if (x.size() != names_.size()) throw DomainError("design point length does not match evaluator space");
  ensure_running();

  const auto started = std::chrono::steady_clock::now();
  const std::uint64_t id = next_id_++;
  nlohmann::json request = {{"id", id}, {"names", names_}, {"x", std::vector<double>(x.begin(), x.end())}};

  auto finish = [&](Evaluation e) {
    e.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return e;
  };

  if (!child_.write_line(request.dump())) {
    child_.shutdown(std::chrono::milliseconds(100));
    return finish(Evaluation::make_invalid("evaluator closed its input"));
  }

  std::string line;
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(std::ceil(timeout_s_ * 1000.0)));
  switch (child_.read_line(line, timeout)) {
    case ChildProcess::ReadStatus::kTimeout:
      child_.kill();
      return finish(Evaluation::make_invalid("evaluator timed out"));
    case ChildProcess::ReadStatus::kEof: {
      const auto status = child_.shutdown(std::chrono::milliseconds(1000));
      std::string why = "evaluator exited";
      if (status && WIFEXITED(*status)) why += " with status " + std::to_string(WEXITSTATUS(*status));
      return finish(Evaluation::make_invalid(why));
    }
    case ChildProcess::ReadStatus::kLine:
      break;
  }

  const auto reply = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (reply.is_discarded() || !reply.is_object()) return finish(Evaluation::make_invalid("malformed response"));
  const auto id_it = reply.find("id");
  if (id_it == reply.end() || !id_it->is_number_integer() || id_it->get<std::uint64_t>() != id)
    return finish(Evaluation::make_invalid("response id mismatch"));
  if (const auto err = reply.find("error"); err != reply.end())
    return finish(Evaluation::make_invalid(err->is_string() ? err->get<std::string>() : err->dump()));
  const auto bv = reply.find("bv");
  const auto rsp = reply.find("rsp_on");
  if (bv == reply.end() || rsp == reply.end() || !bv->is_number() || !rsp->is_number())
    return finish(Evaluation::make_invalid("response lacks numeric bv and rsp_on"));
  const double bv_v = bv->get<double>();
  const double rsp_v = rsp->get<double>();
  if (!std::isfinite(bv_v) || !std::isfinite(rsp_v) || !(bv_v > 0.0) || !(rsp_v > 0.0))
    return finish(Evaluation::make_invalid("response values out of range"));
  return finish(Evaluation::make_valid(bv_v, rsp_v));
}

std::unique_ptr<Evaluator> make_evaluator(const EvaluatorSpec& spec, const DesignSpace& space) {
  if (spec.kind == EvaluatorSpec::Kind::kSubprocess)
    return std::make_unique<SubprocessEvaluator>(spec.command, space.names(), spec.timeout_s);
  if (const auto own = builtin_space(spec); own && !(*own == space))
    throw ConfigError("evaluator " + spec.name() + " requires its own design space");
  return std::make_unique<BuiltinEvaluator>(spec.kind);
}

Evaluation evaluate(const EvaluatorSpec& spec, std::span<const double> x) {
  if (!spec.is_builtin()) throw ConfigError("one-shot evaluation needs a builtin evaluator");
  return BuiltinEvaluator(spec.kind).evaluate(x);
}

}  // namespace cbo
