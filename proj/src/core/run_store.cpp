#include "core/run_store.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "core/error.hpp"

namespace cbo {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw RunInputError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed for " + p.string());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(const std::string& field, const std::string& where) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (field.empty() || used != field.size()) throw RunInputError(where + ": '" + field + "' is not a number");
  return v;
}

std::size_t parse_index(const std::string& field, const std::string& where) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (field.empty() || used != field.size()) throw RunInputError(where + ": '" + field + "' is not an index");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string engine_version() { return CBO_VERSION_STRING; }

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string records_csv_header(std::size_t dimension) {
  std::string h = "iteration,phase";
  for (std::size_t i = 1; i <= dimension; ++i) h += ",x_" + std::to_string(i);
  h += ",bv,rsp_on,fom,valid,lambda_used,target_used";
  return h;
}

std::string records_csv(const Dataset& ds) {
  std::string out = records_csv_header(ds.config.space.size()) + "\n";
  for (const auto& r : ds.records) {
    out += std::to_string(r.iteration);
    out += r.phase == Phase::kInit ? ",init" : ",bo";
    for (double v : r.x) out += "," + format_real(v);
    out += "," + format_real(r.eval.bv) + "," + format_real(r.eval.rsp_on) + "," + format_real(r.eval.fom);
    out += r.eval.valid ? ",1" : ",0";
    out += "," + format_real(r.lambda_used);
    out += ",";
    if (r.target_used) out += format_real(*r.target_used);
    out += "\n";
  }
  return out;
}

void write_run_dir(const fs::path& dir, const CampaignSettings& settings, const Dataset& ds, bool complete,
                   const std::string& error) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create run directory " + dir.string() + ": " + ec.message());

  write_file(dir / "config.json", to_json(settings).dump(2) + "\n");
  write_file(dir / "records.csv", records_csv(ds));
  nlohmann::json manifest = {
      {"engine", "cbo"},
      {"engine_version", engine_version()},
      {"seed", settings.run.seed},
      {"status", complete ? "complete" : "aborted"},
      {"records", ds.records.size()},
      {"valid_records", ds.valid_count()},
  };
  if (!complete) manifest["error"] = error;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

RunDirectory read_run_dir(const fs::path& dir) {
  RunDirectory out;
  if (!fs::is_directory(dir)) throw RunInputError("run directory " + dir.string() + " does not exist");

  nlohmann::json config;
  nlohmann::json manifest;
  try {
    config = nlohmann::json::parse(read_file(dir / "config.json"));
  } catch (const nlohmann::json::exception& e) {
    throw RunInputError("config.json is corrupt: " + std::string(e.what()));
  }
  try {
    manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw RunInputError("manifest.json is corrupt: " + std::string(e.what()));
  }
  try {
    out.settings = parse_config(config);
  } catch (const ConfigError& e) {
    throw RunInputError(std::string("config.json: ") + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("records") || !manifest["records"].is_number_unsigned())
    throw RunInputError("manifest.json lacks a record count");
  const auto expected = manifest["records"].get<std::size_t>();
  out.complete = manifest.value("status", "") == "complete";
  out.error = manifest.value("error", "");

  const std::size_t d = out.settings.run.space.size();
  const std::string text = read_file(dir / "records.csv");
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw RunInputError("records.csv line 1: missing header");
  ++line_no;
  if (line != records_csv_header(d)) throw RunInputError("records.csv line 1: unexpected header");

  out.dataset.config = out.settings.run;
  const std::size_t n_fields = 2 + d + 6;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "records.csv line " + std::to_string(line_no);
    if (in.eof() && !text.empty() && text.back() != '\n')
      throw RunInputError(where + ": row is truncated (no line terminator)");
    const auto f = split(line, ',');
    if (f.size() != n_fields)
      throw RunInputError(where + ": expected " + std::to_string(n_fields) + " fields, found " +
                          std::to_string(f.size()));
    RunRecord r;
    r.iteration = parse_index(f[0], where);
    if (r.iteration != out.dataset.records.size() + 1)
      throw RunInputError(where + ": iteration " + f[0] + " out of sequence");
    if (f[1] == "init") {
      r.phase = Phase::kInit;
    } else if (f[1] == "bo") {
      r.phase = Phase::kBo;
    } else {
      throw RunInputError(where + ": unknown phase '" + f[1] + "'");
    }
    for (std::size_t j = 0; j < d; ++j) r.x.push_back(parse_real(f[2 + j], where));
    const double bv = parse_real(f[2 + d], where);
    const double rsp = parse_real(f[3 + d], where);
    const double fom_v = parse_real(f[4 + d], where);
    if (f[5 + d] == "1") {
      if (!(rsp > 0.0)) throw RunInputError(where + ": valid record with nonpositive rsp_on");
      r.eval.bv = bv;
      r.eval.rsp_on = rsp;
      r.eval.fom = fom_v;
      r.eval.valid = true;
    } else if (f[5 + d] == "0") {
      r.eval = Evaluation::make_invalid("");
    } else {
      throw RunInputError(where + ": valid must be 0 or 1");
    }
    r.lambda_used = parse_real(f[6 + d], where);
    if (!f[7 + d].empty()) r.target_used = parse_real(f[7 + d], where);
    r.objective_label = objective_label(r, r.lambda_used, r.target_used);
    out.dataset.records.push_back(std::move(r));
  }
  if (out.dataset.records.size() != expected)
    throw RunInputError("records.csv line " + std::to_string(line_no + 1) + ": expected " + std::to_string(expected) +
                        " records, found " + std::to_string(out.dataset.records.size()) + " (file truncated)");
  return out;
}

}  // namespace cbo
