// Copyright 2026 The njcm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "njcm/pipeline.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "njcm/analytics.hpp"
#include "njcm/oracle.hpp"
#include "njcm/parallel.hpp"
#include "njcm/propagator.hpp"
#include "njcm/sampling.hpp"
#include "njcm/version.hpp"

namespace njcm::pipeline {

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

// ---- config access with dotted-path diagnostics ----

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + " must be a JSON object");
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  require_object(obj, path);
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown key '" + path + "." + item.key() + "'");
}

const json& get_field(const json& obj, const std::string& path,
                      const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing key '" + path + "." + key + "'");
  return *it;
}

double get_num(const json& obj, const std::string& path,
               const std::string& key) {
  const json& j = get_field(obj, path, key);
  if (!j.is_number()) throw ConfigError(path + "." + key + " must be a number");
  return j.get<double>();
}

long long get_int(const json& obj, const std::string& path,
                  const std::string& key) {
  const json& j = get_field(obj, path, key);
  if (!j.is_number_integer())
    throw ConfigError(path + "." + key + " must be an integer");
  return j.get<long long>();
}

std::string get_str(const json& obj, const std::string& path,
                    const std::string& key) {
  const json& j = get_field(obj, path, key);
  if (!j.is_string()) throw ConfigError(path + "." + key + " must be a string");
  return j.get<std::string>();
}

Complex get_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(path + " must be a number or [re, im]");
}

// ---- section parsers ----

ModelParams parse_model(const json& model, bool multi_sideband,
                        std::vector<int>* sidebands) {
  std::set<std::string> keys = {"lamb_dicke",      "detuning",
                                "base_coupling",   "laser_phase",
                                "trap_position_phase", "trap_frequency",
                                "fock_cutoff"};
  keys.insert(multi_sideband ? "sideband_orders" : "sideband_order");
  check_keys(model, "model", keys);

  ModelParams p;
  if (multi_sideband) {
    const json& arr = get_field(model, "model", "sideband_orders");
    if (!arr.is_array() || arr.empty())
      throw ConfigError("model.sideband_orders must be a non-empty array");
    sidebands->clear();
    for (const auto& j : arr) {
      if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ConfigError("model.sideband_orders entries must be integers >= 0");
      sidebands->push_back(j.get<int>());
    }
    p.sideband_order = (*sidebands)[0];
  } else {
    p.sideband_order = static_cast<int>(get_int(model, "model", "sideband_order"));
  }
  p.lamb_dicke = get_num(model, "model", "lamb_dicke");
  p.detuning = get_num(model, "model", "detuning");
  p.base_coupling = get_num(model, "model", "base_coupling");
  p.laser_phase = get_num(model, "model", "laser_phase");
  p.trap_position_phase = get_num(model, "model", "trap_position_phase");
  p.trap_frequency = get_num(model, "model", "trap_frequency");
  p.coupling_scale = 1.0;  // extraction convention; sweeps override per point
  return p;
}

ElectronicAmplitudes parse_electronic(const json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "superposition") return ElectronicAmplitudes::superposition();
    if (name == "ground") return ElectronicAmplitudes::ground();
    if (name == "excited") return ElectronicAmplitudes::excited();
    throw ConfigError("input_state.electronic: unknown preset '" + name + "'");
  }
  check_keys(j, "input_state.electronic", {"gamma1", "gamma2"});
  ElectronicAmplitudes e;
  e.gamma1 = get_complex(get_field(j, "input_state.electronic", "gamma1"),
                         "input_state.electronic.gamma1");
  e.gamma2 = get_complex(get_field(j, "input_state.electronic", "gamma2"),
                         "input_state.electronic.gamma2");
  if (!e.is_normalized())
    throw ConfigError("input_state.electronic amplitudes are not normalized");
  return e;
}

MotionalSpec parse_motional(const json& j) {
  check_keys(j, "input_state.motional",
             {"fock", "coherent", "number_distribution"});
  if (j.size() != 1)
    throw ConfigError(
        "input_state.motional needs exactly one of fock | coherent | "
        "number_distribution");
  if (j.contains("fock")) {
    const json& n = j["fock"];
    if (!n.is_number_integer() || n.get<long long>() < 0)
      throw ConfigError("input_state.motional.fock must be an integer >= 0");
    return Fock{n.get<int>()};
  }
  if (j.contains("coherent"))
    return Coherent{get_complex(j["coherent"], "input_state.motional.coherent")};
  const json& arr = j["number_distribution"];
  if (!arr.is_array() || arr.empty())
    throw ConfigError(
        "input_state.motional.number_distribution must be a non-empty array");
  NumberDistribution dist;
  dist.probs.resize(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw ConfigError("input_state.motional.number_distribution[" +
                        std::to_string(i) + "] must be a number");
    dist.probs(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return dist;
}

int resolve_cutoff(const json& model, const MotionalSpec& motional, int k) {
  const json& j = get_field(model, "model", "fock_cutoff");
  if (j.is_string()) {
    if (j.get<std::string>() != "auto")
      throw ConfigError("model.fock_cutoff must be 'auto' or an integer");
    if (const auto* fock = std::get_if<Fock>(&motional))
      return fock->n + k + 2;
    if (const auto* coh = std::get_if<Coherent>(&motional))
      return coherent_cutoff(coh->alpha0);
    return static_cast<int>(
               std::get<NumberDistribution>(motional).probs.size()) - 1;
  }
  if (!j.is_number_integer() || j.get<long long>() < 1)
    throw ConfigError("model.fock_cutoff must be 'auto' or an integer >= 1");
  return j.get<int>();
}

Eigen::VectorXd parse_g_grid(const json& sampling) {
  const json& grid = get_field(sampling, "sampling", "g_grid");
  check_keys(grid, "sampling.g_grid", {"count", "max", "values"});
  if (grid.contains("values")) {
    if (grid.contains("count") || grid.contains("max"))
      throw ConfigError(
          "sampling.g_grid: give either values or count/max, not both");
    const json& arr = grid["values"];
    if (!arr.is_array() || arr.empty())
      throw ConfigError("sampling.g_grid.values must be a non-empty array");
    Eigen::VectorXd g(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number() || arr[i].get<double>() < 0.0)
        throw ConfigError("sampling.g_grid.values must be numbers >= 0");
      g(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return g;
  }
  const long long count = get_int(grid, "sampling.g_grid", "count");
  const double max = get_num(grid, "sampling.g_grid", "max");
  if (count < 1) throw ConfigError("sampling.g_grid.count must be >= 1");
  if (!(max > 0.0)) throw ConfigError("sampling.g_grid.max must be > 0");
  Eigen::VectorXd g(count);
  for (long long i = 0; i < count; ++i)
    g(i) = max * static_cast<double>(i + 1) / static_cast<double>(count);
  return g;
}

struct TimeGrid {
  std::vector<double> times;
};

TimeGrid parse_time_grid(const json& sampling, double min_span) {
  const json& grid = get_field(sampling, "sampling", "time_grid");
  check_keys(grid, "sampling.time_grid", {"count", "max"});
  const long long count = get_int(grid, "sampling.time_grid", "count");
  const double max = get_num(grid, "sampling.time_grid", "max");
  if (count < 2) throw ConfigError("sampling.time_grid.count must be >= 2");
  if (!(max > 0.0)) throw ConfigError("sampling.time_grid.max must be > 0");
  if (max < min_span * (1.0 - 1e-9))
    throw ConfigError("sampling.time_grid.max must span at least one detuning "
                      "period (" + fmt12(min_span) + ")");
  TimeGrid tg;
  tg.times.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i)
    tg.times.push_back(max * static_cast<double>(i) /
                       static_cast<double>(count - 1));
  return tg;
}

FitBasis parse_fit_basis(const json& fit, double* offset) {
  check_keys(fit, "fit", {"parity", "max_power", "offset"});
  const std::string parity = get_str(fit, "fit", "parity");
  FitBasis basis;
  if (parity == "odd") {
    basis.parity = Parity::Odd;
  } else if (parity == "even") {
    basis.parity = Parity::Even;
  } else {
    throw ConfigError("fit.parity must be 'odd' or 'even'");
  }
  basis.max_power = static_cast<int>(get_int(fit, "fit", "max_power"));
  basis.validate();
  *offset = get_num(fit, "fit", "offset");
  return basis;
}

long long parse_shots(const json& sampling) {
  const long long shots = get_int(sampling, "sampling", "shots");
  if (shots < 1) throw ConfigError("sampling.shots must be >= 1");
  return shots;
}

double parse_time(const json& sampling) {
  const double t = get_num(sampling, "sampling", "time");
  if (t < 0.0) throw ConfigError("sampling.time must be >= 0");
  return t;
}

std::string parse_prefix(const json& output) {
  const std::string prefix = get_str(output, "output", "prefix");
  if (prefix.empty()) throw ConfigError("output.prefix must be non-empty");
  return prefix;
}

// ---- defaults, merge, validation ----

json base_model_json() {
  return json{{"sideband_order", 0},
              {"lamb_dicke", 0.2},
              {"detuning", 0.2},
              {"base_coupling", 1.0},
              {"laser_phase", 0.0},
              {"trap_position_phase", 0.0},
              {"trap_frequency", 5000.0},
              {"fock_cutoff", "auto"}};
}

json default_g_grid() { return json{{"count", 20}, {"max", 0.05}}; }

void deep_merge(json& base, const json& user, const std::string& path,
                const std::set<std::string>& replace_paths) {
  if (!base.is_object() || !user.is_object() || replace_paths.count(path)) {
    base = user;
    return;
  }
  for (const auto& item : user.items()) {
    const std::string child =
        path.empty() ? item.key() : path + "." + item.key();
    if (base.contains(item.key())) {
      deep_merge(base[item.key()], item.value(), child, replace_paths);
    } else {
      base[item.key()] = item.value();
    }
  }
}

// Variant-shaped nodes are replaced wholesale instead of key-merged.
const std::set<std::string>& replace_paths() {
  static const std::set<std::string> paths = {
      "input_state.motional", "input_state.electronic", "sampling.g_grid"};
  return paths;
}

void validate_config(const std::string& command, const json& config);

}  // namespace

json default_config(const std::string& command) {
  const double alpha0 = std::sqrt(12.0);
  if (command == "fig1") {
    return json{
        {"model", base_model_json()},
        {"input_state",
         {{"electronic", "superposition"}, {"motional", {{"fock", 0}}}}},
        {"sampling",
         {{"shots", 1000}, {"time", 10.0}, {"g_grid", default_g_grid()}}},
        {"fit", {{"parity", "odd"}, {"max_power", 5}, {"offset", 0.5}}},
        {"output", {{"prefix", "fig1"}, {"fit_curve_points", 200}}}};
  }
  if (command == "fig2") {
    return json{
        {"model", base_model_json()},
        {"input_state",
         {{"electronic", "superposition"},
          {"fock_range", {{"min", 0}, {"max", 6}}}}},
        {"sampling",
         {{"shots", 5000}, {"time", 10.0}, {"g_grid", default_g_grid()}}},
        {"fit", {{"parity", "odd"}, {"max_power", 5}, {"offset", 0.5}}},
        {"output", {{"prefix", "fig2"}}}};
  }
  if (command == "fig3") {
    json model = base_model_json();
    model["sideband_order"] = 2;
    return json{
        {"model", model},
        {"input_state",
         {{"electronic", "ground"}, {"motional", {{"coherent", alpha0}}}}},
        {"sampling",
         {{"shots", 10000}, {"time", 40.0}, {"g_grid", default_g_grid()}}},
        {"fit", {{"parity", "even"}, {"max_power", 6}, {"offset", 0.0}}},
        {"output", {{"prefix", "fig3"}, {"fit_curve_points", 200}}}};
  }
  if (command == "fig4") {
    json model = base_model_json();
    model.erase("sideband_order");
    model["sideband_orders"] = json::array({2, 0});
    return json{
        {"model", model},
        {"input_state",
         {{"electronic", "ground"}, {"motional", {{"coherent", alpha0}}}}},
        {"sampling",
         {{"shots", 20000},
          {"time_grid", {{"count", 40}, {"max", 10.0 * std::numbers::pi}}},
          {"g_grid", default_g_grid()}}},
        {"fit", {{"parity", "even"}, {"max_power", 6}, {"offset", 0.0}}},
        {"output", {{"prefix", "fig4"}}}};
  }
  if (command == "run") {
    return json{
        {"model", base_model_json()},
        {"input_state",
         {{"electronic", "superposition"}, {"motional", {{"fock", 0}}}}},
        {"sampling",
         {{"shots", 1000},
          {"time", 10.0},
          {"time_grid", nullptr},
          {"g_grid", default_g_grid()}}},
        {"fit", {{"parity", "odd"}, {"max_power", 5}, {"offset", 0.5}}},
        {"output", {{"prefix", "run"}}},
        {"run",
         {{"mode", "simulate"}, {"records_csv", ""}, {"extract", "none"}}}};
  }
  throw std::invalid_argument("unknown command '" + command + "'");
}

namespace {

void validate_config(const std::string& command, const json& config) {
  std::set<std::string> sections = {"model", "input_state", "sampling", "fit",
                                    "output"};
  if (command == "run") sections.insert("run");
  check_keys(config, "config", sections);

  const bool fig4 = command == "fig4";
  std::vector<int> sidebands;
  ModelParams params =
      parse_model(get_field(config, "config", "model"), fig4, &sidebands);

  const json& input = get_field(config, "config", "input_state");
  if (command == "fig2") {
    check_keys(input, "input_state", {"electronic", "fock_range"});
    const json& range = get_field(input, "input_state", "fock_range");
    check_keys(range, "input_state.fock_range", {"min", "max"});
    const long long lo = get_int(range, "input_state.fock_range", "min");
    const long long hi = get_int(range, "input_state.fock_range", "max");
    if (lo < 0 || hi < lo)
      throw ConfigError("input_state.fock_range must satisfy 0 <= min <= max");
    params.fock_cutoff = static_cast<int>(hi) + params.sideband_order + 2;
  } else {
    check_keys(input, "input_state", {"electronic", "motional"});
    const MotionalSpec motional =
        parse_motional(get_field(input, "input_state", "motional"));
    params.fock_cutoff = resolve_cutoff(get_field(config, "config", "model"),
                                        motional, params.sideband_order);
  }
  parse_electronic(get_field(input, "input_state", "electronic"));
  params.validate();

  const json& sampling = get_field(config, "config", "sampling");
  std::set<std::string> sampling_keys = {"shots", "g_grid"};
  if (fig4) {
    sampling_keys.insert("time_grid");
  } else if (command == "run") {
    sampling_keys.insert("time");
    sampling_keys.insert("time_grid");
  } else {
    sampling_keys.insert("time");
  }
  check_keys(sampling, "sampling", sampling_keys);
  parse_shots(sampling);
  parse_g_grid(sampling);
  if (fig4) {
    if (params.detuning == 0.0)
      throw ConfigError("fig4 requires a nonzero detuning");
    parse_time_grid(sampling,
                    2.0 * std::numbers::pi / std::abs(params.detuning));
  } else if (command == "run") {
    parse_time(sampling);
    const json& tg = get_field(sampling, "sampling", "time_grid");
    if (!tg.is_null()) parse_time_grid(sampling, 0.0);
  } else {
    parse_time(sampling);
  }

  double offset = 0.0;
  parse_fit_basis(get_field(config, "config", "fit"), &offset);

  const json& output = get_field(config, "config", "output");
  std::set<std::string> output_keys = {"prefix"};
  if (command == "fig1" || command == "fig3")
    output_keys.insert("fit_curve_points");
  check_keys(output, "output", output_keys);
  parse_prefix(output);
  if (output.contains("fit_curve_points") &&
      get_int(output, "output", "fit_curve_points") < 2)
    throw ConfigError("output.fit_curve_points must be >= 2");

  if (command == "run") {
    const json& run = get_field(config, "config", "run");
    check_keys(run, "run", {"mode", "records_csv", "extract"});
    const std::string mode = get_str(run, "run", "mode");
    if (mode != "simulate" && mode != "sample" && mode != "fit" &&
        mode != "analyze")
      throw ConfigError(
          "run.mode must be simulate | sample | fit | analyze");
    get_str(run, "run", "records_csv");
    const std::string extract = get_str(run, "run", "extract");
    if (extract != "none" && extract != "hamiltonian" &&
        extract != "commutator")
      throw ConfigError(
          "run.extract must be none | hamiltonian | commutator");
    if (mode == "fit" && get_str(run, "run", "records_csv").empty())
      throw ConfigError("run.mode 'fit' requires run.records_csv");
  }
}

}  // namespace

json effective_config(const std::string& command, const json& user) {
  if (!user.is_object() && !user.is_null())
    throw ConfigError("config root must be a JSON object");
  json merged = default_config(command);
  if (user.is_object()) deep_merge(merged, user, "", replace_paths());
  validate_config(command, merged);
  return merged;
}

std::string config_hash(const json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

json fit_to_json(const FitResult& fit) {
  json j;
  j["parity"] = fit.parity == Parity::Odd ? "odd" : "even";
  j["max_power"] = fit.max_power;
  j["offset"] = fit.offset;
  j["coefficients"] = std::vector<double>(
      fit.coefficients.data(), fit.coefficients.data() + fit.coefficients.size());
  std::vector<double> cov;
  cov.reserve(static_cast<std::size_t>(fit.covariance.size()));
  for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r)
    for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c)
      cov.push_back(fit.covariance(r, c));
  j["covariance"] = cov;  // row-major
  j["residual_rms"] = fit.residual_rms;
  j["condition_number"] = fit.condition_number;
  return j;
}

json load_config_file(const std::filesystem::path& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " +
                      e.what());
  }
}

namespace {

// ---- shared command plumbing ----

struct FigureSetup {
  ModelParams params;  // coupling_scale = 1 (extraction convention)
  std::vector<int> sidebands;
  ElectronicAmplitudes electronic;
  MotionalSpec motional = Fock{0};
  Eigen::VectorXd g_grid;
  long long shots = 0;
  FitBasis basis;
  double offset = 0.0;
  std::string prefix;
};

FigureSetup parse_figure(const json& config, bool fig4) {
  FigureSetup s;
  s.params = parse_model(config["model"], fig4, &s.sidebands);
  const json& input = config["input_state"];
  s.electronic = parse_electronic(input["electronic"]);
  s.motional = parse_motional(input["motional"]);
  s.params.fock_cutoff =
      resolve_cutoff(config["model"], s.motional, s.params.sideband_order);
  s.params.validate();
  s.g_grid = parse_g_grid(config["sampling"]);
  s.shots = parse_shots(config["sampling"]);
  s.basis = parse_fit_basis(config["fit"], &s.offset);
  s.prefix = parse_prefix(config["output"]);
  return s;
}

std::string rep_suffix(const RunOptions& opts, int rep) {
  if (opts.replicates <= 1) return "";
  char buf[16];
  std::snprintf(buf, sizeof buf, "_r%03d", rep);
  return buf;
}

std::string records_csv(const std::vector<MeasurementRecord>& records) {
  std::string out = "g,t,shots,successes,p_hat\n";
  for (const auto& r : records) {
    out += fmt12(r.g);
    out += ',';
    out += fmt12(r.t);
    out += ',';
    out += std::to_string(r.shots);
    out += ',';
    out += std::to_string(r.successes);
    out += ',';
    out += fmt12(r.p_hat);
    out += '\n';
  }
  return out;
}

double eval_basis(const FitResult& fit, const std::vector<int>& powers,
                  double g) {
  double value = fit.offset;
  for (std::size_t j = 0; j < powers.size(); ++j)
    value += fit.coefficients(static_cast<Eigen::Index>(j)) *
             std::pow(g, powers[j]);
  return value;
}

json manifest_skeleton(const std::string& command, const json& config,
                       const RunOptions& opts) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config"] = config;
  m["config_hash"] = config_hash(config);
  m["master_seed"] = opts.master_seed;
  m["replicates"] = opts.replicates;
  m["files"] = json::array();
  return m;
}

void finish_manifest(json& manifest, const std::filesystem::path& out_dir,
                     const std::string& prefix) {
  write_text_file(out_dir / (prefix + "_manifest.json"),
                  manifest.dump(2) + "\n");
}

void ensure_out_dir(const RunOptions& opts) {
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + opts.out_dir.string() +
                  ": " + ec.message());
}

// fig1 and fig3 share everything but the extracted quantity and overlays.
void run_fit_figure(const std::string& command, const json& config,
                    const RunOptions& opts) {
  FigureSetup s = parse_figure(config, false);
  const double time = parse_time(config["sampling"]);
  const long long curve_points =
      get_int(config["output"], "output", "fit_curve_points");
  const bool hamiltonian = command == "fig1";
  const double g_max = s.g_grid.maxCoeff();

  json manifest = manifest_skeleton(command, config, opts);
  json results = json::array();

  for (int rep = 0; rep < opts.replicates; ++rep) {
    const std::string suffix = rep_suffix(opts, rep);
    const SeedSpec seed{opts.master_seed, static_cast<std::uint64_t>(rep)};
    const auto records = sample_sigma22(s.params, s.electronic, s.motional,
                                        time, s.g_grid, s.shots, seed);
    const FitResult fit = fit_parity_polynomial(records, s.basis, s.offset);
    const EnergyEstimate est = hamiltonian
                                   ? extract_hamiltonian(fit, s.params)
                                   : extract_commutator(fit, s.params);

    const auto powers = s.basis.powers();
    std::string curve = "g,sigma22_fit\n";
    std::string line = "g,sigma22_line\n";
    const int leading = powers[0];
    for (long long i = 0; i <= curve_points; ++i) {
      const double g =
          g_max * static_cast<double>(i) / static_cast<double>(curve_points);
      curve += fmt12(g) + "," + fmt12(eval_basis(fit, powers, g)) + "\n";
      line += fmt12(g) + "," +
              fmt12(s.offset + fit.coefficients(0) * std::pow(g, leading)) +
              "\n";
    }

    const std::string rec_name = s.prefix + suffix + "_records.csv";
    const std::string curve_name = s.prefix + suffix + "_fit_curve.csv";
    const std::string line_name =
        s.prefix + suffix + (hamiltonian ? "_c1_line.csv" : "_c2_line.csv");
    write_text_file(opts.out_dir / rec_name, records_csv(records));
    write_text_file(opts.out_dir / curve_name, curve);
    write_text_file(opts.out_dir / line_name, line);
    manifest["files"].push_back(rec_name);
    manifest["files"].push_back(curve_name);
    manifest["files"].push_back(line_name);

    json result;
    result["replicate"] = rep;
    result["fit"] = fit_to_json(fit);
    result[hamiltonian ? "hamiltonian_expectation" : "commutator_expectation"] =
        json{{"value", est.value}, {"standard_error", est.standard_error}};
    if (hamiltonian) {
      const auto* fock = std::get_if<Fock>(&s.motional);
      if (fock)
        result["analytic"] =
            h_expectation_fock(s.params, s.electronic, fock->n, time);
    } else {
      const auto* coh = std::get_if<Coherent>(&s.motional);
      if (coh)
        result["analytic"] =
            commutator_expectation(s.params, coh->alpha0, time);
    }
    results.push_back(result);
  }

  manifest["results"] = results;
  finish_manifest(manifest, opts.out_dir, s.prefix);
}

}  // namespace

void cmd_fig1(const json& config, const RunOptions& opts) {
  ensure_out_dir(opts);
  run_fit_figure("fig1", config, opts);
}

void cmd_fig3(const json& config, const RunOptions& opts) {
  ensure_out_dir(opts);
  run_fit_figure("fig3", config, opts);
}

void cmd_fig2(const json& config, const RunOptions& opts) {
  ensure_out_dir(opts);
  std::vector<int> sidebands;
  ModelParams params = parse_model(config["model"], false, &sidebands);
  const json& input = config["input_state"];
  const ElectronicAmplitudes electronic = parse_electronic(input["electronic"]);
  const json& range = input["fock_range"];
  const int n_min = static_cast<int>(get_int(range, "input_state.fock_range", "min"));
  const int n_max = static_cast<int>(get_int(range, "input_state.fock_range", "max"));
  params.fock_cutoff = n_max + params.sideband_order + 2;
  params.validate();

  const Eigen::VectorXd g_grid = parse_g_grid(config["sampling"]);
  const long long shots = parse_shots(config["sampling"]);
  const double time = parse_time(config["sampling"]);
  double offset = 0.0;
  const FitBasis basis = parse_fit_basis(config["fit"], &offset);
  const std::string prefix = parse_prefix(config["output"]);

  json manifest = manifest_skeleton("fig2", config, opts);

  for (int rep = 0; rep < opts.replicates; ++rep) {
    const int count = n_max - n_min + 1;
    std::vector<std::string> rows(static_cast<std::size_t>(count));
    parallel_for(
        static_cast<std::size_t>(count), opts.threads, [&](std::size_t idx) {
          const int n = n_min + static_cast<int>(idx);
          const SeedSpec seed{opts.master_seed,
                              static_cast<std::uint64_t>(rep)};
          const auto records = sample_sigma22(
              params, electronic, Fock{n}, time, g_grid, shots, seed,
              static_cast<std::uint64_t>(idx) *
                  static_cast<std::uint64_t>(g_grid.size()));
          const FitResult fit = fit_parity_polynomial(records, basis, offset);
          const EnergyEstimate est = extract_hamiltonian(fit, params);
          const double analytic = h_expectation_fock(params, electronic, n, time);
          rows[idx] = std::to_string(n) + "," + fmt12(est.value) + "," +
                      fmt12(est.standard_error) + "," + fmt12(analytic) + "\n";
        });
    std::string csv = "n,estimate,standard_error,analytic\n";
    for (const auto& row : rows) csv += row;
    const std::string name = prefix + rep_suffix(opts, rep) + "_hamiltonian.csv";
    write_text_file(opts.out_dir / name, csv);
    manifest["files"].push_back(name);
  }
  finish_manifest(manifest, opts.out_dir, prefix);
}

void cmd_fig4(const json& config, const RunOptions& opts) {
  ensure_out_dir(opts);
  FigureSetup s = parse_figure(config, true);
  if (s.params.detuning == 0.0)
    throw ConfigError("fig4 requires a nonzero detuning");
  const TimeGrid tg =
      parse_time_grid(config["sampling"],
                      2.0 * std::numbers::pi / std::abs(s.params.detuning));
  const auto* coh = std::get_if<Coherent>(&s.motional);

  json manifest = manifest_skeleton("fig4", config, opts);

  const std::size_t n_t = tg.times.size();
  const std::size_t n_cells = s.sidebands.size() * n_t;

  for (int rep = 0; rep < opts.replicates; ++rep) {
    std::vector<std::string> rows(n_cells);
    parallel_for(n_cells, opts.threads, [&](std::size_t cell) {
      const std::size_t s_idx = cell / n_t;
      const std::size_t t_idx = cell % n_t;
      ModelParams p = s.params;
      p.sideband_order = s.sidebands[s_idx];
      const double t = tg.times[t_idx];

      const SeedSpec seed{opts.master_seed, static_cast<std::uint64_t>(rep)};
      const auto records = sample_sigma22(
          p, s.electronic, s.motional, t, s.g_grid, s.shots, seed,
          static_cast<std::uint64_t>(cell) *
              static_cast<std::uint64_t>(s.g_grid.size()));

      double estimate = 0.0;
      double standard_error = 0.0;
      try {
        const FitResult fit = fit_parity_polynomial(records, s.basis, s.offset);
        const EnergyEstimate est = extract_commutator(fit, p);
        estimate = est.value;
        standard_error = est.standard_error;
      } catch (const DegenerateWeights&) {
        // No excitation events at any g (the t = 0 row): the commutator
        // estimate is pinned to the analytic zero.
      }
      const double analytic =
          coh ? commutator_expectation(p, coh->alpha0, t) : 0.0;
      rows[cell] = std::to_string(p.sideband_order) + "," + fmt12(t) + "," +
                   fmt12(estimate) + "," + fmt12(standard_error) + "," +
                   fmt12(analytic) + "\n";
    });

    std::string csv = "k,t,estimate,standard_error,analytic\n";
    for (const auto& row : rows) csv += row;
    const std::string name =
        s.prefix + rep_suffix(opts, rep) + "_commutator.csv";
    write_text_file(opts.out_dir / name, csv);
    manifest["files"].push_back(name);
  }
  finish_manifest(manifest, opts.out_dir, s.prefix);
}

namespace {

std::vector<MeasurementRecord> read_records_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read records file " + path.string());
  std::string header;
  if (!std::getline(in, header) ||
      (header != "g,t,shots,successes,p_hat" &&
       header != "g,t,shots,successes,p_hat\r"))
    throw IoError(path.string() +
                  ": expected header g,t,shots,successes,p_hat");
  std::vector<MeasurementRecord> records;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    MeasurementRecord rec;
    try {
      std::getline(ss, field, ',');
      rec.g = std::stod(field);
      std::getline(ss, field, ',');
      rec.t = std::stod(field);
      std::getline(ss, field, ',');
      rec.shots = std::stoll(field);
      std::getline(ss, field, ',');
      rec.successes = std::stoll(field);
      std::getline(ss, field, ',');
      rec.p_hat = std::stod(field);
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": malformed record");
    }
    if (rec.shots < 1 || rec.successes < 0 || rec.successes > rec.shots ||
        rec.p_hat < 0.0 || rec.p_hat > 1.0)
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": record violates invariants");
    records.push_back(rec);
  }
  return records;
}

}  // namespace

void cmd_run(const json& config, const RunOptions& opts) {
  ensure_out_dir(opts);
  const json& run = config["run"];
  const std::string mode = get_str(run, "run", "mode");
  const std::string prefix = parse_prefix(config["output"]);

  json manifest = manifest_skeleton("run", config, opts);

  if (mode == "fit") {
    const std::filesystem::path records_path =
        get_str(run, "run", "records_csv");
    const auto records = read_records_csv(records_path);
    std::vector<int> sidebands;
    ModelParams params = parse_model(config["model"], false, &sidebands);
    const MotionalSpec motional =
        parse_motional(config["input_state"]["motional"]);
    params.fock_cutoff =
        resolve_cutoff(config["model"], motional, params.sideband_order);
    params.validate();
    double offset = 0.0;
    const FitBasis basis = parse_fit_basis(config["fit"], &offset);
    const FitResult fit = fit_parity_polynomial(records, basis, offset);
    json out;
    out["fit"] = fit_to_json(fit);
    const std::string extract = get_str(run, "run", "extract");
    if (extract != "none") {
      const EnergyEstimate est = extract == "hamiltonian"
                                     ? extract_hamiltonian(fit, params)
                                     : extract_commutator(fit, params);
      out["extracted"] = json{{"kind", extract},
                              {"value", est.value},
                              {"standard_error", est.standard_error}};
    }
    const std::string name = prefix + "_fit.json";
    write_text_file(opts.out_dir / name, out.dump(2) + "\n");
    manifest["files"].push_back(name);
    finish_manifest(manifest, opts.out_dir, prefix);
    return;
  }

  FigureSetup s = parse_figure(config, false);
  const json& tg_json = config["sampling"]["time_grid"];
  std::vector<double> times;
  if (tg_json.is_null()) {
    times.push_back(parse_time(config["sampling"]));
  } else {
    times = parse_time_grid(config["sampling"], 0.0).times;
  }

  if (mode == "simulate") {
    std::string csv = "g,t,sigma22\n";
    for (const double t : times) {
      const Eigen::VectorXd sigma =
          sigma22_series(s.params, s.electronic, s.motional, t, s.g_grid);
      for (Eigen::Index i = 0; i < s.g_grid.size(); ++i)
        csv += fmt12(s.g_grid(i)) + "," + fmt12(t) + "," + fmt12(sigma(i)) +
               "\n";
    }
    const std::string name = prefix + "_sigma22.csv";
    write_text_file(opts.out_dir / name, csv);
    manifest["files"].push_back(name);
  } else if (mode == "sample") {
    for (int rep = 0; rep < opts.replicates; ++rep) {
      std::vector<MeasurementRecord> all;
      for (std::size_t t_idx = 0; t_idx < times.size(); ++t_idx) {
        const SeedSpec seed{opts.master_seed, static_cast<std::uint64_t>(rep)};
        const auto records = sample_sigma22(
            s.params, s.electronic, s.motional, times[t_idx], s.g_grid,
            s.shots, seed,
            static_cast<std::uint64_t>(t_idx) *
                static_cast<std::uint64_t>(s.g_grid.size()));
        all.insert(all.end(), records.begin(), records.end());
      }
      const std::string name = prefix + rep_suffix(opts, rep) + "_records.csv";
      write_text_file(opts.out_dir / name, records_csv(all));
      manifest["files"].push_back(name);
    }
  } else {  // analyze
    if (std::holds_alternative<NumberDistribution>(s.motional))
      throw ConfigError("run.mode 'analyze' requires a pure motional state");
    const double sigma0 =
        sigma22_exact(s.params, s.electronic, s.motional, 0.0);
    std::string csv = "t,lhs,rhs\n";
    for (const double t : times) {
      const double sigma_t =
          sigma22_exact(s.params, s.electronic, s.motional, t);
      const double lhs = h_from_sigma22(s.params, sigma_t, sigma0);
      const VibronicState psi0 =
          make_state(s.electronic, s.motional, s.params.fock_cutoff);
      const VibronicState psi_t = evolve(s.params, psi0, t);
      const VibronicState hpsi = apply_hamiltonian(s.params, t, psi_t);
      const double rhs = psi_t.amp.dot(hpsi.amp).real();
      csv += fmt12(t) + "," + fmt12(lhs) + "," + fmt12(rhs) + "\n";
    }
    const std::string name = prefix + "_identity.csv";
    write_text_file(opts.out_dir / name, csv);
    manifest["files"].push_back(name);
  }
  finish_manifest(manifest, opts.out_dir, prefix);
}

void run_command(const std::string& command, const json& user,
                 const RunOptions& opts) {
  if (opts.replicates < 1)
    throw ConfigError("--replicates must be >= 1");
  if (opts.threads < 1) throw ConfigError("--threads must be >= 1");
  const json config = effective_config(command, user);
  if (command == "fig1") {
    cmd_fig1(config, opts);
  } else if (command == "fig2") {
    cmd_fig2(config, opts);
  } else if (command == "fig3") {
    cmd_fig3(config, opts);
  } else if (command == "fig4") {
    cmd_fig4(config, opts);
  } else if (command == "run") {
    cmd_run(config, opts);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
}

}  // namespace njcm::pipeline
