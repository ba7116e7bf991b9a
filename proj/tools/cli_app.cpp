#include "cli_app.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "r3l/error.hpp"
#include "r3l/kinetic.hpp"
#include "r3l/oracle.hpp"
#include "r3l/resummation.hpp"

#ifndef R3L_VERSION
#define R3L_VERSION "0.0.0"
#endif

namespace r3l::cli {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kCommands{"spectrum", "zlevel", "resum", "toda", "condensate", "validate"};

// ------------------------------------------------------------ parsing

const json& field(const json& obj, const std::string& key) { return obj.at(key); }

double get_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("field '" + path + "': expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("field '" + path + "': must be finite");
  return x;
}

std::uint64_t get_uint(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw ConfigError("field '" + path + "': expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::vector<double> get_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError("field '" + path + "': expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_double(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError("field '" + path + "': expected a string");
  return v.get<std::string>();
}

void reject_unknown(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError("unknown field '" + where + it.key() + "'");
  }
}

Precision parse_precision(const std::string& s) {
  if (s == "auto") return Precision::Auto;
  if (s == "double") return Precision::Double;
  if (s == "extended50") return Precision::Extended50;
  if (s == "extended100") return Precision::Extended100;
  throw ConfigError("field 'precision': expected auto, double, extended50 or extended100");
}

CondensateMethod parse_method(const std::string& s) {
  if (s == "uniform-shift") return CondensateMethod::UniformShift;
  if (s == "per-component") return CondensateMethod::PerComponent;
  throw ConfigError("field 'condensate_method': expected uniform-shift or per-component");
}

std::string method_name(CondensateMethod m) {
  return m == CondensateMethod::UniformShift ? "uniform-shift" : "per-component";
}

// ------------------------------------------------------------ output

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ordered_json num(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json log_json(const LogNumber& x) {
  return {{"sign", x.sign()}, {"log_abs", x.is_zero() ? ordered_json(nullptr) : num(x.log_abs())}};
}

ordered_json diagnostics_json(const EngineDiagnostics& d) {
  return {{"log10_condition", num(d.log10_condition)},
          {"digits", d.digits},
          {"extrapolation_error", num(d.extrapolation_error)},
          {"evaluations", d.evaluations},
          {"cholesky", d.cholesky}};
}

ordered_json partition_json(const PartitionResult& r) {
  return {{"j", r.j.str()},
          {"twice_j", r.j.twice()},
          {"log_Z", log_json(r.log_Z)},
          {"log_N", log_json(r.log_N)},
          {"log_det_f", log_json(r.log_det_f)},
          {"log_vdm_sq", log_json(r.log_vdm_sq)},
          {"degeneracy_policy_used", to_string(r.degeneracy_policy_used)},
          {"diagnostics", diagnostics_json(r.diagnostics)}};
}

ordered_json estimate_json(const MCEstimate& e) {
  return {{"mean", num(e.mean)},
          {"std_err", num(e.std_err)},
          {"n_samples", e.n_samples},
          {"seed", e.seed},
          {"effective_samples", num(e.effective_samples)}};
}

ordered_json params_json(const ModelParams& p) {
  return {{"lambda", p.lambda}, {"M", p.M}, {"mu", p.mu}, {"Omega", p.Omega}, {"g2", p.g2}};
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  j["params"] = params_json(c.params);
  if (c.twice_j) j["twice_j"] = *c.twice_j;
  if (c.twice_j_max) j["twice_j_max"] = *c.twice_j_max;
  if (c.spectrum) j["spectrum"] = *c.spectrum;
  if (!c.spectrum_table.empty()) {
    ordered_json t = ordered_json::object();
    for (const auto& [k, v] : c.spectrum_table) t[std::to_string(k)] = v;
    j["spectrum_table"] = t;
  }
  if (c.sigma) j["sigma"] = *c.sigma;
  j["n_max"] = c.n_max;
  j["policy"] = to_string(c.policy);
  j["precision"] = to_string(c.precision);
  j["step"] = c.step;
  j["condensate_method"] = method_name(c.condensate_method);
  j["seed"] = c.seed;
  if (c.samples) j["samples"] = *c.samples;
  j["validation"] = {{"hciz_samples", c.validation.hciz_samples},
                     {"full_mc_samples", c.validation.full_mc_samples},
                     {"condensate_samples", c.validation.condensate_samples}};
  j["format"] = c.format;
  return j;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Output {
  ordered_json result;
  Table table;
  int exit_code = kOk;
};

Execution execution_of(const RunConfig& c) {
  return c.threads == 1 ? Execution::serial() : Execution::openmp(c.threads);
}

HalfInt level_of(const RunConfig& c) { return HalfInt(c.twice_j.value_or(0)); }

Spectrum spectrum_of(const RunConfig& c, HalfInt j) {
  if (c.spectrum) return custom_spectrum(j, *c.spectrum);
  return radial_spectrum(j, c.params);
}

// ----------------------------------------------------------- commands

Output cmd_spectrum(const RunConfig& c) {
  const HalfInt j = level_of(c);
  const QuadraticKernel q = kernel(j, c.params);
  const Spectrum s = radial_spectrum(j, c.params);
  Output o;
  o.table.header = {"k", "l", "kernel_value"};
  ordered_json values = ordered_json::array();
  for (std::size_t r = 0; r < j.dim(); ++r) {
    for (std::size_t col = 0; col < j.dim(); ++col) {
      const double k = j.m_of(r), l = j.m_of(col);
      values.push_back({{"k", k}, {"l", l}, {"value", q.at(r, col)}});
      o.table.rows.push_back({g17(k), g17(l), g17(q.at(r, col))});
    }
  }
  ordered_json groups = ordered_json::array();
  for (const auto& g : s.groups()) groups.push_back({{"begin", g.begin}, {"size", g.size}});
  o.result = {{"j", j.str()},
              {"twice_j", j.twice()},
              {"kernel", values},
              {"radial_spectrum", std::vector<double>(s.omegas().begin(), s.omegas().end())},
              {"multiplicity_groups", groups},
              {"degenerate_pairs", s.degenerate_runs()}};
  return o;
}

Output cmd_zlevel(const RunConfig& c) {
  const HalfInt j = level_of(c);
  const Spectrum s = spectrum_of(c, j);
  EngineOptions opt;
  opt.policy = c.policy;
  opt.precision = c.precision;
  const PartitionResult r =
      partition_level(s, KernelParams::for_level(j, c.params.g2, c.params.lambda), j, c.params.g2, c.params.lambda, opt);
  Output o;
  o.result = partition_json(r);
  o.result["spectrum"] = std::vector<double>(s.omegas().begin(), s.omegas().end());
  o.table.header = {"twice_j",       "log_Z_sign",   "log_Z",  "log_N",           "log_det_f",
                    "log_vdm_sq",    "policy",       "digits", "log10_condition", "extrapolation_error"};
  o.table.rows.push_back({std::to_string(j.twice()), std::to_string(r.log_Z.sign()), g17(r.log_Z.log_abs()),
                          g17(r.log_N.log_abs()), g17(r.log_det_f.log_abs()), g17(r.log_vdm_sq.log_abs()),
                          to_string(r.degeneracy_policy_used), std::to_string(r.diagnostics.digits),
                          g17(r.diagnostics.log10_condition), g17(r.diagnostics.extrapolation_error)});
  return o;
}

Output cmd_resum(const RunConfig& c) {
  ResumOptions opt;
  opt.engine.policy = c.policy;
  opt.engine.precision = c.precision;
  opt.exec = execution_of(c);
  if (!c.spectrum_table.empty()) {
    opt.source = SpectrumSource::CustomTable;
    opt.table = c.spectrum_table;
  }
  const ResumReport r = resum(c.params, HalfInt(c.twice_j_max.value_or(0)), opt);
  Output o;
  ordered_json levels = ordered_json::array();
  o.table.header = {"twice_j", "increment", "partial_sum"};
  for (std::size_t i = 0; i < r.increments.size(); ++i) {
    levels.push_back(partition_json(r.levels[i]));
    o.table.rows.push_back({std::to_string(i), g17(r.increments[i]), g17(r.partial_sums[i])});
  }
  ordered_json fit = nullptr;
  if (r.tail_fit)
    fit = {{"model", "ln|increment| = intercept + slope ln j"},
           {"slope", num(r.tail_fit->slope)},
           {"intercept", num(r.tail_fit->intercept)},
           {"rms_residual", num(r.tail_fit->rms_residual)},
           {"points", r.tail_fit->points},
           {"j_min", r.tail_fit->j_min}};
  o.result = {{"j_max", r.j_max.str()},
              {"twice_j_max", r.j_max.twice()},
              {"spectrum_source", opt.source == SpectrumSource::Radial ? "radial" : "custom-table"},
              {"increments", r.increments},
              {"partial_sums", r.partial_sums},
              {"W", r.partial_sums.back()},
              {"tail_fit", fit},
              {"eventually_monotone", r.eventually_monotone},
              {"tail_direction", r.tail_direction},
              {"levels", levels}};
  return o;
}

Output cmd_toda(const RunConfig& c) {
  const HalfInt j = level_of(c);
  const Spectrum s = spectrum_of(c, j);
  const SourceSpectrum src{c.sigma.value_or(std::vector<double>(j.dim(), 0.0))};
  EngineOptions opt;
  opt.policy = c.policy;
  opt.precision = c.precision;
  const KernelParams kp = KernelParams::for_level(j, c.params.g2, c.params.lambda);
  const PartitionResult r = partition_with_source(s, src, kp, j, c.params.g2, c.params.lambda, opt);
  const TodaTimes t = toda_times(s, src, c.n_max);
  Output o;
  o.result = {{"partition", partition_json(r)},
              {"spectrum", std::vector<double>(s.omegas().begin(), s.omegas().end())},
              {"sigma", src.sigmas},
              {"t", t.t},
              {"t_bar", t.t_bar}};
  o.table.header = {"n", "t", "t_bar"};
  for (int n = 1; n <= c.n_max; ++n)
    o.table.rows.push_back({std::to_string(n), g17(t.t[n - 1]), g17(t.t_bar[n - 1])});
  return o;
}

Output cmd_condensate(const RunConfig& c) {
  const HalfInt j = level_of(c);
  const Spectrum s = spectrum_of(c, j);
  const KernelParams kp = KernelParams::for_level(j, c.params.g2, c.params.lambda);
  const CondensateResult r = condensate(s, kp, j, c.params.g2, c.params.lambda, c.step, c.condensate_method);
  Output o;
  o.result = {{"j", j.str()},
              {"twice_j", j.twice()},
              {"method", method_name(c.condensate_method)},
              {"step", r.step},
              {"source_derivative", num(r.source_derivative)},
              {"expectation", num(r.expectation)},
              {"derivative_error", num(r.derivative_error)}};
  o.table.header = {"twice_j", "step", "source_derivative", "expectation", "derivative_error"};
  o.table.rows.push_back({std::to_string(j.twice()), g17(r.step), g17(r.source_derivative), g17(r.expectation),
                          g17(r.derivative_error)});
  if (c.samples && j.twice() == 1 && !c.spectrum) {
    const MCEstimate mc = mc_condensate(c.params, *c.samples, c.seed, execution_of(c));
    o.result["monte_carlo"] = estimate_json(mc);
    o.result["monte_carlo"]["z_score"] = num(mc.z_score(r.expectation));
  }
  return o;
}

Output cmd_validate(const RunConfig& c) {
  ValidationConfig v = c.validation;
  v.seed = c.seed;
  v.exec = execution_of(c);
  if (c.samples) v.full_mc_samples = *c.samples;
  const auto gates = run_validation(v);
  Output o;
  bool all = true;
  ordered_json arr = ordered_json::array();
  o.table.header = {"gate", "name", "passed", "metric", "value"};
  for (const auto& g : gates) {
    all = all && g.passed;
    ordered_json m = ordered_json::object();
    for (const auto& [k, x] : g.metrics) {
      m[k] = num(x);
      o.table.rows.push_back({std::to_string(g.id), g.name, g.passed ? "1" : "0", k, g17(x)});
    }
    arr.push_back({{"id", g.id}, {"name", g.name}, {"passed", g.passed}, {"detail", g.detail}, {"metrics", m}});
  }
  o.result = {{"passed", all}, {"gates", arr}};
  o.exit_code = all ? kOk : kGateFailure;
  return o;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string render(const RunConfig& c, const Output& o) {
  ordered_json prov = {{"program", "r3l"},
                       {"version", R3L_VERSION},
                       {"command", c.command},
                       {"seed", c.seed},
                       {"config_hash", config_hash(c)},
                       {"threads", execution_of(c).workers()}};
  if (c.timestamp) prov["timestamp"] = utc_timestamp();
  std::ostringstream os;
  if (c.format == "json") {
    ordered_json doc = {{"provenance", prov}, {"config", config_json(c)}, {"result", o.result}};
    os << doc.dump(2) << "\n";
  } else {
    for (auto it = prov.begin(); it != prov.end(); ++it) {
      os << "# " << it.key() << "=" << (it->is_string() ? it->get<std::string>() : it->dump()) << "\n";
    }
    const auto line = [&os](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << "\n";
    };
    line(o.table.header);
    for (const auto& r : o.table.rows) line(r);
  }
  return os.str();
}

}  // namespace

void RunConfig::validate() const {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    throw ConfigError("unknown command '" + command + "'");
  const auto check_param = [](bool ok, const char* name, const char* rule) {
    if (!ok) throw ConfigError(std::string("field 'params.") + name + "': " + rule);
  };
  check_param(std::isfinite(params.lambda) && params.lambda > 0, "lambda", "must be > 0");
  check_param(std::isfinite(params.M) && params.M > 0, "M", "must be > 0");
  check_param(std::isfinite(params.mu) && params.mu > 0, "mu", "must be > 0");
  check_param(std::isfinite(params.Omega) && params.Omega >= 0, "Omega", "must be >= 0");
  check_param(std::isfinite(params.g2) && params.g2 > 0, "g2", "must be > 0");
  if (format != "json" && format != "csv") throw ConfigError("field 'format': expected json or csv");
  if (threads < 0) throw ConfigError("field 'threads': must be >= 0");
  const std::size_t dim = twice_j.value_or(0) + 1;
  const bool level_cmd = command == "zlevel" || command == "toda" || command == "condensate";
  if (spectrum) {
    if (!level_cmd) throw ConfigError("field 'spectrum': only used by zlevel, toda and condensate");
    if (spectrum->size() != dim) throw ConfigError("field 'spectrum': length must be 2j+1 = " + std::to_string(dim));
    for (double x : *spectrum)
      if (!(x > 0)) throw ConfigError("field 'spectrum': entries must be > 0");
  }
  const bool radial_needed = (level_cmd && !spectrum) || (command == "resum" && spectrum_table.empty());
  if (radial_needed && !params.at_exact_point())
    throw ConfigError("field 'params.Omega': the exact engine with the radial spectrum requires Omega = 1/3");
  if (command == "resum") {
    const std::uint32_t jm = twice_j_max.value_or(0);
    if (jm > 200) throw ConfigError("field 'twice_j_max': must be <= 200");
    if (!spectrum_table.empty()) {
      for (std::uint32_t t = 0; t <= jm; ++t) {
        const auto it = spectrum_table.find(t);
        if (it == spectrum_table.end())
          throw ConfigError("field 'spectrum_table': missing entry for twice_j = " + std::to_string(t));
        if (it->second.size() != t + 1u)
          throw ConfigError("field 'spectrum_table." + std::to_string(t) + "': length must be " + std::to_string(t + 1));
      }
    }
  }
  if (sigma) {
    if (command != "toda") throw ConfigError("field 'sigma': only used by toda");
    if (sigma->size() != dim) throw ConfigError("field 'sigma': length must be 2j+1 = " + std::to_string(dim));
  }
  if (n_max < 1) throw ConfigError("field 'n_max': must be >= 1");
  if (step < 0) throw ConfigError("field 'step': must be >= 0 (0 selects the default)");
  if (samples && *samples < 2) throw ConfigError("field 'samples': must be >= 2");
  if (validation.hciz_samples < 2 || validation.full_mc_samples < 2 || validation.condensate_samples < 2)
    throw ConfigError("field 'validation': sample counts must be >= 2");
  if (twice_j && *twice_j > 200) throw ConfigError("field 'twice_j': must be <= 200");
}

RunConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"command", "params", "twice_j", "twice_j_max", "spectrum", "spectrum_table", "sigma", "n_max",
                  "policy", "precision", "step", "condensate_method", "seed", "samples", "threads", "validation",
                  "format", "out", "timestamp"},
                 "");
  RunConfig c;
  if (doc.contains("command")) c.command = get_string(doc["command"], "command");
  if (doc.contains("params")) {
    const json& p = doc["params"];
    if (!p.is_object()) throw ConfigError("field 'params': expected an object");
    reject_unknown(p, {"lambda", "M", "mu", "Omega", "g2"}, "params.");
    if (p.contains("lambda")) c.params.lambda = get_double(field(p, "lambda"), "params.lambda");
    if (p.contains("M")) c.params.M = get_double(field(p, "M"), "params.M");
    if (p.contains("mu")) c.params.mu = get_double(field(p, "mu"), "params.mu");
    if (p.contains("Omega")) c.params.Omega = get_double(field(p, "Omega"), "params.Omega");
    if (p.contains("g2")) c.params.g2 = get_double(field(p, "g2"), "params.g2");
  }
  if (doc.contains("twice_j")) c.twice_j = static_cast<std::uint32_t>(get_uint(doc["twice_j"], "twice_j"));
  if (doc.contains("twice_j_max"))
    c.twice_j_max = static_cast<std::uint32_t>(get_uint(doc["twice_j_max"], "twice_j_max"));
  if (doc.contains("spectrum")) c.spectrum = get_list(doc["spectrum"], "spectrum");
  if (doc.contains("spectrum_table")) {
    const json& t = doc["spectrum_table"];
    if (!t.is_object()) throw ConfigError("field 'spectrum_table': expected an object keyed by twice_j");
    for (auto it = t.begin(); it != t.end(); ++it) {
      std::uint32_t key = 0;
      try {
        std::size_t used = 0;
        key = static_cast<std::uint32_t>(std::stoul(it.key(), &used));
        if (used != it.key().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError("field 'spectrum_table': key '" + it.key() + "' is not a twice_j integer");
      }
      c.spectrum_table[key] = get_list(it.value(), "spectrum_table." + it.key());
    }
  }
  if (doc.contains("sigma")) c.sigma = get_list(doc["sigma"], "sigma");
  if (doc.contains("n_max")) c.n_max = static_cast<int>(get_uint(doc["n_max"], "n_max"));
  if (doc.contains("policy")) {
    try {
      c.policy = parse_policy(get_string(doc["policy"], "policy"));
    } catch (const DomainError&) {
      throw ConfigError("field 'policy': expected epsilon-split or divided-difference");
    }
  }
  if (doc.contains("precision")) c.precision = parse_precision(get_string(doc["precision"], "precision"));
  if (doc.contains("step")) c.step = get_double(doc["step"], "step");
  if (doc.contains("condensate_method"))
    c.condensate_method = parse_method(get_string(doc["condensate_method"], "condensate_method"));
  if (doc.contains("seed")) c.seed = get_uint(doc["seed"], "seed");
  if (doc.contains("samples")) c.samples = get_uint(doc["samples"], "samples");
  if (doc.contains("threads")) c.threads = static_cast<int>(get_uint(doc["threads"], "threads"));
  if (doc.contains("validation")) {
    const json& v = doc["validation"];
    if (!v.is_object()) throw ConfigError("field 'validation': expected an object");
    reject_unknown(v, {"hciz_samples", "full_mc_samples", "condensate_samples"}, "validation.");
    if (v.contains("hciz_samples")) c.validation.hciz_samples = get_uint(v["hciz_samples"], "validation.hciz_samples");
    if (v.contains("full_mc_samples"))
      c.validation.full_mc_samples = get_uint(v["full_mc_samples"], "validation.full_mc_samples");
    if (v.contains("condensate_samples"))
      c.validation.condensate_samples = get_uint(v["condensate_samples"], "validation.condensate_samples");
  }
  if (doc.contains("format")) c.format = get_string(doc["format"], "format");
  if (doc.contains("out")) c.out = get_string(doc["out"], "out");
  if (doc.contains("timestamp")) {
    if (!doc["timestamp"].is_boolean()) throw ConfigError("field 'timestamp': expected a boolean");
    c.timestamp = doc["timestamp"].get<bool>();
  }
  return c;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string canon = config_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact level partition functions on R^3_lambda and their oracles", "r3l"};
  std::string command, config_path, format, out_path;
  std::uint64_t seed = 0, samples = 0;
  std::uint32_t twice_j = 0, twice_j_max = 0;
  int threads = 0;
  bool no_timestamp = false;
  app.add_option("command", command, "spectrum | zlevel | resum | toda | condensate | validate")
      ->required()
      ->check(CLI::IsMember(kCommands));
  auto* o_config = app.add_option("--config", config_path, "JSON configuration file");
  auto* o_seed = app.add_option("--seed", seed, "RNG seed (u64)");
  auto* o_samples = app.add_option("--samples", samples, "Monte Carlo sample count");
  auto* o_j = app.add_option("--j", twice_j, "level as TWICE_J");
  auto* o_jmax = app.add_option("--jmax", twice_j_max, "last level as TWICE_J");
  auto* o_threads = app.add_option("--threads", threads, "worker cap (0: OpenMP default, 1: serial)");
  auto* o_out = app.add_option("--out", out_path, "output path (default stdout)");
  auto* o_format = app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp from provenance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "r3l: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    RunConfig cfg;
    if (o_config->count()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      cfg = parse_config_json(buf.str());
      if (!cfg.command.empty() && cfg.command != command)
        throw ConfigError("field 'command': config is for '" + cfg.command + "', not '" + command + "'");
    }
    cfg.command = command;
    if (o_seed->count()) cfg.seed = seed;
    if (o_samples->count()) cfg.samples = samples;
    if (o_j->count()) cfg.twice_j = twice_j;
    if (o_jmax->count()) cfg.twice_j_max = twice_j_max;
    if (o_threads->count()) cfg.threads = threads;
    if (o_out->count()) cfg.out = out_path;
    if (o_format->count()) cfg.format = format;
    if (no_timestamp) cfg.timestamp = false;
    cfg.validate();

    Output o;
    if (command == "spectrum") o = cmd_spectrum(cfg);
    else if (command == "zlevel") o = cmd_zlevel(cfg);
    else if (command == "resum") o = cmd_resum(cfg);
    else if (command == "toda") o = cmd_toda(cfg);
    else if (command == "condensate") o = cmd_condensate(cfg);
    else o = cmd_validate(cfg);

    const std::string text = render(cfg, o);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw ConfigError("cannot write output file '" + cfg.out + "'");
      f << text;
    }
    if (o.exit_code == kGateFailure) err << "r3l: validation gate failure\n";
    return o.exit_code;
  } catch (const ConfigError& e) {
    err << "r3l: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "r3l: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "r3l: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "r3l: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace r3l::cli
