#include "disco/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

namespace disco {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool is_infinite(const std::string& v) { return v == "inf" || v == "infinity"; }

double to_double(const std::string& v) {
  if (is_infinite(v)) return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& v) {
  if (is_infinite(v)) return std::numeric_limits<Int>::max();
  Int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

template <typename T, typename Parse>
std::vector<T> to_list(const std::string& v, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list entry in '" + v + "'");
    out.push_back(parse(item));
  }
  return out;
}

using Setter = std::function<void(ExperimentSpec&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"model", [](ExperimentSpec& s, const std::string& v) { s.model = v; }},
      {"initial_points", [](ExperimentSpec& s, const std::string& v) { s.detector.initial_points = to_int<int>(v); }},
      {"max_edge_points", [](ExperimentSpec& s, const std::string& v) { s.detector.refine.max_edge_points = to_int<int>(v); }},
      {"edge_tol", [](ExperimentSpec& s, const std::string& v) { s.detector.refine.edge_tol = to_double(v); }},
      {"off_axis_tol", [](ExperimentSpec& s, const std::string& v) { s.detector.refine.off_axis_tol = to_double(v); }},
      {"pa_orders", [](ExperimentSpec& s, const std::string& v) { s.detector.refine.orders = to_list<int>(v, to_int<int>); }},
      {"jump_threshold", [](ExperimentSpec& s, const std::string& v) { s.detector.refine.jump_threshold = to_double(v); }},
      {"delta_t", [](ExperimentSpec& s, const std::string& v) { s.detector.sampler.delta_t = to_double(v); }},
      {"epsilon", [](ExperimentSpec& s, const std::string& v) { s.detector.sampler.epsilon = to_double(v); }},
      {"n_add", [](ExperimentSpec& s, const std::string& v) { s.detector.sampler.n_add = to_int<int>(v); }},
      {"itermax", [](ExperimentSpec& s, const std::string& v) { s.detector.sampler.itermax = to_int<int>(v); }},
      {"descent_max_steps", [](ExperimentSpec& s, const std::string& v) { s.detector.sampler.descent.max_steps = to_int<int>(v); }},
      {"descent_step_tol", [](ExperimentSpec& s, const std::string& v) { s.detector.sampler.descent.step_tol = to_double(v); }},
      {"descent_value_tol", [](ExperimentSpec& s, const std::string& v) { s.detector.sampler.descent.value_tol = to_double(v); }},
      {"max_runtime", [](ExperimentSpec& s, const std::string& v) { s.detector.max_runtime = to_double(v); }},
      {"max_evals", [](ExperimentSpec& s, const std::string& v) { s.detector.max_evals = to_int<std::int64_t>(v); }},
      {"max_iterations", [](ExperimentSpec& s, const std::string& v) { s.detector.max_iterations = to_int<int>(v); }},
      {"seed", [](ExperimentSpec& s, const std::string& v) { s.detector.seed = to_int<std::uint64_t>(v); }},
      {"sigma_grid", [](ExperimentSpec& s, const std::string& v) { s.detector.sigma_grid = to_list<double>(v, to_double); }},
      {"C_grid", [](ExperimentSpec& s, const std::string& v) { s.detector.C_grid = to_list<double>(v, to_double); }},
      {"folds", [](ExperimentSpec& s, const std::string& v) { s.detector.folds = to_int<int>(v); }},
      {"cv_every", [](ExperimentSpec& s, const std::string& v) { s.detector.cv_every = to_int<int>(v); }},
      {"kkt_tol", [](ExperimentSpec& s, const std::string& v) { s.detector.svm.kkt_tol = to_double(v); }},
      {"max_passes", [](ExperimentSpec& s, const std::string& v) { s.detector.svm.max_passes = to_int<int>(v); }},
      {"n_test", [](ExperimentSpec& s, const std::string& v) { s.n_test = to_int<int>(v); }},
      {"test_band", [](ExperimentSpec& s, const std::string& v) { s.test_band = to_double(v); }},
      {"n_runs", [](ExperimentSpec& s, const std::string& v) { s.n_runs = to_int<int>(v); }},
      {"targets", [](ExperimentSpec& s, const std::string& v) { s.targets = to_list<double>(v, to_double); }},
      {"stop_target", [](ExperimentSpec& s, const std::string& v) { s.stop_target = to_double(v); }},
      {"test_seed", [](ExperimentSpec& s, const std::string& v) { s.test_seed = to_int<std::uint64_t>(v); }},
      {"threads", [](ExperimentSpec& s, const std::string& v) { s.threads = to_int<int>(v); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

ExperimentSpec parse_experiment(std::istream& in, const std::string& source) {
  std::map<std::string, const Setter*> lookup;
  for (const auto& [name, fn] : setters()) lookup[name] = &fn;

  ExperimentSpec spec;
  std::map<std::string, int> seen;
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    const std::string where = source + ":" + std::to_string(line) + ": ";
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (auto prev = seen.find(key); prev != seen.end())
      throw ConfigError(where + "duplicate key '" + key + "' (first set on line " +
                        std::to_string(prev->second) + ")");
    seen[key] = line;
    if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
    try {
      (*it->second)(spec, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  try {
    spec.detector.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (spec.n_test < 1 || spec.n_runs < 1) throw ConfigError(source + ": n_test and n_runs must be >= 1");
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_experiment(in, path.string());
}

}  // namespace disco
