#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace flks {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Validated run configuration. The on-disk format is JSON with a
/// schema_version key; unknown keys are rejected with a nearest-match
/// suggestion. Defaults follow the documented table in the README.
struct RunConfig {
  int schema_version = 1;
  std::string experiment;  // evolve-1d | evolve-radial | kinetic-converge |
                           // steady-shoot | critical-mass | entropy-track |
                           // decay-fit

  // model
  double lambda0 = 1.0;
  double chi = 1.0;
  double alpha = 0.0;
  int tau = 0;
  double mass = 1.0;
  std::string response = "algebraic";  // tanh | algebraic | constant
  double phi_constant = 1.0;           // used when response == constant
  std::string velocity = "interval";   // interval | disk
  double velocity_radius = 1.0;
  int velocity_nodes = 16;
  std::vector<double> epsilon_list;

  // numerics
  double L = 20.0;
  double R = 20.0;
  int cells = 512;
  double dt = 0.0;         // 0 -> use cfl factor
  double cfl = 0.4;
  double t_end = 1.0;
  double output_every = 0.5;
  double tolerance = 1e-8;

  // misc
  unsigned seed = 0;
  double noise_amplitude = 0.0;
  std::string series_csv;  // input for decay-fit
  double fit_t_lo = 0.0;   // 0 -> last decade of the series
  double fit_t_hi = 0.0;

  std::string canonical() const;
};

namespace detail {

inline std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "schema_version", "experiment",     "lambda0",        "chi",
      "alpha",          "tau",            "mass",           "response",
      "phi_constant",   "velocity",       "velocity_radius", "velocity_nodes",
      "epsilon_list",   "L",              "R",              "cells",
      "dt",             "cfl",            "t_end",          "output_every",
      "tolerance",      "seed",           "noise_amplitude", "series_csv",
      "fit_t_lo",       "fit_t_hi"};
  return keys;
}

inline std::string suggest(const std::string& key) {
  std::string best;
  std::size_t best_d = 1000;
  for (const auto& k : known_keys()) {
    std::size_t d = levenshtein(key, k);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return (best_d <= 4) ? best : std::string{};
}

}  // namespace detail

inline RunConfig parse_config_json(const nlohmann::json& j) {
  static const std::vector<std::string> experiments = {
      "evolve-1d",     "evolve-radial", "kinetic-converge", "steady-shoot",
      "critical-mass", "entropy-track", "decay-fit"};

  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& keys = detail::known_keys();
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      std::string sug = detail::suggest(it.key());
      throw config_error("unknown key \"" + it.key() + "\"" +
                         (sug.empty() ? "" : " (did you mean \"" + sug + "\"?)"));
    }
  }

  RunConfig c;
  auto get = [&](const char* key, auto& dst) {
    if (j.contains(key)) {
      try {
        dst = j.at(key).get<std::decay_t<decltype(dst)>>();
      } catch (const nlohmann::json::exception&) {
        throw config_error(std::string("key \"") + key + "\": type mismatch");
      }
    }
  };
  get("schema_version", c.schema_version);
  if (c.schema_version != 1)
    throw config_error("schema_version must be 1");
  if (!j.contains("experiment"))
    throw config_error("missing required key \"experiment\"");
  get("experiment", c.experiment);
  if (std::find(experiments.begin(), experiments.end(), c.experiment) ==
      experiments.end())
    throw config_error("experiment \"" + c.experiment + "\" is not one of the "
                       "supported kinds");
  get("lambda0", c.lambda0);
  get("chi", c.chi);
  get("alpha", c.alpha);
  get("tau", c.tau);
  get("mass", c.mass);
  get("response", c.response);
  get("phi_constant", c.phi_constant);
  get("velocity", c.velocity);
  get("velocity_radius", c.velocity_radius);
  get("velocity_nodes", c.velocity_nodes);
  get("epsilon_list", c.epsilon_list);
  get("L", c.L);
  get("R", c.R);
  get("cells", c.cells);
  get("dt", c.dt);
  get("cfl", c.cfl);
  get("t_end", c.t_end);
  get("output_every", c.output_every);
  get("tolerance", c.tolerance);
  get("seed", c.seed);
  get("noise_amplitude", c.noise_amplitude);
  get("series_csv", c.series_csv);
  get("fit_t_lo", c.fit_t_lo);
  get("fit_t_hi", c.fit_t_hi);

  // fail fast on module preconditions
  if (c.lambda0 <= 0.0) throw config_error("lambda0 must be > 0");
  if (c.chi <= 0.0) throw config_error("chi must be > 0");
  if (c.alpha < 0.0) throw config_error("alpha must be >= 0");
  if (c.tau != 0 && c.tau != 1) throw config_error("tau must be 0 or 1");
  if (c.mass <= 0.0) throw config_error("mass must be > 0");
  if (c.response != "tanh" && c.response != "algebraic" &&
      c.response != "constant")
    throw config_error("response must be tanh, algebraic or constant");
  if (c.velocity != "interval" && c.velocity != "disk")
    throw config_error("velocity must be interval or disk");
  if (c.cells < 8) throw config_error("cells must be >= 8");
  if (c.t_end <= 0.0) throw config_error("t_end must be > 0");
  if (c.experiment == "kinetic-converge") {
    if (c.epsilon_list.empty())
      throw config_error("kinetic-converge requires epsilon_list");
    for (std::size_t i = 0; i < c.epsilon_list.size(); ++i) {
      if (c.epsilon_list[i] <= 0.0)
        throw config_error("epsilon_list entries must be > 0");
      if (i > 0 && c.epsilon_list[i] >= c.epsilon_list[i - 1])
        throw config_error("epsilon_list must be strictly decreasing");
    }
  }
  if (c.experiment == "decay-fit" && c.series_csv.empty())
    throw config_error("decay-fit requires series_csv");
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config file not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config parse failure: " + std::string(e.what()));
  }
  return parse_config_json(j);
}

inline std::string RunConfig::canonical() const {
  nlohmann::json j;
  j["schema_version"] = schema_version;
  j["experiment"] = experiment;
  j["lambda0"] = lambda0;
  j["chi"] = chi;
  j["alpha"] = alpha;
  j["tau"] = tau;
  j["mass"] = mass;
  j["response"] = response;
  j["phi_constant"] = phi_constant;
  j["velocity"] = velocity;
  j["velocity_radius"] = velocity_radius;
  j["velocity_nodes"] = velocity_nodes;
  j["epsilon_list"] = epsilon_list;
  j["L"] = L;
  j["R"] = R;
  j["cells"] = cells;
  j["dt"] = dt;
  j["cfl"] = cfl;
  j["t_end"] = t_end;
  j["output_every"] = output_every;
  j["tolerance"] = tolerance;
  j["seed"] = seed;
  j["noise_amplitude"] = noise_amplitude;
  j["series_csv"] = series_csv;
  j["fit_t_lo"] = fit_t_lo;
  j["fit_t_hi"] = fit_t_hi;
  return j.dump();
}

/// FNV-1a content hash of the canonical config dump.
inline std::string config_hash(const RunConfig& c) {
  std::string s = c.canonical();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace flks
