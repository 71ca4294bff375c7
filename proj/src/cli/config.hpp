#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgi/integrator.hpp"

namespace sgi::cli {

struct RunConfig {
  std::string model = "harmonic_oscillator";
  nlohmann::json model_params = nlohmann::json::object();

  Scheme scheme = Scheme::heun;
  double dt = 1e-3;
  double t_final = 1.0;
  std::uint64_t seed = 1;
  int paths = 1;
  int threads = 0;  // 0: hardware concurrency

  bool tangent = false;
  bool conformal = false;
  std::vector<std::string> checks;       // empty: defaults for the model
  std::vector<std::string> observables;  // ensemble moments; empty: all

  int levels = 4;

  double hj_a = -4.0;
  double hj_b = 4.0;
  int hj_nodes = 201;
  std::string hj_boundary = "linear-extrapolation";
  double hj_q0 = 0.5;
  double hj_slope_cap = 1e6;
  std::vector<double> hj_s0 = {};  // polynomial coefficients of S0 in q
  double hj_s0_cos = 0.5;
  double hj_s0_sin = 0.0;

  std::vector<std::string> structures = {"symplectic", "contact", "lcs", "so3"};
  int bracket_points = 100;

  std::string out_dir = "out";
  bool plot_script = false;

  std::map<std::string, double> tolerances;
};

// Parse TOML text; unknown sections or keys raise ConfigError with line context.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// dt > 0, t_final > 0, paths ≥ 1, known scheme/boundary/model.
void validate(const RunConfig& cfg);

// Fully resolved configuration in the same TOML subset.
std::string to_toml(const RunConfig& cfg);

}  // namespace sgi::cli
