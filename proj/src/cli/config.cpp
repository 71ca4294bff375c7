#include "cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cli/toml_lite.hpp"
#include "sgi/hjb.hpp"
#include "sgi/models.hpp"

namespace sgi::cli {

using ojson = nlohmann::ordered_json;

namespace {

class Reader {
 public:
  Reader(const TomlDocument& doc, std::string section, const ojson& table)
      : doc_(doc), section_(std::move(section)), table_(table) {}

  void allow(std::initializer_list<const char*> keys) {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : table_.items()) {
      if (!ok.count(k)) fail(k, "unknown key '" + section_ + "." + k + "'");
    }
  }

  template <class T>
  void get(const char* key, T& out) const {
    if (!table_.contains(key)) return;
    const ojson& v = table_[key];
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("a number");
        out = v.get<double>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("a boolean");
        out = v.get<bool>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("a string");
        out = v.get<std::string>();
      } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_integer()) throw std::invalid_argument("an integer");
        if constexpr (std::is_same_v<T, std::uint64_t>) {
          if (v.get<long long>() < 0) throw std::invalid_argument("a non-negative integer");
        }
        out = v.get<T>();
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array()) throw std::invalid_argument("an array of numbers");
        out.clear();
        for (const auto& e : v) {
          if (!e.is_number()) throw std::invalid_argument("an array of numbers");
          out.push_back(e.get<double>());
        }
      } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        if (!v.is_array()) throw std::invalid_argument("an array of strings");
        out.clear();
        for (const auto& e : v) {
          if (!e.is_string()) throw std::invalid_argument("an array of strings");
          out.push_back(e.get<std::string>());
        }
      }
    } catch (const std::invalid_argument& e) {
      fail(key, "'" + section_ + "." + key + "' must be " + e.what());
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const int line = doc_.line_of(section_ + "." + key);
    throw ConfigError((line ? "config line " + std::to_string(line) + ": " : std::string()) + what);
  }

 private:
  const TomlDocument& doc_;
  std::string section_;
  const ojson& table_;
};

const ojson& section(const ojson& root, const char* name) {
  static const ojson empty = ojson::object();
  return root.contains(name) ? root[name] : empty;
}

nlohmann::json to_plain(const ojson& v) { return nlohmann::json::parse(v.dump()); }

}  // namespace

RunConfig parse_config(const std::string& text) {
  const TomlDocument doc = parse_toml(text);
  RunConfig cfg;
  const std::set<std::string> sections = {"model", "run",    "diagnostics", "convergence",
                                          "hj",    "bracket", "output",     "tolerances"};
  for (const auto& [k, v] : doc.root.items()) {
    if (!sections.count(k) || !v.is_object()) {
      const int line = doc.line_of(k);
      throw ConfigError((line ? "config line " + std::to_string(line) + ": " : std::string()) +
                        "unknown section or top-level key '" + k + "'");
    }
  }

  {
    const ojson& t = section(doc.root, "model");
    Reader r(doc, "model", t);
    r.get("name", cfg.model);
    ojson params = ojson::object();
    for (const auto& [k, v] : t.items())
      if (k != "name") params[k] = v;
    cfg.model_params = to_plain(params);
  }
  {
    Reader r(doc, "run", section(doc.root, "run"));
    r.allow({"scheme", "dt", "t_final", "seed", "paths", "threads"});
    std::string scheme = to_string(cfg.scheme);
    r.get("scheme", scheme);
    try {
      cfg.scheme = parse_scheme(scheme);
    } catch (const Error& e) {
      r.fail("scheme", e.what());
    }
    r.get("dt", cfg.dt);
    r.get("t_final", cfg.t_final);
    r.get("seed", cfg.seed);
    r.get("paths", cfg.paths);
    r.get("threads", cfg.threads);
  }
  {
    Reader r(doc, "diagnostics", section(doc.root, "diagnostics"));
    r.allow({"tangent", "conformal", "checks", "observables"});
    r.get("tangent", cfg.tangent);
    r.get("conformal", cfg.conformal);
    r.get("checks", cfg.checks);
    r.get("observables", cfg.observables);
  }
  {
    Reader r(doc, "convergence", section(doc.root, "convergence"));
    r.allow({"levels"});
    r.get("levels", cfg.levels);
  }
  {
    Reader r(doc, "hj", section(doc.root, "hj"));
    r.allow({"a", "b", "nodes", "boundary", "q0", "slope_cap", "s0", "s0_cos", "s0_sin"});
    r.get("a", cfg.hj_a);
    r.get("b", cfg.hj_b);
    r.get("nodes", cfg.hj_nodes);
    r.get("boundary", cfg.hj_boundary);
    r.get("q0", cfg.hj_q0);
    r.get("slope_cap", cfg.hj_slope_cap);
    r.get("s0", cfg.hj_s0);
    r.get("s0_cos", cfg.hj_s0_cos);
    r.get("s0_sin", cfg.hj_s0_sin);
  }
  {
    Reader r(doc, "bracket", section(doc.root, "bracket"));
    r.allow({"structures", "points"});
    r.get("structures", cfg.structures);
    r.get("points", cfg.bracket_points);
  }
  {
    Reader r(doc, "output", section(doc.root, "output"));
    r.allow({"dir", "plot_script"});
    r.get("dir", cfg.out_dir);
    r.get("plot_script", cfg.plot_script);
  }
  {
    const ojson& t = section(doc.root, "tolerances");
    Reader r(doc, "tolerances", t);
    for (const auto& [k, v] : t.items()) {
      double x = 0.0;
      r.get(k.c_str(), x);
      cfg.tolerances[k] = x;
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ConfigError("run.dt must be positive");
  if (!(cfg.t_final > 0.0)) throw ConfigError("run.t_final must be positive");
  if (cfg.dt > cfg.t_final) throw ConfigError("run.dt exceeds run.t_final");
  if (cfg.paths < 1) throw ConfigError("run.paths must be at least 1");
  if (cfg.threads < 0) throw ConfigError("run.threads must be non-negative");
  if (cfg.levels < 2) throw ConfigError("convergence.levels must be at least 2");
  if (cfg.hj_nodes < 4) throw ConfigError("hj.nodes must be at least 4");
  if (!(cfg.hj_b > cfg.hj_a)) throw ConfigError("hj.b must exceed hj.a");
  if (cfg.bracket_points < 1) throw ConfigError("bracket.points must be at least 1");
  parse_boundary(cfg.hj_boundary);
  const auto names = model_names();
  if (std::find(names.begin(), names.end(), cfg.model) == names.end())
    throw ConfigError("unknown model '" + cfg.model + "'");
  for (const auto& t : cfg.tolerances)
    if (!(t.second >= 0.0)) throw ConfigError("tolerance '" + t.first + "' must be non-negative");
}

std::string to_toml(const RunConfig& cfg) {
  std::ostringstream o;
  auto line = [&](const char* k, const ojson& v) { o << k << " = " << toml_value(v) << "\n"; };
  o << "[model]\n";
  line("name", cfg.model);
  for (const auto& [k, v] : cfg.model_params.items()) o << k << " = " << toml_value(ojson::parse(v.dump())) << "\n";
  o << "\n[run]\n";
  line("scheme", to_string(cfg.scheme));
  line("dt", cfg.dt);
  line("t_final", cfg.t_final);
  line("seed", cfg.seed);
  line("paths", cfg.paths);
  line("threads", cfg.threads);
  o << "\n[diagnostics]\n";
  line("tangent", cfg.tangent);
  line("conformal", cfg.conformal);
  line("checks", cfg.checks);
  line("observables", cfg.observables);
  o << "\n[convergence]\n";
  line("levels", cfg.levels);
  o << "\n[hj]\n";
  line("a", cfg.hj_a);
  line("b", cfg.hj_b);
  line("nodes", cfg.hj_nodes);
  line("boundary", cfg.hj_boundary);
  line("q0", cfg.hj_q0);
  line("slope_cap", cfg.hj_slope_cap);
  line("s0", cfg.hj_s0);
  line("s0_cos", cfg.hj_s0_cos);
  line("s0_sin", cfg.hj_s0_sin);
  o << "\n[bracket]\n";
  line("structures", cfg.structures);
  line("points", cfg.bracket_points);
  o << "\n[output]\n";
  line("dir", cfg.out_dir);
  line("plot_script", cfg.plot_script);
  o << "\n[tolerances]\n";
  for (const auto& [k, v] : cfg.tolerances) o << k << " = " << toml_value(v) << "\n";
  return o.str();
}

}  // namespace sgi::cli
