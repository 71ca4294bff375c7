#include "cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sgi/hjb.hpp"

namespace sgi::cli {

namespace fs = std::filesystem;

namespace {

bool needs_tangent(const std::string& check) {
  return check == "symplectic" || check == "symplectic_volume" || check == "contact" ||
         check == "contact_volume" || check == "lcs";
}

bool needs_conformal(const std::string& check) { return check == "contact" || check == "contact_volume"; }

IntegrateOptions options_for(const RunConfig& cfg, const std::vector<std::string>& checks) {
  IntegrateOptions o;
  o.tangent = cfg.tangent;
  o.conformal = cfg.conformal;
  for (const auto& c : checks) {
    o.tangent = o.tangent || needs_tangent(c);
    o.conformal = o.conformal || needs_conformal(c);
  }
  return o;
}

std::vector<std::string> resolved_checks(const RunConfig& cfg, const ModelSpec& model) {
  return cfg.checks.empty() ? default_checks(model) : cfg.checks;
}

double tolerance_for(const RunConfig& cfg, const std::string& check, double dt) {
  const auto it = cfg.tolerances.find(check);
  return it != cfg.tolerances.end() ? it->second : default_tolerance(check, dt);
}

fs::path output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write '" + file.string() + "'");
  out << text;
}

void write_report(const RunConfig& cfg, const DiagnosticsReport& report) {
  write_text(output_dir(cfg) / "report.json", report_to_json(report) + "\n");
  for (const auto& e : report.entries) {
    std::cout << (e.pass ? "ok   " : "FAIL ") << e.name << " deviation=" << e.max_deviation
              << " tolerance=" << e.tolerance;
    if (e.order_estimate) std::cout << " order=" << *e.order_estimate;
    std::cout << "\n";
  }
}

void write_plot_script(const RunConfig& cfg, const std::string& csv, const std::string& title) {
  if (!cfg.plot_script) return;
  std::ostringstream s;
  s << "import csv\nimport matplotlib.pyplot as plt\n\n"
    << "with open('" << csv << "') as f:\n"
    << "    rows = list(csv.reader(f))\n"
    << "header, data = rows[0], [[float(v) for v in r] for r in rows[1:]]\n"
    << "t = [r[0] for r in data]\n"
    << "for j, name in enumerate(header[1:], start=1):\n"
    << "    plt.plot(t, [r[j] for r in data], label=name)\n"
    << "plt.xlabel(header[0])\nplt.title('" << title << "')\nplt.legend()\n"
    << "plt.savefig('" << fs::path(csv).stem().string() << ".png', dpi=150)\n";
  write_text(output_dir(cfg) / ("plot_" + fs::path(csv).stem().string() + ".py"), s.str());
}

NoisePath path_for(const RunConfig& cfg, const ModelSpec& model, std::uint64_t seed) {
  return sample_brownian(seed, grid_for_step(0.0, cfg.t_final, cfg.dt), model.sys.noise_dim());
}

ModelSpec model_for(const RunConfig& cfg) { return build_model(cfg.model, cfg.model_params); }

std::string fmt(double v) {
  std::ostringstream o;
  o.imbue(std::locale::classic());
  o << std::setprecision(17) << v;
  return o.str();
}

}  // namespace

std::vector<std::string> default_checks(const ModelSpec& model) {
  std::vector<std::string> c;
  if (model.symplectic_form) {
    c.push_back("symplectic");
    c.push_back("symplectic_volume");
  }
  if (model.sys.contact) {
    c.push_back("contact");
    c.push_back("contact_volume");
  }
  if (model.sys.lcs && model.sys.structure.kind == StructureKind::lcs) c.push_back("lcs");
  if (model.casimir) c.push_back("casimir");
  c.push_back("f_decomposition");
  return c;
}

double default_tolerance(const std::string& check, double dt) {
  if (check == "symplectic" || check == "symplectic_volume") return 10.0 * dt;
  if (check == "contact" || check == "contact_volume") return 50.0 * dt;
  if (check == "lcs") return 100.0 * dt;
  if (check == "casimir") return 0.1 * dt;
  if (check == "f_decomposition") return 10.0 * dt;
  if (check == "strong") return 5.0 * dt;
  if (check.rfind("invariant:", 0) == 0) return 1.0 * dt;
  throw ConfigError("unknown check '" + check + "'");
}

double evaluate_check(const std::string& check, const ModelSpec& model, const Trajectory& traj,
                      const NoisePath& path) {
  if (check == "symplectic") {
    if (!model.symplectic_form) throw ConfigError("model " + model.name + " has no symplectic form");
    return symplectic_pullback_deviation(traj, *model.symplectic_form);
  }
  if (check == "symplectic_volume") {
    double worst = 0.0;
    for (const auto& J : traj.jacobians) worst = std::max(worst, std::abs(J.determinant() - 1.0));
    return worst;
  }
  if (check == "contact" || check == "contact_volume") {
    if (!model.sys.contact) throw ConfigError("model " + model.name + " is not a contact system");
    return check == "contact" ? contact_pullback_deviation(traj, *model.sys.contact)
                              : contact_volume_deviation(traj, model.sys.contact->n);
  }
  if (check == "lcs") {
    if (!model.sys.lcs) throw ConfigError("model " + model.name + " has no L.C.S. data");
    return lcs_pullback_deviation(traj, *model.sys.lcs);
  }
  if (check == "casimir") {
    if (!model.casimir) throw ConfigError("model " + model.name + " has no Casimir");
    return casimir_drift(traj, *model.casimir);
  }
  if (check == "f_decomposition") {
    double worst = 0.0;
    for (const auto& [name, f] : model.observables)
      worst = std::max(worst, f_along_path_residual(model.sys, f, traj, path));
    return worst;
  }
  if (check.rfind("invariant:", 0) == 0) {
    const std::string obs = check.substr(10);
    const auto it = model.observables.find(obs);
    if (it == model.observables.end()) throw ConfigError("unknown observable '" + obs + "'");
    const double f0 = it->second(traj.states.front());
    double worst = 0.0;
    for (const auto& z : traj.states) worst = std::max(worst, std::abs(it->second(z) - f0));
    return worst;
  }
  throw ConfigError("unknown check '" + check + "'");
}

int cmd_simulate(const RunConfig& cfg) {
  const ModelSpec model = model_for(cfg);
  const auto checks = resolved_checks(cfg, model);
  const IntegrateOptions opts = options_for(cfg, checks);
  const NoisePath path = path_for(cfg, model, cfg.seed);
  const Trajectory traj = integrate(model.sys, model.z0, path, cfg.scheme, opts);

  std::ostringstream csv;
  write_trajectory_csv(csv, traj, model.coords, cfg.conformal, cfg.tangent);
  write_text(output_dir(cfg) / "trajectory.csv", csv.str());
  write_plot_script(cfg, "trajectory.csv", model.name);

  if (traj.blown_up) {
    std::cerr << "blow-up at step " << *traj.blown_up << " (t = " << traj.times.back() << ")\n";
    return kBlowUp;
  }
  std::vector<DiagnosticEntry> entries;
  for (const auto& c : checks)
    entries.push_back(make_entry(c, evaluate_check(c, model, traj, path), tolerance_for(cfg, c, path.grid.dt())));
  const auto report = assemble_report(model.name, to_string(cfg.scheme), path.grid.dt(), cfg.seed, entries);
  write_report(cfg, report);
  return report.all_pass() ? kOk : kCheckFailure;
}

int cmd_ensemble(const RunConfig& cfg) {
  const ModelSpec model = model_for(cfg);
  std::vector<std::string> obs = cfg.observables;
  if (obs.empty())
    for (const auto& [name, f] : model.observables) obs.push_back(name);
  for (const auto& o : obs)
    if (!model.observables.count(o)) throw ConfigError("unknown observable '" + o + "'");
  const std::vector<std::string> checks = cfg.checks;
  const IntegrateOptions opts = options_for(cfg, checks);
  const TimeGrid grid = grid_for_step(0.0, cfg.t_final, cfg.dt);
  const int N = grid.steps;
  const int nobs = static_cast<int>(obs.size());

  // Fixed blocks reduced in index order: results do not depend on the worker count.
  constexpr int kBlock = 64;
  const int blocks = (cfg.paths + kBlock - 1) / kBlock;
  struct BlockSums {
    Mat sum, sq;
    int count = 0;
    int blown = 0;
    std::vector<double> worst;
  };
  std::vector<BlockSums> sums(blocks);
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    while (true) {
      const int b = next.fetch_add(1);
      if (b >= blocks) return;
      BlockSums s{Mat::Zero(N + 1, nobs), Mat::Zero(N + 1, nobs), 0, 0, std::vector<double>(checks.size(), 0.0)};
      try {
        for (int i = b * kBlock; i < std::min(cfg.paths, (b + 1) * kBlock); ++i) {
          const NoisePath path = sample_brownian(mix_seed(cfg.seed, static_cast<std::uint64_t>(i)), grid,
                                                 model.sys.noise_dim());
          const Trajectory traj = integrate(model.sys, model.z0, path, cfg.scheme, opts);
          if (traj.blown_up) {
            ++s.blown;
            continue;
          }
          for (int n = 0; n <= N; ++n) {
            for (int k = 0; k < nobs; ++k) {
              const double v = model.observables.at(obs[k])(traj.states[n]);
              s.sum(n, k) += v;
              s.sq(n, k) += v * v;
            }
          }
          for (std::size_t c = 0; c < checks.size(); ++c)
            s.worst[c] = std::max(s.worst[c], evaluate_check(checks[c], model, traj, path));
          ++s.count;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
        return;
      }
      sums[b] = std::move(s);
    }
  };
  const int threads = std::max(1, std::min(blocks, cfg.threads > 0 ? cfg.threads
                                                                    : static_cast<int>(std::thread::hardware_concurrency())));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  Mat sum = Mat::Zero(N + 1, nobs), sq = Mat::Zero(N + 1, nobs);
  int count = 0, blown = 0;
  std::vector<double> worst(checks.size(), 0.0);
  for (const auto& s : sums) {
    sum += s.sum;
    sq += s.sq;
    count += s.count;
    blown += s.blown;
    for (std::size_t c = 0; c < checks.size(); ++c) worst[c] = std::max(worst[c], s.worst[c]);
  }

  std::ostringstream csv;
  csv.imbue(std::locale::classic());
  csv << std::setprecision(17) << "t";
  for (const auto& o : obs) csv << "," << o << "_mean," << o << "_var";
  csv << "\n";
  for (int n = 0; n <= N; ++n) {
    csv << grid.time(n);
    for (int k = 0; k < nobs; ++k) {
      const double mean = count ? sum(n, k) / count : NAN;
      const double var = count > 1 ? (sq(n, k) - count * mean * mean) / (count - 1) : 0.0;
      csv << "," << mean << "," << var;
    }
    csv << "\n";
  }
  write_text(output_dir(cfg) / "moments.csv", csv.str());
  write_plot_script(cfg, "moments.csv", model.name + " ensemble");

  for (int k = 0; k < nobs; ++k) {
    const double mean = count ? sum(N, k) / count : NAN;
    const double var = count > 1 ? (sq(N, k) - count * mean * mean) / (count - 1) : 0.0;
    std::cout << obs[k] << "(t=" << fmt(grid.time(N)) << "): mean=" << fmt(mean)
              << " se=" << fmt(std::sqrt(var / std::max(count, 1))) << "\n";
  }
  std::vector<DiagnosticEntry> entries;
  for (std::size_t c = 0; c < checks.size(); ++c)
    entries.push_back(make_entry(checks[c], worst[c], tolerance_for(cfg, checks[c], grid.dt())));
  const auto report = assemble_report(model.name, to_string(cfg.scheme), grid.dt(), cfg.seed, entries);
  write_report(cfg, report);
  if (blown) {
    std::cerr << blown << " of " << cfg.paths << " paths blew up\n";
    return kBlowUp;
  }
  return report.all_pass() ? kOk : kCheckFailure;
}

int cmd_convergence(const RunConfig& cfg) {
  const ModelSpec model = model_for(cfg);
  const auto checks = resolved_checks(cfg, model);
  const IntegrateOptions opts = options_for(cfg, checks);
  NoisePath path = path_for(cfg, model, cfg.seed);
  std::vector<NoisePath> paths{path};
  for (int l = 1; l < cfg.levels; ++l) paths.push_back(refine(paths.back()));

  std::vector<std::vector<double>> devs(checks.size());
  std::vector<std::vector<Vec>> endpoints(paths.size());
  for (std::size_t l = 0; l < paths.size(); ++l) {
    const NoisePath& p = paths[l];
    const Trajectory traj = integrate(model.sys, model.z0, p, cfg.scheme, opts);
    if (traj.blown_up) {
      std::cerr << "blow-up at step " << *traj.blown_up << " on the level with dt = " << p.grid.dt() << "\n";
      return kBlowUp;
    }
    for (std::size_t c = 0; c < checks.size(); ++c) devs[c].push_back(evaluate_check(checks[c], model, traj, p));
    endpoints[l].push_back(traj.final_state());
  }

  // Strong error: RMS endpoint error over `paths` independent chains. Path 0 is the chain above.
  const bool oracle = model.name == "harmonic_oscillator";
  std::vector<Vec> refs;
  auto reference = [&](const NoisePath& finest) {
    return duhamel_reference(model.params["k"].get<double>(), model.params["sigma"].get<double>(), model.z0, finest);
  };
  if (oracle) refs.push_back(reference(paths.back()));
  for (int i = 1; i < cfg.paths; ++i) {
    NoisePath p = path_for(cfg, model, mix_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    for (std::size_t l = 0; l < paths.size(); ++l) {
      endpoints[l].push_back(integrate(model.sys, model.z0, p, cfg.scheme).final_state());
      if (l + 1 < paths.size()) p = refine(p);
    }
    if (oracle) refs.push_back(reference(p));
  }
  auto rms = [](const std::vector<Vec>& a, const std::vector<Vec>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
    return std::sqrt(s / static_cast<double>(a.size()));
  };
  std::vector<double> strong;
  // Without a closed form, each level is compared against the finest one.
  const std::size_t compared = oracle ? paths.size() : paths.size() - 1;
  for (std::size_t l = 0; l < compared; ++l) strong.push_back(rms(endpoints[l], oracle ? refs : endpoints.back()));

  std::ostringstream csv;
  csv.imbue(std::locale::classic());
  csv << std::setprecision(17) << "level,dt";
  for (const auto& c : checks) csv << "," << c;
  csv << ",strong\n";
  for (std::size_t l = 0; l < paths.size(); ++l) {
    csv << l << "," << paths[l].grid.dt();
    for (std::size_t c = 0; c < checks.size(); ++c) csv << "," << devs[c][l];
    csv << ",";
    if (l < strong.size()) csv << strong[l];
    csv << "\n";
  }
  write_text(output_dir(cfg) / "convergence.csv", csv.str());

  const double fine_dt = paths.back().grid.dt();
  std::vector<DiagnosticEntry> entries;
  for (std::size_t c = 0; c < checks.size(); ++c)
    entries.push_back(make_entry_from_chain(checks[c], devs[c], tolerance_for(cfg, checks[c], fine_dt)));
  const double strong_dt = paths[strong.size() - 1].grid.dt();
  if (strong.size() >= 2) entries.push_back(make_entry_from_chain("strong", strong, tolerance_for(cfg, "strong", strong_dt)));
  const auto report = assemble_report(model.name, to_string(cfg.scheme), fine_dt, cfg.seed, entries);
  write_report(cfg, report);
  return report.all_pass() ? kOk : kCheckFailure;
}

namespace {

ScalarField initial_potential(const RunConfig& cfg) {
  const std::vector<double> c = cfg.hj_s0;
  const double A = cfg.hj_s0_cos, B = cfg.hj_s0_sin;
  ScalarField f;
  f.eval = [c, A, B](const Vec& z) {
    double v = 0.0, p = 1.0;
    for (double a : c) {
      v += a * p;
      p *= z[0];
    }
    return v + A * std::cos(z[0]) + B * std::sin(z[0]);
  };
  f.analytic_gradient = [c, A, B](const Vec& z) {
    double v = 0.0, p = 1.0;
    for (std::size_t j = 1; j < c.size(); ++j) {
      v += static_cast<double>(j) * c[j] * p;
      p *= z[0];
    }
    return Vec::Constant(1, v - A * std::sin(z[0]) + B * std::cos(z[0]));
  };
  return f;
}

}  // namespace

int cmd_hjb(const RunConfig& cfg) {
  const ModelSpec model = model_for(cfg);
  if (!model.sys.contact || model.sys.dim() != 3)
    throw ConfigError("hjb needs a contact model with n = 1 (damped_contact)");
  HjProblem problem{model.sys, initial_potential(cfg), parse_boundary(cfg.hj_boundary), cfg.hj_a, cfg.hj_b,
                    cfg.hj_nodes, cfg.hj_slope_cap};
  const NoisePath path = path_for(cfg, model, cfg.seed);
  const GridFunction S = solve_contact_hj_grid(problem, path);
  std::ostringstream grid_csv;
  write_grid_csv(grid_csv, S);
  write_text(output_dir(cfg) / "hj_grid.csv", grid_csv.str());
  if (S.blown_up) {
    std::cerr << "HJ grid solution blew up at step " << *S.blown_up << " (t = " << S.times.back() << ")\n";
    return kBlowUp;
  }
  const LiftEquivalence eq = lift_equivalence_error(S, model.sys, path, cfg.hj_q0);
  std::ostringstream lift_csv;
  lift_csv.imbue(std::locale::classic());
  lift_csv << std::setprecision(17) << "t,q_lift,p_lift,u_lift,q_direct,p_direct,u_direct\n";
  for (std::size_t i = 0; i < eq.lifted.size(); ++i) {
    lift_csv << path.grid.time(static_cast<int>(i));
    for (int k = 0; k < 3; ++k) lift_csv << "," << eq.lifted[i][k];
    for (int k = 0; k < 3; ++k) lift_csv << "," << eq.direct[i][k];
    lift_csv << "\n";
  }
  write_text(output_dir(cfg) / "hj_lift.csv", lift_csv.str());
  write_plot_script(cfg, "hj_lift.csv", "lifted vs direct");

  const auto tol = [&](const char* name) {
    const auto it = cfg.tolerances.find(name);
    return it != cfg.tolerances.end() ? it->second : 0.05;
  };
  std::vector<DiagnosticEntry> entries{make_entry("lift_equivalence_sup", eq.sup_error, tol("lift_equivalence_sup")),
                                       make_entry("lift_equivalence_endpoint", eq.endpoint_error,
                                                  tol("lift_equivalence_endpoint"))};
  const auto report = assemble_report(model.name, "heun", path.grid.dt(), cfg.seed, entries);
  write_report(cfg, report);
  if (eq.truncated) {
    std::cerr << "projected path left the grid after " << eq.steps_compared << " steps\n";
    return kBlowUp;
  }
  return report.all_pass() ? kOk : kCheckFailure;
}

int cmd_bracket_check(const RunConfig& cfg) {
  std::vector<DiagnosticEntry> entries;
  for (const auto& name : cfg.structures) {
    JacobiStructure J;
    if (name == "symplectic") {
      J = canonical_symplectic(2);
    } else if (name == "contact") {
      J = canonical_contact(1).first;
    } else if (name == "lcs") {
      const Polynomial sigma = 0.3 * Polynomial::coordinate(4, 0) +
                               0.2 * Polynomial::coordinate(4, 1) * Polynomial::coordinate(4, 1) +
                               0.1 * Polynomial::coordinate(4, 0) * Polynomial::coordinate(4, 2);
      J = lcs_cotangent(2, sigma.field()).first;
    } else if (name == "so3") {
      J = lie_poisson_so3();
    } else {
      throw ConfigError("unknown structure '" + name + "' (expected symplectic, contact, lcs or so3)");
    }
    const BracketSuiteResult r = bracket_identity_suite(J, cfg.bracket_points, cfg.seed);
    const auto tol = [&](const std::string& key, double def) {
      const auto it = cfg.tolerances.find(key);
      return it != cfg.tolerances.end() ? it->second : def;
    };
    entries.push_back(make_entry(name + ".antisymmetry", r.antisymmetry, tol("antisymmetry", 1e-14)));
    entries.push_back(make_entry(name + ".jacobi", r.jacobi, tol("jacobi", 1e-8)));
    entries.push_back(make_entry(name + ".weak_leibniz", r.weak_leibniz, tol("weak_leibniz", 1e-10)));
    entries.push_back(make_entry(name + ".unit_field", r.unit_field, tol("unit_field", 0.0)));
  }
  const auto report = assemble_report("bracket-check", "none", 0.0, cfg.seed, entries);
  write_report(cfg, report);
  return report.all_pass() ? kOk : kCheckFailure;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Stochastic Hamiltonian systems on Jacobi manifolds"};
  app.require_subcommand(1);
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt, t_final;
  std::optional<int> paths, levels;
  std::optional<std::string> scheme, out;
  bool print_config = false, plot = false;

  const std::vector<std::string> names = {"simulate", "ensemble", "convergence", "hjb", "bracket-check"};
  for (const auto& n : names) {
    CLI::App* sub = app.add_subcommand(n);
    sub->add_option("--config", config_file, "TOML configuration file");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--dt", dt, "time step");
    sub->add_option("--t-final", t_final, "final time");
    sub->add_option("--paths", paths, "ensemble size");
    sub->add_option("--scheme", scheme, "heun or euler-ito");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--levels", levels, "refinement levels for convergence");
    sub->add_flag("--print-config", print_config, "print the resolved configuration and exit");
    sub->add_flag("--emit-plot-script", plot, "write a plotting script next to the CSV output");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    RunConfig cfg = config_file.empty() ? RunConfig{} : load_config(config_file);
    if (seed) cfg.seed = *seed;
    if (dt) cfg.dt = *dt;
    if (t_final) cfg.t_final = *t_final;
    if (paths) cfg.paths = *paths;
    if (scheme) {
      try {
        cfg.scheme = parse_scheme(*scheme);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    if (out) cfg.out_dir = *out;
    if (levels) cfg.levels = *levels;
    if (plot) cfg.plot_script = true;
    validate(cfg);
    if (print_config) {
      std::cout << to_toml(cfg);
      return kOk;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "simulate") return cmd_simulate(cfg);
    if (cmd == "ensemble") return cmd_ensemble(cfg);
    if (cmd == "convergence") return cmd_convergence(cfg);
    if (cmd == "hjb") return cmd_hjb(cfg);
    return cmd_bracket_check(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const StepSizeError& e) {
    std::cerr << "step-size error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sgi::cli
