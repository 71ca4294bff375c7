#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/toml_lite.hpp"

using namespace sgi;
using namespace sgi::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("sgi_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& f, const std::string& text) { std::ofstream(f) << text; }

int run(const std::string& args) {
  const std::string cmd = std::string(SGI_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(TomlLite, ParsesSubset) {
  const auto doc = parse_toml(
      "# comment\n[model]\nname = \"damped_contact\" # trailing\ngamma = 0.7\nU = [0, 0,\n  0.5]\n"
      "[run]\nseed = 12\nflag = true\nlit = 'a\\b'\n[a.b]\nc = -1e-3\n");
  EXPECT_EQ(doc.root["model"]["name"], "damped_contact");
  EXPECT_EQ(doc.root["model"]["gamma"], 0.7);
  EXPECT_EQ(doc.root["model"]["U"].size(), 3u);
  EXPECT_EQ(doc.root["run"]["seed"], 12);
  EXPECT_EQ(doc.root["run"]["flag"], true);
  EXPECT_EQ(doc.root["run"]["lit"], "a\\b");
  EXPECT_EQ(doc.root["a"]["b"]["c"], -1e-3);
  EXPECT_EQ(doc.line_of("model.gamma"), 4);
}

TEST(TomlLite, ErrorsCarryLineNumbers) {
  try {
    parse_toml("[run]\ndt = 0.1\ndt = 0.2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(parse_toml("[run]\ndt = \n"), ConfigError);
  EXPECT_THROW(parse_toml("[run\n"), ConfigError);
  EXPECT_THROW(parse_toml("x = \"open\n"), ConfigError);
  EXPECT_THROW(parse_toml("x = 1 2\n"), ConfigError);
}

TEST(Config, UnknownKeysRejectedWithLine) {
  try {
    parse_config("[run]\ndt = 0.01\nsteps = 4\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("line 3"), std::string::npos);
    EXPECT_NE(w.find("run.steps"), std::string::npos);
  }
  EXPECT_THROW(parse_config("[solver]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[run]\ndt = \"small\"\n"), ConfigError);
  EXPECT_THROW(parse_config("[run]\nscheme = \"rk4\"\n"), ConfigError);
}

TEST(Config, ValidationRules) {
  RunConfig c;
  c.dt = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = RunConfig{};
  c.paths = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = RunConfig{};
  c.model = "pendulum";
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_NO_THROW(validate(RunConfig{}));
}

TEST(Config, PrintedConfigRoundTrips) {
  RunConfig c = parse_config(
      "[model]\nname = \"isokinetic\"\nnoise = [0.3, 0.1]\nvariant = \"paper-literal\"\n[run]\ndt = 0.002\n"
      "scheme = \"euler-ito\"\n[diagnostics]\nchecks = [\"lcs\"]\n[tolerances]\nlcs = 0.5\n");
  const RunConfig d = parse_config(to_toml(c));
  EXPECT_EQ(to_toml(c), to_toml(d));
  EXPECT_EQ(d.scheme, Scheme::euler_ito);
  EXPECT_EQ(d.dt, 0.002);
  EXPECT_EQ(d.model_params["variant"], "paper-literal");
  EXPECT_EQ(d.tolerances.at("lcs"), 0.5);
}

TEST(Cli, SimulateHarmonicDefaults) {
  const fs::path d = scratch("sim");
  EXPECT_EQ(run("simulate --out " + d.string()), kOk);
  const auto l = lines(slurp(d / "trajectory.csv"));
  ASSERT_GT(l.size(), 2u);
  EXPECT_EQ(l[0], "t,x,y");
  EXPECT_EQ(l.size(), 1002u);
  const auto report = report_from_json(slurp(d / "report.json"));
  EXPECT_EQ(report.model, "harmonic_oscillator");
  EXPECT_TRUE(report.all_pass());
}

TEST(Cli, SameSeedIsByteIdentical) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  EXPECT_EQ(run("simulate --seed 77 --out " + a.string()), kOk);
  EXPECT_EQ(run("simulate --seed 77 --out " + b.string()), kOk);
  EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
  const fs::path c = scratch("det_c");
  EXPECT_EQ(run("simulate --seed 78 --out " + c.string()), kOk);
  EXPECT_NE(slurp(a / "trajectory.csv"), slurp(c / "trajectory.csv"));
}

TEST(Cli, ConformalColumnForDampedContact) {
  const fs::path d = scratch("conf");
  write(d / "c.toml", "[model]\nname = \"damped_contact\"\ngamma = 0.7\n[diagnostics]\nconformal = true\n");
  EXPECT_EQ(run("simulate --config " + (d / "c.toml").string() + " --out " + d.string()), kOk);
  const auto l = lines(slurp(d / "trajectory.csv"));
  EXPECT_EQ(l[0], "t,x,y,u,lambda");
  const double lambda = std::stod(l.back().substr(l.back().rfind(',') + 1));
  EXPECT_NEAR(lambda, std::exp(-0.7), 1e-12);
}

TEST(Cli, ExitCodes) {
  const fs::path d = scratch("codes");
  write(d / "bad.toml", "[run]\ndt = 0.01\nbogus = 1\n");
  EXPECT_EQ(run("simulate --config " + (d / "bad.toml").string() + " --out " + d.string()), kConfigError);
  EXPECT_EQ(run("simulate --config " + (d / "missing.toml").string()), kConfigError);
  EXPECT_EQ(run("simulate --scheme rk4 --out " + d.string()), kConfigError);
  EXPECT_EQ(run("frobnicate"), kConfigError);
  write(d / "tight.toml", "[tolerances]\nsymplectic = 1e-12\n");
  EXPECT_EQ(run("simulate --config " + (d / "tight.toml").string() + " --out " + d.string()), kCheckFailure);
  write(d / "blow.toml",
        "[model]\nname = \"damped_contact\"\nU = [0, 0, 0, 0, -1]\nz0 = [3, 3, 0]\n[run]\nt_final = 5\n");
  EXPECT_EQ(run("simulate --config " + (d / "blow.toml").string() + " --out " + d.string()), kBlowUp);
}

TEST(Cli, PrintConfigEchoesOverrides) {
  const fs::path d = scratch("print");
  const std::string cmd = std::string(SGI_TOOL_PATH) + " simulate --dt 0.005 --seed 9 --print-config > " +
                          (d / "out.toml").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const RunConfig c = parse_config(slurp(d / "out.toml"));
  EXPECT_EQ(c.dt, 0.005);
  EXPECT_EQ(c.seed, 9u);
}

TEST(Cli, EnsembleIndependentOfThreadCount) {
  const fs::path a = scratch("ens_a"), b = scratch("ens_b");
  write(a / "c.toml", "[run]\nthreads = 1\nt_final = 0.2\n");
  write(b / "c.toml", "[run]\nthreads = 4\nt_final = 0.2\n");
  EXPECT_EQ(run("ensemble --paths 300 --config " + (a / "c.toml").string() + " --out " + a.string()), kOk);
  EXPECT_EQ(run("ensemble --paths 300 --config " + (b / "c.toml").string() + " --out " + b.string()), kOk);
  EXPECT_EQ(slurp(a / "moments.csv"), slurp(b / "moments.csv"));
  EXPECT_EQ(lines(slurp(a / "moments.csv"))[0],
            "t,energy_mean,energy_var,second_moment_mean,second_moment_var,x_mean,x_var,y_mean,y_var");
}

TEST(Cli, EnsembleOfOneMatchesSimulateStatistics) {
  const fs::path d = scratch("ens_one");
  write(d / "c.toml", "[diagnostics]\nobservables = [\"x\", \"y\"]\n");
  EXPECT_EQ(run("ensemble --paths 1 --config " + (d / "c.toml").string() + " --out " + d.string()), kOk);
  const auto l = lines(slurp(d / "moments.csv"));
  EXPECT_EQ(l[0], "t,x_mean,x_var,y_mean,y_var");
  EXPECT_EQ(l.size(), 1002u);
}

TEST(Cli, ConvergenceReportRoundTrips) {
  const fs::path d = scratch("conv");
  EXPECT_EQ(run("convergence --dt 0.008 --levels 4 --paths 100 --out " + d.string()), kOk);
  const std::string text = slurp(d / "report.json");
  const auto r = report_from_json(text);
  EXPECT_EQ(report_to_json(r) + "\n", text);
  bool strong = false;
  for (const auto& e : r.entries) {
    ASSERT_TRUE(e.order_estimate.has_value());
    if (e.name == "strong") {
      strong = true;
      EXPECT_GT(*e.order_estimate, 0.9);
    }
  }
  EXPECT_TRUE(strong);
  EXPECT_EQ(run("convergence --levels 1 --out " + d.string()), kConfigError);
}

TEST(Cli, BracketCheckPasses) {
  const fs::path d = scratch("bracket");
  EXPECT_EQ(run("bracket-check --out " + d.string()), kOk);
  EXPECT_EQ(report_from_json(slurp(d / "report.json")).entries.size(), 16u);
}

TEST(Cli, HjbWritesGridAndReport) {
  const fs::path d = scratch("hjb");
  write(d / "c.toml",
        "[model]\nname = \"damped_contact\"\n[run]\ndt = 0.002\nt_final = 0.2\n[hj]\nnodes = 101\n");
  EXPECT_EQ(run("hjb --config " + (d / "c.toml").string() + " --out " + d.string() + " --emit-plot-script"), kOk);
  EXPECT_TRUE(fs::exists(d / "hj_grid.csv"));
  EXPECT_TRUE(fs::exists(d / "hj_lift.csv"));
  EXPECT_TRUE(fs::exists(d / "plot_hj_lift.py"));
  EXPECT_EQ(report_from_json(slurp(d / "report.json")).entries.size(), 2u);
  write(d / "cfl.toml", "[model]\nname = \"damped_contact\"\n[run]\ndt = 0.5\nt_final = 1\n[hj]\nnodes = 401\n");
  EXPECT_EQ(run("hjb --config " + (d / "cfl.toml").string() + " --out " + d.string()), kConfigError);
}

TEST(Cli, RigidBodyCasimirHasNoSpread) {
  const fs::path d = scratch("casimir");
  write(d / "c.toml",
        "[model]\nname = \"rigid_body\"\n[run]\nt_final = 0.5\n[diagnostics]\nobservables = [\"casimir\"]\n");
  EXPECT_EQ(run("ensemble --paths 64 --config " + (d / "c.toml").string() + " --out " + d.string()), kOk);
  const auto l = lines(slurp(d / "moments.csv"));
  const std::string last = l.back();
  const double var = std::stod(last.substr(last.rfind(',') + 1));
  EXPECT_LE(var, 1e-8);
}
