#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"
#include "sgi/diagnostics.hpp"
#include "sgi/models.hpp"

namespace sgi::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kBlowUp = 3, kCheckFailure = 4 };

// Structure checks a model supports when none are configured.
std::vector<std::string> default_checks(const ModelSpec& model);
// Default tolerance C·dt for a check at step size dt.
double default_tolerance(const std::string& check, double dt);
double evaluate_check(const std::string& check, const ModelSpec& model, const Trajectory& traj,
                      const NoisePath& path);

int cmd_simulate(const RunConfig& cfg);
int cmd_ensemble(const RunConfig& cfg);
int cmd_convergence(const RunConfig& cfg);
int cmd_hjb(const RunConfig& cfg);
int cmd_bracket_check(const RunConfig& cfg);

// Full command line entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace sgi::cli
