#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sgi/integrator.hpp"
#include "sgi/polynomial.hpp"

namespace sgi {

struct DiagnosticEntry {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::optional<double> order_estimate;
};

struct DiagnosticsReport {
  std::string model;
  std::string scheme;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<DiagnosticEntry> entries;

  bool all_pass() const;
};

double symplectic_pullback_deviation(const Trajectory& traj, const Mat& omega);
std::vector<double> conformal_factor(const Trajectory& traj);
double contact_pullback_deviation(const Trajectory& traj, const ContactData& contact);
double contact_volume_deviation(const Trajectory& traj, int n);
double lcs_pullback_deviation(const Trajectory& traj, const LcsData& lcs);
double casimir_drift(const Trajectory& traj, const ScalarField& C);

// log2(coarse / fine).
double order_from_pair(double coarse, double fine);
// Least-squares slope of −log2(dev) against refinement level (coarse first).
double order_from_levels(const std::vector<double>& devs);

DiagnosticEntry make_entry(std::string name, double deviation, double tolerance,
                           std::optional<double> order = std::nullopt);
// Entry from a deviation sequence over a dyadic chain; deviation is the finest one
// unless `at` selects a level.
DiagnosticEntry make_entry_from_chain(std::string name, const std::vector<double>& devs,
                                      double tolerance, std::optional<std::size_t> at = std::nullopt);
DiagnosticsReport assemble_report(std::string model, std::string scheme, double dt, std::uint64_t seed,
                                  std::vector<DiagnosticEntry> entries);

std::string report_to_json(const DiagnosticsReport& report, int indent = 2);
DiagnosticsReport report_from_json(const std::string& text);

// Random polynomial with coefficients in [−1,1] and total degree ≤ degree.
Polynomial random_polynomial(int dim, int degree, std::mt19937_64& rng, int max_terms = 6);

struct BracketSuiteResult {
  double antisymmetry = 0.0;
  double jacobi = 0.0;
  double weak_leibniz = 0.0;
  double unit_field = 0.0;  // ‖V_1 − E‖_∞
};

// Identities of the Jacobi bracket at random points in [−box, box]^m.
BracketSuiteResult bracket_identity_suite(const JacobiStructure& J, int points, std::uint64_t seed,
                                          double box = 1.0);

}  // namespace sgi
