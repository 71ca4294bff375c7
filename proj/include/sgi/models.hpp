#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgi/integrator.hpp"
#include "sgi/polynomial.hpp"

namespace sgi {

struct ModelSpec {
  std::string name;
  SdeSystem sys;
  Vec z0;
  std::vector<std::string> coords;
  nlohmann::json params;
  std::map<std::string, ScalarField> observables;
  std::optional<Mat> symplectic_form;  // constant ω when the flow should preserve it
  std::optional<ScalarField> casimir;
};

ModelSpec harmonic_oscillator(double k, double sigma, const Vec& z0 = Vec());

// Closed-form state at the end of `path` (Duhamel formula with cell-averaged kernels).
Vec duhamel_oracle(double k, double sigma, const Vec& z0, const NoisePath& path);
// Oracle on `extra_levels` bridge refinements of `path`: approximates the exact solution
// driven by the underlying Brownian path rather than its conditional mean given the increments.
Vec duhamel_reference(double k, double sigma, const Vec& z0, const NoisePath& path, int extra_levels = 6);

// U is a polynomial on ℝ^n; chart is (x_1..x_n, y_1..y_n, u).
ModelSpec damped_contact(double gamma, double sigma, const Polynomial& U, int n, const Vec& z0 = Vec());

enum class IsokineticVariant { paper_literal, constrained };

IsokineticVariant parse_isokinetic_variant(const std::string& s);

// U on ℝ^n, noise columns σ_k as the columns of sigma_cols (n × r); chart (q, p).
ModelSpec isokinetic(const Polynomial& U, const Mat& sigma_cols, double c, IsokineticVariant variant,
                     const Vec& z0 = Vec());

// α(p) = f·p/|p|² with f = −∇U.
double isokinetic_alpha(const Polynomial& U, const Vec& z);

// Conformal potential σ = U/(2c) lifted to the (q, p) chart.
Polynomial isokinetic_sigma(const Polynomial& U, double c);

ModelSpec rigid_body_so3(const Vec& inertia, const std::vector<ScalarField>& noise_h,
                         const Vec& z0 = Vec());

// Univariate coefficient list applied to every coordinate: Σ_i Σ_j c_j x_i^j on ℝ^n.
Polynomial separable_potential(int n, const std::vector<double>& coefs);

// Build by name from a JSON parameter object; unknown keys are rejected.
ModelSpec build_model(const std::string& name, const nlohmann::json& params);
std::vector<std::string> model_names();

}  // namespace sgi
