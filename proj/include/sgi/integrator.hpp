#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sgi/geometry.hpp"
#include "sgi/noise.hpp"

namespace sgi {

// h[0] couples to dt, h[1..r] to the Brownian components.
struct HamiltonianFamily {
  std::vector<ScalarField> h;

  int noise_dim() const { return static_cast<int>(h.size()) - 1; }
};

struct SdeSystem {
  JacobiStructure structure;
  HamiltonianFamily hamiltonians;
  std::optional<ContactData> contact;
  std::optional<LcsData> lcs;

  int dim() const { return structure.dim; }
  int noise_dim() const { return hamiltonians.noise_dim(); }
};

enum class Scheme { heun, euler_ito };

Scheme parse_scheme(const std::string& s);
std::string to_string(Scheme s);

struct IntegrateOptions {
  bool tangent = false;
  bool conformal = false;
  // States with any |component| above this count as blown up.
  double blowup_threshold = 1e12;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Mat> jacobians;
  std::vector<double> log_conformal;
  std::optional<int> blown_up;  // index of the first non-finite state

  std::size_t size() const { return states.size(); }
  const Vec& final_state() const { return states.back(); }
};

std::vector<Vec> drift_diffusion_fields(const SdeSystem& sys, const Vec& z);
std::vector<Mat> drift_diffusion_jacobians(const SdeSystem& sys, const Vec& z);

// ½ Σ_{k≥1} DV_k·V_k.
Vec ito_drift_correction(const SdeSystem& sys, const Vec& z);

Vec heun_step(const SdeSystem& sys, const Vec& z, double dt, const Vec& dB);
Vec euler_ito_step(const SdeSystem& sys, const Vec& z, double dt, const Vec& dB);

struct TangentState {
  Vec z;
  Mat J;
};
TangentState tangent_step(const SdeSystem& sys, const Vec& z, const Mat& J, double dt, const Vec& dB);

Trajectory integrate(const SdeSystem& sys, const Vec& z0, const NoisePath& path,
                     Scheme scheme = Scheme::heun, const IntegrateOptions& opts = {});

// |f(Z_T) − f(Z_0) − Σ_k ∫ ({h_k,f} + f E(h_k)) δX^k| with trapezoid quadrature.
double f_along_path_residual(const SdeSystem& sys, const ScalarField& f, const Trajectory& traj,
                             const NoisePath& path);

// Columns t, names..., optional lambda, optional det_J.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& names, bool with_lambda, bool with_det);

}  // namespace sgi
