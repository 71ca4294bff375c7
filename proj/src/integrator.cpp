#include "sgi/integrator.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace sgi {

Scheme parse_scheme(const std::string& s) {
  if (s == "heun") return Scheme::heun;
  if (s == "euler-ito") return Scheme::euler_ito;
  throw Error("unknown scheme '" + s + "' (expected heun or euler-ito)");
}

std::string to_string(Scheme s) { return s == Scheme::heun ? "heun" : "euler-ito"; }

std::vector<Vec> drift_diffusion_fields(const SdeSystem& sys, const Vec& z) {
  std::vector<Vec> out;
  out.reserve(sys.hamiltonians.h.size());
  for (const auto& h : sys.hamiltonians.h) out.push_back(hamiltonian_vector_field(sys.structure, h, z));
  return out;
}

std::vector<Mat> drift_diffusion_jacobians(const SdeSystem& sys, const Vec& z) {
  std::vector<Mat> out;
  out.reserve(sys.hamiltonians.h.size());
  for (const auto& h : sys.hamiltonians.h)
    out.push_back(hamiltonian_vector_field_jacobian(sys.structure, h, z));
  return out;
}

Vec ito_drift_correction(const SdeSystem& sys, const Vec& z) {
  Vec c = Vec::Zero(sys.dim());
  const auto& hs = sys.hamiltonians.h;
  for (std::size_t k = 1; k < hs.size(); ++k) {
    const Vec V = hamiltonian_vector_field(sys.structure, hs[k], z);
    c.noalias() += hamiltonian_vector_field_jacobian(sys.structure, hs[k], z) * V;
  }
  return 0.5 * c;
}

namespace {

void check_noise(const SdeSystem& sys, const Vec& dB) {
  if (dB.size() != sys.noise_dim()) {
    throw DimensionError("increment vector has " + std::to_string(dB.size()) +
                         " components, system has " + std::to_string(sys.noise_dim()));
  }
}

double weight(int k, double dt, const Vec& dB) { return k == 0 ? dt : dB[k - 1]; }

Vec combine(const std::vector<Vec>& V, double dt, const Vec& dB) {
  Vec s = V[0] * dt;
  for (std::size_t k = 1; k < V.size(); ++k) s.noalias() += V[k] * dB[k - 1];
  return s;
}

Mat combine(const std::vector<Mat>& D, double dt, const Vec& dB) {
  Mat s = D[0] * dt;
  for (std::size_t k = 1; k < D.size(); ++k) s.noalias() += D[k] * dB[k - 1];
  return s;
}

}  // namespace

Vec heun_step(const SdeSystem& sys, const Vec& z, double dt, const Vec& dB) {
  check_noise(sys, dB);
  const Vec a = combine(drift_diffusion_fields(sys, z), dt, dB);
  const Vec zs = z + a;
  if (!zs.allFinite()) return zs;
  const Vec b = combine(drift_diffusion_fields(sys, zs), dt, dB);
  return z + 0.5 * (a + b);
}

Vec euler_ito_step(const SdeSystem& sys, const Vec& z, double dt, const Vec& dB) {
  check_noise(sys, dB);
  const auto V = drift_diffusion_fields(sys, z);
  return z + combine(V, dt, dB) + ito_drift_correction(sys, z) * dt;
}

TangentState tangent_step(const SdeSystem& sys, const Vec& z, const Mat& J, double dt, const Vec& dB) {
  check_noise(sys, dB);
  const Vec a = combine(drift_diffusion_fields(sys, z), dt, dB);
  const Mat A = combine(drift_diffusion_jacobians(sys, z), dt, dB);
  const Vec zs = z + a;
  const Mat Js = J + A * J;
  if (!zs.allFinite()) return {zs, Js};
  const Vec b = combine(drift_diffusion_fields(sys, zs), dt, dB);
  const Mat B = combine(drift_diffusion_jacobians(sys, zs), dt, dB);
  return {z + 0.5 * (a + b), J + 0.5 * (A * J + B * Js)};
}

namespace {

TangentState euler_ito_tangent_step(const SdeSystem& sys, const Vec& z, const Mat& J, double dt,
                                    const Vec& dB) {
  Mat A = combine(drift_diffusion_jacobians(sys, z), dt, dB);
  A += fd_jacobian([&](const Vec& w) { return ito_drift_correction(sys, w); }, z) * dt;
  return {euler_ito_step(sys, z, dt, dB), J + A * J};
}

double reeb_rate(const SdeSystem& sys, int k, const Vec& z) {
  return gradient(sys.hamiltonians.h[k], z).dot(sys.contact->reeb(z));
}

bool blown(const Vec& z, double threshold) {
  return !z.allFinite() || z.cwiseAbs().maxCoeff() > threshold;
}

}  // namespace

Trajectory integrate(const SdeSystem& sys, const Vec& z0, const NoisePath& path, Scheme scheme,
                     const IntegrateOptions& opts) {
  if (z0.size() != sys.dim()) throw DimensionError("initial point has wrong dimension");
  if (!z0.allFinite()) throw Error("initial point is not finite");
  if (path.r != sys.noise_dim()) {
    throw DimensionError("noise path has " + std::to_string(path.r) + " components, system needs " +
                         std::to_string(sys.noise_dim()));
  }
  if (opts.conformal && !sys.contact) throw Error("conformal factor requested without contact data");

  const int N = path.grid.steps;
  const double dt = path.grid.dt();
  Trajectory tr;
  tr.times.reserve(N + 1);
  tr.states.reserve(N + 1);
  tr.times.push_back(path.grid.t0);
  tr.states.push_back(z0);
  if (opts.tangent) tr.jacobians.push_back(Mat::Identity(sys.dim(), sys.dim()));
  if (opts.conformal) tr.log_conformal.push_back(0.0);

  Vec z = z0;
  Mat J;
  if (opts.tangent) J = Mat::Identity(sys.dim(), sys.dim());
  const int r = sys.noise_dim();
  for (int n = 0; n < N; ++n) {
    const Vec dB = path.step_increments(n);
    Vec zn;
    if (opts.tangent) {
      auto ts = scheme == Scheme::heun ? tangent_step(sys, z, J, dt, dB)
                                       : euler_ito_tangent_step(sys, z, J, dt, dB);
      zn = std::move(ts.z);
      J = std::move(ts.J);
    } else {
      zn = scheme == Scheme::heun ? heun_step(sys, z, dt, dB) : euler_ito_step(sys, z, dt, dB);
    }
    if (blown(zn, opts.blowup_threshold) || (opts.tangent && !J.allFinite())) {
      tr.blown_up = n + 1;
      break;
    }
    if (opts.conformal) {
      double dL = 0.0;
      for (int k = 0; k <= r; ++k) {
        dL -= 0.5 * (reeb_rate(sys, k, z) + reeb_rate(sys, k, zn)) * weight(k, dt, dB);
      }
      tr.log_conformal.push_back(tr.log_conformal.back() + dL);
    }
    z = std::move(zn);
    tr.times.push_back(path.grid.time(n + 1));
    tr.states.push_back(z);
    if (opts.tangent) tr.jacobians.push_back(J);
  }
  return tr;
}

double f_along_path_residual(const SdeSystem& sys, const ScalarField& f, const Trajectory& traj,
                             const NoisePath& path) {
  const int steps = static_cast<int>(traj.size()) - 1;
  if (steps > path.grid.steps) throw Error("trajectory is longer than the noise path");
  const int r = sys.noise_dim();
  const auto& hs = sys.hamiltonians.h;
  auto integrand = [&](int k, const Vec& z) {
    const Vec e = sys.structure.e_field(z);
    return jacobi_bracket(sys.structure, hs[k], f, z) + f(z) * e.dot(gradient(hs[k], z));
  };
  const double dt = path.grid.dt();
  double rhs = 0.0;
  std::vector<double> prev(r + 1);
  for (int k = 0; k <= r; ++k) prev[k] = integrand(k, traj.states[0]);
  for (int n = 0; n < steps; ++n) {
    const Vec dB = path.step_increments(n);
    for (int k = 0; k <= r; ++k) {
      const double cur = integrand(k, traj.states[n + 1]);
      rhs += 0.5 * (prev[k] + cur) * weight(k, dt, dB);
      prev[k] = cur;
    }
  }
  const double lhs = f(traj.states.back()) - f(traj.states.front());
  return std::abs(lhs - rhs);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& names, bool with_lambda, bool with_det) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << 't';
  for (const auto& n : names) out << ',' << n;
  if (with_lambda) out << ",lambda";
  if (with_det) out << ",det_J";
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << traj.times[i];
    for (Eigen::Index j = 0; j < traj.states[i].size(); ++j) out << ',' << traj.states[i][j];
    if (with_lambda) out << ',' << std::exp(traj.log_conformal.at(i));
    if (with_det) out << ',' << traj.jacobians.at(i).determinant();
    out << '\n';
  }
  os << out.str();
}

}  // namespace sgi
