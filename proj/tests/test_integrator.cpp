#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "sgi/integrator.hpp"
#include "sgi/models.hpp"
#include "sgi/polynomial.hpp"

using namespace sgi;

namespace {

Polynomial coord(int m, int i) { return Polynomial::coordinate(m, i); }

// Poisson system on ℝ² with constant Λ and custom Hamiltonians.
SdeSystem planar(std::vector<ScalarField> hs) {
  SdeSystem s;
  s.structure = canonical_symplectic(1);
  s.hamiltonians.h = std::move(hs);
  return s;
}

// Structure whose Hamiltonian field of h is exactly the given linear map
// of z, for testing tangent flow against a matrix exponential.
SdeSystem linear_drift(const Mat& A) {
  SdeSystem s;
  s.structure.dim = static_cast<int>(A.rows());
  s.structure.kind = StructureKind::poisson_custom;
  s.structure.lambda = [m = A.rows()](const Vec&) { return Mat(Mat::Zero(m, m)); };
  VectorField e;
  e.eval = [A](const Vec& z) { return Vec(A * z); };
  e.analytic_jacobian = [A](const Vec&) { return A; };
  s.structure.e_field = e;
  s.hamiltonians.h = {constant_field(1.0)};
  return s;
}

}  // namespace

TEST(Fields, HarmonicOscillatorAtPoint) {
  const ModelSpec m = harmonic_oscillator(4.0, 0.5);
  const auto V = drift_diffusion_fields(m.sys, Vec{{1.0, 2.0}});
  EXPECT_EQ(V[0], Vec(Vec{{2.0, -4.0}}));
  EXPECT_EQ(V[1], Vec(Vec{{0.0, 0.5}}));
}

TEST(Fields, ZeroHamiltonians) {
  const auto V = drift_diffusion_fields(planar({constant_field(0.0), constant_field(0.0)}), Vec{{1.0, 2.0}});
  for (const auto& v : V) EXPECT_EQ(v, Vec::Zero(2));
}

TEST(Fields, DampedContactDrift) {
  const ModelSpec m = damped_contact(1.0, 0.3, Polynomial::univariate(1, 0, {0, 0, 0.5}), 1);
  EXPECT_EQ(drift_diffusion_fields(m.sys, Vec{{0.0, 1.0, 0.0}})[0], Vec(Vec{{1.0, -1.0, 0.5}}));
}

TEST(HeunStep, NoFieldsIsIdentity) {
  const SdeSystem s = planar({constant_field(0.0), constant_field(0.0)});
  const Vec z{{0.3, -0.4}};
  EXPECT_EQ(heun_step(s, z, 0.1, Vec::Constant(1, 0.2)), z);
}

TEST(HeunStep, DeterministicPeriod) {
  const ModelSpec m = harmonic_oscillator(1.0, 0.0);
  const double T = 2.0 * std::numbers::pi;
  const NoisePath p = sample_brownian(1, grid_for_step(0.0, T, 1e-3), 1);
  const Trajectory tr = integrate(m.sys, m.z0, p);
  EXPECT_LE((tr.final_state() - m.z0).cwiseAbs().maxCoeff(), 5e-3);
}

TEST(HeunStep, AdditiveNoiseMatchesEulerPerStep) {
  const ModelSpec m = harmonic_oscillator(1.0, 0.5);
  const double dt = 1e-3;
  const Vec z{{0.4, 0.9}};
  const Vec dB = Vec::Constant(1, 0.03);
  const Vec em = z + drift_diffusion_fields(m.sys, z)[0] * dt + drift_diffusion_fields(m.sys, z)[1] * dB[0];
  EXPECT_LE((heun_step(m.sys, z, dt, dB) - em).cwiseAbs().maxCoeff(), 10.0 * dt * dt + 1e-3 * dt);
  EXPECT_LE((euler_ito_step(m.sys, z, dt, dB) - em).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(HeunStep, RejectsWrongNoiseDimension) {
  const ModelSpec m = harmonic_oscillator(1.0, 0.5);
  EXPECT_THROW(heun_step(m.sys, m.z0, 1e-3, Vec::Zero(2)), DimensionError);
}

TEST(ItoCorrection, AdditiveNoiseIsZero) {
  const ModelSpec m = harmonic_oscillator(2.0, 0.7);
  EXPECT_EQ(ito_drift_correction(m.sys, Vec{{0.3, 0.1}}), Vec::Zero(2));
}

TEST(ItoCorrection, ShearFieldIsZero) {
  // V_1 = (0, z_1) comes from h = −½z_1² on the canonical plane.
  const SdeSystem s = planar({constant_field(0.0), (-0.5 * coord(2, 0) * coord(2, 0)).field()});
  const Vec z{{0.7, -0.2}};
  EXPECT_EQ(drift_diffusion_fields(s, z)[1], Vec(Vec{{0.0, 0.7}}));
  EXPECT_EQ(ito_drift_correction(s, z), Vec::Zero(2));
}

TEST(ItoCorrection, HyperbolicField) {
  // V_1 = (z_2, z_1) comes from h = ½(z_2² − z_1²).
  const SdeSystem s = planar({constant_field(0.0), (0.5 * (coord(2, 1) * coord(2, 1) - coord(2, 0) * coord(2, 0))).field()});
  const Vec z{{0.7, -0.2}};
  EXPECT_EQ(drift_diffusion_fields(s, z)[1], Vec(Vec{{-0.2, 0.7}}));
  EXPECT_LE((ito_drift_correction(s, z) - 0.5 * z).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EulerIto, DeterministicPeriodAtFirstOrder) {
  const ModelSpec m = harmonic_oscillator(1.0, 0.0);
  const NoisePath p = sample_brownian(1, grid_for_step(0.0, 2.0 * std::numbers::pi, 1e-4), 1);
  const Trajectory tr = integrate(m.sys, m.z0, p, Scheme::euler_ito);
  EXPECT_LE((tr.final_state() - m.z0).cwiseAbs().maxCoeff(), 5e-3);
}

TEST(EulerIto, AdditiveNoiseAgreesWithHeunAtFirstOrder) {
  const ModelSpec m = harmonic_oscillator(1.0, 0.5);
  NoisePath p = sample_brownian(3, grid_for_step(0.0, 1.0, 1e-2), 1);
  std::vector<double> diffs;
  for (int l = 0; l < 4; ++l) {
    const Vec a = integrate(m.sys, m.z0, p, Scheme::heun).final_state();
    const Vec b = integrate(m.sys, m.z0, p, Scheme::euler_ito).final_state();
    diffs.push_back((a - b).cwiseAbs().maxCoeff());
    p = refine(p);
  }
  for (std::size_t i = 1; i < diffs.size(); ++i) EXPECT_LT(diffs[i], 0.7 * diffs[i - 1]);
}

TEST(TangentStep, ZeroFieldsKeepJacobian) {
  const SdeSystem s = planar({constant_field(0.0), constant_field(0.0)});
  Mat J(2, 2);
  J << 1, 2, 3, 4;
  const auto r = tangent_step(s, Vec{{0.1, 0.2}}, J, 0.1, Vec::Constant(1, 0.3));
  EXPECT_EQ(r.J, J);
}

TEST(TangentStep, LinearFieldMatchesExponential) {
  Mat A(2, 2);
  A << -0.3, 1.0, -0.5, 0.2;
  const SdeSystem s = linear_drift(A);
  NoisePath p = sample_brownian(1, grid_for_step(0.0, 1.0, 1e-2), 0);
  IntegrateOptions o;
  o.tangent = true;
  const Mat E = A.exp();
  const double e1 = (integrate(s, Vec{{1.0, 0.0}}, p, Scheme::heun, o).jacobians.back() - E).cwiseAbs().maxCoeff();
  const double e2 =
      (integrate(s, Vec{{1.0, 0.0}}, refine(p), Scheme::heun, o).jacobians.back() - E).cwiseAbs().maxCoeff();
  EXPECT_LE(e1, 1e-4);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
}

TEST(TangentStep, OscillatorUnitDeterminant) {
  const ModelSpec m = harmonic_oscillator(1.0, 0.0);
  IntegrateOptions o;
  o.tangent = true;
  const Trajectory tr = integrate(m.sys, m.z0, sample_brownian(1, grid_for_step(0.0, 1.0, 1e-4), 1), Scheme::heun, o);
  EXPECT_LE(std::abs(tr.jacobians.back().determinant() - 1.0), 1e-6);
}

TEST(TangentStep, JacobianMatchesFiniteDifferenceOfFlow) {
  const ModelSpec m = damped_contact(0.5, 0.3, Polynomial::univariate(1, 0, {0, 0, 0.5, 0.1}), 1);
  const NoisePath p = sample_brownian(4, grid_for_step(0.0, 0.5, 1e-2), 1);
  IntegrateOptions o;
  o.tangent = true;
  const Mat J = integrate(m.sys, m.z0, p, Scheme::heun, o).jacobians.back();
  const Mat F = fd_jacobian([&](const Vec& z) { return integrate(m.sys, z, p).final_state(); }, m.z0);
  EXPECT_LE((J - F).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(TangentStep, RestartComposesJacobians) {
  const ModelSpec m = damped_contact(0.5, 0.3, Polynomial::univariate(1, 0, {0, 0, 0.5}), 1);
  const NoisePath p = sample_brownian(5, make_grid(0.0, 1.0, 200), 1);
  IntegrateOptions o;
  o.tangent = true;
  const Trajectory full = integrate(m.sys, m.z0, p, Scheme::heun, o);
  NoisePath a = p, b = p;
  a.grid = make_grid(0.0, 0.5, 100);
  a.increments = p.increments.leftCols(100);
  b.grid = make_grid(0.5, 1.0, 100);
  b.increments = p.increments.rightCols(100);
  const Trajectory ta = integrate(m.sys, m.z0, a, Scheme::heun, o);
  const Trajectory tb = integrate(m.sys, ta.final_state(), b, Scheme::heun, o);
  EXPECT_LE((tb.jacobians.back() * ta.jacobians.back() - full.jacobians.back()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Integrate, SinglePointTrajectoryInvariants) {
  const ModelSpec m = damped_contact(0.5, 0.2, Polynomial::univariate(1, 0, {0, 0, 0.5}), 1);
  IntegrateOptions o;
  o.tangent = true;
  o.conformal = true;
  const Trajectory tr = integrate(m.sys, m.z0, sample_brownian(1, make_grid(0.0, 0.1, 10), 1), Scheme::heun, o);
  EXPECT_EQ(tr.jacobians[0], Mat::Identity(3, 3));
  EXPECT_EQ(tr.log_conformal[0], 0.0);
  EXPECT_EQ(tr.states[0], m.z0);
}

TEST(Integrate, ConformalAccumulatorIsLinear) {
  const ModelSpec m = damped_contact(0.7, 0.3, Polynomial::univariate(1, 0, {0, 0, 0.5}), 1);
  IntegrateOptions o;
  o.conformal = true;
  const Trajectory tr = integrate(m.sys, m.z0, sample_brownian(8, grid_for_step(0.0, 1.0, 1e-3), 1), Scheme::heun, o);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_NEAR(tr.log_conformal[i], -0.7 * tr.times[i], 1e-12);
}

TEST(Integrate, ConformalNeedsContactData) {
  const ModelSpec m = harmonic_oscillator(1.0, 0.5);
  IntegrateOptions o;
  o.conformal = true;
  EXPECT_THROW(integrate(m.sys, m.z0, sample_brownian(1, make_grid(0, 1, 10), 1), Scheme::heun, o), Error);
}

TEST(Integrate, BlowUpRecordsIndex) {
  // ż = z² from the field of h = z_1²·z_2/... use a custom E.
  SdeSystem s;
  s.structure.dim = 1;
  s.structure.kind = StructureKind::poisson_custom;
  s.structure.lambda = [](const Vec&) { return Mat(Mat::Zero(1, 1)); };
  s.structure.e_field.eval = [](const Vec& z) { return Vec(z.array().square()); };
  s.hamiltonians.h = {constant_field(1.0)};
  const Trajectory tr = integrate(s, Vec::Constant(1, 1.0), sample_brownian(1, make_grid(0.0, 2.0, 200), 0));
  ASSERT_TRUE(tr.blown_up.has_value());
  EXPECT_LT(*tr.blown_up, 200);
  EXPECT_EQ(static_cast<int>(tr.size()), *tr.blown_up);
}

TEST(FDecomposition, ConstantIsExactOnSymplectic) {
  const ModelSpec m = harmonic_oscillator(1.0, 0.5);
  const NoisePath p = sample_brownian(2, grid_for_step(0.0, 1.0, 1e-2), 1);
  EXPECT_EQ(f_along_path_residual(m.sys, constant_field(3.0), integrate(m.sys, m.z0, p), p), 0.0);
}

TEST(FDecomposition, CoordinateResidualIsFirstOrder) {
  const ModelSpec m = harmonic_oscillator(1.0, 0.5);
  NoisePath p = sample_brownian(2, grid_for_step(0.0, 1.0, 1e-2), 1);
  const auto f = coord(2, 0).field();
  const double r1 = f_along_path_residual(m.sys, f, integrate(m.sys, m.z0, p), p);
  p = refine(refine(p));
  const double r2 = f_along_path_residual(m.sys, f, integrate(m.sys, m.z0, p), p);
  EXPECT_LE(r1, 1e-2);
  EXPECT_GT(std::log2(r1 / r2) / 2.0, 0.8);
}

TEST(FDecomposition, CasimirIntegrandVanishes) {
  const ModelSpec m = build_model("rigid_body", nlohmann::json::object());
  const NoisePath p = sample_brownian(2, grid_for_step(0.0, 1.0, 1e-3), m.sys.noise_dim());
  const Trajectory tr = integrate(m.sys, m.z0, p);
  const double drift = std::abs((*m.casimir)(tr.final_state()) - (*m.casimir)(m.z0));
  EXPECT_NEAR(f_along_path_residual(m.sys, *m.casimir, tr, p), drift, 1e-13);
}

TEST(TrajectoryCsv, HeaderAndColumns) {
  const ModelSpec m = damped_contact(0.5, 0.2, Polynomial::univariate(1, 0, {0, 0, 0.5}), 1);
  IntegrateOptions o;
  o.tangent = true;
  o.conformal = true;
  const Trajectory tr = integrate(m.sys, m.z0, sample_brownian(1, make_grid(0.0, 0.1, 2), 1), Scheme::heun, o);
  std::ostringstream os;
  write_trajectory_csv(os, tr, m.coords, true, true);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,x,y,u,lambda,det_J");
}

TEST(SchemeNames, RoundTrip) {
  EXPECT_EQ(parse_scheme("euler-ito"), Scheme::euler_ito);
  EXPECT_EQ(to_string(parse_scheme("heun")), "heun");
  EXPECT_THROW(parse_scheme("rk4"), Error);
}
