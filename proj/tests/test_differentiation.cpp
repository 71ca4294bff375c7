#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "sgi/diagnostics.hpp"
#include "sgi/differentiation.hpp"
#include "sgi/polynomial.hpp"

using namespace sgi;

namespace {

ScalarField fd_only(const ScalarField& f) { return ScalarField{f.eval, nullptr, nullptr}; }

}  // namespace

TEST(Gradient, SquareAtThree) {
  const auto f = Polynomial::univariate(1, 0, {0, 0, 1}).field();
  EXPECT_DOUBLE_EQ(gradient(f, Vec::Constant(1, 3.0))[0], 6.0);
  EXPECT_NEAR(gradient(fd_only(f), Vec::Constant(1, 3.0))[0], 6.0, 1e-8);
}

TEST(Gradient, ConstantIsZero) {
  const Vec g = gradient(fd_only(constant_field(4.2)), Vec{{0.3, -1.0}});
  EXPECT_EQ(g, Vec::Zero(2));
}

TEST(Gradient, ProductFiniteDifference) {
  ScalarField f{[](const Vec& z) { return z[0] * z[1]; }};
  const Vec g = gradient(f, Vec{{2.0, 5.0}});
  EXPECT_NEAR(g[0], 5.0, 1e-6);
  EXPECT_NEAR(g[1], 2.0, 1e-6);
}

TEST(Gradient, NonFiniteStencilNamesCoordinate) {
  ScalarField f{[](const Vec& z) { return z[1] > 1.0 ? std::numeric_limits<double>::infinity() : z[0]; }};
  try {
    gradient(f, Vec{{0.0, 0.999999}});
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("coordinate 1"), std::string::npos);
  }
}

TEST(Jacobian, LinearFieldAnalytic) {
  Mat A(2, 2);
  A << 1, 2, 3, 4;
  VectorField V{[A](const Vec& z) { return Vec(A * z); }, [A](const Vec&) { return A; }};
  EXPECT_EQ(jacobian(V, Vec{{0.5, 0.1}}), A);
}

TEST(Jacobian, ConstantFieldIsZero) {
  EXPECT_EQ(jacobian(VectorField{constant_vector_field(Vec{{1.0, 2.0}}).eval}, Vec{{3.0, 4.0}}), Mat::Zero(2, 2));
}

TEST(Jacobian, OscillatorFiniteDifference) {
  VectorField V{[](const Vec& z) { return Vec{{z[1], -4.0 * z[0]}}; }};
  const Mat J = jacobian(V, Vec{{0.7, -0.2}});
  EXPECT_NEAR(J(0, 0), 0.0, 1e-6);
  EXPECT_NEAR(J(0, 1), 1.0, 1e-6);
  EXPECT_NEAR(J(1, 0), -4.0, 1e-6);
  EXPECT_NEAR(J(1, 1), 0.0, 1e-6);
}

TEST(Hessian, CubeFiniteDifference) {
  ScalarField f{[](const Vec& z) { return z[0] * z[0] * z[0]; }};
  EXPECT_NEAR(hessian(f, Vec::Constant(1, 2.0))(0, 0), 12.0, 1e-4);
}

TEST(Hessian, LinearIsZero) {
  ScalarField f{[](const Vec& z) { return 3.0 * z[0] - z[1]; }};
  EXPECT_NEAR(hessian(f, Vec{{1.0, 2.0}}).cwiseAbs().maxCoeff(), 0.0, 1e-4);
}

TEST(Hessian, MixedFiniteDifference) {
  ScalarField f{[](const Vec& z) { return z[0] * z[0] * z[1]; }};
  const Mat H = hessian(f, Vec{{1.0, 1.0}});
  Mat expect(2, 2);
  expect << 2, 2, 2, 0;
  EXPECT_LE((H - expect).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_EQ(H, H.transpose());
}

TEST(DifferentiationProperty, FiniteDifferencesMatchAnalyticOnPolynomials) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 3;
    const Polynomial p = random_polynomial(m, 4, rng);
    const ScalarField f = p.field();
    Vec z(m);
    for (int i = 0; i < m; ++i) z[i] = u(rng);
    const Vec ga = gradient(f, z);
    const Vec gf = gradient(fd_only(f), z);
    EXPECT_LE((ga - gf).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, ga.cwiseAbs().maxCoeff()));
    const Mat Hf = hessian(fd_only(f), z);
    EXPECT_EQ(Hf, Hf.transpose());
    const Mat Jg = jacobian(VectorField{gradient_field(fd_only(f)).eval}, z);
    EXPECT_LE((Jg - hessian(f, z)).cwiseAbs().maxCoeff(), 1e-4 * std::max(1.0, Jg.cwiseAbs().maxCoeff()));
  }
}
