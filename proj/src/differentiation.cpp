#include "sgi/differentiation.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sgi {

namespace {

const double kCbrtEps = std::cbrt(std::numeric_limits<double>::epsilon());
const double kQuartEps = std::sqrt(std::sqrt(std::numeric_limits<double>::epsilon()));

double checked(double v, int coord) {
  if (!std::isfinite(v)) {
    throw EvaluationError("non-finite function value in stencil along coordinate " +
                          std::to_string(coord));
  }
  return v;
}

void check_vec(const Vec& v, int coord) {
  if (!v.allFinite()) {
    throw EvaluationError("non-finite field value in stencil along coordinate " +
                          std::to_string(coord));
  }
}

}  // namespace

double fd_step(double x) { return kCbrtEps * std::max(1.0, std::abs(x)); }

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z) {
  const auto m = z.size();
  Vec g(m);
  Vec zp = z;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double h = fd_step(z[i]);
    zp[i] = z[i] + h;
    const double fp = checked(f(zp), static_cast<int>(i));
    zp[i] = z[i] - h;
    const double fm = checked(f(zp), static_cast<int>(i));
    zp[i] = z[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& z) {
  // Second differences need a larger step than first differences.
  const auto m = z.size();
  Mat H(m, m);
  Vec w = z;
  const double f0 = checked(f(z), 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double hi = kQuartEps * std::max(1.0, std::abs(z[i]));
    w[i] = z[i] + hi;
    const double fp = checked(f(w), static_cast<int>(i));
    w[i] = z[i] - hi;
    const double fm = checked(f(w), static_cast<int>(i));
    w[i] = z[i];
    H(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double hj = kQuartEps * std::max(1.0, std::abs(z[j]));
      double s = 0.0;
      for (int a : {1, -1}) {
        for (int b : {1, -1}) {
          w[i] = z[i] + a * hi;
          w[j] = z[j] + b * hj;
          s += a * b * checked(f(w), static_cast<int>(i == j ? i : j));
        }
      }
      w[i] = z[i];
      w[j] = z[j];
      H(i, j) = H(j, i) = s / (4.0 * hi * hj);
    }
  }
  return H;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& v, const Vec& z) {
  const auto m = z.size();
  Vec zp = z;
  Mat J;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double h = fd_step(z[i]);
    zp[i] = z[i] + h;
    Vec vp = v(zp);
    check_vec(vp, static_cast<int>(i));
    zp[i] = z[i] - h;
    Vec vm = v(zp);
    check_vec(vm, static_cast<int>(i));
    zp[i] = z[i];
    if (i == 0) J.resize(vp.size(), m);
    J.col(i) = (vp - vm) / (2.0 * h);
  }
  return J;
}

Vec gradient(const ScalarField& f, const Vec& z) {
  if (f.analytic_gradient) return f.analytic_gradient(z);
  return fd_gradient(f.eval, z);
}

Mat hessian(const ScalarField& f, const Vec& z) {
  Mat H = f.analytic_hessian ? f.analytic_hessian(z) : fd_hessian(f.eval, z);
  Mat S = 0.5 * (H + H.transpose());
  return S;
}

Mat jacobian(const VectorField& v, const Vec& z) {
  if (v.analytic_jacobian) return v.analytic_jacobian(z);
  return fd_jacobian(v.eval, z);
}

ScalarField constant_field(double c) {
  return {[c](const Vec&) { return c; }, [](const Vec& z) { return Vec(Vec::Zero(z.size())); },
          [](const Vec& z) { return Mat(Mat::Zero(z.size(), z.size())); }};
}

ScalarField coordinate_field(int i) {
  return {[i](const Vec& z) { return z[i]; },
          [i](const Vec& z) {
            Vec g = Vec::Zero(z.size());
            g[i] = 1.0;
            return g;
          },
          [](const Vec& z) { return Mat(Mat::Zero(z.size(), z.size())); }};
}

VectorField zero_vector_field(int m) {
  return {[m](const Vec&) { return Vec(Vec::Zero(m)); },
          [m](const Vec& z) { return Mat(Mat::Zero(m, z.size())); }};
}

VectorField constant_vector_field(const Vec& v) {
  return {[v](const Vec&) { return v; },
          [v](const Vec& z) { return Mat(Mat::Zero(v.size(), z.size())); }};
}

VectorField gradient_field(const ScalarField& f) {
  return {[f](const Vec& z) { return gradient(f, z); }, [f](const Vec& z) { return hessian(f, z); }};
}

}  // namespace sgi
