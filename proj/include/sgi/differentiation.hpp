#pragma once

#include <functional>

#include "sgi/types.hpp"

namespace sgi {

struct ScalarField {
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> analytic_gradient;
  std::function<Mat(const Vec&)> analytic_hessian;

  double operator()(const Vec& z) const { return eval(z); }
};

struct VectorField {
  std::function<Vec(const Vec&)> eval;
  std::function<Mat(const Vec&)> analytic_jacobian;

  Vec operator()(const Vec& z) const { return eval(z); }
};

// Central-difference step for coordinate x: cbrt(eps) * max(1, |x|).
double fd_step(double x);

Vec gradient(const ScalarField& f, const Vec& z);
Mat hessian(const ScalarField& f, const Vec& z);
Mat jacobian(const VectorField& v, const Vec& z);

// Finite-difference paths, regardless of analytic oracles.
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z);
Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& z);
Mat fd_jacobian(const std::function<Vec(const Vec&)>& v, const Vec& z);

ScalarField constant_field(double c);
ScalarField coordinate_field(int i);
VectorField zero_vector_field(int m);
VectorField constant_vector_field(const Vec& v);

// Gradient field of f as a VectorField (Jacobian = Hessian of f).
VectorField gradient_field(const ScalarField& f);

}  // namespace sgi
