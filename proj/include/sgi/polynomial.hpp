#pragma once

#include <vector>

#include "sgi/differentiation.hpp"

namespace sgi {

// Multivariate polynomial in dim variables: sum of coef * prod z_i^e_i.
class Polynomial {
 public:
  struct Term {
    double coef;
    std::vector<int> exps;
  };

  explicit Polynomial(int dim = 0) : dim_(dim) {}

  static Polynomial constant(int dim, double c);
  static Polynomial coordinate(int dim, int i);
  // Univariate c_0 + c_1 x + c_2 x^2 + ... in coordinate i of a dim-chart.
  static Polynomial univariate(int dim, int i, const std::vector<double>& coefs);

  Polynomial& add_term(double coef, std::vector<int> exps);

  int dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  int degree() const;

  double operator()(const Vec& z) const;
  Polynomial derivative(int i) const;
  Vec gradient(const Vec& z) const;
  Mat hessian(const Vec& z) const;

  // Re-embed into a larger chart; variable i goes to slot map[i].
  Polynomial embed(int new_dim, const std::vector<int>& map) const;

  ScalarField field() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  friend Polynomial operator*(double s, const Polynomial& p) { return p * s; }

 private:
  void simplify();

  int dim_;
  std::vector<Term> terms_;
};

}  // namespace sgi
