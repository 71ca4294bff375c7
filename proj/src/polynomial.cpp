#include "sgi/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace sgi {

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim);
  p.add_term(c, std::vector<int>(dim, 0));
  return p;
}

Polynomial Polynomial::coordinate(int dim, int i) {
  Polynomial p(dim);
  std::vector<int> e(dim, 0);
  e[i] = 1;
  p.add_term(1.0, e);
  return p;
}

Polynomial Polynomial::univariate(int dim, int i, const std::vector<double>& coefs) {
  Polynomial p(dim);
  for (std::size_t k = 0; k < coefs.size(); ++k) {
    std::vector<int> e(dim, 0);
    e[i] = static_cast<int>(k);
    p.add_term(coefs[k], e);
  }
  return p;
}

Polynomial& Polynomial::add_term(double coef, std::vector<int> exps) {
  if (static_cast<int>(exps.size()) != dim_) throw DimensionError("polynomial term has wrong arity");
  terms_.push_back({coef, std::move(exps)});
  simplify();
  return *this;
}

void Polynomial::simplify() {
  std::map<std::vector<int>, double> acc;
  for (const auto& t : terms_) acc[t.exps] += t.coef;
  terms_.clear();
  for (auto& [e, c] : acc) {
    if (c != 0.0) terms_.push_back({c, e});
  }
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exps) s += e;
    d = std::max(d, s);
  }
  return d;
}

double Polynomial::operator()(const Vec& z) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    double v = t.coef;
    for (int i = 0; i < dim_; ++i) {
      for (int k = 0; k < t.exps[i]; ++k) v *= z[i];
    }
    s += v;
  }
  return s;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial d(dim_);
  for (const auto& t : terms_) {
    if (t.exps[i] == 0) continue;
    auto e = t.exps;
    const double c = t.coef * e[i];
    e[i] -= 1;
    d.terms_.push_back({c, e});
  }
  d.simplify();
  return d;
}

Vec Polynomial::gradient(const Vec& z) const {
  Vec g(dim_);
  for (int i = 0; i < dim_; ++i) g[i] = derivative(i)(z);
  return g;
}

Mat Polynomial::hessian(const Vec& z) const {
  Mat H(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    const Polynomial di = derivative(i);
    for (int j = 0; j <= i; ++j) H(i, j) = H(j, i) = di.derivative(j)(z);
  }
  return H;
}

Polynomial Polynomial::embed(int new_dim, const std::vector<int>& map) const {
  Polynomial p(new_dim);
  for (const auto& t : terms_) {
    std::vector<int> e(new_dim, 0);
    for (int i = 0; i < dim_; ++i) e[map[i]] += t.exps[i];
    p.terms_.push_back({t.coef, e});
  }
  p.simplify();
  return p;
}

ScalarField Polynomial::field() const {
  // Derivative polynomials are built once and shared by the closures.
  auto self = std::make_shared<const Polynomial>(*this);
  auto grad = std::make_shared<std::vector<Polynomial>>();
  auto hess = std::make_shared<std::vector<Polynomial>>();
  for (int i = 0; i < dim_; ++i) {
    grad->push_back(derivative(i));
    for (int j = 0; j < dim_; ++j) hess->push_back(grad->back().derivative(j));
  }
  const int m = dim_;
  ScalarField f;
  f.eval = [self](const Vec& z) { return (*self)(z); };
  f.analytic_gradient = [grad, m](const Vec& z) {
    Vec g(m);
    for (int i = 0; i < m; ++i) g[i] = (*grad)[i](z);
    return g;
  };
  f.analytic_hessian = [hess, m](const Vec& z) {
    Mat H(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) H(i, j) = (*hess)[i * m + j](z);
    return H;
  };
  return f;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (o.dim_ != dim_) throw DimensionError("polynomial dimension mismatch");
  Polynomial p(*this);
  p.terms_.insert(p.terms_.end(), o.terms_.begin(), o.terms_.end());
  p.simplify();
  return p;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (o.dim_ != dim_) throw DimensionError("polynomial dimension mismatch");
  Polynomial p(dim_);
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      std::vector<int> e(dim_);
      for (int i = 0; i < dim_; ++i) e[i] = a.exps[i] + b.exps[i];
      p.terms_.push_back({a.coef * b.coef, e});
    }
  }
  p.simplify();
  return p;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial p(*this);
  for (auto& t : p.terms_) t.coef *= s;
  p.simplify();
  return p;
}

}  // namespace sgi
