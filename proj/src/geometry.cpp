#include "sgi/geometry.hpp"

#include <cmath>
#include <memory>

namespace sgi {

std::string to_string(StructureKind k) {
  switch (k) {
    case StructureKind::symplectic: return "symplectic";
    case StructureKind::contact: return "contact";
    case StructureKind::lcs: return "lcs";
    case StructureKind::poisson_custom: return "poisson-custom";
  }
  return "unknown";
}

Mat canonical_omega(int n) {
  Mat W = Mat::Zero(2 * n, 2 * n);
  W.topRightCorner(n, n) = Mat::Identity(n, n);
  W.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return W;
}

JacobiStructure canonical_symplectic(int n) {
  if (n <= 0) throw DimensionError("canonical_symplectic: n must be positive");
  const int m = 2 * n;
  // Λ = Σ ∂q∧∂p has the same block matrix as Σ dq∧dp.
  const Mat L = canonical_omega(n);
  JacobiStructure J;
  J.dim = m;
  J.kind = StructureKind::symplectic;
  J.lambda = [L](const Vec&) { return L; };
  J.e_field = zero_vector_field(m);
  J.lambda_partials = [m](const Vec&) { return std::vector<Mat>(m, Mat::Zero(m, m)); };
  J.chart_meta = ChartLayout{n, false};
  return J;
}

std::pair<JacobiStructure, ContactData> canonical_contact(int n) {
  if (n <= 0) throw DimensionError("canonical_contact: n must be positive");
  const int m = 2 * n + 1;
  const int iu = 2 * n;
  JacobiStructure J;
  J.dim = m;
  J.kind = StructureKind::contact;
  // Λ = Σ (∂q^i + p_i ∂u) ∧ ∂p_i, matrix A·Bᵀ − B·Aᵀ per pair.
  J.lambda = [n, m, iu](const Vec& z) {
    Mat L = Mat::Zero(m, m);
    for (int i = 0; i < n; ++i) {
      const int q = i, p = n + i;
      L(q, p) += 1.0;
      L(p, q) -= 1.0;
      L(iu, p) += z[p];
      L(p, iu) -= z[p];
    }
    return L;
  };
  J.lambda_partials = [n, m, iu](const Vec&) {
    std::vector<Mat> d(m, Mat::Zero(m, m));
    for (int i = 0; i < n; ++i) {
      const int p = n + i;
      d[p](iu, p) = 1.0;
      d[p](p, iu) = -1.0;
    }
    return d;
  };
  Vec e = Vec::Zero(m);
  e[iu] = -1.0;
  J.e_field = constant_vector_field(e);
  J.chart_meta = ChartLayout{n, true};

  ContactData C;
  C.n = n;
  C.eta = [n, m, iu](const Vec& z) {
    Vec eta = Vec::Zero(m);
    for (int i = 0; i < n; ++i) eta[i] = -z[n + i];
    eta[iu] = 1.0;
    return eta;
  };
  C.d_eta = [n, m](const Vec&) {
    Mat D = Mat::Zero(m, m);
    D.topLeftCorner(2 * n, 2 * n) = canonical_omega(n);
    return D;
  };
  Vec r = Vec::Zero(m);
  r[iu] = 1.0;
  C.reeb = constant_vector_field(r);
  return {J, C};
}

namespace {

void check_nondegenerate(const Mat& W) {
  const double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
  const double bound = kDegeneracyTolerance * std::pow(scale, static_cast<double>(W.rows()));
  if (!(std::abs(W.determinant()) > bound)) {
    throw SingularityError("degenerate 2-form: |det| below tolerance");
  }
}

}  // namespace

JacobiStructure lcs_structure(const LcsData& lcs) {
  const int m = 2 * lcs.n;
  JacobiStructure J;
  J.dim = m;
  J.kind = StructureKind::lcs;
  auto omega = lcs.omega_bar;
  auto lee = lcs.lee_form;
  J.lambda = [omega](const Vec& z) {
    const Mat W = omega(z);
    check_nondegenerate(W);
    Mat L = -W.inverse();
    return Mat(0.5 * (L - L.transpose()));
  };
  auto lam = J.lambda;
  J.e_field.eval = [lam, lee](const Vec& z) { return Vec(-lam(z) * lee(z)); };
  J.chart_meta = ChartLayout{lcs.n, false};
  return J;
}

std::pair<JacobiStructure, LcsData> lcs_cotangent(int n, const ScalarField& sigma) {
  if (n <= 0) throw DimensionError("lcs_cotangent: n must be positive");
  const Mat W0 = canonical_omega(n);
  LcsData D;
  D.n = n;
  D.omega_bar = [W0, sigma](const Vec& z) { return Mat(std::exp(sigma(z)) * W0); };
  D.lee_form = [sigma](const Vec& z) { return gradient(sigma, z); };
  D.sigma = sigma;

  const int m = 2 * n;
  JacobiStructure J;
  J.dim = m;
  J.kind = StructureKind::lcs;
  // −(e^{σ}Ω0)⁻¹ = e^{−σ}Ω0 because Ω0⁻¹ = −Ω0.
  J.lambda = [W0, sigma](const Vec& z) { return Mat(std::exp(-sigma(z)) * W0); };
  J.lambda_partials = [W0, sigma, m](const Vec& z) {
    const Vec th = gradient(sigma, z);
    const Mat L = std::exp(-sigma(z)) * W0;
    std::vector<Mat> d(m);
    for (int i = 0; i < m; ++i) d[i] = -th[i] * L;
    return d;
  };
  J.e_field.eval = [W0, sigma](const Vec& z) {
    return Vec(-std::exp(-sigma(z)) * (W0 * gradient(sigma, z)));
  };
  J.e_field.analytic_jacobian = [W0, sigma](const Vec& z) {
    const Vec th = gradient(sigma, z);
    const Mat L = std::exp(-sigma(z)) * W0;
    return Mat(L * th * th.transpose() - L * hessian(sigma, z));
  };
  J.chart_meta = ChartLayout{n, false};
  return {J, D};
}

std::pair<JacobiStructure, LcsData> lcs_theta_cotangent(int n, const ScalarField& sigma) {
  if (n <= 0) throw DimensionError("lcs_theta_cotangent: n must be positive");
  const Mat W0 = canonical_omega(n);
  LcsData D;
  D.n = n;
  D.lee_form = [sigma, n](const Vec& z) {
    Vec th = gradient(sigma, z);
    th.tail(n).setZero();
    return th;
  };
  auto lee = D.lee_form;
  D.omega_bar = [W0, lee, n](const Vec& z) {
    const Vec th = lee(z);
    Vec tq = Vec::Zero(2 * n);
    tq.head(n) = z.tail(n);
    return Mat(W0 + th * tq.transpose() - tq * th.transpose());
  };
  D.sigma = sigma;
  return {lcs_structure(D), D};
}

JacobiStructure lie_poisson_so3() {
  JacobiStructure J;
  J.dim = 3;
  J.kind = StructureKind::poisson_custom;
  J.lambda = [](const Vec& mu) {
    Mat L(3, 3);
    L << 0.0, -mu[2], mu[1], mu[2], 0.0, -mu[0], -mu[1], mu[0], 0.0;
    return L;
  };
  J.lambda_partials = [](const Vec&) {
    std::vector<Mat> d(3, Mat::Zero(3, 3));
    // Λ_ij = −ε_ijk μ_k.
    d[0](1, 2) = -1.0;
    d[0](2, 1) = 1.0;
    d[1](2, 0) = -1.0;
    d[1](0, 2) = 1.0;
    d[2](0, 1) = -1.0;
    d[2](1, 0) = 1.0;
    return d;
  };
  J.e_field = zero_vector_field(3);
  return J;
}

namespace {

void check_dim(const JacobiStructure& J, const Vec& v, const char* what) {
  if (v.size() != J.dim) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(J.dim) +
                         ", got " + std::to_string(v.size()));
  }
}

}  // namespace

Vec lambda_sharp(const JacobiStructure& J, const Vec& alpha, const Vec& z) {
  check_dim(J, alpha, "lambda_sharp covector");
  check_dim(J, z, "lambda_sharp point");
  return J.lambda(z) * alpha;
}

Vec hamiltonian_vector_field(const JacobiStructure& J, const ScalarField& h, const Vec& z) {
  check_dim(J, z, "hamiltonian_vector_field point");
  Vec v = J.lambda(z) * gradient(h, z);
  v.noalias() += h(z) * J.e_field(z);
  return v;
}

VectorField hamiltonian_vector_field(const JacobiStructure& J, const ScalarField& h) {
  VectorField V;
  V.eval = [J, h](const Vec& z) { return hamiltonian_vector_field(J, h, z); };
  V.analytic_jacobian = [J, h](const Vec& z) { return hamiltonian_vector_field_jacobian(J, h, z); };
  return V;
}

Mat hamiltonian_vector_field_jacobian(const JacobiStructure& J, const ScalarField& h, const Vec& z) {
  if (h.analytic_hessian && J.lambda_partials && J.e_field.analytic_jacobian) {
    const Vec g = gradient(h, z);
    const Mat L = J.lambda(z);
    const auto dL = J.lambda_partials(z);
    Mat D = L * h.analytic_hessian(z);
    for (int i = 0; i < J.dim; ++i) D.col(i) += dL[i] * g;
    D.noalias() += J.e_field(z) * g.transpose();
    D.noalias() += h(z) * J.e_field.analytic_jacobian(z);
    return D;
  }
  return fd_jacobian([&](const Vec& w) { return hamiltonian_vector_field(J, h, w); }, z);
}

double jacobi_bracket(const JacobiStructure& J, const ScalarField& f, const ScalarField& g,
                      const Vec& z) {
  check_dim(J, z, "jacobi_bracket point");
  const Vec df = gradient(f, z);
  const Vec dg = gradient(g, z);
  const Vec e = J.e_field(z);
  return dg.dot(J.lambda(z) * df) + f(z) * e.dot(dg) - g(z) * e.dot(df);
}

ScalarField bracket_field(const JacobiStructure& J, const ScalarField& f, const ScalarField& g) {
  ScalarField b;
  b.eval = [J, f, g](const Vec& z) { return jacobi_bracket(J, f, g, z); };
  const bool analytic = f.analytic_hessian && g.analytic_hessian && J.lambda_partials &&
                        J.e_field.analytic_jacobian;
  if (analytic) {
    b.analytic_gradient = [J, f, g](const Vec& z) {
      const Vec df = gradient(f, z), dg = gradient(g, z);
      const Mat Hf = f.analytic_hessian(z), Hg = g.analytic_hessian(z);
      const Mat L = J.lambda(z);
      const auto dL = J.lambda_partials(z);
      const Vec e = J.e_field(z);
      const Mat De = J.e_field.analytic_jacobian(z);
      const double fv = f(z), gv = g(z);
      Vec out = Hg * (L * df) + Hf * (L.transpose() * dg);
      for (int i = 0; i < J.dim; ++i) out[i] += dg.dot(dL[i] * df);
      out += df * e.dot(dg) + fv * (De.transpose() * dg + Hg * e);
      out -= dg * e.dot(df) + gv * (De.transpose() * df + Hf * e);
      return out;
    };
  }
  return b;
}

Mat contact_flat_matrix(const ContactData& C, const Vec& z) {
  const Vec eta = C.eta(z);
  return C.d_eta(z).transpose() + eta * eta.transpose();
}

Vec contact_flat(const ContactData& C, const Vec& v, const Vec& z) {
  return contact_flat_matrix(C, z) * v;
}

Vec contact_sharp(const ContactData& C, const Vec& alpha, const Vec& z) {
  return contact_flat_matrix(C, z).partialPivLu().solve(alpha);
}

ContactIdentityDeviation contact_field_identities(const ContactData& C, const JacobiStructure& J,
                                                  const ScalarField& h, const Vec& z) {
  const Vec V = hamiltonian_vector_field(J, h, z);
  const Vec eta = C.eta(z);
  const Vec dh = gradient(h, z);
  const double hv = h(z);
  const double Rh = dh.dot(C.reeb(z));
  ContactIdentityDeviation d;
  d.eta_of_field = std::abs(eta.dot(V) + hv);
  d.flat_identity = (contact_flat(C, V, z) - dh + (Rh + hv) * eta).cwiseAbs().maxCoeff();
  return d;
}

double first_integral_commutation_check(const JacobiStructure& J, const std::vector<ScalarField>& fs,
                                        const std::vector<Vec>& points) {
  if (fs.size() < 2) throw DimensionError("first_integral_commutation_check needs at least two functions");
  double worst = 0.0;
  for (const auto& z : points) {
    const Vec e = J.e_field(z);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (std::size_t j = i + 1; j < fs.size(); ++j) {
        const double Efj = e.dot(gradient(fs[j], z));
        const double Efi = e.dot(gradient(fs[i], z));
        const double r = jacobi_bracket(J, fs[i], fs[j], z) - fs[i](z) * Efj + fs[j](z) * Efi;
        worst = std::max(worst, std::abs(r));
      }
    }
  }
  return worst;
}

Vec lcs_flat(const LcsData& lcs, const Vec& v, const Vec& z) { return -lcs.omega_bar(z) * v; }

}  // namespace sgi
