#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgi/differentiation.hpp"

namespace sgi {

enum class StructureKind { symplectic, contact, lcs, poisson_custom };

std::string to_string(StructureKind k);

// Coordinate roles in a Darboux-type chart: q block, p block, optional u.
struct ChartLayout {
  int n = 0;
  bool has_u = false;
};

// Λ is stored as the matrix of Λ♯, so Λ♯(α) = lambda(z)·α and the
// Hamiltonian vector field is V_h = lambda(z)·dh + h·E.
struct JacobiStructure {
  int dim = 0;
  StructureKind kind = StructureKind::poisson_custom;
  std::function<Mat(const Vec&)> lambda;
  VectorField e_field;
  // Optional ∂Λ/∂z_i, one matrix per coordinate; enables analytic field Jacobians.
  std::function<std::vector<Mat>(const Vec&)> lambda_partials;
  std::optional<ChartLayout> chart_meta;
};

struct ContactData {
  int n = 0;
  std::function<Vec(const Vec&)> eta;
  std::function<Mat(const Vec&)> d_eta;  // matrix of dη, dη(v,w) = vᵀ·D·w
  VectorField reeb;
};

struct LcsData {
  int n = 0;
  std::function<Mat(const Vec&)> omega_bar;  // ω̄(v,w) = vᵀ·W·w
  std::function<Vec(const Vec&)> lee_form;
  std::optional<ScalarField> sigma;
};

inline constexpr double kDegeneracyTolerance = 1e-12;

JacobiStructure canonical_symplectic(int n);
std::pair<JacobiStructure, ContactData> canonical_contact(int n);
// ω̄ = e^{σ}·Ω0 with θ = dσ.
std::pair<JacobiStructure, LcsData> lcs_cotangent(int n, const ScalarField& sigma);
// ω_θ = dq∧dp + θ∧(p·dq) with θ = dσ(q), σ a function of q only.
std::pair<JacobiStructure, LcsData> lcs_theta_cotangent(int n, const ScalarField& sigma);
// Jacobi structure of any L.C.S. data: Λ = −ω̄⁻¹, E = −Λ·θ.
JacobiStructure lcs_structure(const LcsData& lcs);
JacobiStructure lie_poisson_so3();

// Constant canonical matrix of Σ dq^i∧dp_i on ℝ^{2n}.
Mat canonical_omega(int n);

Vec lambda_sharp(const JacobiStructure& J, const Vec& alpha, const Vec& z);
Vec hamiltonian_vector_field(const JacobiStructure& J, const ScalarField& h, const Vec& z);
// D(V_h) at z; analytic when h has a Hessian and J provides ∂Λ and DE.
Mat hamiltonian_vector_field_jacobian(const JacobiStructure& J, const ScalarField& h, const Vec& z);
VectorField hamiltonian_vector_field(const JacobiStructure& J, const ScalarField& h);

// {f,g} = Λ(df,dg) + f·E(g) − g·E(f), with Λ(α,β) = β·(lambda·α).
double jacobi_bracket(const JacobiStructure& J, const ScalarField& f, const ScalarField& g,
                      const Vec& z);
// Bracket as a ScalarField (FD derivatives), for nested identities.
ScalarField bracket_field(const JacobiStructure& J, const ScalarField& f, const ScalarField& g);

// ♭(V) = ι_V dη + η(V)η and its inverse.
Mat contact_flat_matrix(const ContactData& C, const Vec& z);
Vec contact_flat(const ContactData& C, const Vec& v, const Vec& z);
Vec contact_sharp(const ContactData& C, const Vec& alpha, const Vec& z);

struct ContactIdentityDeviation {
  double eta_of_field = 0.0;  // |η(V_h) + h|
  double flat_identity = 0.0;  // ‖♭(V_h) − dh + (R(h)+h)η‖_∞
};
ContactIdentityDeviation contact_field_identities(const ContactData& C, const JacobiStructure& J,
                                                  const ScalarField& h, const Vec& z);

double first_integral_commutation_check(const JacobiStructure& J, const std::vector<ScalarField>& fs,
                                        const std::vector<Vec>& points);

// ι_V ω̄ as a covector: −W·V.
Vec lcs_flat(const LcsData& lcs, const Vec& v, const Vec& z);

}  // namespace sgi
