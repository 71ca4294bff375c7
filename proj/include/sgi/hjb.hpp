#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "sgi/integrator.hpp"

namespace sgi {

enum class Boundary { periodic, linear_extrapolation };

Boundary parse_boundary(const std::string& s);

// S(q_j, t_n) on a uniform grid; row n is time level n.
struct GridFunction {
  Vec q;
  std::vector<double> times;
  Mat values;
  std::optional<int> blown_up;

  int nodes() const { return static_cast<int>(q.size()); }
  int levels() const { return static_cast<int>(times.size()); }
  double dq() const { return q[1] - q[0]; }
};

// Ŝ(q_i, u_j, t_n); values[n](i, j).
struct GridFunction2D {
  Vec q;
  Vec u;
  std::vector<double> times;
  std::vector<Mat> values;

  double dq() const { return q[1] - q[0]; }
  double du() const { return u[1] - u[0]; }
};

Vec uniform_nodes(double a, double b, int nodes);

struct HjProblem {
  SdeSystem sys;  // contact, n = 1
  ScalarField S0;  // function of q (1-vector)
  Boundary boundary = Boundary::linear_extrapolation;
  double a = -4.0;
  double b = 4.0;
  int nodes = 201;
  double slope_cap = 1e6;
};

// ∂S/∂q at every node: central differences inside; at the ends either
// periodic wrap or linear extrapolation of the slope.
Vec grid_slopes(const Vec& S, double dq, Boundary boundary);

GridFunction solve_contact_hj_grid(const HjProblem& problem, const NoisePath& path);

// (q, ∂S/∂q, S) from cubic interpolation of level t_index.
Vec lift(const GridFunction& S, double q, int t_index);

// Heun step of δq = Σ_k ∂h_k/∂p(j¹S) δX^k; empty when the step leaves the grid.
std::optional<double> projected_sde_step(const GridFunction& S, const SdeSystem& sys, double q,
                                         int t_index, double dt, const Vec& dB);

struct LiftEquivalence {
  double sup_error = 0.0;
  double endpoint_error = 0.0;
  int steps_compared = 0;
  bool truncated = false;
  std::vector<Vec> lifted;
  std::vector<Vec> direct;
};

LiftEquivalence lift_equivalence_error(const HjProblem& problem, const NoisePath& path, double q0);
// Same comparison against an already solved grid.
LiftEquivalence lift_equivalence_error(const GridFunction& S, const SdeSystem& sys, const NoisePath& path,
                                       double q0);

// Per-step residual of the formalism-II equation at step n (levels n, n+1),
// max over interior (q, u) nodes.
double hj2_residual(const GridFunction2D& S_hat, const SdeSystem& sys, const NoisePath& path, int n);
// Integral form: ∂Ŝ/∂q(T) − ∂Ŝ/∂q(0) + ∫[…]δX, max over interior nodes.
double hj2_integrated_residual(const GridFunction2D& S_hat, const SdeSystem& sys, const NoisePath& path);

// Per-step residual of the L.C.S. HJ equation (n = 1) at step n.
double lcs_hj_residual(const GridFunction& S_bar, const LcsData& lcs, const SdeSystem& sys,
                       const NoisePath& path, int n);
double lcs_hj_integrated_residual(const GridFunction& S_bar, const LcsData& lcs, const SdeSystem& sys,
                                  const NoisePath& path);

// Candidate fields transported by the characteristic flow of `sys` on `path`:
// the section p = Γ is pushed forward and re-sampled at fixed nodes by shooting.
// The generating function is recovered by cumulative trapezoid quadrature in q.
GridFunction characteristic_field_1d(const SdeSystem& sys, const ScalarField& gamma0, const Vec& q_nodes,
                                     const NoisePath& path);
GridFunction2D characteristic_field_2d(const SdeSystem& sys, const ScalarField& gamma0, const Vec& q_nodes,
                                       const Vec& u_nodes, const NoisePath& path);

GridFunction frozen(const GridFunction& S);
GridFunction2D frozen(const GridFunction2D& S);

// Rows t, columns q-nodes.
void write_grid_csv(std::ostream& os, const GridFunction& S);

}  // namespace sgi
