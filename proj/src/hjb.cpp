#include "sgi/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>

namespace sgi {

Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "linear-extrapolation") return Boundary::linear_extrapolation;
  throw ConfigError("unknown boundary '" + s + "' (expected periodic or linear-extrapolation)");
}

Vec uniform_nodes(double a, double b, int nodes) {
  if (nodes < 2) throw DimensionError("grid needs at least 2 nodes");
  return Vec::LinSpaced(nodes, a, b);
}

Vec grid_slopes(const Vec& S, double dq, Boundary boundary) {
  const int N = static_cast<int>(S.size());
  if (N < 4) throw DimensionError("grid needs at least 4 nodes");
  Vec D(N);
  for (int j = 1; j < N - 1; ++j) D[j] = (S[j + 1] - S[j - 1]) / (2.0 * dq);
  if (boundary == Boundary::periodic) {
    D[0] = (S[1] - S[N - 1]) / (2.0 * dq);
    D[N - 1] = (S[0] - S[N - 2]) / (2.0 * dq);
  } else {
    D[0] = 2.0 * D[1] - D[2];
    D[N - 1] = 2.0 * D[N - 2] - D[N - 3];
  }
  return D;
}

namespace {

double weight(int k, double dt, const Vec& dB) { return k == 0 ? dt : dB[k - 1]; }

Vec contact_point(double q, double p, double u) { return Vec{{q, p, u}}; }

void require_contact_1d(const SdeSystem& sys) {
  if (sys.dim() != 3) throw DimensionError("HJ grid solver needs a contact system with n = 1");
}

Vec hj_rate(const SdeSystem& sys, const Vec& q, const Vec& S, const Vec& D, double dt, const Vec& dB) {
  const auto& hs = sys.hamiltonians.h;
  Vec r = Vec::Zero(S.size());
  for (int j = 0; j < S.size(); ++j) {
    const Vec z = contact_point(q[j], D[j], S[j]);
    for (std::size_t k = 0; k < hs.size(); ++k) r[j] -= hs[k](z) * weight(static_cast<int>(k), dt, dB);
  }
  return r;
}

void check_cfl(const SdeSystem& sys, const Vec& q, const Vec& S, const Vec& D, double dq, double dt,
               const Vec& dB) {
  const auto& hs = sys.hamiltonians.h;
  double worst = 0.0;
  int at = 0;
  for (int j = 0; j < S.size(); ++j) {
    const Vec z = contact_point(q[j], D[j], S[j]);
    double c = 0.0;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      c += std::abs(gradient(hs[k], z)[1] * weight(static_cast<int>(k), dt, dB));
    }
    if (c > worst) {
      worst = c;
      at = j;
    }
  }
  const double ratio = worst / dq;
  if (ratio > 0.5) {
    std::ostringstream msg;
    msg << "CFL condition violated at node " << at << " (q = " << q[at] << "): speed*dt/dq = " << ratio
        << " > 0.5; reduce dt to about " << dt * 0.25 / (ratio * ratio);
    throw StepSizeError(msg.str());
  }
}

struct Stencil {
  int i0;
  double s;  // local coordinate in units of dq from node i0
};

// Four consecutive nodes around q; indices may wrap for periodic grids.
Stencil cubic_stencil(const GridFunction& S, double q, bool periodic) {
  const int N = S.nodes();
  const double x = (q - S.q[0]) / S.dq();
  int i0 = static_cast<int>(std::floor(x)) - 1;
  if (!periodic) i0 = std::clamp(i0, 0, N - 4);
  return {i0, x - i0};
}

}  // namespace

GridFunction solve_contact_hj_grid(const HjProblem& problem, const NoisePath& path) {
  const SdeSystem& sys = problem.sys;
  require_contact_1d(sys);
  if (path.r != sys.noise_dim()) throw DimensionError("noise path dimension does not match the system");
  const bool periodic = problem.boundary == Boundary::periodic;
  GridFunction G;
  if (periodic) {
    G.q = Vec(problem.nodes);
    const double h = (problem.b - problem.a) / problem.nodes;
    for (int j = 0; j < problem.nodes; ++j) G.q[j] = problem.a + j * h;
  } else {
    G.q = uniform_nodes(problem.a, problem.b, problem.nodes);
  }
  const int N = path.grid.steps;
  const double dt = path.grid.dt();
  const double dq = G.dq();
  G.values = Mat::Zero(N + 1, problem.nodes);
  for (int j = 0; j < problem.nodes; ++j) G.values(0, j) = problem.S0(Vec::Constant(1, G.q[j]));
  G.times.push_back(path.grid.time(0));

  Vec S = G.values.row(0).transpose();
  for (int n = 0; n < N; ++n) {
    const Vec dB = path.step_increments(n);
    const Vec D = grid_slopes(S, dq, problem.boundary);
    check_cfl(sys, G.q, S, D, dq, dt, dB);
    const Vec a = hj_rate(sys, G.q, S, D, dt, dB);
    const Vec Ss = S + a;
    const Vec b = hj_rate(sys, G.q, Ss, grid_slopes(Ss, dq, problem.boundary), dt, dB);
    S = S + 0.5 * (a + b);
    const Vec Dn = grid_slopes(S, dq, problem.boundary);
    if (!S.allFinite() || !Dn.allFinite() || Dn.cwiseAbs().maxCoeff() > problem.slope_cap) {
      G.blown_up = n + 1;
      G.values.conservativeResize(n + 1, Eigen::NoChange);
      return G;
    }
    G.values.row(n + 1) = S.transpose();
    G.times.push_back(path.grid.time(n + 1));
  }
  return G;
}

namespace {

Vec lift_impl(const GridFunction& S, double q, int t_index, bool periodic) {
  const int N = S.nodes();
  Stencil st = cubic_stencil(S, q, periodic);
  // Snap to a node so the u-component reproduces the stored value exactly.
  if (std::abs(st.s - std::round(st.s)) < 1e-9) st.s = std::round(st.s);
  double v = 0.0;
  double d = 0.0;
  for (int a = 0; a < 4; ++a) {
    double la = 1.0;
    double dla = 0.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      double prod = 1.0 / (a - b);
      for (int c = 0; c < 4; ++c) {
        if (c == a || c == b) continue;
        prod *= (st.s - c) / (a - c);
      }
      dla += prod;
      la *= (st.s - b) / (a - b);
    }
    const int idx = ((st.i0 + a) % N + N) % N;
    const double y = S.values(t_index, idx);
    v += la * y;
    d += dla * y;
  }
  return contact_point(q, d / S.dq(), v);
}

bool inside(const GridFunction& S, double q) { return q >= S.q[0] && q <= S.q[S.nodes() - 1]; }

}  // namespace

Vec lift(const GridFunction& S, double q, int t_index) {
  if (t_index < 0 || t_index >= S.levels()) throw DimensionError("time level out of range");
  if (!inside(S, q)) throw DimensionError("lift point outside the grid");
  return lift_impl(S, q, t_index, false);
}

std::optional<double> projected_sde_step(const GridFunction& S, const SdeSystem& sys, double q, int t_index,
                                         double dt, const Vec& dB) {
  if (t_index + 1 >= S.levels()) return std::nullopt;
  const auto& hs = sys.hamiltonians.h;
  auto speed = [&](double x, int level) {
    const Vec z = lift(S, x, level);
    double s = 0.0;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      s += gradient(hs[k], z)[1] * weight(static_cast<int>(k), dt, dB);
    }
    return s;
  };
  if (!inside(S, q)) return std::nullopt;
  const double a = speed(q, t_index);
  const double qs = q + a;
  if (!std::isfinite(qs) || !inside(S, qs)) return std::nullopt;
  const double b = speed(qs, t_index + 1);
  const double qn = q + 0.5 * (a + b);
  if (!std::isfinite(qn) || !inside(S, qn)) return std::nullopt;
  return qn;
}

LiftEquivalence lift_equivalence_error(const GridFunction& S, const SdeSystem& sys, const NoisePath& path,
                                       double q0) {
  LiftEquivalence out;
  const int N = path.grid.steps;
  const double dt = path.grid.dt();
  Vec z = lift(S, q0, 0);
  double q = q0;
  out.lifted.push_back(z);
  out.direct.push_back(z);
  for (int n = 0; n < N; ++n) {
    const Vec dB = path.step_increments(n);
    const auto qn = projected_sde_step(S, sys, q, n, dt, dB);
    if (!qn) {
      out.truncated = true;
      break;
    }
    q = *qn;
    z = heun_step(sys, z, dt, dB);
    if (!z.allFinite()) {
      out.truncated = true;
      break;
    }
    const Vec l = lift(S, q, n + 1);
    out.lifted.push_back(l);
    out.direct.push_back(z);
    const double e = (l - z).cwiseAbs().maxCoeff();
    out.sup_error = std::max(out.sup_error, e);
    out.endpoint_error = e;
    ++out.steps_compared;
  }
  return out;
}

LiftEquivalence lift_equivalence_error(const HjProblem& problem, const NoisePath& path, double q0) {
  return lift_equivalence_error(solve_contact_hj_grid(problem, path), problem.sys, path, q0);
}

namespace {

// Signed per-node residual vector of step n; node order is row-major over interior (i, j).
Vec hj2_step_vector(const GridFunction2D& S, const SdeSystem& sys, const NoisePath& path, int n) {
  require_contact_1d(sys);
  if (n < 0 || n + 1 >= static_cast<int>(S.values.size())) throw DimensionError("step out of range");
  const int Nq = static_cast<int>(S.q.size());
  const int Nu = static_cast<int>(S.u.size());
  if (Nq < 3 || Nu < 3) throw DimensionError("formalism-II grid needs at least 3x3 nodes");
  const double dq = S.dq();
  const double du = S.du();
  const double dt = path.grid.dt();
  const Vec dB = path.step_increments(n);
  const auto& hs = sys.hamiltonians.h;
  Vec R((Nq - 2) * (Nu - 2));
  int idx = 0;
  for (int i = 1; i < Nq - 1; ++i) {
    for (int j = 1; j < Nu - 1; ++j) {
      double r = 0.0;
      double sq[2];
      for (int lev = 0; lev < 2; ++lev) {
        const Mat& V = S.values[n + lev];
        const double Sq = (V(i + 1, j) - V(i - 1, j)) / (2.0 * dq);
        const double Sqq = (V(i + 1, j) - 2.0 * V(i, j) + V(i - 1, j)) / (dq * dq);
        const double Squ = (V(i + 1, j + 1) - V(i - 1, j + 1) - V(i + 1, j - 1) + V(i - 1, j - 1)) / (4.0 * dq * du);
        sq[lev] = Sq;
        const Vec z = contact_point(S.q[i], Sq, S.u[j]);
        for (std::size_t k = 0; k < hs.size(); ++k) {
          const Vec g = gradient(hs[k], z);
          const double F = g[0] + g[1] * Sqq + (g[1] * Squ + g[2]) * Sq - hs[k](z) * Squ;
          r += 0.5 * F * weight(static_cast<int>(k), dt, dB);
        }
      }
      R[idx++] = sq[1] - sq[0] + r;
    }
  }
  return R;
}

Vec lcs_step_vector(const GridFunction& S, const LcsData& lcs, const SdeSystem& sys, const NoisePath& path,
                    int n) {
  if (sys.dim() != 2 || lcs.n != 1) throw DimensionError("L.C.S. HJ residual needs n = 1");
  if (n < 0 || n + 1 >= S.levels()) throw DimensionError("step out of range");
  const int N = S.nodes();
  if (N < 3) throw DimensionError("grid needs at least 3 nodes");
  const double dq = S.dq();
  const double dt = path.grid.dt();
  const Vec dB = path.step_increments(n);
  const auto& hs = sys.hamiltonians.h;
  Vec R(N - 2);
  for (int i = 1; i < N - 1; ++i) {
    double r = 0.0;
    double sq[2];
    for (int lev = 0; lev < 2; ++lev) {
      const auto V = S.values.row(n + lev);
      const double Sq = (V[i + 1] - V[i - 1]) / (2.0 * dq);
      const double Sqq = (V[i + 1] - 2.0 * V[i] + V[i - 1]) / (dq * dq);
      sq[lev] = Sq;
      const Vec z{{S.q[i], Sq}};
      const double theta = lcs.lee_form(z)[0];
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const Vec g = gradient(hs[k], z);
        const double G = g[0] + g[1] * Sqq - theta * hs[k](z);
        r += 0.5 * G * weight(static_cast<int>(k), dt, dB);
      }
    }
    R[i - 1] = sq[1] - sq[0] + r;
  }
  return R;
}

}  // namespace

double hj2_residual(const GridFunction2D& S_hat, const SdeSystem& sys, const NoisePath& path, int n) {
  return hj2_step_vector(S_hat, sys, path, n).cwiseAbs().maxCoeff();
}

double hj2_integrated_residual(const GridFunction2D& S_hat, const SdeSystem& sys, const NoisePath& path) {
  const int steps = static_cast<int>(S_hat.values.size()) - 1;
  Vec acc = hj2_step_vector(S_hat, sys, path, 0);
  for (int n = 1; n < steps; ++n) acc += hj2_step_vector(S_hat, sys, path, n);
  return acc.cwiseAbs().maxCoeff();
}

double lcs_hj_residual(const GridFunction& S_bar, const LcsData& lcs, const SdeSystem& sys,
                       const NoisePath& path, int n) {
  return lcs_step_vector(S_bar, lcs, sys, path, n).cwiseAbs().maxCoeff();
}

double lcs_hj_integrated_residual(const GridFunction& S_bar, const LcsData& lcs, const SdeSystem& sys,
                                  const NoisePath& path) {
  const int steps = S_bar.levels() - 1;
  Vec acc = lcs_step_vector(S_bar, lcs, sys, path, 0);
  for (int n = 1; n < steps; ++n) acc += lcs_step_vector(S_bar, lcs, sys, path, n);
  return acc.cwiseAbs().maxCoeff();
}

namespace {

// Shooting for the point of the transported section above a fixed target.
// Unknowns ξ parametrise the initial section; `targets` are the state
// indices that must hit the node, index 1 carries the section value.
struct Shooter {
  const SdeSystem& sys;
  const NoisePath& path;
  std::function<Vec(const Vec&)> start;       // ξ ↦ z0
  std::function<Mat(const Vec&)> start_diff;  // ξ ↦ ∂z0/∂ξ
  std::vector<int> targets;

  struct Result {
    double value;
    Vec xi;
    Vec z;
    Mat J;
  };

  Mat select(const Mat& M) const {
    Mat P(targets.size(), M.cols());
    for (std::size_t a = 0; a < targets.size(); ++a) P.row(a) = M.row(targets[a]);
    return P;
  }
  Vec select(const Vec& v) const {
    Vec P(targets.size());
    for (std::size_t a = 0; a < targets.size(); ++a) P[a] = v[targets[a]];
    return P;
  }

  Result solve(const Vec& x, int level, Vec xi) const {
    const double dt = path.grid.dt();
    for (int iter = 0; iter < 40; ++iter) {
      Vec z = start(xi);
      Mat J = Mat::Identity(z.size(), z.size());
      for (int s = 0; s < level; ++s) {
        TangentState ts = tangent_step(sys, z, J, dt, path.step_increments(s));
        z = std::move(ts.z);
        J = std::move(ts.J);
      }
      if (!z.allFinite()) break;
      const Mat M = J * start_diff(xi);
      const Vec delta = -select(M).fullPivLu().solve(select(z) - x);
      if (!delta.allFinite()) break;
      if (delta.cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
        return {z[1] + M.row(1).dot(delta), xi, z, J};
      }
      xi += delta;
    }
    std::ostringstream msg;
    msg << "characteristic shooting failed at level " << level << " (caustic or degenerate section)";
    throw SingularityError(msg.str());
  }

  // One-step Newton predictor for the next level from a solved state.
  Vec predict(const Result& r, const Vec& x, int level) const {
    const TangentState ts = tangent_step(sys, r.z, r.J, path.grid.dt(), path.step_increments(level));
    const Mat M = ts.J * start_diff(r.xi);
    const Vec delta = -select(M).fullPivLu().solve(select(ts.z) - x);
    return delta.allFinite() ? Vec(r.xi + delta) : r.xi;
  }

  // Section value above x at every level 0..N.
  std::vector<double> track(const Vec& x, const Vec& xi0) const {
    const int N = path.grid.steps;
    std::vector<double> out(N + 1);
    Result r = solve(x, 0, xi0);
    out[0] = r.value;
    for (int n = 1; n <= N; ++n) {
      r = solve(x, n, predict(r, x, n - 1));
      out[n] = r.value;
    }
    return out;
  }
};

std::vector<double> time_levels(const NoisePath& path) {
  std::vector<double> t(path.grid.steps + 1);
  for (int n = 0; n <= path.grid.steps; ++n) t[n] = path.grid.time(n);
  return t;
}

}  // namespace

GridFunction characteristic_field_1d(const SdeSystem& sys, const ScalarField& gamma0, const Vec& q_nodes,
                                     const NoisePath& path) {
  if (sys.dim() != 2) throw DimensionError("1-D characteristic field needs a 2-dimensional system");
  Shooter sh{sys, path,
             [&](const Vec& xi) { return Vec{{xi[0], gamma0(xi)}}; },
             [&](const Vec& xi) {
               Mat D(2, 1);
               D << 1.0, gradient(gamma0, xi)[0];
               return D;
             },
             {0}};
  const int N = path.grid.steps;
  const int Nq = static_cast<int>(q_nodes.size());
  Mat gamma(N + 1, Nq);
  for (int i = 0; i < Nq; ++i) {
    const Vec x = Vec::Constant(1, q_nodes[i]);
    const auto col = sh.track(x, x);
    for (int n = 0; n <= N; ++n) gamma(n, i) = col[n];
  }
  GridFunction G;
  G.q = q_nodes;
  G.times = time_levels(path);
  G.values = Mat::Zero(N + 1, Nq);
  for (int i = 1; i < Nq; ++i) {
    G.values.col(i) = G.values.col(i - 1) + 0.5 * (q_nodes[i] - q_nodes[i - 1]) * (gamma.col(i - 1) + gamma.col(i));
  }
  return G;
}

GridFunction2D characteristic_field_2d(const SdeSystem& sys, const ScalarField& gamma0, const Vec& q_nodes,
                                       const Vec& u_nodes, const NoisePath& path) {
  require_contact_1d(sys);
  Shooter sh{sys, path,
             [&](const Vec& xi) { return Vec{{xi[0], gamma0(xi), xi[1]}}; },
             [&](const Vec& xi) {
               const Vec g = gradient(gamma0, xi);
               Mat D(3, 2);
               D << 1.0, 0.0, g[0], g[1], 0.0, 1.0;
               return D;
             },
             {0, 2}};
  const int N = path.grid.steps;
  const int Nq = static_cast<int>(q_nodes.size());
  const int Nu = static_cast<int>(u_nodes.size());
  GridFunction2D G;
  G.q = q_nodes;
  G.u = u_nodes;
  G.times = time_levels(path);
  G.values.assign(N + 1, Mat::Zero(Nq, Nu));
  std::vector<Mat> gamma(N + 1, Mat::Zero(Nq, Nu));
  for (int i = 0; i < Nq; ++i) {
    for (int j = 0; j < Nu; ++j) {
      const Vec x{{q_nodes[i], u_nodes[j]}};
      const auto col = sh.track(x, x);
      for (int n = 0; n <= N; ++n) gamma[n](i, j) = col[n];
    }
  }
  for (int n = 0; n <= N; ++n) {
    for (int i = 1; i < Nq; ++i) {
      G.values[n].row(i) =
          G.values[n].row(i - 1) + 0.5 * (q_nodes[i] - q_nodes[i - 1]) * (gamma[n].row(i - 1) + gamma[n].row(i));
    }
  }
  return G;
}

GridFunction frozen(const GridFunction& S) {
  GridFunction F = S;
  for (int n = 1; n < F.levels(); ++n) F.values.row(n) = F.values.row(0);
  return F;
}

GridFunction2D frozen(const GridFunction2D& S) {
  GridFunction2D F = S;
  for (auto& v : F.values) v = F.values.front();
  return F;
}

void write_grid_csv(std::ostream& os, const GridFunction& S) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(17);
  buf << "t";
  for (int j = 0; j < S.nodes(); ++j) buf << ",q=" << S.q[j];
  buf << "\n";
  for (int n = 0; n < S.levels(); ++n) {
    buf << S.times[n];
    for (int j = 0; j < S.nodes(); ++j) buf << "," << S.values(n, j);
    buf << "\n";
  }
  os << buf.str();
}

}  // namespace sgi
