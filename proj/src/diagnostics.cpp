#include "sgi/diagnostics.hpp"

#include <cmath>
#include <json.hpp>

namespace sgi {

bool DiagnosticsReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

namespace {

void require_jacobians(const Trajectory& traj) {
  if (traj.jacobians.size() != traj.size()) throw Error("trajectory has no stored tangent flow");
}

void require_conformal(const Trajectory& traj) {
  if (traj.log_conformal.size() != traj.size()) throw Error("trajectory has no conformal accumulator");
}

}  // namespace

double symplectic_pullback_deviation(const Trajectory& traj, const Mat& omega) {
  require_jacobians(traj);
  if (omega.rows() % 2 != 0 || omega.rows() != omega.cols())
    throw DimensionError("symplectic pullback needs an even-dimensional square form");
  double worst = 0.0;
  for (const auto& J : traj.jacobians)
    worst = std::max(worst, (J.transpose() * omega * J - omega).cwiseAbs().maxCoeff());
  return worst;
}

std::vector<double> conformal_factor(const Trajectory& traj) {
  require_conformal(traj);
  std::vector<double> lam;
  lam.reserve(traj.log_conformal.size());
  for (double L : traj.log_conformal) lam.push_back(std::exp(L));
  return lam;
}

double contact_pullback_deviation(const Trajectory& traj, const ContactData& contact) {
  require_jacobians(traj);
  require_conformal(traj);
  const Vec eta0 = contact.eta(traj.states.front());
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    // Row vector η_{φ(z)}·J against λ·η_z, over all basis vectors at once.
    const Vec pulled = traj.jacobians[i].transpose() * contact.eta(traj.states[i]);
    const double lam = std::exp(traj.log_conformal[i]);
    worst = std::max(worst, (pulled - lam * eta0).cwiseAbs().maxCoeff());
  }
  return worst;
}

double contact_volume_deviation(const Trajectory& traj, int n) {
  require_jacobians(traj);
  require_conformal(traj);
  if (!traj.jacobians.empty() && traj.jacobians.front().rows() != 2 * n + 1)
    throw DimensionError("contact volume check needs an odd-dimensional chart of size 2n+1");
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double lam = std::exp(traj.log_conformal[i]);
    worst = std::max(worst, std::abs(traj.jacobians[i].determinant() - std::pow(lam, n + 1)));
  }
  return worst;
}

double lcs_pullback_deviation(const Trajectory& traj, const LcsData& lcs) {
  require_jacobians(traj);
  auto omega_u = [&](const Vec& z) -> Mat {
    const double s = lcs.sigma ? (*lcs.sigma)(z) : 0.0;
    return std::exp(-s) * lcs.omega_bar(z);
  };
  const Mat w0 = omega_u(traj.states.front());
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Mat& J = traj.jacobians[i];
    worst = std::max(worst, (J.transpose() * omega_u(traj.states[i]) * J - w0).cwiseAbs().maxCoeff());
  }
  return worst;
}

double casimir_drift(const Trajectory& traj, const ScalarField& C) {
  const double c0 = C(traj.states.front());
  double worst = 0.0;
  for (const auto& z : traj.states) worst = std::max(worst, std::abs(C(z) - c0));
  return worst;
}

double order_from_pair(double coarse, double fine) { return std::log2(coarse / fine); }

double order_from_levels(const std::vector<double>& devs) {
  if (devs.size() < 2) throw Error("order estimate needs at least two levels");
  const double n = static_cast<double>(devs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < devs.size(); ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log2(devs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DiagnosticEntry make_entry(std::string name, double deviation, double tolerance,
                           std::optional<double> order) {
  return {std::move(name), deviation, tolerance, deviation <= tolerance, order};
}

DiagnosticEntry make_entry_from_chain(std::string name, const std::vector<double>& devs,
                                      double tolerance, std::optional<std::size_t> at) {
  const double dev = devs.at(at.value_or(devs.size() - 1));
  std::optional<double> order;
  if (devs.size() >= 2) order = order_from_levels(devs);
  return make_entry(std::move(name), dev, tolerance, order);
}

DiagnosticsReport assemble_report(std::string model, std::string scheme, double dt, std::uint64_t seed,
                                  std::vector<DiagnosticEntry> entries) {
  return {std::move(model), std::move(scheme), dt, seed, std::move(entries)};
}

std::string report_to_json(const DiagnosticsReport& report, int indent) {
  nlohmann::ordered_json j;
  j["model"] = report.model;
  j["scheme"] = report.scheme;
  j["dt"] = report.dt;
  j["seed"] = report.seed;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    nlohmann::ordered_json je;
    je["name"] = e.name;
    je["max_deviation"] = e.max_deviation;
    je["tolerance"] = e.tolerance;
    je["pass"] = e.pass;
    je["order_estimate"] = e.order_estimate ? nlohmann::ordered_json(*e.order_estimate) : nullptr;
    j["entries"].push_back(je);
  }
  return j.dump(indent);
}

DiagnosticsReport report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DiagnosticsReport r;
  r.model = j.at("model").get<std::string>();
  r.scheme = j.at("scheme").get<std::string>();
  r.dt = j.at("dt").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& je : j.at("entries")) {
    DiagnosticEntry e;
    e.name = je.at("name").get<std::string>();
    e.max_deviation = je.at("max_deviation").get<double>();
    e.tolerance = je.at("tolerance").get<double>();
    e.pass = je.at("pass").get<bool>();
    if (!je.at("order_estimate").is_null()) e.order_estimate = je.at("order_estimate").get<double>();
    r.entries.push_back(e);
  }
  return r;
}

Polynomial random_polynomial(int dim, int degree, std::mt19937_64& rng, int max_terms) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> var(0, dim - 1);
  std::uniform_int_distribution<int> deg(0, degree);
  Polynomial p(dim);
  for (int t = 0; t < max_terms; ++t) {
    std::vector<int> e(dim, 0);
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) e[var(rng)] += 1;
    p.add_term(coef(rng), e);
  }
  return p;
}

BracketSuiteResult bracket_identity_suite(const JacobiStructure& J, int points, std::uint64_t seed,
                                          double box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-box, box);
  BracketSuiteResult res;
  const ScalarField one = constant_field(1.0);
  for (int i = 0; i < points; ++i) {
    Vec z(J.dim);
    for (int k = 0; k < J.dim; ++k) z[k] = u(rng);
    const ScalarField f = random_polynomial(J.dim, 3, rng).field();
    const ScalarField g = random_polynomial(J.dim, 3, rng).field();
    const ScalarField h = random_polynomial(J.dim, 3, rng).field();

    const double fg = jacobi_bracket(J, f, g, z);
    const double gf = jacobi_bracket(J, g, f, z);
    res.antisymmetry = std::max(res.antisymmetry, std::abs(fg + gf));

    const double jac = jacobi_bracket(J, f, bracket_field(J, g, h), z) +
                       jacobi_bracket(J, g, bracket_field(J, h, f), z) +
                       jacobi_bracket(J, h, bracket_field(J, f, g), z);
    res.jacobi = std::max(res.jacobi, std::abs(jac));

    ScalarField gh;
    gh.eval = [g, h](const Vec& w) { return g(w) * h(w); };
    gh.analytic_gradient = [g, h](const Vec& w) {
      return Vec(g(w) * gradient(h, w) + h(w) * gradient(g, w));
    };
    const double Ef = J.e_field(z).dot(gradient(f, z));
    const double wl = jacobi_bracket(J, f, gh, z) - g(z) * jacobi_bracket(J, f, h, z) -
                      h(z) * jacobi_bracket(J, f, g, z) - g(z) * h(z) * Ef;
    res.weak_leibniz = std::max(res.weak_leibniz, std::abs(wl));

    const Vec v1 = hamiltonian_vector_field(J, one, z);
    res.unit_field = std::max(res.unit_field, (v1 - J.e_field(z)).cwiseAbs().maxCoeff());
  }
  return res;
}

}  // namespace sgi
