#include "sgi/models.hpp"

#include <cmath>
#include <set>

namespace sgi {

namespace {

std::vector<std::string> indexed(const std::string& base, int n) {
  if (n == 1) return {base};
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(base + std::to_string(i));
  return out;
}

std::vector<int> range(int start, int count) {
  std::vector<int> v(count);
  for (int i = 0; i < count; ++i) v[i] = start + i;
  return v;
}

// ½ Σ p_i² on a chart where p occupies slots [p0, p0+n).
Polynomial half_square(int dim, int p0, int n) {
  Polynomial k(dim);
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(dim, 0);
    e[p0 + i] = 2;
    k.add_term(0.5, e);
  }
  return k;
}

}  // namespace

Polynomial separable_potential(int n, const std::vector<double>& coefs) {
  Polynomial U(n);
  for (int i = 0; i < n; ++i) U = U + Polynomial::univariate(n, i, coefs);
  return U;
}

ModelSpec harmonic_oscillator(double k, double sigma, const Vec& z0) {
  if (!(k > 0.0)) throw Error("harmonic_oscillator: k must be positive");
  ModelSpec m;
  m.name = "harmonic_oscillator";
  const Polynomial x = Polynomial::coordinate(2, 0);
  const Polynomial y = Polynomial::coordinate(2, 1);
  const Polynomial h0 = 0.5 * k * (x * x) + 0.5 * (y * y);
  const Polynomial h1 = -sigma * x;
  m.sys.structure = canonical_symplectic(1);
  m.sys.hamiltonians.h = {h0.field(), h1.field()};
  m.z0 = z0.size() ? z0 : Vec(Vec::Unit(2, 1));
  m.coords = {"x", "y"};
  m.params = {{"k", k}, {"sigma", sigma}};
  m.observables = {{"x", x.field()},
                   {"y", y.field()},
                   {"energy", h0.field()},
                   {"second_moment", (x * x + y * y).field()}};
  m.symplectic_form = canonical_omega(1);
  return m;
}

Vec duhamel_oracle(double k, double sigma, const Vec& z0, const NoisePath& path) {
  const double w = std::sqrt(k);
  const double t = path.grid.t_final;
  const double t0 = path.grid.t0;
  const double dt = path.grid.dt();
  double sx = 0.0, sy = 0.0;
  for (int n = 0; n < path.grid.steps; ++n) {
    const double a = t - path.grid.time(n);
    const double b = t - path.grid.time(n + 1);
    // Cell averages of sin(w(t−s)) and cos(w(t−s)).
    const double avg_sin = (std::cos(w * b) - std::cos(w * a)) / (w * dt);
    const double avg_cos = (std::sin(w * a) - std::sin(w * b)) / (w * dt);
    sx += avg_sin * path.increments(0, n);
    sy += avg_cos * path.increments(0, n);
  }
  const double T = t - t0;
  Vec z(2);
  z[0] = z0[0] * std::cos(w * T) + z0[1] / w * std::sin(w * T) + sigma / w * sx;
  z[1] = -z0[0] * w * std::sin(w * T) + z0[1] * std::cos(w * T) + sigma * sy;
  return z;
}

Vec duhamel_reference(double k, double sigma, const Vec& z0, const NoisePath& path, int extra_levels) {
  NoisePath fine = path;
  for (int l = 0; l < extra_levels; ++l) fine = refine(fine);
  return duhamel_oracle(k, sigma, z0, fine);
}

ModelSpec damped_contact(double gamma, double sigma, const Polynomial& U, int n, const Vec& z0) {
  if (n <= 0) throw DimensionError("damped_contact: n must be positive");
  if (U.dim() != n) throw DimensionError("damped_contact: potential must be defined on R^n");
  const int m = 2 * n + 1;
  ModelSpec spec;
  spec.name = "damped_contact";
  auto [J, C] = canonical_contact(n);
  const Polynomial Ux = U.embed(m, range(0, n));
  const Polynomial u = Polynomial::coordinate(m, 2 * n);
  const Polynomial h0 = Ux + half_square(m, n, n) + gamma * u;
  spec.sys.structure = J;
  spec.sys.contact = C;
  spec.sys.hamiltonians.h = {h0.field()};
  for (int i = 0; i < n; ++i) spec.sys.hamiltonians.h.push_back((-sigma * Polynomial::coordinate(m, i)).field());
  if (z0.size()) {
    spec.z0 = z0;
  } else {
    spec.z0 = Vec::Zero(m);
    spec.z0[0] = 1.0;
    spec.z0[n] = 0.5;
  }
  spec.coords = indexed("x", n);
  for (const auto& s : indexed("y", n)) spec.coords.push_back(s);
  spec.coords.push_back("u");
  spec.params = {{"gamma", gamma}, {"sigma", sigma}, {"n", n}};
  spec.observables = {{"u", u.field()}, {"energy", (Ux + half_square(m, n, n)).field()}};
  for (int i = 0; i < n; ++i) spec.observables[spec.coords[i]] = Polynomial::coordinate(m, i).field();
  return spec;
}

IsokineticVariant parse_isokinetic_variant(const std::string& s) {
  if (s == "constrained") return IsokineticVariant::constrained;
  if (s == "paper-literal") return IsokineticVariant::paper_literal;
  throw Error("unknown isokinetic variant '" + s + "' (expected constrained or paper-literal)");
}

Polynomial isokinetic_sigma(const Polynomial& U, double c) {
  const int n = U.dim();
  return U.embed(2 * n, range(0, n)) * (1.0 / (2.0 * c));
}

double isokinetic_alpha(const Polynomial& U, const Vec& z) {
  const int n = U.dim();
  const Vec p = z.tail(n);
  const double pp = p.squaredNorm();
  if (pp == 0.0) throw SingularityError("isokinetic thermostat multiplier is singular at p = 0");
  const Vec f = -U.gradient(z.head(n));
  return f.dot(p) / pp;
}

ModelSpec isokinetic(const Polynomial& U, const Mat& sigma_cols, double c, IsokineticVariant variant,
                     const Vec& z0) {
  const int n = U.dim();
  if (!(c > 0.0)) throw Error("isokinetic: c must be positive");
  if (sigma_cols.rows() != n) throw DimensionError("isokinetic: noise columns must have n rows");
  const int m = 2 * n;
  ModelSpec spec;
  spec.name = "isokinetic";
  const Polynomial sigma = isokinetic_sigma(U, c);
  auto [lcs_J, lcs] = lcs_theta_cotangent(n, sigma.field());
  spec.sys.lcs = lcs;
  const Polynomial kinetic = half_square(m, n, n);

  auto q_dot = [&](const Vec& col) {
    Polynomial s(m);
    for (int i = 0; i < n; ++i) s = s + col[i] * Polynomial::coordinate(m, i);
    return s;
  };

  if (variant == IsokineticVariant::constrained) {
    // Genuine L.C.S. system: h_0 vanishes on M_c, so its field there is the
    // thermostatted drift; h_k = (σ_k·q)·h_0 keeps every noise field tangent to M_c.
    const Polynomial h0 = kinetic - Polynomial::constant(m, c);
    spec.sys.structure = lcs_J;
    spec.sys.hamiltonians.h = {h0.field()};
    for (Eigen::Index k = 0; k < sigma_cols.cols(); ++k)
      spec.sys.hamiltonians.h.push_back((q_dot(sigma_cols.col(k)) * h0).field());
  } else {
    // ι_V ω_c = dh with h_0 = ½|p|² and h_k = −σ_k·q.
    JacobiStructure J = lcs_J;
    J.kind = StructureKind::poisson_custom;
    J.e_field = zero_vector_field(m);
    J.lambda_partials = nullptr;
    spec.sys.structure = J;
    spec.sys.hamiltonians.h = {kinetic.field()};
    for (Eigen::Index k = 0; k < sigma_cols.cols(); ++k)
      spec.sys.hamiltonians.h.push_back((-1.0 * q_dot(sigma_cols.col(k))).field());
  }

  if (z0.size()) {
    spec.z0 = z0;
  } else {
    spec.z0 = Vec::Zero(m);
    for (int i = 0; i < n; ++i) spec.z0[i] = 0.5 - 0.3 * i;
    const double r = std::sqrt(2.0 * c);
    for (int i = 0; i < n; ++i) spec.z0[n + i] = r * (i == 0 ? std::cos(0.3) : std::sin(0.3) / std::sqrt(n - 1.0));
  }
  spec.coords = indexed("q", n);
  for (const auto& s : indexed("p", n)) spec.coords.push_back(s);
  spec.params = {{"c", c},
                 {"n", n},
                 {"variant", variant == IsokineticVariant::constrained ? "constrained" : "paper-literal"}};
  spec.observables = {{"kinetic", kinetic.field()}, {"sigma", sigma.field()}};
  return spec;
}

ModelSpec rigid_body_so3(const Vec& inertia, const std::vector<ScalarField>& noise_h, const Vec& z0) {
  if (inertia.size() != 3 || !(inertia.minCoeff() > 0.0))
    throw Error("rigid_body_so3: inertia must be three positive numbers");
  ModelSpec spec;
  spec.name = "rigid_body";
  Polynomial h0(3);
  Polynomial cas(3);
  for (int i = 0; i < 3; ++i) {
    std::vector<int> e(3, 0);
    e[i] = 2;
    h0.add_term(0.5 / inertia[i], e);
    cas.add_term(1.0, e);
  }
  spec.sys.structure = lie_poisson_so3();
  spec.sys.hamiltonians.h = {h0.field()};
  for (const auto& h : noise_h) spec.sys.hamiltonians.h.push_back(h);
  spec.z0 = z0.size() ? z0 : Vec(Eigen::Vector3d(1.0, 0.5, -0.3));
  spec.coords = {"mu1", "mu2", "mu3"};
  spec.params = {{"inertia", {inertia[0], inertia[1], inertia[2]}}};
  spec.observables = {{"energy", h0.field()}, {"casimir", cas.field()}};
  for (int i = 0; i < 3; ++i) spec.observables[spec.coords[i]] = Polynomial::coordinate(3, i).field();
  spec.casimir = cas.field();
  return spec;
}

namespace {

using nlohmann::json;

void reject_unknown(const json& params, const std::set<std::string>& allowed, const std::string& model) {
  if (params.is_null()) return;
  if (!params.is_object()) throw ConfigError("model parameters must be a table");
  for (const auto& [key, value] : params.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown parameter '" + key + "' for model " + model);
  }
}

double num(const json& p, const char* key, double def) {
  if (p.is_null() || !p.contains(key)) return def;
  if (!p[key].is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
  return p[key].get<double>();
}

std::vector<double> list(const json& p, const char* key, std::vector<double> def) {
  if (p.is_null() || !p.contains(key)) return def;
  const auto& v = p[key];
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(std::string("parameter '") + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

Vec initial(const json& p, int m) {
  const auto z = list(p, "z0", {});
  if (z.empty()) return Vec();
  if (static_cast<int>(z.size()) != m)
    throw ConfigError("z0 must have " + std::to_string(m) + " components");
  return to_vec(z);
}

int positive_int(const json& p, const char* key, int def) {
  const double v = num(p, key, def);
  if (v < 1 || v != std::floor(v)) throw ConfigError(std::string("parameter '") + key + "' must be a positive integer");
  return static_cast<int>(v);
}

}  // namespace

std::vector<std::string> model_names() {
  return {"harmonic_oscillator", "damped_contact", "isokinetic", "rigid_body"};
}

ModelSpec build_model(const std::string& name, const json& params) {
  try {
    if (name == "harmonic_oscillator") {
      reject_unknown(params, {"k", "sigma", "z0"}, name);
      return harmonic_oscillator(num(params, "k", 1.0), num(params, "sigma", 0.5), initial(params, 2));
    }
    if (name == "damped_contact") {
      reject_unknown(params, {"gamma", "sigma", "n", "U", "z0"}, name);
      const int n = positive_int(params, "n", 1);
      const auto U = separable_potential(n, list(params, "U", {0.0, 0.0, 0.5}));
      return damped_contact(num(params, "gamma", 0.5), num(params, "sigma", 0.2), U, n,
                            initial(params, 2 * n + 1));
    }
    if (name == "isokinetic") {
      reject_unknown(params, {"c", "n", "U", "noise", "variant", "z0"}, name);
      const int n = positive_int(params, "n", 2);
      const auto U = separable_potential(n, list(params, "U", {0.0, 0.0, 0.5}));
      std::vector<double> def(n, 0.0);
      def[0] = 0.3;
      const auto cols = list(params, "noise", def);
      if (cols.size() % n != 0) throw ConfigError("noise must hold n entries per column");
      const Mat S = Eigen::Map<const Mat>(cols.data(), n, static_cast<Eigen::Index>(cols.size() / n));
      std::string variant = "constrained";
      if (!params.is_null() && params.contains("variant")) {
        if (!params["variant"].is_string()) throw ConfigError("parameter 'variant' must be a string");
        variant = params["variant"].get<std::string>();
      }
      return isokinetic(U, S, num(params, "c", 1.0), parse_isokinetic_variant(variant), initial(params, 2 * n));
    }
    if (name == "rigid_body") {
      reject_unknown(params, {"inertia", "noise", "z0"}, name);
      const auto I = list(params, "inertia", {1.0, 2.0, 3.0});
      if (I.size() != 3) throw ConfigError("inertia must have three entries");
      // One noise channel per body axis, h_k = s_k·μ_k.
      const auto s = list(params, "noise", {0.5, 0.5, 0.5});
      if (s.size() != 3) throw ConfigError("rigid_body noise must have three entries");
      std::vector<ScalarField> noise;
      for (int k = 0; k < 3; ++k)
        if (s[k] != 0.0) noise.push_back((s[k] * Polynomial::coordinate(3, k)).field());
      return rigid_body_so3(to_vec(I), noise, initial(params, 3));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown model '" + name + "'");
}

}  // namespace sgi
