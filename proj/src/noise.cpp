#include "sgi/noise.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

namespace sgi {

namespace {

constexpr std::uint64_t kIncrementStream = 0x1;
constexpr std::uint64_t kBridgeStream = 0x2;

double to_unit_open(std::uint64_t x) {
  // 53 random bits mapped into (0, 1).
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

TimeGrid make_grid(double t0, double t_final, int steps) {
  if (!(t_final > t0)) throw Error("time grid needs t_final > t0");
  if (steps < 1) throw Error("time grid needs at least one step");
  return {t0, t_final, steps};
}

TimeGrid grid_for_step(double t0, double t_final, double dt) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const int n = std::max(1, static_cast<int>(std::llround((t_final - t0) / dt)));
  return make_grid(t0, t_final, n);
}

Vec NoisePath::step_increments(int step) const {
  if (r == 0) return Vec();
  return increments.col(step);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double keyed_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  const double u1 = to_unit_open(h);
  const double u2 = to_unit_open(splitmix64(h));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoisePath sample_brownian(std::uint64_t seed, const TimeGrid& grid, int r) {
  if (r < 0) throw Error("number of Brownian components must be non-negative");
  NoisePath p;
  p.grid = grid;
  p.r = r;
  p.seed = seed;
  p.increments.resize(r, grid.steps);
  const double s = std::sqrt(grid.dt());
  for (int k = 0; k < r; ++k) {
    for (int n = 0; n < grid.steps; ++n) {
      p.increments(k, n) = s * keyed_normal(seed, kIncrementStream, static_cast<std::uint64_t>(k),
                                            static_cast<std::uint64_t>(n));
    }
  }
  return p;
}

NoisePath refine(const NoisePath& path) {
  NoisePath f;
  f.grid = path.grid;
  f.grid.steps = 2 * path.grid.steps;
  f.r = path.r;
  f.seed = path.seed;
  f.level = path.level + 1;
  f.increments.resize(path.r, f.grid.steps);
  // Bridge midpoint: first half ~ N(ΔB/2, Δt/4), second half is the remainder.
  const double s = std::sqrt(path.grid.dt() / 4.0);
  const auto stream = kBridgeStream + (static_cast<std::uint64_t>(f.level) << 8);
  for (int k = 0; k < path.r; ++k) {
    for (int n = 0; n < path.grid.steps; ++n) {
      const double dB = path.increments(k, n);
      const double a = 0.5 * dB + s * keyed_normal(path.seed, stream, static_cast<std::uint64_t>(k),
                                                   static_cast<std::uint64_t>(n));
      f.increments(k, 2 * n) = a;
      f.increments(k, 2 * n + 1) = dB - a;
    }
  }
  return f;
}

NoisePath coarsen(const NoisePath& path) {
  if (path.grid.steps % 2 != 0) throw Error("coarsen needs an even number of steps");
  NoisePath c = path;
  c.grid.steps = path.grid.steps / 2;
  c.level = path.level - 1;
  c.increments.resize(path.r, c.grid.steps);
  for (int k = 0; k < path.r; ++k)
    for (int n = 0; n < c.grid.steps; ++n)
      c.increments(k, n) = path.increments(k, 2 * n) + path.increments(k, 2 * n + 1);
  return c;
}

void write_noise_csv(std::ostream& os, const NoisePath& path) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "step";
  for (int k = 1; k <= path.r; ++k) out << ",dB" << k;
  out << '\n' << std::setprecision(17);
  for (int n = 0; n < path.grid.steps; ++n) {
    out << n;
    for (int k = 0; k < path.r; ++k) out << ',' << path.increments(k, n);
    out << '\n';
  }
  os << out.str();
}

NoisePath read_noise_csv(std::istream& is, const TimeGrid& grid) {
  std::string line;
  if (!std::getline(is, line)) throw Error("noise CSV is empty");
  int r = 0;
  for (char c : line)
    if (c == ',') ++r;
  NoisePath p;
  p.grid = grid;
  p.r = r;
  p.increments.resize(r, grid.steps);
  int n = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (n >= grid.steps) throw Error("noise CSV has more rows than grid steps");
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    std::string cell;
    std::getline(row, cell, ',');
    for (int k = 0; k < r; ++k) {
      if (!std::getline(row, cell, ',')) throw Error("noise CSV row " + std::to_string(n) + " is short");
      p.increments(k, n) = std::stod(cell);
    }
    ++n;
  }
  if (n != grid.steps) throw Error("noise CSV has fewer rows than grid steps");
  return p;
}

}  // namespace sgi
