#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sgi/types.hpp"

namespace sgi {

struct TimeGrid {
  double t0 = 0.0;
  double t_final = 1.0;
  int steps = 1;

  double dt() const { return (t_final - t0) / steps; }
  double time(int i) const { return t0 + (t_final - t0) * static_cast<double>(i) / steps; }
};

TimeGrid make_grid(double t0, double t_final, int steps);
// Grid on [t0, t_final] whose step is as close as possible to dt.
TimeGrid grid_for_step(double t0, double t_final, double dt);

struct NoisePath {
  TimeGrid grid;
  int r = 0;
  Mat increments;  // r × N
  std::uint64_t seed = 0;
  int level = 0;  // number of bridge refinements applied

  double dB(int k, int step) const { return increments(k, step); }
  Vec step_increments(int step) const;
};

std::uint64_t splitmix64(std::uint64_t x);
// Seed of ensemble member `index` derived from a master seed.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);
// Standard normal keyed by (seed, stream, a, b); pure and order independent.
double keyed_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t a, std::uint64_t b);

NoisePath sample_brownian(std::uint64_t seed, const TimeGrid& grid, int r);
NoisePath refine(const NoisePath& path);
// Sum adjacent pairs; inverse of refine.
NoisePath coarsen(const NoisePath& path);

void write_noise_csv(std::ostream& os, const NoisePath& path);
NoisePath read_noise_csv(std::istream& is, const TimeGrid& grid);

}  // namespace sgi
