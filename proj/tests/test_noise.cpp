#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sgi/noise.hpp"

using namespace sgi;

TEST(Noise, ZeroComponentsGiveEmptyIncrements) {
  const NoisePath p = sample_brownian(1, make_grid(0.0, 1.0, 10), 0);
  EXPECT_EQ(p.increments.rows(), 0);
  EXPECT_EQ(p.increments.cols(), 10);
}

TEST(Noise, SameSeedSameArray) {
  const TimeGrid g = make_grid(0.0, 1.0, 100);
  EXPECT_EQ(sample_brownian(42, g, 3).increments, sample_brownian(42, g, 3).increments);
  EXPECT_NE(sample_brownian(42, g, 3).increments, sample_brownian(43, g, 3).increments);
}

TEST(Noise, EntriesIndependentOfComponentCount) {
  const TimeGrid g = make_grid(0.0, 1.0, 50);
  const Mat a = sample_brownian(5, g, 2).increments;
  const Mat b = sample_brownian(5, g, 4).increments;
  EXPECT_EQ(a, b.topRows(2));
}

TEST(Noise, IncrementVariance) {
  const NoisePath p = sample_brownian(7, make_grid(0.0, 100.0, 100000), 1);
  const double dt = p.grid.dt();
  const Eigen::ArrayXd x = p.increments.row(0).transpose().array();
  const double mean = x.mean();
  const double var = (x - mean).square().sum() / (x.size() - 1);
  EXPECT_NEAR(var / dt, 1.0, 0.05);
}

TEST(Noise, RefinePairsSumToCoarse) {
  const NoisePath p = sample_brownian(9, make_grid(0.0, 1.0, 64), 2);
  const NoisePath f = refine(p);
  ASSERT_EQ(f.grid.steps, 128);
  EXPECT_EQ(f.level, 1);
  for (int k = 0; k < 2; ++k)
    for (int n = 0; n < 64; ++n) EXPECT_NEAR(f.dB(k, 2 * n) + f.dB(k, 2 * n + 1), p.dB(k, n), 1e-15);
}

TEST(Noise, DoubleRefineTelescopes) {
  const NoisePath p = sample_brownian(10, make_grid(0.0, 1.0, 32), 1);
  const NoisePath f = refine(refine(p));
  ASSERT_EQ(f.grid.steps, 128);
  const NoisePath back = coarsen(coarsen(f));
  for (int n = 0; n < 32; ++n) EXPECT_NEAR(back.dB(0, n), p.dB(0, n), 1e-15);
}

TEST(Noise, BridgeMidpointVariance) {
  const NoisePath p = sample_brownian(11, make_grid(0.0, 100.0, 100000), 1);
  const NoisePath f = refine(p);
  const double dt = p.grid.dt();
  double s = 0.0, s2 = 0.0;
  for (int n = 0; n < p.grid.steps; ++n) {
    const double d = f.dB(0, 2 * n) - 0.5 * p.dB(0, n);
    s += d;
    s2 += d * d;
  }
  const double N = p.grid.steps;
  const double var = (s2 - s * s / N) / (N - 1);
  EXPECT_NEAR(var / (dt / 4.0), 1.0, 0.05);
}

TEST(Noise, RefinedIncrementsHaveFineVariance) {
  const NoisePath f = refine(sample_brownian(12, make_grid(0.0, 100.0, 50000), 1));
  const Eigen::ArrayXd x = f.increments.row(0).transpose().array();
  EXPECT_NEAR((x.square().mean()) / f.grid.dt(), 1.0, 0.05);
}

TEST(Noise, SplitmixAndSeedMixing) {
  EXPECT_EQ(splitmix64(0), splitmix64(0));
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  EXPECT_EQ(keyed_normal(3, 0, 1, 2), keyed_normal(3, 0, 1, 2));
}

TEST(Noise, CsvRoundTripIsExact) {
  const NoisePath p = sample_brownian(13, make_grid(0.0, 1.0, 20), 2);
  std::stringstream ss;
  write_noise_csv(ss, p);
  const NoisePath q = read_noise_csv(ss, p.grid);
  EXPECT_EQ(q.increments, p.increments);
  EXPECT_EQ(ss.str().substr(0, 14), "step,dB1,dB2\n0");
}

TEST(Noise, GridForStep) {
  const TimeGrid g = grid_for_step(0.0, 1.0, 1e-3);
  EXPECT_EQ(g.steps, 1000);
  EXPECT_DOUBLE_EQ(g.time(1000), 1.0);
}
