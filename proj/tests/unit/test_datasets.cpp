/*
 * Copyright 2026 The treeagg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "treeagg/datasets.hpp"

namespace treeagg {
namespace {

TEST(ToyData, BalancedFiniteAndReproducible) {
  auto a = make_toy_classification(1000, 17);
  auto b = make_toy_classification(1000, 17);
  ASSERT_EQ(a.X.n_cols(), 2u);
  ASSERT_EQ(a.X.n_rows(), 1000u);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.X.columns[0].numeric, b.X.columns[0].numeric);
  double ones = 0.0;
  for (double y : a.y) {
    EXPECT_TRUE(y == 0.0 || y == 1.0);
    ones += y;
  }
  EXPECT_NEAR(ones / 1000.0, 0.5, 0.1);
  for (const auto& c : a.X.columns) {
    for (double x : c.numeric) EXPECT_TRUE(std::isfinite(x));
  }
  auto c = make_toy_classification(1000, 18);
  EXPECT_NE(a.X.columns[0].numeric, c.X.columns[0].numeric);
  EXPECT_THROW(make_toy_classification(3, 1), ConfigError);
}

TEST(Signals, KnownValues) {
  EXPECT_EQ(donoho_signal(Signal::kDoppler, 0.0), 0.0);
  EXPECT_NEAR(donoho_signal(Signal::kDoppler, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(donoho_signal("heavisine", 0.5), -2.0, 1e-12);
  const double t = 0.2;
  EXPECT_NEAR(donoho_signal("doppler", t),
              std::sqrt(t * (1 - t)) * std::sin(2.1 * std::numbers::pi / (t + 0.05)),
              1e-15);
  EXPECT_THROW(donoho_signal("sawtooth", 0.5), ConfigError);
  EXPECT_THROW(donoho_signal(Signal::kBlocks, 1.5), ConfigError);
}

TEST(Signals, BlocksIsPiecewiseConstantBetweenKnots) {
  const double knots[] = {0.1, 0.13, 0.15, 0.23, 0.25, 0.40,
                          0.44, 0.65, 0.76, 0.78, 0.81};
  double lo = 0.0;
  for (double k : knots) {
    const double a = lo + 1e-6, b = k - 1e-6;
    EXPECT_EQ(donoho_signal(Signal::kBlocks, a), donoho_signal(Signal::kBlocks, b));
    lo = k;
  }
  EXPECT_NE(donoho_signal(Signal::kBlocks, 0.09),
            donoho_signal(Signal::kBlocks, 0.11));
}

TEST(Signals, BumpsIsPositiveWithPeaksAtKnots) {
  for (double t : signal_grid(500)) EXPECT_GT(donoho_signal(Signal::kBumps, t), 0.0);
  EXPECT_GT(donoho_signal(Signal::kBumps, 0.1), donoho_signal(Signal::kBumps, 0.12));
}

TEST(Signals, GridAndNames) {
  auto g = signal_grid(4);
  EXPECT_EQ(g, (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
  for (auto name : kSignalNames) {
    EXPECT_EQ(to_string(signal_from_string(name)), name);
  }
}

TEST(Noise, VanishingNoise) {
  auto f = sample_signal(Signal::kHeavisine, signal_grid(1000));
  auto y = add_noise(f, 1e9, 3);
  const double sd = population_sd(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_LE(std::abs(y[i] - f[i]), 1e-6 * sd);
  }
}

TEST(Noise, EmpiricalSnr) {
  auto f = sample_signal(Signal::kDoppler, signal_grid(10000));
  for (double snr : {0.5, 1.0, 4.0}) {
    auto y = add_noise(f, snr, 11);
    std::vector<double> r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = y[i] - f[i];
    EXPECT_NEAR(population_sd(r) / population_sd(f), 1.0 / snr, 0.05 / snr);
  }
  EXPECT_EQ(add_noise(f, 1.0, 5), add_noise(f, 1.0, 5));
  EXPECT_NE(add_noise(f, 1.0, 5), add_noise(f, 1.0, 6));
}

TEST(Noise, Errors) {
  const std::vector<double> flat(10, 2.0);
  EXPECT_THROW(add_noise(flat, 1.0, 1), DataError);
  auto f = sample_signal(Signal::kBumps, signal_grid(10));
  EXPECT_THROW(add_noise(f, 0.0, 1), ConfigError);
}

}  // namespace
}  // namespace treeagg
