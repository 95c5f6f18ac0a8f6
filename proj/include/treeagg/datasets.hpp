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

#ifndef TREEAGG_DATASETS_HPP_
#define TREEAGG_DATASETS_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeagg/binning.hpp"
#include "treeagg/error.hpp"
#include "treeagg/random.hpp"

namespace treeagg {

struct LabelledData {
  RawMatrix X;
  std::vector<double> y;
};

// Two classes, each a pair of Gaussian blobs placed on opposite corners of a
// square (an XOR layout), with enough spread that the classes overlap.
inline LabelledData make_toy_classification(std::size_t n, std::uint64_t seed,
                                            double spread = 0.7) {
  if (n < 4) throw ConfigError("toy dataset needs at least 4 samples");
  CounterEngine engine(seed, 0, Purpose::kData);
  std::normal_distribution<double> noise(0.0, spread);
  std::vector<double> x0(n), x1(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool cls = engine.bounded(2) == 1;
    const bool corner = engine.bounded(2) == 1;
    const double cx = corner ? 1.0 : -1.0;
    const double cy = (corner != cls) ? 1.0 : -1.0;
    x0[i] = cx + noise(engine);
    x1[i] = cy + noise(engine);
    y[i] = cls ? 1.0 : 0.0;
  }
  LabelledData data;
  data.X.columns.push_back(RawColumn::continuous("x0", std::move(x0)));
  data.X.columns.push_back(RawColumn::continuous("x1", std::move(x1)));
  data.y = std::move(y);
  return data;
}

enum class Signal : std::uint8_t { kDoppler, kHeavisine, kBlocks, kBumps };

inline constexpr std::array<std::string_view, 4> kSignalNames = {
    "doppler", "heavisine", "blocks", "bumps"};

inline Signal signal_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kSignalNames.size(); ++i) {
    if (kSignalNames[i] == name) return static_cast<Signal>(i);
  }
  throw ConfigError("unknown signal '" + std::string(name) + "'");
}

inline std::string_view to_string(Signal s) {
  return kSignalNames[static_cast<std::size_t>(s)];
}

namespace detail {

// Donoho & Johnstone (1994) knot table shared by blocks and bumps.
inline constexpr std::array<double, 11> kKnots = {
    0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
inline constexpr std::array<double, 11> kBlockHeights = {
    4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};
inline constexpr std::array<double, 11> kBumpHeights = {
    4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
inline constexpr std::array<double, 11> kBumpWidths = {
    0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005};

inline double sgn(double x) { return static_cast<double>((x > 0) - (x < 0)); }

}  // namespace detail

// The classical test signals on [0, 1]:
//   doppler    sqrt(t (1 - t)) sin(2.1 pi / (t + 0.05))
//   heavisine  4 sin(4 pi t) - sgn(t - 0.3) - sgn(0.72 - t)
//   blocks     sum_j h_j (1 + sgn(t - t_j)) / 2
//   bumps      sum_j h_j (1 + |(t - t_j) / w_j|)^-4
inline double donoho_signal(Signal s, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("signal domain is [0, 1]");
  using std::numbers::pi;
  switch (s) {
    case Signal::kDoppler:
      return std::sqrt(t * (1.0 - t)) * std::sin(2.1 * pi / (t + 0.05));
    case Signal::kHeavisine:
      return 4.0 * std::sin(4.0 * pi * t) - detail::sgn(t - 0.3) -
             detail::sgn(0.72 - t);
    case Signal::kBlocks: {
      double f = 0.0;
      for (std::size_t j = 0; j < detail::kKnots.size(); ++j) {
        f += detail::kBlockHeights[j] * (1.0 + detail::sgn(t - detail::kKnots[j])) / 2.0;
      }
      return f;
    }
    case Signal::kBumps: {
      double f = 0.0;
      for (std::size_t j = 0; j < detail::kKnots.size(); ++j) {
        const double u = std::abs((t - detail::kKnots[j]) / detail::kBumpWidths[j]);
        f += detail::kBumpHeights[j] * std::pow(1.0 + u, -4.0);
      }
      return f;
    }
  }
  throw ConfigError("unknown signal");
}

inline double donoho_signal(std::string_view name, double t) {
  return donoho_signal(signal_from_string(name), t);
}

// Grid t_i = (i - 1/2) / n, i = 1..n.
inline std::vector<double> signal_grid(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  }
  return t;
}

inline std::vector<double> sample_signal(Signal s, std::span<const double> t) {
  std::vector<double> f(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) f[i] = donoho_signal(s, t[i]);
  return f;
}

inline double population_sd(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size()));
}

// signal + sigma * N(0, 1) with sigma = sd(signal) / snr.
inline std::vector<double> add_noise(std::span<const double> signal, double snr,
                                     std::uint64_t seed) {
  if (!(snr > 0.0)) throw ConfigError("snr must be positive");
  if (signal.empty()) throw ConfigError("empty signal");
  const double sd = population_sd(signal);
  if (!(sd > 0.0)) throw DataError("cannot set an snr on a constant signal");
  const double sigma = sd / snr;
  CounterEngine engine(seed, 1, Purpose::kData);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> y(signal.begin(), signal.end());
  for (auto& v : y) v += sigma * noise(engine);
  return y;
}

}  // namespace treeagg

#endif  // TREEAGG_DATASETS_HPP_
