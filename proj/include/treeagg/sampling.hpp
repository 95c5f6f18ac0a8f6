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

#ifndef TREEAGG_SAMPLING_HPP_
#define TREEAGG_SAMPLING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "treeagg/error.hpp"
#include "treeagg/random.hpp"

namespace treeagg {

inline constexpr int kMaxBootstrapRetries = 64;

// In-the-bag multiplicities of one bootstrap draw. Rows with multiplicity
// zero are out-of-bag.
struct BootstrapSample {
  std::vector<std::uint32_t> itb_weights;
  std::vector<std::size_t> itb_indices;
  std::vector<std::size_t> oob_indices;

  std::size_t n() const { return itb_weights.size(); }
};

// Tallies explicit draws (0-based row indices) into a sample.
inline BootstrapSample bootstrap_from_draws(std::size_t n,
                                            std::span<const std::size_t> draws) {
  BootstrapSample s;
  s.itb_weights.assign(n, 0);
  for (auto d : draws) {
    if (d >= n) throw ConfigError("bootstrap draw out of range");
    ++s.itb_weights[d];
  }
  for (std::size_t i = 0; i < n; ++i) {
    (s.itb_weights[i] > 0 ? s.itb_indices : s.oob_indices).push_back(i);
  }
  return s;
}

// n uniform draws with replacement. A draw with no out-of-bag row is redrawn
// from the next sub-stream, up to kMaxBootstrapRetries times.
inline BootstrapSample bootstrap(std::size_t n, const RandomSource& rng) {
  if (n < 2) {
    throw ConfigError("bootstrap needs at least 2 samples, got " +
                      std::to_string(n));
  }
  std::vector<std::size_t> draws(n);
  for (int attempt = 0; attempt < kMaxBootstrapRetries; ++attempt) {
    auto engine =
        rng.engine(Purpose::kBootstrap, static_cast<std::uint64_t>(attempt));
    for (auto& d : draws) d = engine.bounded(n);
    auto sample = bootstrap_from_draws(n, draws);
    if (!sample.oob_indices.empty()) return sample;
  }
  throw ConfigError("bootstrap produced no out-of-bag sample after " +
                    std::to_string(kMaxBootstrapRetries) + " attempts");
}

// floor(sqrt(d)), at least 1.
inline std::size_t default_max_features(std::size_t d) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(d)));
  while (r * r > d) --r;
  while ((r + 1) * (r + 1) <= d) ++r;
  return std::max<std::size_t>(1, r);
}

// Uniformly random subset of {0..d-1} of size d_max, returned sorted.
inline std::vector<std::size_t> subsample_features(std::size_t d,
                                                   std::size_t d_max,
                                                   CounterEngine& engine) {
  if (d_max < 1 || d_max > d) {
    throw ConfigError("max_features must be in [1, " + std::to_string(d) +
                      "], got " + std::to_string(d_max));
  }
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (d_max < d) {
    for (std::size_t i = 0; i < d_max; ++i) {
      auto j = i + static_cast<std::size_t>(engine.bounded(d - i));
      std::swap(all[i], all[j]);
    }
    all.resize(d_max);
    std::sort(all.begin(), all.end());
  }
  return all;
}

}  // namespace treeagg

#endif  // TREEAGG_SAMPLING_HPP_
