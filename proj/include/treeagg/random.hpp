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

#ifndef TREEAGG_RANDOM_HPP_
#define TREEAGG_RANDOM_HPP_

#include <cstdint>
#include <limits>

namespace treeagg {

namespace detail {
__extension__ typedef unsigned __int128 uint128;
}  // namespace detail

// Stateless 64-bit mixer (SplitMix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// What a random stream is used for. Distinct purposes of the same tree never
// share draws.
enum class Purpose : std::uint64_t {
  kBootstrap = 1,
  kFeatures = 2,
  kData = 3,
  kSplit = 4,
};

// Counter-based generator: the i-th output is a pure function of
// (seed, stream, purpose, sub, i). Satisfies UniformRandomBitGenerator.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  constexpr CounterEngine(std::uint64_t seed, std::uint64_t stream,
                          Purpose purpose, std::uint64_t sub = 0) noexcept
      : key_(mix64(mix64(mix64(mix64(seed) ^ stream) ^
                         static_cast<std::uint64_t>(purpose)) ^
                   sub)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept { return at(counter_++); }

  constexpr result_type at(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter));
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

  // Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  // Used where bit-exact reproducibility across standard libraries matters.
  std::uint64_t bounded(std::uint64_t bound) noexcept {
    auto x = (*this)();
    auto m = static_cast<detail::uint128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<detail::uint128>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Keyed by (seed, stream); hands out engines per purpose.
struct RandomSource {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  CounterEngine engine(Purpose purpose, std::uint64_t sub = 0) const noexcept {
    return CounterEngine(seed, stream, purpose, sub);
  }
};

}  // namespace treeagg

#endif  // TREEAGG_RANDOM_HPP_
