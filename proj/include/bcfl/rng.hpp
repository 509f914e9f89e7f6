#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The bcfl-incentive Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <cmath>
#include <cstdint>
#include <random>

namespace bcfl {

/// splitmix64 finaliser; used to derive independent stream seeds from
/// (seed, stream index) pairs.
constexpr std::uint64_t mix_seed(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream)
{
  return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 with distribution code written out, so draws are identical across
/// standard library implementations.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01()
  {
    return static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
  }

  double uniform(double lo, double hi)
  {
    return lo + (hi - lo) * uniform01();
  }

  /// Uniform in log space on [lo, hi]; both bounds positive.
  double log_uniform(double lo, double hi)
  {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n)
  {
    std::uint64_t const limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t       x     = engine_();
    while (x >= limit)
    {
      x = engine_();
    }
    return x % n;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace bcfl
