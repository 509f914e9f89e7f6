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

// Coalition game over per-client performance contributions and the fair
// training-reward bounds derived from its Shapley value.
//
//   v(S) = W - |mean_{i in S} G_i - g|,   v({}) = 0,
//   W    = max over nonempty S of |mean_{i in S} G_i - g|.

#include "bcfl/model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bcfl {

inline constexpr std::size_t kExactEnumerationLimit = 20;

struct CoalitionValueSpec
{
  std::vector<double> per_client_perf;  ///< G_i
  double              target_perf = 0.0;
  double              normalizer  = 0.0;  ///< W

  /// Computes W by enumerating all nonempty subsets when the roster has at most
  /// `enumeration_limit` clients, otherwise from the singletons. For scalar
  /// contributions both give the same value: the mean of a coalition lies in the
  /// convex hull of its members, so the distance to g peaks at a singleton.
  static CoalitionValueSpec build(std::vector<double> per_client_perf, double target_perf,
                                  std::size_t enumeration_limit = kExactEnumerationLimit);

  std::size_t size() const
  {
    return per_client_perf.size();
  }
};

/// G_i = f(mu_i) for every client, with f and g taken from the system config.
CoalitionValueSpec coalition_spec_for(std::span<ClientProfile const> profiles,
                                      SystemConfig const              &config,
                                      std::size_t enumeration_limit = kExactEnumerationLimit);

/// v(members). Empty set gives 0; unknown or repeated ids throw ArgumentError.
double coalition_value(CoalitionValueSpec const &spec, std::span<std::size_t const> members);

/// Exact Shapley values by subset enumeration (N * 2^N work).
/// Throws EnumerationLimitError above `limit` clients.
std::vector<double> shapley_exact(CoalitionValueSpec const &spec,
                                  std::size_t               limit = kExactEnumerationLimit);

/// Exact Shapley values for large rosters with few distinct contributions.
/// v depends only on how many members of each distinct G value a coalition
/// holds, so the sum runs over count profiles weighted by binomial
/// multiplicities. Throws EnumerationLimitError when the number of count
/// profiles exceeds `profile_limit`.
std::vector<double> shapley_by_type(CoalitionValueSpec const &spec,
                                    std::size_t               profile_limit = std::size_t{1} << 22U);

struct ShapleyEstimate
{
  std::vector<double> value;
  std::vector<double> std_error;  ///< infinite when samples == 1
  std::size_t         samples = 0;
  std::uint64_t       seed    = 0;
  double              normalizer = 0.0;  ///< W used by the estimator
};

/// Permutation-sampling estimator: mean marginal contribution over uniformly
/// random orderings. Deterministic for a given seed.
ShapleyEstimate shapley_sampled(CoalitionValueSpec const &spec, std::size_t samples,
                                std::uint64_t seed);

enum class DegeneratePolicy
{
  kSymmetricSplit,  ///< v(N) = 0 with identical contributions: equal shares
  kError,           ///< v(N) = 0 always throws DegenerateValueError
};

enum class ShapleyMethod
{
  kAuto,  ///< symmetric shortcut, then enumeration, then by-type, then sampling
  kExact,
  kByType,
  kSampled,
};

struct ShapleyOptions
{
  ShapleyMethod    method        = ShapleyMethod::kAuto;
  std::size_t      exact_limit   = kExactEnumerationLimit;
  std::size_t      profile_limit = std::size_t{1} << 22U;
  std::size_t      samples       = 100000;
  std::uint64_t    seed          = 1;
  DegeneratePolicy degenerate    = DegeneratePolicy::kSymmetricSplit;

  bool operator==(ShapleyOptions const &) const = default;
};

struct RewardBounds
{
  std::vector<double> train_bound;  ///< per-client training reward bound
  std::vector<double> mine_bound;   ///< per-client mining reward bound
  std::vector<double> sv;           ///< Shapley value per client
  double              grand_value   = 0.0;  ///< v(N)
  double              mining_budget = 0.0;  ///< eta_m (given or implied)
  std::string         method;               ///< how sv was obtained
  bool                symmetric_split = false;

  std::size_t size() const
  {
    return train_bound.size();
  }
};

/// Turns Shapley values into reward bounds:
///   mine_bound_i  = eta_m / N (or the configured per-client bound)
///   train_bound_i = sv_i / v(N) * (eta - eta_m)
RewardBounds reward_bounds_from_shapley(std::size_t n, SystemConfig const &config,
                                        std::vector<double> sv, double grand_value,
                                        bool all_identical, DegeneratePolicy policy);

/// Full pipeline: coalition spec from the roster, Shapley values by the chosen
/// method, then reward bounds.
RewardBounds reward_bounds(std::span<ClientProfile const> profiles, SystemConfig const &config,
                           ShapleyOptions const &options = {});

}  // namespace bcfl
