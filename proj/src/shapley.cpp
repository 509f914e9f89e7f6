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

#include "bcfl/shapley.hpp"

#include "bcfl/errors.hpp"
#include "bcfl/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bcfl {
namespace {

double distance_to_target(double sum, std::size_t count, double target)
{
  return std::abs(sum / static_cast<double>(count) - target);
}

// 1 / (N * C(N-1, s)) == s! (N-s-1)! / N!
std::vector<double> permutation_weights(std::size_t n)
{
  std::vector<double> w(n);
  double              binom = 1.0;  // C(n-1, s)
  for (std::size_t s = 0; s < n; ++s)
  {
    w[s] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
  }
  return w;
}

double log_binomial(std::size_t n, std::size_t r)
{
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(r) + 1.0) -
         std::lgamma(static_cast<double>(n - r) + 1.0);
}

bool all_identical(std::vector<double> const &values)
{
  return std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>{}) ==
         values.end();
}

struct TypeGroups
{
  std::vector<double>      value;
  std::vector<std::size_t> count;
  std::vector<std::size_t> type_of;  // per client
};

TypeGroups group_types(std::vector<double> const &perf)
{
  TypeGroups g;
  std::vector<double> distinct = perf;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  g.value = distinct;
  g.count.assign(distinct.size(), 0);
  g.type_of.resize(perf.size());
  for (std::size_t i = 0; i < perf.size(); ++i)
  {
    auto const k = static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), perf[i]) - distinct.begin());
    g.type_of[i] = k;
    ++g.count[k];
  }
  return g;
}

}  // namespace

CoalitionValueSpec CoalitionValueSpec::build(std::vector<double> per_client_perf,
                                             double target_perf, std::size_t enumeration_limit)
{
  if (per_client_perf.empty())
  {
    throw ArgumentError("coalition game needs at least one client");
  }
  for (double g : per_client_perf)
  {
    if (!std::isfinite(g))
    {
      throw ArgumentError("per-client performance must be finite");
    }
  }

  CoalitionValueSpec spec;
  spec.per_client_perf = std::move(per_client_perf);
  spec.target_perf     = target_perf;

  std::size_t const n = spec.size();
  double            w = 0.0;
  if (n <= enumeration_limit && n < 63)
  {
    std::uint64_t const full = (std::uint64_t{1} << n);
    std::vector<double> sum(full, 0.0);
    for (std::uint64_t mask = 1; mask < full; ++mask)
    {
      auto const low = static_cast<std::size_t>(std::countr_zero(mask));
      sum[mask]      = sum[mask & (mask - 1)] + spec.per_client_perf[low];
      w = std::max(w, distance_to_target(sum[mask], static_cast<std::size_t>(std::popcount(mask)),
                                         target_perf));
    }
  }
  else
  {
    double total = 0.0;
    for (double g : spec.per_client_perf)
    {
      w = std::max(w, std::abs(g - target_perf));
      total += g;
    }
    w = std::max(w, distance_to_target(total, n, target_perf));
  }
  spec.normalizer = w;
  return spec;
}

CoalitionValueSpec coalition_spec_for(std::span<ClientProfile const> profiles,
                                      SystemConfig const &config, std::size_t enumeration_limit)
{
  std::vector<double> perf;
  perf.reserve(profiles.size());
  for (auto const &p : profiles)
  {
    perf.push_back(performance_fn(config.perf_fn, p.mu));
  }
  return CoalitionValueSpec::build(std::move(perf), config.target_perf, enumeration_limit);
}

double coalition_value(CoalitionValueSpec const &spec, std::span<std::size_t const> members)
{
  if (members.empty())
  {
    return 0.0;
  }
  std::vector<bool> seen(spec.size(), false);
  double            sum = 0.0;
  for (std::size_t id : members)
  {
    if (id >= spec.size())
    {
      throw ArgumentError("unknown client id " + std::to_string(id) + " in coalition");
    }
    if (seen[id])
    {
      throw ArgumentError("client id " + std::to_string(id) + " repeated in coalition");
    }
    seen[id] = true;
    sum += spec.per_client_perf[id];
  }
  return spec.normalizer - distance_to_target(sum, members.size(), spec.target_perf);
}

std::vector<double> shapley_exact(CoalitionValueSpec const &spec, std::size_t limit)
{
  std::size_t const n = spec.size();
  if (n > limit || n >= 63)
  {
    throw EnumerationLimitError("exact Shapley enumeration supports at most " +
                                std::to_string(limit) + " clients (got " + std::to_string(n) +
                                "); use shapley_sampled or shapley_by_type");
  }

  std::uint64_t const full = std::uint64_t{1} << n;
  std::vector<double> value(full, 0.0);
  {
    std::vector<double> sum(full, 0.0);
    for (std::uint64_t mask = 1; mask < full; ++mask)
    {
      auto const low = static_cast<std::size_t>(std::countr_zero(mask));
      sum[mask]      = sum[mask & (mask - 1)] + spec.per_client_perf[low];
      value[mask]    = spec.normalizer -
                    distance_to_target(sum[mask], static_cast<std::size_t>(std::popcount(mask)),
                                       spec.target_perf);
    }
  }

  auto const          weight = permutation_weights(n);
  std::vector<double> sv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    std::uint64_t const bit = std::uint64_t{1} << i;
    double              acc = 0.0;
    for (std::uint64_t mask = 0; mask < full; ++mask)
    {
      if ((mask & bit) != 0U)
      {
        continue;
      }
      acc += weight[static_cast<std::size_t>(std::popcount(mask))] *
             (value[mask | bit] - value[mask]);
    }
    sv[i] = acc;
  }
  return sv;
}

std::vector<double> shapley_by_type(CoalitionValueSpec const &spec, std::size_t profile_limit)
{
  std::size_t const n      = spec.size();
  auto const        groups = group_types(spec.per_client_perf);
  std::size_t const types  = groups.value.size();

  // Mixed-radix enumeration of count profiles c, 0 <= c_k <= count_k.
  std::vector<std::size_t> stride(types, 1);
  std::size_t              profiles = 1;
  for (std::size_t k = 0; k < types; ++k)
  {
    stride[k] = profiles;
    if (profiles > profile_limit / (groups.count[k] + 1))
    {
      throw EnumerationLimitError("by-type Shapley needs more than " +
                                  std::to_string(profile_limit) +
                                  " count profiles; use shapley_sampled");
    }
    profiles *= groups.count[k] + 1;
  }

  std::vector<double>      value(profiles, 0.0);
  std::vector<std::size_t> size(profiles, 0);
  std::vector<std::size_t> c(types, 0);
  for (std::size_t idx = 0; idx < profiles; ++idx)
  {
    std::size_t rem = idx;
    std::size_t s   = 0;
    double      sum = 0.0;
    for (std::size_t k = types; k-- > 0;)
    {
      c[k] = rem / stride[k];
      rem %= stride[k];
    }
    for (std::size_t k = 0; k < types; ++k)
    {
      s += c[k];
      sum += static_cast<double>(c[k]) * groups.value[k];
    }
    size[idx]  = s;
    value[idx] = s == 0 ? 0.0
                        : spec.normalizer - distance_to_target(sum, s, spec.target_perf);
  }

  std::vector<std::vector<double>> log_choose(types);
  for (std::size_t k = 0; k < types; ++k)
  {
    log_choose[k].resize(groups.count[k] + 1);
    for (std::size_t r = 0; r <= groups.count[k]; ++r)
    {
      log_choose[k][r] = log_binomial(groups.count[k], r);
    }
  }
  std::vector<double> log_perm(n);  // log of 1 / (N * C(N-1, s))
  for (std::size_t s = 0; s < n; ++s)
  {
    log_perm[s] = -std::log(static_cast<double>(n)) - log_binomial(n - 1, s);
  }

  std::vector<double> sv_type(types, 0.0);
  for (std::size_t k = 0; k < types; ++k)
  {
    double acc = 0.0;
    for (std::size_t idx = 0; idx < profiles; ++idx)
    {
      std::size_t rem     = idx;
      double      log_mul = 0.0;
      bool        valid   = true;
      for (std::size_t j = types; j-- > 0;)
      {
        std::size_t const cj = rem / stride[j];
        rem %= stride[j];
        if (j == k)
        {
          if (cj == groups.count[k])
          {
            valid = false;
            break;
          }
          log_mul += log_binomial(groups.count[k] - 1, cj);
        }
        else
        {
          log_mul += log_choose[j][cj];
        }
      }
      if (!valid)
      {
        continue;
      }
      acc += std::exp(log_mul + log_perm[size[idx]]) * (value[idx + stride[k]] - value[idx]);
    }
    sv_type[k] = acc;
  }

  std::vector<double> sv(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    sv[i] = sv_type[groups.type_of[i]];
  }
  return sv;
}

ShapleyEstimate shapley_sampled(CoalitionValueSpec const &spec, std::size_t samples,
                                std::uint64_t seed)
{
  if (samples == 0)
  {
    throw ArgumentError("shapley_sampled needs at least one sample");
  }
  std::size_t const n = spec.size();

  std::vector<double>      mean(n, 0.0);
  std::vector<double>      m2(n, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  Rng rng(seed);
  for (std::size_t t = 0; t < samples; ++t)
  {
    for (std::size_t i = n; i > 1; --i)
    {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    double sum    = 0.0;
    double v_prev = 0.0;
    for (std::size_t pos = 0; pos < n; ++pos)
    {
      std::size_t const id = order[pos];
      sum += spec.per_client_perf[id];
      double const v = spec.normalizer - distance_to_target(sum, pos + 1, spec.target_perf);
      double const marginal = v - v_prev;
      v_prev                = v;

      double const delta = marginal - mean[id];
      mean[id] += delta / static_cast<double>(t + 1);
      m2[id] += delta * (marginal - mean[id]);
    }
  }

  ShapleyEstimate est;
  est.value      = mean;
  est.samples    = samples;
  est.seed       = seed;
  est.normalizer = spec.normalizer;
  est.std_error.resize(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    est.std_error[i] =
        samples < 2 ? std::numeric_limits<double>::infinity()
                    : std::sqrt(m2[i] / static_cast<double>(samples - 1) /
                                static_cast<double>(samples));
  }
  return est;
}

RewardBounds reward_bounds_from_shapley(std::size_t n, SystemConfig const &config,
                                        std::vector<double> sv, double grand_value,
                                        bool identical, DegeneratePolicy policy)
{
  if (n == 0 || sv.size() != n)
  {
    throw ArgumentError("reward bounds need one Shapley value per client");
  }
  double const mining_budget = config.implied_mining_budget(n);
  if (!(mining_budget < config.budget_total))
  {
    throw ConfigError("mining budget " + std::to_string(mining_budget) +
                      " leaves nothing of the total budget for training");
  }
  double const training_budget = config.budget_total - mining_budget;

  RewardBounds rb;
  rb.grand_value   = grand_value;
  rb.mining_budget = mining_budget;
  rb.mine_bound.assign(n, config.mining_bound(n));
  rb.train_bound.resize(n);

  double const scale = std::max({1.0, std::abs(grand_value)});
  if (std::abs(grand_value) <= 1e-12 * scale)
  {
    if (policy == DegeneratePolicy::kError || !identical)
    {
      throw DegenerateValueError(
          "grand-coalition value v(N) is zero; training reward shares are undefined");
    }
    rb.symmetric_split = true;
    std::fill(rb.train_bound.begin(), rb.train_bound.end(),
              training_budget / static_cast<double>(n));
  }
  else
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      rb.train_bound[i] = sv[i] / grand_value * training_budget;
    }
  }
  rb.sv = std::move(sv);
  return rb;
}

RewardBounds reward_bounds(std::span<ClientProfile const> profiles, SystemConfig const &config,
                           ShapleyOptions const &options)
{
  if (profiles.empty())
  {
    throw ArgumentError("reward bounds need at least one client");
  }
  auto const spec = coalition_spec_for(profiles, config, options.exact_limit);
  std::size_t const n = spec.size();

  std::vector<std::size_t> everyone(n);
  std::iota(everyone.begin(), everyone.end(), std::size_t{0});
  double const grand     = coalition_value(spec, everyone);
  bool const   identical = all_identical(spec.per_client_perf);

  std::vector<double> sv;
  std::string         method;
  switch (options.method)
  {
  case ShapleyMethod::kAuto:
    if (identical)
    {
      sv.assign(n, grand / static_cast<double>(n));
      method = "symmetric";
    }
    else if (n <= options.exact_limit)
    {
      sv     = shapley_exact(spec, options.exact_limit);
      method = "exact";
    }
    else
    {
      try
      {
        sv     = shapley_by_type(spec, options.profile_limit);
        method = "by_type";
      }
      catch (EnumerationLimitError const &)
      {
        sv     = shapley_sampled(spec, options.samples, options.seed).value;
        method = "sampled";
      }
    }
    break;
  case ShapleyMethod::kExact:
    sv     = shapley_exact(spec, options.exact_limit);
    method = "exact";
    break;
  case ShapleyMethod::kByType:
    sv     = shapley_by_type(spec, options.profile_limit);
    method = "by_type";
    break;
  case ShapleyMethod::kSampled:
    sv     = shapley_sampled(spec, options.samples, options.seed).value;
    method = "sampled";
    break;
  }

  auto rb   = reward_bounds_from_shapley(n, config, std::move(sv), grand, identical,
                                         options.degenerate);
  rb.method = method;
  return rb;
}

}  // namespace bcfl
