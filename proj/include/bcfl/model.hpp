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

// Domain types and utility functions of the training/mining resource game.
//
// Units: CPU frequency in GHz, time in minutes, so cycle counts (mu, psi) are in
// units of 10^9 cycles. Rewards and prices are dimensionless reward units.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bcfl {

/// One client's private parameters.
struct ClientProfile
{
  std::size_t id    = 0;
  double      mu    = 0.0;  ///< total training cycles for one round
  double      rho   = 0.0;  ///< chip energy coefficient
  double      q_cap = 0.0;  ///< maximum CPU frequency

  // Optional factorisation mu = iterations * cycles_per_sample * data_size.
  std::optional<double> data_size;
  std::optional<double> cycles_per_sample;
  std::optional<double> iterations;

  static ClientProfile from_factors(std::size_t id, double data_size, double cycles_per_sample,
                                    double iterations, double rho, double q_cap);

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  bool operator==(ClientProfile const &) const = default;
};

/// Monotone performance function f(.) used by the model owner's revenue and by
/// the per-client performance contributions of the coalition game.
struct PerformanceFn
{
  enum class Kind
  {
    kIdentity,    // f(x) = x
    kScaled,      // f(x) = kappa * x
    kSaturating,  // f(x) = a * log(1 + b * x)
  };

  Kind   kind  = Kind::kIdentity;
  double kappa = 1.0;
  double a     = 1.0;
  double b     = 1.0;

  static PerformanceFn identity();
  static PerformanceFn scaled(double kappa);
  static PerformanceFn saturating(double a, double b);

  /// Throws ConfigError for an unknown name or a non-monotone parameterisation.
  static PerformanceFn from_name(std::string_view name, double p1 = 1.0, double p2 = 1.0);

  std::string_view name() const;
  void             validate() const;

  bool operator==(PerformanceFn const &) const = default;
};

/// f(total_cycles). Throws DomainError for negative input.
double performance_fn(PerformanceFn const &fn, double total_cycles);

/// Model-owner and system-wide constants.
struct SystemConfig
{
  double horizon      = 0.0;  ///< round time budget T
  double psi          = 0.0;  ///< cycles needed to mine one block
  double budget_total = 0.0;  ///< total reward budget eta
  std::optional<double> mining_budget;            ///< eta_m, shared by all clients
  std::optional<double> mining_bound_per_client;  ///< per-client mining bound, set directly
  double        xi          = 0.0;                ///< revenue/cost balance
  double        target_perf = 0.0;                ///< target performance g
  PerformanceFn perf_fn{};

  void validate() const;

  /// Per-client mining reward bound for a roster of n clients.
  double mining_bound(std::size_t n) const;
  /// Total mining budget eta_m; derived as n * bound when the bound is set directly.
  double implied_mining_budget(std::size_t n) const;

  bool operator==(SystemConfig const &) const = default;
};

/// Model owner's unit prices (reward per minute) for one client.
struct PricePair
{
  double p_t = 0.0;
  double p_m = 0.0;

  bool operator==(PricePair const &) const = default;
};

/// A client's CPU frequencies (GHz) for training and mining.
struct PowerPair
{
  double q_t = 0.0;
  double q_m = 0.0;

  bool operator==(PowerPair const &) const = default;
};

struct RoundBreakdown
{
  double t_train      = 0.0;
  double t_mine       = 0.0;
  double reward_train = 0.0;
  double reward_mine  = 0.0;
  double cost_train   = 0.0;
  double cost_mine    = 0.0;
  bool   within_horizon = true;

  double total_time() const
  {
    return t_train + t_mine;
  }
  double total_reward() const
  {
    return reward_train + reward_mine;
  }
  double total_cost() const
  {
    return cost_train + cost_mine;
  }
};

struct ClientUtility
{
  double         value = 0.0;
  RoundBreakdown breakdown;
};

ClientUtility client_utility(ClientProfile const &profile, SystemConfig const &config,
                             PricePair const &prices, PowerPair const &powers);

/// Model owner's utility for a whole roster. Lists are aligned by position.
double mo_utility(std::span<ClientProfile const> profiles, SystemConfig const &config,
                  std::span<PricePair const> prices, std::span<PowerPair const> powers);

/// The per-client term of the model owner's cost sum (before scaling by xi).
double mo_cost_term(ClientProfile const &profile, SystemConfig const &config,
                    PricePair const &prices, PowerPair const &powers);

/// Settings of the reference experiments: eta = 1500, per-client mining bound 5,
/// xi = 0.1, g = 10, T = 15, psi = 5, identity f.
SystemConfig reference_config();

/// Roster of n identical reference clients (mu = 10, rho = 0.01, q_cap = 20).
std::vector<ClientProfile> reference_roster(std::size_t n = 50);

}  // namespace bcfl
