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

// Closed-form strategies of the two-stage pricing game.
//
// Stage II (client, given prices):
//   q_t* = (p_t / rho)^(1/3)
//   q_m* = psi / (T - mu (rho / p_t)^(1/3))
//
// Stage I (model owner, given reward bounds Rt, Rm):
//   p_t* = rho^(-1/2) (Rt / mu)^(3/2)                        both scenarios
//   p_m* = Rm / (T - mu (rho / p_t*)^(1/3))                   complete information
//   p_m* = rho psi^3 / (T - mu (rho / p_t*)^(1/3))^3          incomplete information
//
// Under complete information both reward bounds bind; under incomplete
// information the client's participation constraint binds (utility zero).

#include "bcfl/model.hpp"
#include "bcfl/shapley.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bcfl {

enum class Scenario
{
  kComplete,
  kIncomplete,
};

std::string_view to_string(Scenario s);
/// Accepts "complete" and "incomplete"; throws ConfigError otherwise.
Scenario scenario_from_string(std::string_view s);

/// Relative tolerance used for the binding-constraint flags.
inline constexpr double kBindingTolerance = 1e-9;

struct ClientBounds
{
  double train = 0.0;
  double mine  = 0.0;
};

ClientBounds bounds_of(RewardBounds const &bounds, std::size_t i);

/// Smallest training price for which the time budget admits a mining frequency:
/// rho (mu / T)^3.
double min_feasible_training_price(ClientProfile const &profile, SystemConfig const &config);

/// Smallest training reward bound for which the optimal prices exist:
/// rho mu^3 / T^2.
double min_feasible_training_bound(ClientProfile const &profile, SystemConfig const &config);

struct Response
{
  PowerPair powers;
  bool      q_cap_exceeded = false;
};

/// Stage-II closed form. Throws DomainError for p_t <= 0 and
/// InfeasiblePriceError below the minimum feasible training price.
Response best_response(ClientProfile const &profile, SystemConfig const &config,
                       PricePair const &prices);

/// Stage-I prices under complete information (both reward bounds bind).
/// Throws InfeasibleBudgetError when the training bound is at or below
/// min_feasible_training_bound.
PricePair optimal_prices_complete(ClientProfile const &profile, SystemConfig const &config,
                                  ClientBounds const &bounds);

/// Stage-I prices under incomplete information (participation constraint binds).
PricePair optimal_prices_incomplete(ClientProfile const &profile, SystemConfig const &config,
                                    ClientBounds const &bounds);

PricePair optimal_prices(ClientProfile const &profile, SystemConfig const &config,
                         ClientBounds const &bounds, Scenario scenario);

struct BindingFlags
{
  bool time         = false;
  bool train_reward = false;
  bool mine_reward  = false;
  bool ir           = false;
};

BindingFlags binding_flags(ClientUtility const &utility, SystemConfig const &config,
                           ClientBounds const &bounds);

struct ClientOutcome
{
  std::size_t   id          = 0;
  double        reported_mu = 0.0;
  PricePair     prices;
  PowerPair     powers;
  ClientUtility realized;                ///< evaluated with the true profile
  double        expected_utility = 0.0;  ///< model owner's prediction from the report
  BindingFlags  binds;
  bool          q_cap_exceeded = false;
};

struct Equilibrium
{
  Scenario                   scenario = Scenario::kComplete;
  std::vector<ClientOutcome> clients;
  double                     mo_utility          = 0.0;  ///< realized
  double                     mo_utility_expected = 0.0;  ///< from reported values
  RewardBounds               bounds;
};

/// Complete information: Shapley reward bounds, budget-binding prices, closed-form
/// responses. All-or-nothing: a per-client infeasibility is rethrown with the
/// client id attached.
Equilibrium run_algorithm_complete(std::span<ClientProfile const> profiles,
                                   SystemConfig const &config, ShapleyOptions const &options = {});

/// Incomplete information: the model owner prices from `reported_mu`; clients
/// respond with their true profiles. Throws MechanismRejectError when a
/// client's expected utility is negative.
Equilibrium run_algorithm_incomplete(std::span<ClientProfile const> profiles,
                                     SystemConfig const &config,
                                     std::span<double const> reported_mu,
                                     ShapleyOptions const &options = {});

/// Dispatch with truthful reports.
Equilibrium run_algorithm(std::span<ClientProfile const> profiles, SystemConfig const &config,
                          Scenario scenario, ShapleyOptions const &options = {});

struct MisreportGrid
{
  double lo   = 0.0;
  double hi   = 0.0;
  double step = 0.0;
};

struct AuditPoint
{
  double      reported_mu = 0.0;
  bool        truthful    = false;
  bool        feasible    = false;
  std::string reason;  ///< why the point is infeasible
  double      train_bound = 0.0;
  PricePair   prices;
  PowerPair   powers;
  double      utility = 0.0;  ///< realized, with the true profile
};

struct IcAuditReport
{
  std::size_t             client  = 0;
  double                  true_mu = 0.0;
  std::vector<AuditPoint> table;
  double                  truthful_utility = 0.0;
  double                  best_reported_mu = 0.0;
  double                  best_utility     = 0.0;
  double                  gain             = 0.0;  ///< best_utility - truthful_utility
  std::size_t             infeasible_points = 0;
};

/// Evaluates the realized utility of client `client` for every report on the
/// grid, re-running the reward-bound pipeline and the incomplete-information
/// prices with the misreported value. Measures; asserts nothing.
IcAuditReport ic_audit(std::span<ClientProfile const> profiles, SystemConfig const &config,
                       std::size_t client, MisreportGrid const &grid,
                       ShapleyOptions const &options = {});

}  // namespace bcfl
