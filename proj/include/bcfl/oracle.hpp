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

// Brute-force and first-order verifiers for the closed-form strategies.
//
// The grid searches evaluate the utility functions directly over the feasible
// sets of the client's and the model owner's problems. The KKT reports recover
// Lagrange multipliers for the active constraint set at a candidate point and
// return stationarity, complementary-slackness, primal- and dual-feasibility
// residuals. Multipliers are reported as recovered, including negative ones.

#include "bcfl/model.hpp"
#include "bcfl/shapley.hpp"
#include "bcfl/stackelberg.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bcfl {

inline constexpr std::size_t kDefaultGridPoints   = 500;
inline constexpr double      kFeasibilityTolerance = 1e-9;

enum class Spacing
{
  kLinear,
  kGeometric,
};

struct Axis
{
  double      lo      = 0.0;
  double      hi      = 0.0;
  std::size_t points  = 2;
  Spacing     spacing = Spacing::kLinear;

  void   validate() const;
  double at(std::size_t k) const;
  /// Distance between two coordinates measured in grid cells (log cells for a
  /// geometric axis).
  double cells_between(double a, double b) const;
};

struct GridSpec
{
  Axis first;   ///< q_t or p_t
  Axis second;  ///< q_m or p_m
};

/// Linear axes over [0.5 c, 1.5 c] around a candidate response.
GridSpec stage2_grid_around(PowerPair const &center, std::size_t points = kDefaultGridPoints);
/// Geometric axes over [c / 10, 10 c] around candidate prices.
GridSpec stage1_grid_around(PricePair const &center, std::size_t points = kDefaultGridPoints);

struct GridOptimum
{
  std::size_t i = 0;
  std::size_t j = 0;
  double      x = 0.0;
  double      y = 0.0;
  double      value = 0.0;
};

struct GridSearchResult
{
  std::optional<GridOptimum> best;
  std::size_t                feasible_points = 0;
  std::size_t                total_points    = 0;

  bool feasible() const
  {
    return best.has_value();
  }
};

/// Constraint set of the client's problem: non-negative training payoff,
/// non-negative mining payoff, time budget. Relative tolerance
/// kFeasibilityTolerance.
bool stage2_feasible(ClientProfile const &profile, SystemConfig const &config,
                     PricePair const &prices, PowerPair const &powers);

/// Exhaustive argmax of client utility over the feasible grid points. Ties go
/// to the lexicographically smallest (i, j).
GridSearchResult grid_best_response(ClientProfile const &profile, SystemConfig const &config,
                                    PricePair const &prices, GridSpec const &grid);

struct StageOneOptions
{
  /// Solve each client's response by an inner grid instead of the closed form.
  bool        nested       = false;
  std::size_t inner_points = 50;
};

struct PriceGridResult
{
  std::vector<GridSearchResult> per_client;  ///< value = client's term of U_mo
  std::vector<PowerPair>        responses;   ///< at each client's grid argmax
  double                        mo_utility = 0.0;
  bool                          feasible   = false;
};

/// Argmax of the model owner's utility over per-client price grids. The
/// utility is separable across clients, so each client's grid is searched
/// independently. Complete: reward bounds filter the grid. Incomplete:
/// additionally the participation constraint. Incentive compatibility is not
/// filtered (see ic_audit).
PriceGridResult grid_optimal_prices(std::span<ClientProfile const> profiles,
                                    SystemConfig const &config, RewardBounds const &bounds,
                                    Scenario scenario, std::span<GridSpec const> grids,
                                    StageOneOptions const &options = {});

/// The model owner's per-client utility term, -xi * (time + rewards), with the
/// client responding by the closed form. Empty when no response exists.
std::optional<double> stage1_client_value(ClientProfile const &profile,
                                          SystemConfig const &config, PricePair const &prices);

/// The mining-price formula with the (rho mu)^(3/2) Rt^(-1/2) denominator term,
/// kept only to measure it against the substitution-derived form.
double printed_variant_mining_price(ClientProfile const &profile, SystemConfig const &config,
                                    ClientBounds const &bounds);

struct KktCondition
{
  std::string name;
  double      value    = 0.0;  ///< raw value of the condition
  double      residual = 0.0;  ///< scaled, non-negative
};

struct KktReport
{
  std::string                                   active_case;
  std::vector<KktCondition>                     conditions;
  std::vector<std::pair<std::string, double>>   multipliers;
  bool                                          negative_multiplier = false;
  double                                        max_residual        = 0.0;
  double                                        time_slack          = 0.0;  ///< horizon minus time used; stage 2 only

  KktCondition const *find(std::string const &name) const;
  double              multiplier(std::string const &name) const;
  /// Largest residual over conditions whose name does not start with "dual_".
  double max_residual_excluding_dual() const;
};

/// First-order conditions of the client's problem at (prices, powers).
/// Multipliers are recovered for the two time-binding cases (mining payoff
/// multiplier zero, or training payoff multiplier zero); the case with the
/// smaller worst residual is reported.
KktReport kkt_residuals_stage2(ClientProfile const &profile, SystemConfig const &config,
                               PricePair const &prices, PowerPair const &powers);

/// First-order conditions of the model owner's problem for one client, with the
/// client responding by the closed form. Complete: both reward bounds active.
/// Incomplete: training bound and participation constraint active.
KktReport kkt_residuals_stage1(ClientProfile const &profile, SystemConfig const &config,
                               ClientBounds const &bounds, PricePair const &prices,
                               Scenario scenario);

/// Whole-roster version: per-condition worst residual and most negative
/// multiplier over all clients.
KktReport kkt_residuals_stage1(std::span<ClientProfile const> profiles,
                               SystemConfig const &config, RewardBounds const &bounds,
                               std::span<PricePair const> prices, Scenario scenario);

}  // namespace bcfl
