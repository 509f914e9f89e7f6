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

#include "bcfl/oracle.hpp"

#include "bcfl/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace bcfl {
namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

double scaled(double value, double scale)
{
  return std::abs(value) / std::max(scale, kTiny);
}

struct Stage1Eval
{
  bool          ok = false;
  double        value = 0.0;  // -xi * cost term
  ClientUtility utility;
};

// Model owner's view of one client at prices, closed-form response.
Stage1Eval evaluate_closed_form(ClientProfile const &profile, SystemConfig const &config,
                                PricePair const &prices)
{
  Stage1Eval e;
  if (!(prices.p_t > 0.0))
  {
    return e;
  }
  double const left = config.horizon - profile.mu * std::cbrt(profile.rho / prices.p_t);
  if (!(left > 0.0))
  {
    return e;
  }
  PowerPair const q{std::cbrt(prices.p_t / profile.rho), config.psi / left};
  e.utility = client_utility(profile, config, prices, q);
  e.value   = -config.xi * (e.utility.breakdown.total_time() + e.utility.breakdown.total_reward());
  e.ok      = true;
  return e;
}

bool stage1_feasible(ClientUtility const &u, ClientBounds const &bounds, Scenario scenario)
{
  auto const &b = u.breakdown;
  if (b.reward_train > bounds.train * (1.0 + kFeasibilityTolerance))
  {
    return false;
  }
  if (b.reward_mine > bounds.mine * (1.0 + kFeasibilityTolerance))
  {
    return false;
  }
  if (scenario == Scenario::kIncomplete && u.value < -kFeasibilityTolerance * b.total_cost())
  {
    return false;
  }
  return true;
}

// Box implied by the client's own constraints: training no faster than the
// payoff cap (p_t / rho)^(1/3) and no slower than mu / T; likewise for mining.
GridSpec inner_box(ClientProfile const &profile, SystemConfig const &config,
                   PricePair const &prices, std::size_t points)
{
  GridSpec g;
  g.first  = {profile.mu / config.horizon, std::cbrt(prices.p_t / profile.rho), points,
              Spacing::kLinear};
  g.second = {config.psi / config.horizon, std::cbrt(prices.p_m / profile.rho), points,
              Spacing::kLinear};
  return g;
}

void finish(KktReport &r)
{
  r.max_residual = 0.0;
  for (auto const &c : r.conditions)
  {
    r.max_residual = std::max(r.max_residual, c.residual);
  }
  r.negative_multiplier = false;
  for (auto const &[name, value] : r.multipliers)
  {
    if (value < 0.0)
    {
      r.negative_multiplier = true;
    }
  }
}

}  // namespace

void Axis::validate() const
{
  if (points < 2)
  {
    throw ArgumentError("grid axis needs at least two points");
  }
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && hi > lo))
  {
    throw ArgumentError("grid axis needs 0 < lo < hi");
  }
}

double Axis::at(std::size_t k) const
{
  double const t = static_cast<double>(k) / static_cast<double>(points - 1);
  if (spacing == Spacing::kGeometric)
  {
    return std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  return lo + t * (hi - lo);
}

double Axis::cells_between(double a, double b) const
{
  double const cells = static_cast<double>(points - 1);
  if (spacing == Spacing::kGeometric)
  {
    return std::abs(std::log(a) - std::log(b)) / (std::log(hi) - std::log(lo)) * cells;
  }
  return std::abs(a - b) / (hi - lo) * cells;
}

GridSpec stage2_grid_around(PowerPair const &center, std::size_t points)
{
  return {{0.5 * center.q_t, 1.5 * center.q_t, points, Spacing::kLinear},
          {0.5 * center.q_m, 1.5 * center.q_m, points, Spacing::kLinear}};
}

GridSpec stage1_grid_around(PricePair const &center, std::size_t points)
{
  return {{center.p_t / 10.0, center.p_t * 10.0, points, Spacing::kGeometric},
          {center.p_m / 10.0, center.p_m * 10.0, points, Spacing::kGeometric}};
}

bool stage2_feasible(ClientProfile const &profile, SystemConfig const &config,
                     PricePair const &prices, PowerPair const &powers)
{
  auto const  u = client_utility(profile, config, prices, powers);
  auto const &b = u.breakdown;
  double const tol = kFeasibilityTolerance;
  return b.cost_train - b.reward_train <= tol * (b.cost_train + b.reward_train) &&
         b.cost_mine - b.reward_mine <= tol * (b.cost_mine + b.reward_mine) &&
         b.total_time() - config.horizon <= tol * config.horizon;
}

GridSearchResult grid_best_response(ClientProfile const &profile, SystemConfig const &config,
                                    PricePair const &prices, GridSpec const &grid)
{
  grid.first.validate();
  grid.second.validate();

  GridSearchResult out;
  out.total_points = grid.first.points * grid.second.points;

  std::vector<double> ys(grid.second.points);
  for (std::size_t j = 0; j < ys.size(); ++j)
  {
    ys[j] = grid.second.at(j);
  }
  double const tol = kFeasibilityTolerance;
  for (std::size_t i = 0; i < grid.first.points; ++i)
  {
    double const q_t          = grid.first.at(i);
    double const t_train      = profile.mu / q_t;
    double const reward_train = t_train * prices.p_t;
    double const cost_train   = profile.rho * profile.mu * q_t * q_t;
    if (cost_train - reward_train > tol * (cost_train + reward_train))
    {
      continue;
    }
    for (std::size_t j = 0; j < ys.size(); ++j)
    {
      double const q_m         = ys[j];
      double const t_mine      = config.psi / q_m;
      double const reward_mine = t_mine * prices.p_m;
      double const cost_mine   = profile.rho * config.psi * q_m * q_m;
      if (cost_mine - reward_mine > tol * (cost_mine + reward_mine))
      {
        continue;
      }
      if (t_train + t_mine - config.horizon > tol * config.horizon)
      {
        continue;
      }
      ++out.feasible_points;
      double const u = reward_train + reward_mine - cost_train - cost_mine;
      if (!out.best || u > out.best->value)
      {
        out.best = GridOptimum{i, j, q_t, q_m, u};
      }
    }
  }
  return out;
}

std::optional<double> stage1_client_value(ClientProfile const &profile,
                                          SystemConfig const &config, PricePair const &prices)
{
  auto const e = evaluate_closed_form(profile, config, prices);
  if (!e.ok)
  {
    return std::nullopt;
  }
  return e.value;
}

PriceGridResult grid_optimal_prices(std::span<ClientProfile const> profiles,
                                    SystemConfig const &config, RewardBounds const &bounds,
                                    Scenario scenario, std::span<GridSpec const> grids,
                                    StageOneOptions const &options)
{
  if (grids.size() != profiles.size() || bounds.size() != profiles.size())
  {
    throw ArgumentError("grid_optimal_prices: one grid and one bound per client required");
  }

  using Key = std::tuple<double, double, double, double, double, double, double, double,
                         std::size_t, std::size_t>;
  std::map<Key, std::pair<GridSearchResult, PowerPair>> cache;

  PriceGridResult out;
  out.feasible = true;
  double total_mu = 0.0;
  double sum      = 0.0;
  for (std::size_t c = 0; c < profiles.size(); ++c)
  {
    auto const &profile = profiles[c];
    auto const  cb      = bounds_of(bounds, c);
    auto const &grid    = grids[c];
    grid.first.validate();
    grid.second.validate();
    total_mu += profile.mu;

    Key const key{profile.mu,    profile.rho,    cb.train,          cb.mine,
                  grid.first.lo, grid.first.hi,  grid.second.lo,    grid.second.hi,
                  grid.first.points, grid.second.points};
    auto hit = cache.find(key);
    if (hit == cache.end())
    {
      GridSearchResult res;
      PowerPair        response;
      res.total_points = grid.first.points * grid.second.points;
      for (std::size_t i = 0; i < grid.first.points; ++i)
      {
        double const p_t = grid.first.at(i);
        for (std::size_t j = 0; j < grid.second.points; ++j)
        {
          PricePair const prices{p_t, grid.second.at(j)};
          ClientUtility   u;
          PowerPair       q;
          if (options.nested)
          {
            auto const box = inner_box(profile, config, prices, options.inner_points);
            if (!(box.first.hi > box.first.lo && box.second.hi > box.second.lo))
            {
              continue;
            }
            auto const inner = grid_best_response(profile, config, prices, box);
            if (!inner.best)
            {
              continue;
            }
            q = {inner.best->x, inner.best->y};
            u = client_utility(profile, config, prices, q);
          }
          else
          {
            auto const e = evaluate_closed_form(profile, config, prices);
            if (!e.ok)
            {
              continue;
            }
            u = e.utility;
            q = {std::cbrt(prices.p_t / profile.rho),
                 config.psi / (config.horizon - profile.mu * std::cbrt(profile.rho / p_t))};
          }
          if (!stage1_feasible(u, cb, scenario))
          {
            continue;
          }
          ++res.feasible_points;
          double const value =
              -config.xi * (u.breakdown.total_time() + u.breakdown.total_reward());
          if (!res.best || value > res.best->value)
          {
            res.best = GridOptimum{i, j, prices.p_t, prices.p_m, value};
            response = q;
          }
        }
      }
      hit = cache.emplace(key, std::make_pair(res, response)).first;
    }
    out.per_client.push_back(hit->second.first);
    out.responses.push_back(hit->second.second);
    if (hit->second.first.best)
    {
      sum += hit->second.first.best->value;
    }
    else
    {
      out.feasible = false;
    }
  }
  out.mo_utility = performance_fn(config.perf_fn, total_mu) + sum;
  return out;
}

double printed_variant_mining_price(ClientProfile const &profile, SystemConfig const &config,
                                    ClientBounds const &bounds)
{
  double const rm = profile.rho * profile.mu;
  return bounds.mine / (config.horizon - std::pow(rm, 1.5) / std::sqrt(bounds.train));
}

KktCondition const *KktReport::find(std::string const &name) const
{
  for (auto const &c : conditions)
  {
    if (c.name == name)
    {
      return &c;
    }
  }
  return nullptr;
}

double KktReport::multiplier(std::string const &name) const
{
  for (auto const &[n, v] : multipliers)
  {
    if (n == name)
    {
      return v;
    }
  }
  throw ArgumentError("no multiplier named " + name);
}

double KktReport::max_residual_excluding_dual() const
{
  double m = 0.0;
  for (auto const &c : conditions)
  {
    if (c.name.rfind("dual_", 0) != 0)
    {
      m = std::max(m, c.residual);
    }
  }
  return m;
}

KktReport kkt_residuals_stage2(ClientProfile const &profile, SystemConfig const &config,
                               PricePair const &prices, PowerPair const &powers)
{
  auto const  u   = client_utility(profile, config, prices, powers);
  auto const &b   = u.breakdown;
  double const mu  = profile.mu;
  double const psi = config.psi;
  double const qt  = powers.q_t;
  double const qm  = powers.q_m;

  // dU/dq_t = -mu a_t / q_t^2 and the constraint gradients share the factor
  // mu / q_t^2 (psi / q_m^2 for mining).
  double const a_t = prices.p_t + 2.0 * profile.rho * qt * qt * qt;
  double const a_m = prices.p_m + 2.0 * profile.rho * qm * qm * qm;

  // g <= 0 form of the three constraints.
  double const g1 = b.cost_train - b.reward_train;
  double const g2 = b.cost_mine - b.reward_mine;
  double const g3 = b.total_time() - config.horizon;
  double const s1 = b.cost_train + b.reward_train;
  double const s2 = b.cost_mine + b.reward_mine;
  double const s3 = config.horizon;

  auto build = [&](char const *name, double l1, double l2, double l3) {
    KktReport r;
    r.active_case = name;
    r.time_slack  = -g3;
    double const st_t = (-(1.0 + l1) * a_t + l3) * mu / (qt * qt);
    double const st_m = (-(1.0 + l2) * a_m + l3) * psi / (qm * qm);
    r.conditions      = {
        {"stationarity_q_t", st_t,
         scaled(st_t, std::max(std::abs((1.0 + l1) * a_t), std::abs(l3)) * mu / (qt * qt))},
        {"stationarity_q_m", st_m,
         scaled(st_m, std::max(std::abs((1.0 + l2) * a_m), std::abs(l3)) * psi / (qm * qm))},
        {"complementarity_training_payoff", l1 * g1, scaled(l1 * g1, std::max(1.0, std::abs(l1)) * s1)},
        {"complementarity_mining_payoff", l2 * g2, scaled(l2 * g2, std::max(1.0, std::abs(l2)) * s2)},
        {"complementarity_time", l3 * g3, scaled(l3 * g3, std::max(1.0, std::abs(l3)) * s3)},
        {"primal_training_payoff", g1, std::max(0.0, g1) / s1},
        {"primal_mining_payoff", g2, std::max(0.0, g2) / s2},
        {"primal_time", g3, std::max(0.0, g3) / s3},
        {"dual_lambda1", l1, std::max(0.0, -l1)},
        {"dual_lambda2", l2, std::max(0.0, -l2)},
        {"dual_lambda3", l3, std::max(0.0, -l3) / (a_t + a_m)},
    };
    r.multipliers = {{"lambda1", l1}, {"lambda2", l2}, {"lambda3", l3}};
    finish(r);
    return r;
  };

  // Mining payoff multiplier zero: lambda3 from the q_m equation.
  double const l3_a = a_m;
  auto         rep_a = build("training payoff and time bind (lambda2 = 0)", l3_a / a_t - 1.0, 0.0,
                             l3_a);
  // Training payoff multiplier zero: lambda3 from the q_t equation.
  double const l3_b  = a_t;
  auto         rep_b = build("mining payoff and time bind (lambda1 = 0)", 0.0, l3_b / a_m - 1.0,
                             l3_b);
  return rep_b.max_residual < rep_a.max_residual ? rep_b : rep_a;
}

KktReport kkt_residuals_stage1(ClientProfile const &profile, SystemConfig const &config,
                               ClientBounds const &bounds, PricePair const &prices,
                               Scenario scenario)
{
  double const p_t = prices.p_t;
  double const p_m = prices.p_m;
  double const mu  = profile.mu;
  double const rho = profile.rho;
  double const psi = config.psi;
  double const xi  = config.xi;

  auto const response = best_response(profile, config, prices).powers;
  auto const u        = client_utility(profile, config, prices, response);
  auto const &b       = u.breakdown;

  // Closed-form response as a function of p_t:
  //   mu / q_t = mu a, a = (rho / p_t)^(1/3);   psi / q_m = D = T - mu a.
  double const a    = std::cbrt(rho / p_t);
  double const D    = config.horizon - mu * a;
  double const dD   = mu * a / (3.0 * p_t);
  double const dTt  = -dD;  // d(mu / q_t)/dp_t
  double const dRt  = 2.0 * mu * a / 3.0;
  double const dRmt = p_m * dD;
  double const dRmm = D;
  double const dCt  = 2.0 * b.cost_train / (3.0 * p_t);
  double const dCm  = -2.0 * rho * psi * psi * psi / (D * D * D) * dD;

  std::array<double, 2> const grad_obj{-xi * (dTt + dD + dRt + dRmt), -xi * dRmm};
  std::array<double, 2> const grad_train{dRt, 0.0};
  std::array<double, 2> const grad_mine{dRmt, dRmm};
  std::array<double, 2> const grad_ir{dCt + dCm - dRt - dRmt, -dRmm};

  double const h_train = b.reward_train - bounds.train;
  double const h_mine  = b.reward_mine - bounds.mine;
  double const h_ir    = b.total_cost() - b.total_reward();

  bool const complete = scenario == Scenario::kComplete;
  auto const &g_b     = complete ? grad_mine : grad_ir;

  // grad_obj = th_a * grad_train + th_b * g_b
  double const det  = grad_train[0] * g_b[1] - g_b[0] * grad_train[1];
  double       th_a = std::numeric_limits<double>::quiet_NaN();
  double       th_b = th_a;
  if (std::abs(det) > kTiny)
  {
    th_a = (grad_obj[0] * g_b[1] - g_b[0] * grad_obj[1]) / det;
    th_b = (grad_train[0] * grad_obj[1] - grad_obj[0] * grad_train[1]) / det;
  }

  KktReport r;
  r.active_case = complete ? "training and mining bounds bind" : "training bound and participation bind (alpha2 = 0)";
  for (std::size_t k = 0; k < 2; ++k)
  {
    double const v     = grad_obj[k] - th_a * grad_train[k] - th_b * g_b[k];
    double const scale = std::max({std::abs(grad_obj[k]), std::abs(th_a * grad_train[k]),
                                   std::abs(th_b * g_b[k])});
    double const res   = std::isfinite(v) ? scaled(v, scale) : std::numeric_limits<double>::infinity();
    r.conditions.push_back({k == 0 ? "stationarity_p_t" : "stationarity_p_m", v, res});
  }
  r.conditions.push_back({"binding_training_bound", h_train, scaled(h_train, bounds.train)});
  if (complete)
  {
    r.conditions.push_back({"binding_mining_bound", h_mine, scaled(h_mine, bounds.mine)});
    r.conditions.push_back({"dual_theta1", th_a, std::max(0.0, -th_a) / xi});
    r.conditions.push_back({"dual_theta2", th_b, std::max(0.0, -th_b) / xi});
    r.multipliers = {{"theta1", th_a}, {"theta2", th_b}};
  }
  else
  {
    r.conditions.push_back({"binding_ir", h_ir, scaled(h_ir, b.total_cost())});
    r.conditions.push_back({"primal_mining_bound", h_mine, std::max(0.0, h_mine) / bounds.mine});
    r.conditions.push_back({"dual_alpha1", th_a, std::max(0.0, -th_a) / xi});
    r.conditions.push_back({"dual_alpha3", th_b, std::max(0.0, -th_b) / xi});
    r.multipliers = {{"alpha1", th_a}, {"alpha2", 0.0}, {"alpha3", th_b}};
  }
  for (auto &c : r.conditions)
  {
    if (std::isnan(c.residual))
    {
      c.residual = std::numeric_limits<double>::infinity();
    }
  }
  finish(r);
  return r;
}

KktReport kkt_residuals_stage1(std::span<ClientProfile const> profiles,
                               SystemConfig const &config, RewardBounds const &bounds,
                               std::span<PricePair const> prices, Scenario scenario)
{
  if (prices.size() != profiles.size())
  {
    throw ArgumentError("kkt_residuals_stage1: one price pair per client required");
  }
  KktReport merged;
  for (std::size_t i = 0; i < profiles.size(); ++i)
  {
    auto const r = kkt_residuals_stage1(profiles[i], config, bounds_of(bounds, i), prices[i],
                                        scenario);
    if (i == 0)
    {
      merged = r;
      continue;
    }
    for (std::size_t k = 0; k < r.conditions.size(); ++k)
    {
      if (r.conditions[k].residual > merged.conditions[k].residual)
      {
        merged.conditions[k] = r.conditions[k];
      }
    }
    for (std::size_t k = 0; k < r.multipliers.size(); ++k)
    {
      merged.multipliers[k].second = std::min(merged.multipliers[k].second, r.multipliers[k].second);
    }
  }
  finish(merged);
  return merged;
}

}  // namespace bcfl
