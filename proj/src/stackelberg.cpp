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

#include "bcfl/stackelberg.hpp"

#include "bcfl/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <string>

namespace bcfl {
namespace {

std::string num(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// T - mu (rho / p_t)^(1/3): the time left for mining at the closed-form
// training frequency.
double mining_time_left(ClientProfile const &profile, SystemConfig const &config, double p_t)
{
  return config.horizon - profile.mu * std::cbrt(profile.rho / p_t);
}

double training_price(ClientProfile const &profile, SystemConfig const &config,
                      ClientBounds const &bounds)
{
  double const minimum = min_feasible_training_bound(profile, config);
  if (!(bounds.train > minimum))
  {
    throw InfeasibleBudgetError("training reward bound " + num(bounds.train) +
                                    " admits no feasible prices; it must exceed rho*mu^3/T^2 = " +
                                    num(minimum),
                                minimum);
  }
  return std::sqrt(1.0 / profile.rho) * std::pow(bounds.train / profile.mu, 1.5);
}

bool close_rel(double a, double b, double scale)
{
  return std::abs(a - b) <= kBindingTolerance * scale;
}

void attach_client(InfeasibleError &e, std::size_t id)
{
  if (!e.client_id())
  {
    e.set_client(id);
  }
}

}  // namespace

std::string_view to_string(Scenario s)
{
  return s == Scenario::kComplete ? "complete" : "incomplete";
}

Scenario scenario_from_string(std::string_view s)
{
  if (s == "complete")
  {
    return Scenario::kComplete;
  }
  if (s == "incomplete")
  {
    return Scenario::kIncomplete;
  }
  throw ConfigError("unknown scenario '" + std::string{s} + "' (expected complete or incomplete)");
}

ClientBounds bounds_of(RewardBounds const &bounds, std::size_t i)
{
  if (i >= bounds.size() || i >= bounds.mine_bound.size())
  {
    throw ArgumentError("no reward bound for client index " + std::to_string(i));
  }
  return {bounds.train_bound[i], bounds.mine_bound[i]};
}

double min_feasible_training_price(ClientProfile const &profile, SystemConfig const &config)
{
  double const r = profile.mu / config.horizon;
  return profile.rho * r * r * r;
}

double min_feasible_training_bound(ClientProfile const &profile, SystemConfig const &config)
{
  return profile.rho * profile.mu * profile.mu * profile.mu / (config.horizon * config.horizon);
}

Response best_response(ClientProfile const &profile, SystemConfig const &config,
                       PricePair const &prices)
{
  if (!(std::isfinite(prices.p_t) && prices.p_t > 0.0))
  {
    throw DomainError("best response needs a positive finite training price, got " +
                      num(prices.p_t));
  }
  double const left = mining_time_left(profile, config, prices.p_t);
  if (!(left > 0.0))
  {
    double const minimum = min_feasible_training_price(profile, config);
    throw InfeasiblePriceError("training price " + num(prices.p_t) +
                                   " leaves no time for mining; minimum feasible p_t is "
                                   "rho*(mu/T)^3 = " +
                                   num(minimum),
                               minimum);
  }
  Response r;
  r.powers.q_t     = std::cbrt(prices.p_t / profile.rho);
  r.powers.q_m     = config.psi / left;
  r.q_cap_exceeded = r.powers.q_t > profile.q_cap || r.powers.q_m > profile.q_cap;
  return r;
}

PricePair optimal_prices_complete(ClientProfile const &profile, SystemConfig const &config,
                                  ClientBounds const &bounds)
{
  PricePair p;
  p.p_t = training_price(profile, config, bounds);
  // The mining bound binds at the closed-form mining frequency:
  // (psi / q_m*) p_m = Rm with psi / q_m* = T - mu (rho / p_t*)^(1/3).
  p.p_m = bounds.mine / mining_time_left(profile, config, p.p_t);
  return p;
}

PricePair optimal_prices_incomplete(ClientProfile const &profile, SystemConfig const &config,
                                    ClientBounds const &bounds)
{
  PricePair    p;
  p.p_t             = training_price(profile, config, bounds);
  double const left = mining_time_left(profile, config, p.p_t);
  p.p_m             = profile.rho * config.psi * config.psi * config.psi / (left * left * left);
  return p;
}

PricePair optimal_prices(ClientProfile const &profile, SystemConfig const &config,
                         ClientBounds const &bounds, Scenario scenario)
{
  return scenario == Scenario::kComplete ? optimal_prices_complete(profile, config, bounds)
                                         : optimal_prices_incomplete(profile, config, bounds);
}

BindingFlags binding_flags(ClientUtility const &utility, SystemConfig const &config,
                           ClientBounds const &bounds)
{
  auto const  &b = utility.breakdown;
  BindingFlags f;
  f.time         = close_rel(b.total_time(), config.horizon, config.horizon);
  f.train_reward = close_rel(b.reward_train, bounds.train, std::abs(bounds.train));
  f.mine_reward  = close_rel(b.reward_mine, bounds.mine, std::abs(bounds.mine));
  f.ir           = std::abs(utility.value) <= kBindingTolerance * b.total_cost();
  return f;
}

Equilibrium run_algorithm_complete(std::span<ClientProfile const> profiles,
                                   SystemConfig const &config, ShapleyOptions const &options)
{
  config.validate();
  for (auto const &p : profiles)
  {
    p.validate();
  }

  Equilibrium eq;
  eq.scenario = Scenario::kComplete;
  eq.bounds   = reward_bounds(profiles, config, options);

  std::vector<PricePair> prices(profiles.size());
  std::vector<PowerPair> powers(profiles.size());
  eq.clients.resize(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i)
  {
    auto const &profile = profiles[i];
    auto       &out     = eq.clients[i];
    try
    {
      auto const cb        = bounds_of(eq.bounds, i);
      out.prices           = optimal_prices_complete(profile, config, cb);
      auto const resp      = best_response(profile, config, out.prices);
      out.powers           = resp.powers;
      out.q_cap_exceeded   = resp.q_cap_exceeded;
      out.realized         = client_utility(profile, config, out.prices, out.powers);
      out.expected_utility = out.realized.value;
      out.binds            = binding_flags(out.realized, config, cb);
    }
    catch (InfeasibleError &e)
    {
      attach_client(e, profile.id);
      throw;
    }
    out.id          = profile.id;
    out.reported_mu = profile.mu;
    prices[i]       = out.prices;
    powers[i]       = out.powers;
  }
  eq.mo_utility          = mo_utility(profiles, config, prices, powers);
  eq.mo_utility_expected = eq.mo_utility;
  return eq;
}

Equilibrium run_algorithm_incomplete(std::span<ClientProfile const> profiles,
                                     SystemConfig const &config,
                                     std::span<double const> reported_mu,
                                     ShapleyOptions const &options)
{
  config.validate();
  if (reported_mu.size() != profiles.size())
  {
    throw ArgumentError("one reported mu per client is required");
  }
  std::vector<ClientProfile> reported(profiles.begin(), profiles.end());
  for (std::size_t i = 0; i < reported.size(); ++i)
  {
    profiles[i].validate();
    if (!(std::isfinite(reported_mu[i]) && reported_mu[i] > 0.0))
    {
      throw ArgumentError("reported mu of client " + std::to_string(profiles[i].id) +
                          " must be positive");
    }
    reported[i].mu = reported_mu[i];
    reported[i].data_size.reset();
    reported[i].cycles_per_sample.reset();
    reported[i].iterations.reset();
  }

  Equilibrium eq;
  eq.scenario = Scenario::kIncomplete;
  eq.bounds   = reward_bounds(reported, config, options);

  std::vector<PricePair> prices(profiles.size());
  std::vector<PowerPair> powers(profiles.size());
  std::vector<PowerPair> predicted(profiles.size());
  eq.clients.resize(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i)
  {
    auto &out = eq.clients[i];
    try
    {
      auto const cb = bounds_of(eq.bounds, i);
      out.prices    = optimal_prices_incomplete(reported[i], config, cb);

      predicted[i]           = best_response(reported[i], config, out.prices).powers;
      auto const expected    = client_utility(reported[i], config, out.prices, predicted[i]);
      out.expected_utility   = expected.value;
      if (expected.value < -kBindingTolerance * expected.breakdown.total_cost())
      {
        throw MechanismRejectError(profiles[i].id, expected.value);
      }

      auto const resp    = best_response(profiles[i], config, out.prices);
      out.powers         = resp.powers;
      out.q_cap_exceeded = resp.q_cap_exceeded;
      out.realized       = client_utility(profiles[i], config, out.prices, out.powers);
      out.binds          = binding_flags(out.realized, config, cb);
    }
    catch (InfeasibleError &e)
    {
      attach_client(e, profiles[i].id);
      throw;
    }
    out.id          = profiles[i].id;
    out.reported_mu = reported_mu[i];
    prices[i]       = out.prices;
    powers[i]       = out.powers;
  }
  eq.mo_utility          = mo_utility(profiles, config, prices, powers);
  eq.mo_utility_expected = mo_utility(reported, config, prices, predicted);
  return eq;
}

Equilibrium run_algorithm(std::span<ClientProfile const> profiles, SystemConfig const &config,
                          Scenario scenario, ShapleyOptions const &options)
{
  if (scenario == Scenario::kComplete)
  {
    return run_algorithm_complete(profiles, config, options);
  }
  std::vector<double> truthful;
  truthful.reserve(profiles.size());
  for (auto const &p : profiles)
  {
    truthful.push_back(p.mu);
  }
  return run_algorithm_incomplete(profiles, config, truthful, options);
}

IcAuditReport ic_audit(std::span<ClientProfile const> profiles, SystemConfig const &config,
                       std::size_t client, MisreportGrid const &grid,
                       ShapleyOptions const &options)
{
  if (client >= profiles.size())
  {
    throw ArgumentError("ic_audit: client index out of range");
  }
  if (!(grid.step > 0.0) || !(grid.lo > 0.0) || !(grid.hi >= grid.lo))
  {
    throw ArgumentError("ic_audit: misreport grid needs 0 < lo <= hi and step > 0");
  }
  double const truth = profiles[client].mu;
  if (truth < grid.lo || truth > grid.hi)
  {
    throw ArgumentError("ic_audit: misreport grid must cover the true mu " + num(truth));
  }

  std::vector<double> reports;
  auto const count = static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.step + 1e-9));
  for (std::size_t k = 0; k <= count; ++k)
  {
    reports.push_back(grid.lo + static_cast<double>(k) * grid.step);
  }
  // The truthful report is always evaluated exactly.
  bool has_truth = false;
  for (double &r : reports)
  {
    if (std::abs(r - truth) <= 1e-9 * truth)
    {
      r         = truth;
      has_truth = true;
    }
  }
  if (!has_truth)
  {
    reports.insert(std::upper_bound(reports.begin(), reports.end(), truth), truth);
  }

  IcAuditReport report;
  report.client  = client;
  report.true_mu = truth;

  std::vector<ClientProfile> reported(profiles.begin(), profiles.end());
  auto &liar = reported[client];
  liar.data_size.reset();
  liar.cycles_per_sample.reset();
  liar.iterations.reset();

  for (double r : reports)
  {
    AuditPoint pt;
    pt.reported_mu = r;
    pt.truthful    = r == truth;
    liar.mu        = r;
    try
    {
      auto const rb   = reward_bounds(reported, config, options);
      auto const cb   = bounds_of(rb, client);
      pt.train_bound  = cb.train;
      pt.prices       = optimal_prices_incomplete(liar, config, cb);
      pt.powers       = best_response(profiles[client], config, pt.prices).powers;
      pt.utility      = client_utility(profiles[client], config, pt.prices, pt.powers).value;
      pt.feasible     = true;
    }
    catch (InfeasibleError const &e)
    {
      pt.reason = e.what();
    }
    catch (DegenerateValueError const &e)
    {
      pt.reason = e.what();
    }
    if (!pt.feasible)
    {
      ++report.infeasible_points;
    }
    report.table.push_back(pt);
  }

  for (auto const &pt : report.table)
  {
    if (pt.truthful)
    {
      report.truthful_utility = pt.utility;
    }
  }
  report.best_reported_mu = truth;
  report.best_utility     = report.truthful_utility;
  for (auto const &pt : report.table)
  {
    if (pt.feasible && pt.utility > report.best_utility)
    {
      report.best_utility     = pt.utility;
      report.best_reported_mu = pt.reported_mu;
    }
  }
  report.gain = report.best_utility - report.truthful_utility;
  return report;
}

}  // namespace bcfl
