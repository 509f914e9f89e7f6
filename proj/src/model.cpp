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

#include "bcfl/model.hpp"

#include "bcfl/errors.hpp"

#include <cmath>
#include <string>

namespace bcfl {
namespace {

bool positive_finite(double x)
{
  return std::isfinite(x) && x > 0.0;
}

void require_power(double q, char const *name)
{
  if (!positive_finite(q))
  {
    throw DomainError(std::string{name} + " must be finite and positive, got " +
                      std::to_string(q));
  }
}

}  // namespace

ClientProfile ClientProfile::from_factors(std::size_t id, double data_size,
                                          double cycles_per_sample, double iterations,
                                          double rho, double q_cap)
{
  ClientProfile p;
  p.id                = id;
  p.mu                = iterations * cycles_per_sample * data_size;
  p.rho               = rho;
  p.q_cap             = q_cap;
  p.data_size         = data_size;
  p.cycles_per_sample = cycles_per_sample;
  p.iterations        = iterations;
  p.validate();
  return p;
}

void ClientProfile::validate() const
{
  auto const where = "client " + std::to_string(id) + ": ";
  if (!positive_finite(mu))
  {
    throw ConfigError(where + "mu must be positive");
  }
  if (!positive_finite(rho))
  {
    throw ConfigError(where + "rho must be positive");
  }
  if (!positive_finite(q_cap))
  {
    throw ConfigError(where + "q_cap must be positive");
  }
  bool const any = data_size || cycles_per_sample || iterations;
  bool const all = data_size && cycles_per_sample && iterations;
  if (any && !all)
  {
    throw ConfigError(where +
                      "data_size, cycles_per_sample and iterations must be given together");
  }
  if (all && mu != (*iterations) * (*cycles_per_sample) * (*data_size))
  {
    throw ConfigError(where + "mu must equal iterations * cycles_per_sample * data_size");
  }
}

PerformanceFn PerformanceFn::identity()
{
  return {};
}

PerformanceFn PerformanceFn::scaled(double kappa)
{
  PerformanceFn f;
  f.kind  = Kind::kScaled;
  f.kappa = kappa;
  f.validate();
  return f;
}

PerformanceFn PerformanceFn::saturating(double a, double b)
{
  PerformanceFn f;
  f.kind = Kind::kSaturating;
  f.a    = a;
  f.b    = b;
  f.validate();
  return f;
}

PerformanceFn PerformanceFn::from_name(std::string_view name, double p1, double p2)
{
  if (name == "identity")
  {
    return identity();
  }
  if (name == "scaled")
  {
    return scaled(p1);
  }
  if (name == "saturating")
  {
    return saturating(p1, p2);
  }
  throw ConfigError("unknown performance function '" + std::string{name} +
                    "' (expected identity, scaled or saturating)");
}

std::string_view PerformanceFn::name() const
{
  switch (kind)
  {
  case Kind::kIdentity:
    return "identity";
  case Kind::kScaled:
    return "scaled";
  case Kind::kSaturating:
    return "saturating";
  }
  return "identity";
}

void PerformanceFn::validate() const
{
  switch (kind)
  {
  case Kind::kIdentity:
    return;
  case Kind::kScaled:
    if (!(std::isfinite(kappa) && kappa >= 0.0))
    {
      throw ConfigError("scaled performance function needs kappa >= 0");
    }
    return;
  case Kind::kSaturating:
    if (!(std::isfinite(a) && a >= 0.0 && std::isfinite(b) && b > 0.0))
    {
      throw ConfigError("saturating performance function needs a >= 0 and b > 0");
    }
    return;
  }
}

double performance_fn(PerformanceFn const &fn, double total_cycles)
{
  if (!(total_cycles >= 0.0))
  {
    throw DomainError("performance function needs non-negative total cycles");
  }
  switch (fn.kind)
  {
  case PerformanceFn::Kind::kIdentity:
    return total_cycles;
  case PerformanceFn::Kind::kScaled:
    return fn.kappa * total_cycles;
  case PerformanceFn::Kind::kSaturating:
    return fn.a * std::log1p(fn.b * total_cycles);
  }
  return total_cycles;
}

void SystemConfig::validate() const
{
  if (!positive_finite(horizon))
  {
    throw ConfigError("horizon must be positive");
  }
  if (!positive_finite(psi))
  {
    throw ConfigError("psi must be positive");
  }
  if (!positive_finite(budget_total))
  {
    throw ConfigError("budget_total must be positive");
  }
  if (!positive_finite(xi))
  {
    throw ConfigError("xi must be positive");
  }
  if (!std::isfinite(target_perf))
  {
    throw ConfigError("target_perf must be finite");
  }
  if (mining_budget.has_value() == mining_bound_per_client.has_value())
  {
    throw ConfigError("exactly one of mining_budget and mining_bound_per_client must be set");
  }
  if (mining_budget && !(*mining_budget > 0.0 && *mining_budget < budget_total))
  {
    throw ConfigError("mining_budget must lie strictly between 0 and budget_total");
  }
  if (mining_bound_per_client && !positive_finite(*mining_bound_per_client))
  {
    throw ConfigError("mining_bound_per_client must be positive");
  }
  perf_fn.validate();
}

double SystemConfig::mining_bound(std::size_t n) const
{
  if (n == 0)
  {
    throw ArgumentError("mining bound needs at least one client");
  }
  if (mining_bound_per_client)
  {
    return *mining_bound_per_client;
  }
  return *mining_budget / static_cast<double>(n);
}

double SystemConfig::implied_mining_budget(std::size_t n) const
{
  if (mining_budget)
  {
    return *mining_budget;
  }
  return static_cast<double>(n) * *mining_bound_per_client;
}

ClientUtility client_utility(ClientProfile const &profile, SystemConfig const &config,
                             PricePair const &prices, PowerPair const &powers)
{
  require_power(powers.q_t, "q_t");
  require_power(powers.q_m, "q_m");

  ClientUtility u;
  auto         &b = u.breakdown;
  b.t_train       = profile.mu / powers.q_t;
  b.t_mine        = config.psi / powers.q_m;
  b.reward_train  = b.t_train * prices.p_t;
  b.reward_mine   = b.t_mine * prices.p_m;
  b.cost_train    = profile.rho * profile.mu * powers.q_t * powers.q_t;
  b.cost_mine     = profile.rho * config.psi * powers.q_m * powers.q_m;
  b.within_horizon = b.total_time() <= config.horizon;

  u.value = b.reward_train + b.reward_mine - b.cost_train - b.cost_mine;
  return u;
}

double mo_cost_term(ClientProfile const &profile, SystemConfig const &config,
                    PricePair const &prices, PowerPair const &powers)
{
  require_power(powers.q_t, "q_t");
  require_power(powers.q_m, "q_m");
  double const t_train = profile.mu / powers.q_t;
  double const t_mine  = config.psi / powers.q_m;
  return t_train + t_mine + t_train * prices.p_t + t_mine * prices.p_m;
}

double mo_utility(std::span<ClientProfile const> profiles, SystemConfig const &config,
                  std::span<PricePair const> prices, std::span<PowerPair const> powers)
{
  if (profiles.size() != prices.size() || profiles.size() != powers.size())
  {
    throw ArgumentError("mo_utility: profiles, prices and powers must have equal length");
  }
  double total_mu = 0.0;
  double cost     = 0.0;
  for (std::size_t i = 0; i < profiles.size(); ++i)
  {
    total_mu += profiles[i].mu;
    cost += mo_cost_term(profiles[i], config, prices[i], powers[i]);
  }
  return performance_fn(config.perf_fn, total_mu) - config.xi * cost;
}

SystemConfig reference_config()
{
  SystemConfig c;
  c.horizon                 = 15.0;
  c.psi                     = 5.0;
  c.budget_total            = 1500.0;
  c.mining_bound_per_client = 5.0;
  c.xi                      = 0.1;
  c.target_perf             = 10.0;
  return c;
}

std::vector<ClientProfile> reference_roster(std::size_t n)
{
  std::vector<ClientProfile> roster(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    roster[i].id    = i;
    roster[i].mu    = 10.0;
    roster[i].rho   = 0.01;
    roster[i].q_cap = 20.0;
  }
  return roster;
}

}  // namespace bcfl
