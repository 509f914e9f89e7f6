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

#include "bcfl/experiments.hpp"

#include "bcfl/errors.hpp"
#include "bcfl/oracle.hpp"
#include "bcfl/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <system_error>

#ifndef BCFL_VERSION
#define BCFL_VERSION "unknown"
#endif

namespace bcfl {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::array<std::pair<Strategy, Strategy>, 4> kPairs{{
    {Strategy::kOptimal, Strategy::kOptimal},
    {Strategy::kOptimal, Strategy::kRandom},
    {Strategy::kRandom, Strategy::kOptimal},
    {Strategy::kRandom, Strategy::kRandom},
}};

std::vector<ClientProfile> roster_of(ClientProfile const &base, std::size_t n)
{
  std::vector<ClientProfile> roster(n, base);
  for (std::size_t i = 0; i < n; ++i)
  {
    roster[i].id = i;
  }
  return roster;
}

struct Point
{
  double                mu  = 0.0;
  double                psi = 0.0;
  std::optional<double> pt;
  std::optional<double> pm;
};

// Cartesian product of the axes, first axis outermost.
std::vector<std::vector<double>> grid_points(ExperimentSpec const &spec)
{
  std::vector<std::vector<double>> axes;
  for (auto const &a : spec.axes)
  {
    axes.push_back(a.values(spec.floor));
    if (axes.back().empty())
    {
      return {};
    }
  }
  std::vector<std::vector<double>> out;
  std::vector<std::size_t>         idx(axes.size(), 0);
  while (true)
  {
    std::vector<double> p;
    for (std::size_t k = 0; k < axes.size(); ++k)
    {
      p.push_back(axes[k][idx[k]]);
    }
    out.push_back(std::move(p));
    std::size_t k = axes.size();
    while (k > 0)
    {
      --k;
      if (++idx[k] < axes[k].size())
      {
        break;
      }
      idx[k] = 0;
      if (k == 0)
      {
        return out;
      }
    }
    if (axes.empty())
    {
      return out;
    }
  }
}

Point point_of(ExperimentSpec const &spec, std::vector<double> const &values)
{
  Point p{spec.client.mu, spec.config.psi, std::nullopt, std::nullopt};
  for (std::size_t k = 0; k < spec.axes.size(); ++k)
  {
    auto const &n = spec.axes[k].name;
    if (n == "mu")
    {
      p.mu = values[k];
    }
    else if (n == "psi")
    {
      p.psi = values[k];
    }
    else if (n == "pt")
    {
      p.pt = values[k];
    }
    else
    {
      p.pm = values[k];
    }
  }
  return p;
}

SweepRow infeasible_row(Scenario s, std::vector<double> const &swept, std::uint64_t seed)
{
  SweepRow row;
  row.scenario       = s;
  row.swept          = swept;
  row.prices         = {kNaN, kNaN};
  row.powers         = {kNaN, kNaN};
  row.client_utility = kNaN;
  row.mo_utility     = kNaN;
  row.seed           = seed;
  return row;
}

SweepRow equilibrium_row(ExperimentSpec const &spec, Scenario s, Point const &pt,
                         std::vector<double> const &swept)
{
  ClientProfile client = spec.client;
  client.mu            = pt.mu;
  client.data_size.reset();
  client.cycles_per_sample.reset();
  client.iterations.reset();
  SystemConfig config = spec.config;
  config.psi          = pt.psi;
  auto const roster   = roster_of(client, spec.n_clients);
  try
  {
    auto const eq = run_algorithm(roster, config, s, spec.shapley);
    auto const &c = eq.clients.front();
    SweepRow    row;
    row.scenario       = s;
    row.swept          = swept;
    row.prices         = c.prices;
    row.powers         = c.powers;
    row.client_utility = c.realized.value;
    row.mo_utility     = eq.mo_utility;
    row.time_binds     = c.binds.time;
    row.ir_binds       = c.binds.ir;
    row.feasible       = true;
    row.seed           = spec.seed;
    return row;
  }
  catch (InfeasibleError const &)
  {
  }
  catch (MechanismRejectError const &)
  {
  }
  catch (DegenerateValueError const &)
  {
  }
  return infeasible_row(s, swept, spec.seed);
}

SweepRow fixed_price_row(ExperimentSpec const &spec, Scenario s, Point const &pt,
                         std::vector<double> const &swept, PricePair const &base,
                         ClientBounds const &bounds)
{
  ClientProfile client = spec.client;
  client.mu            = pt.mu;
  SystemConfig config  = spec.config;
  config.psi           = pt.psi;

  PricePair prices{pt.pt.value_or(base.p_t), base.p_m};
  if (pt.pm)
  {
    prices.p_m = *pt.pm;
  }
  else if (pt.pt)
  {
    // Mining price follows the swept training price: the mining bound binds
    // (complete) or the participation constraint does (incomplete).
    double const left = config.horizon - client.mu * std::cbrt(client.rho / prices.p_t);
    if (!(left > 0.0))
    {
      auto row   = infeasible_row(s, swept, spec.seed);
      row.prices = {prices.p_t, kNaN};
      return row;
    }
    prices.p_m = s == Scenario::kComplete
                     ? bounds.mine / left
                     : client.rho * config.psi * config.psi * config.psi / (left * left * left);
  }

  try
  {
    auto const resp = best_response(client, config, prices);
    auto const u    = client_utility(client, config, prices, resp.powers);
    auto const n    = static_cast<double>(spec.n_clients);
    SweepRow   row;
    row.scenario       = s;
    row.swept          = swept;
    row.prices         = prices;
    row.powers         = resp.powers;
    row.client_utility = u.value;
    row.mo_utility     = performance_fn(config.perf_fn, n * client.mu) -
                     config.xi * n * mo_cost_term(client, config, prices, resp.powers);
    auto const flags = binding_flags(u, config, bounds);
    row.time_binds   = flags.time;
    row.ir_binds     = flags.ir;
    row.feasible     = true;
    row.seed         = spec.seed;
    return row;
  }
  catch (InfeasibleError const &)
  {
  }
  auto row   = infeasible_row(s, swept, spec.seed);
  row.prices = prices;
  return row;
}

bool prices_acceptable(ClientProfile const &profile, SystemConfig const &config,
                       ClientBounds const &bounds, Scenario s, PricePair const &prices)
{
  if (!(prices.p_t > min_feasible_training_price(profile, config)) || !(prices.p_m > 0.0))
  {
    return false;
  }
  auto const  q   = best_response(profile, config, prices).powers;
  auto const  u   = client_utility(profile, config, prices, q);
  auto const &b   = u.breakdown;
  double const tol = kFeasibilityTolerance;
  if (b.reward_train > bounds.train * (1.0 + tol) || b.reward_mine > bounds.mine * (1.0 + tol))
  {
    return false;
  }
  return s == Scenario::kComplete || u.value >= -tol * b.total_cost();
}

std::optional<PricePair> random_prices(Rng &rng, ExperimentSpec const &spec,
                                       ClientProfile const &profile, SystemConfig const &config,
                                       ClientBounds const &bounds, Scenario s)
{
  for (std::size_t k = 0; k < spec.max_retries; ++k)
  {
    PricePair const p{rng.uniform(0.0, spec.random_price_hi),
                      rng.uniform(0.0, spec.random_price_hi)};
    if (prices_acceptable(profile, config, bounds, s, p))
    {
      return p;
    }
  }
  return std::nullopt;
}

// Uniform over the client's feasible region: non-negative payoffs bound each
// frequency by (p / rho)^(1/3), the frequency cap bounds it too, and the time
// budget is enforced by rejection.
std::optional<PowerPair> random_powers(Rng &rng, ExperimentSpec const &spec,
                                       ClientProfile const &profile, SystemConfig const &config,
                                       PricePair const &prices)
{
  double const lo_t = profile.mu / config.horizon;
  double const lo_m = config.psi / config.horizon;
  double const hi_t = std::min(profile.q_cap, std::cbrt(prices.p_t / profile.rho));
  double const hi_m = std::min(profile.q_cap, std::cbrt(prices.p_m / profile.rho));
  if (!(hi_t > lo_t && hi_m > lo_m))
  {
    return std::nullopt;
  }
  for (std::size_t k = 0; k < spec.max_retries; ++k)
  {
    PowerPair const q{rng.uniform(lo_t, hi_t), rng.uniform(lo_m, hi_m)};
    if (profile.mu / q.q_t + config.psi / q.q_m <= config.horizon)
    {
      return q;
    }
  }
  return std::nullopt;
}

std::pair<double, double> mean_std(std::vector<double> const &xs)
{
  if (xs.empty())
  {
    return {kNaN, kNaN};
  }
  double mean = 0.0;
  double m2   = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k)
  {
    double const d = xs[k] - mean;
    mean += d / static_cast<double>(k + 1);
    m2 += d * (xs[k] - mean);
  }
  double const sd = xs.size() > 1 ? std::sqrt(m2 / static_cast<double>(xs.size() - 1)) : 0.0;
  return {mean, sd};
}

std::string join_axes(std::vector<SweepAxis> const &axes)
{
  std::string out;
  for (auto const &a : axes)
  {
    if (!out.empty())
    {
      out += ';';
    }
    out += a.name + ':' + format_number(a.lo) + ':' + format_number(a.hi) + ':' +
           format_number(a.step);
  }
  return out;
}

std::string common_metadata(ExperimentSpec const &spec)
{
  std::ostringstream os;
  os << "name=" << spec.name << '\n'
     << "tool_version=" << BCFL_VERSION << '\n'
     << "kind=" << (spec.kind == ExperimentKind::kSweep ? "sweep" : "strategy_pairs") << '\n'
     << "mode=" << (spec.mode == SweepMode::kEquilibrium ? "equilibrium" : "fixed_price") << '\n'
     << "axes=" << join_axes(spec.axes) << '\n'
     << "floor=" << format_number(spec.floor) << '\n'
     << "seed=" << spec.seed << '\n'
     << "trials=" << spec.trials << '\n';
  std::string sc;
  for (auto s : spec.scenarios)
  {
    sc += (sc.empty() ? "" : ",") + std::string(to_string(s));
  }
  os << "scenarios=" << sc << '\n'
     << "n_clients=" << spec.n_clients << '\n'
     << "mu=" << format_number(spec.client.mu) << '\n'
     << "rho=" << format_number(spec.client.rho) << '\n'
     << "q_cap=" << format_number(spec.client.q_cap) << '\n'
     << "horizon=" << format_number(spec.config.horizon) << '\n'
     << "psi=" << format_number(spec.config.psi) << '\n'
     << "budget_total=" << format_number(spec.config.budget_total) << '\n'
     << "mining_bound=" << format_number(spec.config.mining_bound(spec.n_clients)) << '\n'
     << "xi=" << format_number(spec.config.xi) << '\n'
     << "target_perf=" << format_number(spec.config.target_perf) << '\n'
     << "perf_fn=" << spec.config.perf_fn.name() << '\n';
  return os.str();
}

void require_dir(std::filesystem::path const &dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
  {
    throw IoError("cannot create output directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
}

// Largest relative oracle gap for one scenario on the given roster, with the
// distance of the grid argmax from the closed form in cells.
struct StageOneGap
{
  double gap   = kNaN;
  double cells = kNaN;
  double printed_gap = kNaN;
  bool   feasible = false;
};

StageOneGap stage_one_gap(std::span<ClientProfile const> roster, SystemConfig const &config,
                          RewardBounds const &rb, Scenario s)
{
  StageOneGap out;
  std::vector<PricePair> closed;
  std::vector<GridSpec>  grids;
  for (std::size_t i = 0; i < roster.size(); ++i)
  {
    closed.push_back(optimal_prices(roster[i], config, bounds_of(rb, i), s));
    grids.push_back(stage1_grid_around(closed.back()));
  }
  auto const grid = grid_optimal_prices(roster, config, rb, s, grids);
  if (!grid.feasible)
  {
    return out;
  }
  out.feasible = true;
  double cf       = 0.0;
  double total_mu = 0.0;
  out.cells       = 0.0;
  for (std::size_t i = 0; i < roster.size(); ++i)
  {
    total_mu += roster[i].mu;
    cf += *stage1_client_value(roster[i], config, closed[i]);
    auto const &best = *grid.per_client[i].best;
    out.cells = std::max({out.cells, grids[i].first.cells_between(best.x, closed[i].p_t),
                          grids[i].second.cells_between(best.y, closed[i].p_m)});
  }
  cf += performance_fn(config.perf_fn, total_mu);
  out.gap = (grid.mo_utility - cf) / std::max(1.0, std::abs(cf));

  if (s == Scenario::kComplete)
  {
    double printed = 0.0;
    for (std::size_t i = 0; i < roster.size(); ++i)
    {
      double const pm = printed_variant_mining_price(roster[i], config, bounds_of(rb, i));
      printed = std::max(printed, std::abs(pm - closed[i].p_m) / closed[i].p_m);
    }
    out.printed_gap = printed;
  }
  return out;
}

}  // namespace

std::string_view to_string(Strategy s)
{
  return s == Strategy::kOptimal ? "optimal" : "random";
}

std::vector<double> SweepAxis::values(double floor) const
{
  std::vector<double> out;
  if (!(hi >= lo))
  {
    return out;
  }
  auto const count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t k = 0; k <= count; ++k)
  {
    double v = lo + static_cast<double>(k) * step;
    if (v <= 0.0)
    {
      v = floor;
    }
    out.push_back(v);
  }
  return out;
}

void ExperimentSpec::validate() const
{
  if (trials < 1)
  {
    throw ArgumentError("experiment needs at least one trial");
  }
  if (n_clients < 1)
  {
    throw ArgumentError("experiment needs at least one client");
  }
  if (!(floor > 0.0))
  {
    throw ArgumentError("sweep floor must be positive");
  }
  if (scenarios.empty())
  {
    throw ArgumentError("experiment needs at least one scenario");
  }
  for (auto const &a : axes)
  {
    if (a.name != "mu" && a.name != "psi" && a.name != "pt" && a.name != "pm")
    {
      throw ArgumentError("unknown sweep variable '" + a.name + "' (mu, psi, pt, pm)");
    }
    if (!(a.step > 0.0) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
    {
      throw ArgumentError("sweep axis '" + a.name + "' needs finite bounds and a positive step");
    }
    if (mode == SweepMode::kEquilibrium && (a.name == "pt" || a.name == "pm"))
    {
      throw ArgumentError("prices are outputs of an equilibrium sweep; use fixed_price mode");
    }
  }
  client.validate();
  config.validate();
}

SweepTable run_sweep(ExperimentSpec const &spec)
{
  spec.validate();
  SweepTable table;
  for (auto const &a : spec.axes)
  {
    table.swept_names.push_back(a.name);
  }
  auto const points = grid_points(spec);

  auto const roster = roster_of(spec.client, spec.n_clients);
  std::optional<RewardBounds> rb;
  if (spec.mode == SweepMode::kFixedPrice)
  {
    rb = reward_bounds(roster, spec.config, spec.shapley);
  }

  for (auto s : spec.scenarios)
  {
    PricePair    base;
    ClientBounds cb;
    if (rb)
    {
      cb   = bounds_of(*rb, 0);
      base = optimal_prices(spec.client, spec.config, cb, s);
      table.base_prices.emplace_back(s, base);
    }
    for (auto const &values : points)
    {
      Point const pt = point_of(spec, values);
      for (std::size_t trial = 0; trial < spec.trials; ++trial)
      {
        SweepRow row = spec.mode == SweepMode::kEquilibrium
                           ? equilibrium_row(spec, s, pt, values)
                           : fixed_price_row(spec, s, pt, values, base, cb);
        row.trial = trial;
        (row.feasible ? table.feasible_rows : table.infeasible_rows) += 1;
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

PairSummary const *TournamentResult::find(Scenario s, Strategy client, Strategy mo) const
{
  for (auto const &p : summaries)
  {
    if (p.scenario == s && p.client_strategy == client && p.mo_strategy == mo)
    {
      return &p;
    }
  }
  return nullptr;
}

std::vector<DominanceCheck> TournamentResult::dominance() const
{
  std::vector<DominanceCheck> out;
  for (auto const &p : summaries)
  {
    if (p.client_strategy != Strategy::kOptimal || p.mo_strategy != Strategy::kOptimal)
    {
      continue;
    }
    DominanceCheck d;
    d.scenario      = p.scenario;
    d.client_margin = std::numeric_limits<double>::infinity();
    d.mo_margin     = std::numeric_limits<double>::infinity();
    for (auto const &q : summaries)
    {
      // A pair with no completed trial has nothing to compare against.
      if (q.scenario != p.scenario || &q == &p || q.trials == 0)
      {
        continue;
      }
      d.client_margin = std::min(d.client_margin, p.client_mean - q.client_mean);
      d.mo_margin     = std::min(d.mo_margin, p.mo_mean - q.mo_mean);
    }
    d.pass = d.client_margin >= 0.0 && d.mo_margin >= 0.0;
    out.push_back(d);
  }
  return out;
}

TournamentResult strategy_tournament(ExperimentSpec const &spec)
{
  spec.validate();
  TournamentResult result;
  auto const roster = roster_of(spec.client, spec.n_clients);
  auto const rb     = reward_bounds(roster, spec.config, spec.shapley);
  auto const n      = roster.size();

  for (std::size_t si = 0; si < spec.scenarios.size(); ++si)
  {
    Scenario const s = spec.scenarios[si];
    std::vector<PricePair> opt_prices(n);
    std::vector<PowerPair> opt_powers(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      opt_prices[i] = optimal_prices(roster[i], spec.config, bounds_of(rb, i), s);
      opt_powers[i] = best_response(roster[i], spec.config, opt_prices[i]).powers;
    }

    std::array<std::vector<double>, 4> client_vals;
    std::array<std::vector<double>, 4> mo_vals;
    std::array<std::size_t, 4>         skipped{};

    for (std::size_t trial = 0; trial < spec.trials; ++trial)
    {
      std::uint64_t const seed = stream_seed(stream_seed(spec.seed, si), trial);
      Rng                 price_rng(stream_seed(seed, 1));
      Rng                 power_rng_opt(stream_seed(seed, 2));
      Rng                 power_rng_rand(stream_seed(seed, 3));

      std::vector<PricePair> rand_prices(n);
      bool                   prices_ok = true;
      for (std::size_t i = 0; i < n && prices_ok; ++i)
      {
        auto p = random_prices(price_rng, spec, roster[i], spec.config, bounds_of(rb, i), s);
        prices_ok = p.has_value();
        if (p)
        {
          rand_prices[i] = *p;
        }
      }

      for (std::size_t k = 0; k < kPairs.size(); ++k)
      {
        auto const [cs, ms] = kPairs[k];
        if (ms == Strategy::kRandom && !prices_ok)
        {
          ++skipped[k];
          continue;
        }
        auto const            &prices = ms == Strategy::kOptimal ? opt_prices : rand_prices;
        std::vector<PowerPair> powers(n);
        bool                   ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
        {
          if (cs == Strategy::kOptimal)
          {
            powers[i] = ms == Strategy::kOptimal
                            ? opt_powers[i]
                            : best_response(roster[i], spec.config, prices[i]).powers;
            continue;
          }
          Rng &rng = ms == Strategy::kOptimal ? power_rng_opt : power_rng_rand;
          auto q   = random_powers(rng, spec, roster[i], spec.config, prices[i]);
          ok       = q.has_value();
          if (q)
          {
            powers[i] = *q;
          }
        }
        if (!ok)
        {
          ++skipped[k];
          continue;
        }
        double client_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
          client_sum += client_utility(roster[i], spec.config, prices[i], powers[i]).value;
        }
        TournamentRow row;
        row.scenario        = s;
        row.client_strategy = cs;
        row.mo_strategy     = ms;
        row.trial           = trial;
        row.client_utility  = client_sum / static_cast<double>(n);
        row.mo_utility      = mo_utility(roster, spec.config, prices, powers);
        row.seed            = seed;
        client_vals[k].push_back(row.client_utility);
        mo_vals[k].push_back(row.mo_utility);
        result.rows.push_back(row);
      }
    }

    for (std::size_t k = 0; k < kPairs.size(); ++k)
    {
      PairSummary p;
      p.scenario        = s;
      p.client_strategy = kPairs[k].first;
      p.mo_strategy     = kPairs[k].second;
      std::tie(p.client_mean, p.client_std) = mean_std(client_vals[k]);
      std::tie(p.mo_mean, p.mo_std)         = mean_std(mo_vals[k]);
      p.trials        = client_vals[k].size();
      p.skipped_draws = skipped[k];
      result.summaries.push_back(p);
    }
  }
  return result;
}

MonotonicityCheck check_strict_monotone(std::span<double const> y, bool increasing)
{
  MonotonicityCheck out;
  for (std::size_t k = 1; k < y.size(); ++k)
  {
    ++out.pairs;
    bool const ok = increasing ? y[k] > y[k - 1] : y[k] < y[k - 1];
    if (!ok)
    {
      ++out.violations;
    }
  }
  out.pass = out.violations == 0;
  return out;
}

std::string format_number(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  if (std::isinf(v))
  {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string sweep_csv(SweepTable const &table)
{
  std::string out = "scenario";
  for (auto const &n : table.swept_names)
  {
    out += ',' + n;
  }
  out += ",p_t,p_m,q_t,q_m,client_utility,mo_utility,time_binds,ir_binds,feasible,trial,seed\n";
  for (auto const &r : table.rows)
  {
    out += to_string(r.scenario);
    for (double v : r.swept)
    {
      out += ',' + format_number(v);
    }
    for (double v : {r.prices.p_t, r.prices.p_m, r.powers.q_t, r.powers.q_m, r.client_utility,
                     r.mo_utility})
    {
      out += ',' + format_number(v);
    }
    out += r.time_binds ? ",1" : ",0";
    out += r.ir_binds ? ",1" : ",0";
    out += r.feasible ? ",1" : ",0";
    out += ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string tournament_csv(TournamentResult const &result)
{
  std::string out = "scenario,client_strategy,mo_strategy,trial,client_utility,mo_utility,seed\n";
  for (auto const &r : result.rows)
  {
    out += std::string(to_string(r.scenario)) + ',' + std::string(to_string(r.client_strategy)) +
           ',' + std::string(to_string(r.mo_strategy)) + ',' + std::to_string(r.trial) + ',' +
           format_number(r.client_utility) + ',' + format_number(r.mo_utility) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string sweep_metadata(ExperimentSpec const &spec, SweepTable const &table)
{
  std::ostringstream os;
  os << common_metadata(spec);
  for (auto const &[s, p] : table.base_prices)
  {
    os << "base_prices_" << to_string(s) << '=' << format_number(p.p_t) << ','
       << format_number(p.p_m) << '\n';
  }
  os << "rows_total=" << table.rows.size() << '\n'
     << "feasible_rows=" << table.feasible_rows << '\n'
     << "infeasible_rows=" << table.infeasible_rows << '\n';
  return os.str();
}

std::string tournament_metadata(ExperimentSpec const &spec, TournamentResult const &result)
{
  std::ostringstream os;
  os << common_metadata(spec) << "random_price_hi=" << format_number(spec.random_price_hi) << '\n'
     << "max_retries=" << spec.max_retries << '\n';
  for (auto const &p : result.summaries)
  {
    std::string const key = std::string(to_string(p.scenario)) + '_' +
                            std::string(to_string(p.client_strategy)) + '_' +
                            std::string(to_string(p.mo_strategy));
    os << key << "_client=" << format_number(p.client_mean) << ','
       << format_number(p.client_std) << '\n'
       << key << "_mo=" << format_number(p.mo_mean) << ',' << format_number(p.mo_std) << '\n'
       << key << "_trials=" << p.trials << '\n'
       << key << "_skipped=" << p.skipped_draws << '\n';
  }
  return os.str();
}

void write_text_file(std::filesystem::path const &path, std::string const &content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out)
  {
    throw IoError("failed writing " + path.string());
  }
}

std::vector<ExperimentSpec> figure_specs(int figure, std::uint64_t seed, std::size_t trials)
{
  ExperimentSpec base;
  base.seed = seed;
  switch (figure)
  {
  case 2:
  {
    base.name   = "fig2_strategy_pairs";
    base.kind   = ExperimentKind::kStrategyPairs;
    base.trials = trials;
    return {base};
  }
  case 3:
  {
    base.name = "fig3_cycles";
    base.axes = {{"mu", 0.0, 5.0, 0.5}, {"psi", 0.0, 5.0, 0.5}};
    return {base};
  }
  case 4:
  {
    base.mode = SweepMode::kFixedPrice;
    auto pt   = base;
    pt.name   = "fig4_price_t";
    pt.axes   = {{"pt", 0.0, 10.0, 0.1}};
    auto pm   = base;
    pm.name   = "fig4_price_m";
    pm.axes   = {{"pm", 0.0, 10.0, 0.1}};
    return {pt, pm};
  }
  case 5:
  case 6:
  {
    base.name = "fig5_6_mu_decisions";
    base.axes = {{"mu", 0.0, 5.0, 0.1}};
    return {base};
  }
  case 7:
  {
    base.name      = "fig7_price_t_responses";
    base.mode      = SweepMode::kFixedPrice;
    base.client.mu = 10.0;
    base.axes      = {{"pt", 0.0, 10.0, 0.1}};
    return {base};
  }
  default:
    throw ArgumentError("no experiment for figure " + std::to_string(figure) +
                        " (figures 2 to 7)");
  }
}

bool ReproduceResult::all_pass() const
{
  return std::all_of(checks.begin(), checks.end(), [](auto const &c) { return c.pass; });
}

ReproduceResult reproduce_all(std::filesystem::path const &output_dir,
                              ReproduceOptions const &options)
{
  require_dir(output_dir);
  ReproduceResult result;
  nlohmann::json  summary;
  summary["seed"]         = options.seed;
  summary["trials"]       = options.trials;
  summary["tool_version"] = BCFL_VERSION;

  auto add = [&](std::string name, bool pass, double value, std::string detail) {
    result.checks.push_back({std::move(name), pass, value, std::move(detail)});
  };
  auto emit = [&](ExperimentSpec const &spec, std::string const &csv, std::string const &meta) {
    auto const path = output_dir / (spec.name + ".csv");
    write_text_file(path, csv);
    write_text_file(output_dir / (spec.name + ".meta"), meta);
    result.csv_files.push_back(path);
  };

  // Figure 2: dominance of the optimal strategy pair.
  {
    auto const spec = figure_specs(2, options.seed, options.trials).front();
    auto const t    = strategy_tournament(spec);
    emit(spec, tournament_csv(t), tournament_metadata(spec, t));
    for (auto const &d : t.dominance())
    {
      add("dominance_" + std::string(to_string(d.scenario)), d.pass,
          std::min(d.client_margin, d.mo_margin),
          "client margin " + format_number(d.client_margin) + ", model owner margin " +
              format_number(d.mo_margin));
    }
    nlohmann::json pairs = nlohmann::json::array();
    for (auto const &p : t.summaries)
    {
      pairs.push_back({{"scenario", to_string(p.scenario)},
                       {"client_strategy", to_string(p.client_strategy)},
                       {"mo_strategy", to_string(p.mo_strategy)},
                       {"client_mean", p.client_mean},
                       {"client_std", p.client_std},
                       {"mo_mean", p.mo_mean},
                       {"mo_std", p.mo_std},
                       {"trials", p.trials},
                       {"skipped_draws", p.skipped_draws}});
    }
    summary["strategy_pairs"] = pairs;
  }

  auto accounting = [&](std::string const &name, SweepTable const &t) {
    add("row_accounting_" + name,
        t.rows.size() == t.feasible_rows + t.infeasible_rows,
        static_cast<double>(t.infeasible_rows),
        std::to_string(t.feasible_rows) + " feasible, " + std::to_string(t.infeasible_rows) +
            " infeasible");
  };

  // Figure 3: mining frequency increases with psi at every mu.
  {
    auto const spec = figure_specs(3, options.seed).front();
    auto const t    = run_sweep(spec);
    emit(spec, sweep_csv(t), sweep_metadata(spec, t));
    accounting(spec.name, t);
    MonotonicityCheck total;
    for (auto s : spec.scenarios)
    {
      for (double mu : spec.axes[0].values(spec.floor))
      {
        std::vector<double> qm;
        for (auto const &r : t.rows)
        {
          if (r.scenario == s && r.swept[0] == mu && r.feasible)
          {
            qm.push_back(r.powers.q_m);
          }
        }
        auto const c = check_strict_monotone(qm, true);
        total.pairs += c.pairs;
        total.violations += c.violations;
      }
    }
    add("fig3_q_m_increasing_in_psi", total.violations == 0,
        static_cast<double>(total.violations),
        std::to_string(total.pairs) + " adjacent pairs checked");
  }

  // Figure 4: price sweeps.
  for (auto const &spec : figure_specs(4, options.seed))
  {
    auto const t = run_sweep(spec);
    emit(spec, sweep_csv(t), sweep_metadata(spec, t));
    accounting(spec.name, t);
  }

  // Figures 5 and 6: decisions against mu; binding identities.
  {
    auto const spec = figure_specs(5, options.seed).front();
    auto const t    = run_sweep(spec);
    emit(spec, sweep_csv(t), sweep_metadata(spec, t));
    accounting(spec.name, t);
    std::size_t time_ok = 0;
    std::size_t ir_ok   = 0;
    std::size_t ir_rows = 0;
    for (auto const &r : t.rows)
    {
      if (!r.feasible)
      {
        continue;
      }
      time_ok += r.time_binds ? 1 : 0;
      if (r.scenario == Scenario::kIncomplete)
      {
        ++ir_rows;
        ir_ok += r.ir_binds ? 1 : 0;
      }
    }
    add("binding_time", time_ok == t.feasible_rows && t.feasible_rows > 0,
        static_cast<double>(t.feasible_rows - time_ok),
        std::to_string(time_ok) + " of " + std::to_string(t.feasible_rows) + " rows bind");
    add("binding_ir_incomplete", ir_ok == ir_rows && ir_rows > 0,
        static_cast<double>(ir_rows - ir_ok),
        std::to_string(ir_ok) + " of " + std::to_string(ir_rows) + " rows bind");
  }

  // Figure 7: responses against the training price.
  {
    auto const spec = figure_specs(7, options.seed).front();
    auto const t    = run_sweep(spec);
    emit(spec, sweep_csv(t), sweep_metadata(spec, t));
    accounting(spec.name, t);
    for (auto s : spec.scenarios)
    {
      std::vector<double> qt;
      std::vector<double> qm;
      for (auto const &r : t.rows)
      {
        if (r.scenario == s && r.feasible)
        {
          qt.push_back(r.powers.q_t);
          qm.push_back(r.powers.q_m);
        }
      }
      auto const ct = check_strict_monotone(qt, true);
      auto const cm = check_strict_monotone(qm, false);
      add("fig7_q_t_increasing_" + std::string(to_string(s)), ct.pass && ct.pairs > 0,
          static_cast<double>(ct.violations), std::to_string(ct.pairs) + " adjacent pairs");
      add("fig7_q_m_decreasing_" + std::string(to_string(s)), cm.pass && cm.pairs > 0,
          static_cast<double>(cm.violations), std::to_string(cm.pairs) + " adjacent pairs");
    }
  }

  // Oracle gaps on the reference instance.
  {
    auto const config = reference_config();
    auto const roster = reference_roster();
    auto const rb     = reward_bounds(roster, config);
    for (auto s : {Scenario::kComplete, Scenario::kIncomplete})
    {
      auto const g = stage_one_gap(roster, config, rb, s);
      bool const ok = g.feasible && g.cells <= 1.0 && std::abs(g.gap) <= 1e-3;
      std::string detail = "grid argmax " + format_number(g.cells) +
                           " cells from the closed form; relative utility gap " +
                           format_number(g.gap);
      if (s == Scenario::kComplete)
      {
        detail += "; alternative mining-price form differs by " + format_number(g.printed_gap) +
                  " relative";
      }
      add("oracle_stage1_" + std::string(to_string(s)), ok, g.gap, detail);
    }

    auto const prices = optimal_prices(roster[0], config, bounds_of(rb, 0), Scenario::kComplete);
    auto const resp   = best_response(roster[0], config, prices).powers;
    double const cf   = client_utility(roster[0], config, prices, resp).value;
    auto const grid   = grid_best_response(roster[0], config, prices, stage2_grid_around(resp));
    double const gap  = grid.best ? (grid.best->value - cf) / std::max(1.0, std::abs(cf)) : kNaN;
    add("oracle_stage2_reference", grid.best && gap <= 1e-3, gap,
        "grid utility " + format_number(grid.best ? grid.best->value : kNaN) +
            ", closed-form utility " + format_number(cf));

    // Truthfulness audit for the first client.
    auto const audit = ic_audit(roster, config, 0, {5.0, 15.0, 0.5});
    double const rel = audit.gain / std::max(1.0, std::abs(audit.truthful_utility));
    add("ic_audit", rel <= 1e-6, rel,
        "best report " + format_number(audit.best_reported_mu) + " gains " +
            format_number(audit.gain));
    nlohmann::json table = nlohmann::json::array();
    for (auto const &p : audit.table)
    {
      nlohmann::json row = {{"reported_mu", p.reported_mu},
                            {"truthful", p.truthful},
                            {"feasible", p.feasible}};
      if (p.feasible)
      {
        row["train_bound"] = p.train_bound;
        row["p_t"]         = p.prices.p_t;
        row["p_m"]         = p.prices.p_m;
        row["utility"]     = p.utility;
      }
      else
      {
        row["reason"] = p.reason;
      }
      table.push_back(row);
    }
    summary["ic_audit"] = {{"client", audit.client},
                           {"true_mu", audit.true_mu},
                           {"truthful_utility", audit.truthful_utility},
                           {"best_reported_mu", audit.best_reported_mu},
                           {"best_utility", audit.best_utility},
                           {"gain", audit.gain},
                           {"relative_gain", rel},
                           {"infeasible_points", audit.infeasible_points},
                           {"table", table}};
  }

  nlohmann::json checks = nlohmann::json::array();
  for (auto const &c : result.checks)
  {
    nlohmann::json j = {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
    j["value"]       = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
    checks.push_back(j);
  }
  summary["checks"]   = checks;
  summary["all_pass"] = result.all_pass();
  nlohmann::json files = nlohmann::json::array();
  for (auto const &f : result.csv_files)
  {
    files.push_back(f.filename().string());
  }
  summary["files"] = files;

  result.summary_file = output_dir / "summary.json";
  write_text_file(result.summary_file, summary.dump(2) + "\n");
  return result;
}

}  // namespace bcfl
