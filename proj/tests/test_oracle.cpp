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

#include "bcfl/errors.hpp"
#include "bcfl/oracle.hpp"
#include "bcfl/rng.hpp"
#include "bcfl/stackelberg.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace bcfl;

namespace {

ClientProfile ref_client()
{
  return reference_roster(1).front();
}

// Independent continuous optimum of the client's problem with time binding:
// q_m follows from q_t, so a dense 1-D scan over q_t suffices.
double continuous_best(ClientProfile const &c, SystemConfig const &cfg, PricePair const &p)
{
  double const lo   = c.mu / cfg.horizon;
  double const hi   = std::cbrt(p.p_t / c.rho);
  double       best = -1e300;
  for (int k = 1; k < 200000; ++k)
  {
    double const qt = lo + (hi - lo) * k / 200000.0;
    double const qm = cfg.psi / (cfg.horizon - c.mu / qt);
    double const ut = c.mu * p.p_t / qt - c.rho * c.mu * qt * qt;
    double const um = cfg.psi * p.p_m / qm - c.rho * cfg.psi * qm * qm;
    if (ut >= 0 && um >= 0)
    {
      best = std::max(best, ut + um);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("axis coordinates")
{
  Axis const lin{1.0, 3.0, 5, Spacing::kLinear};
  CHECK(lin.at(0) == 1.0);
  CHECK(lin.at(2) == doctest::Approx(2.0));
  CHECK(lin.at(4) == 3.0);
  CHECK(lin.cells_between(1.0, 2.0) == doctest::Approx(2.0));

  Axis const geo{0.1, 10.0, 3, Spacing::kGeometric};
  CHECK(geo.at(1) == doctest::Approx(1.0));
  CHECK(geo.cells_between(0.1, 10.0) == doctest::Approx(2.0));

  CHECK_THROWS(Axis{1.0, 3.0, 1, Spacing::kLinear}.validate());
  CHECK_THROWS(Axis{0.0, 3.0, 5, Spacing::kGeometric}.validate());
  CHECK_THROWS(Axis{3.0, 1.0, 5, Spacing::kLinear}.validate());
}

TEST_CASE("grid builders centre on the candidate")
{
  auto const g2 = stage2_grid_around({2.0, 0.5}, 11);
  CHECK(g2.first.lo == doctest::Approx(1.0));
  CHECK(g2.first.hi == doctest::Approx(3.0));
  CHECK(g2.first.at(5) == doctest::Approx(2.0));
  auto const g1 = stage1_grid_around({1.0, 0.2}, 11);
  CHECK(g1.second.lo == doctest::Approx(0.02));
  CHECK(g1.second.at(5) == doctest::Approx(0.2));
  CHECK(g1.first.spacing == Spacing::kGeometric);
}

TEST_CASE("stage-two feasibility")
{
  auto const cfg = reference_config();
  auto const c   = ref_client();
  PricePair const p{0.08, 0.1};
  CHECK(stage2_feasible(c, cfg, p, {2.0, 0.5}));
  CHECK_FALSE(stage2_feasible(c, cfg, p, {0.5, 1.0}));  // 25 minutes
  CHECK_FALSE(stage2_feasible(c, cfg, p, {3.0, 0.5}));  // training payoff < 0
}

TEST_CASE("grid best response agrees with brute force and never beats the continuum")
{
  auto const cfg = reference_config();
  auto const c   = ref_client();
  Rng        rng(11);
  for (int k = 0; k < 20; ++k)
  {
    PricePair const p{rng.log_uniform(0.05, 10.0), rng.log_uniform(0.05, 10.0)};
    auto const      centre = best_response(c, cfg, p).powers;
    auto const      grid   = stage2_grid_around(centre, 60);
    auto const      r      = grid_best_response(c, cfg, p, grid);
    CHECK(r.total_points == 3600);

    double      brute = -1e300;
    std::size_t count = 0;
    for (std::size_t i = 0; i < 60; ++i)
    {
      for (std::size_t j = 0; j < 60; ++j)
      {
        PowerPair const q{grid.first.at(i), grid.second.at(j)};
        if (stage2_feasible(c, cfg, p, q))
        {
          ++count;
          brute = std::max(brute, client_utility(c, cfg, p, q).value);
        }
      }
    }
    CHECK(r.feasible_points == count);
    if (count == 0)
    {
      CHECK_FALSE(r.feasible());
      continue;
    }
    REQUIRE(r.feasible());
    CHECK(r.best->value == doctest::Approx(brute).epsilon(1e-12));
    CHECK(stage2_feasible(c, cfg, p, {r.best->x, r.best->y}));
    CHECK(r.best->value <= continuous_best(c, cfg, p) + 1e-6);
  }
}

TEST_CASE("grid best response beats the payoff-neutral training response")
{
  // Dropping the training frequency below (p_t / rho)^(1/3) earns a positive
  // training payoff, so the grid lands strictly above the closed form.
  auto const      cfg = reference_config();
  auto const      c   = ref_client();
  PricePair const p{0.08, 0.1};
  auto const      closed = client_utility(c, cfg, p, best_response(c, cfg, p).powers).value;
  CHECK(closed == doctest::Approx(0.9875));
  auto const r = grid_best_response(c, cfg, p, stage2_grid_around({2.0, 0.5}, 500));
  REQUIRE(r.feasible());
  CHECK(r.best->value > closed + 0.1);
  CHECK(r.best->value == doctest::Approx(continuous_best(c, cfg, p)).epsilon(1e-3));
}

TEST_CASE("stage-two KKT at the closed form")
{
  auto const      cfg = reference_config();
  auto const      c   = ref_client();
  PricePair const p{0.08, 0.1};
  auto const      rep = kkt_residuals_stage2(c, cfg, p, {2.0, 0.5});
  CHECK(std::abs(rep.time_slack) < 1e-12);
  CHECK_FALSE(rep.active_case.empty());
  REQUIRE(rep.find("stationarity_q_t") != nullptr);
  REQUIRE(rep.find("stationarity_q_m") != nullptr);
  bool any_negative = false;
  for (auto const &[name, value] : rep.multipliers)
  {
    any_negative = any_negative || value < 0;
  }
  CHECK(rep.negative_multiplier == any_negative);
  CHECK(rep.max_residual >= rep.max_residual_excluding_dual());

  auto const off = kkt_residuals_stage2(c, cfg, p, {2.2, 0.5});
  CHECK(off.time_slack > 0.1);
  CHECK(rep.find("no_such_condition") == nullptr);
}

TEST_CASE("stage-one client value and KKT binding conditions")
{
  auto const         cfg = reference_config();
  auto const         c   = ref_client();
  ClientBounds const b{25.0, 5.0};
  auto const         pc = optimal_prices_complete(c, cfg, b);
  auto const         v  = stage1_client_value(c, cfg, pc);
  REQUIRE(v.has_value());
  CHECK(*v == doctest::Approx(-cfg.xi * (cfg.horizon + 25.0 + 5.0)).epsilon(1e-10));
  CHECK_FALSE(stage1_client_value(c, cfg, {1e-6, 1.0}).has_value());

  auto const rc = kkt_residuals_stage1(c, cfg, b, pc, Scenario::kComplete);
  CHECK(rc.find("binding_training_bound")->residual < 1e-10);
  CHECK(rc.find("binding_mining_bound")->residual < 1e-10);

  auto const pi = optimal_prices_incomplete(c, cfg, b);
  auto const ri = kkt_residuals_stage1(c, cfg, b, pi, Scenario::kIncomplete);
  CHECK(ri.find("binding_ir")->residual < 1e-9);
  CHECK(ri.multiplier("alpha2") == 0.0);

  auto const moved = kkt_residuals_stage1(c, cfg, b, {pc.p_t * 1.1, pc.p_m}, Scenario::kComplete);
  CHECK(moved.find("binding_training_bound")->residual > 1e-3);
}

TEST_CASE("stage-one stationarity matches finite differences")
{
  // At prices that keep both bounds slack and with no constraint active, the
  // stationarity values are the raw gradient of the per-client term.
  auto const         cfg = reference_config();
  auto const         c   = ref_client();
  ClientBounds const loose{1e6, 1e6};
  PricePair const    p{1.0, 0.3};
  auto const         rep = kkt_residuals_stage1(c, cfg, loose, p, Scenario::kComplete);
  double const       h   = 1e-6;
  auto const         f   = [&](double pt, double pm) {
    return *stage1_client_value(c, cfg, {pt, pm});
  };
  double const d_pt = (f(p.p_t + h, p.p_m) - f(p.p_t - h, p.p_m)) / (2 * h);
  double const d_pm = (f(p.p_t, p.p_m + h) - f(p.p_t, p.p_m - h)) / (2 * h);
  double const theta1 = rep.multiplier("theta1");
  double const theta2 = rep.multiplier("theta2");
  // Stationarity: grad U = theta1 grad R_t + theta2 grad R_m; the recovered
  // multipliers satisfy it exactly, so the residual is zero and the
  // multipliers carry the gradient information.
  CHECK(rep.find("stationarity_p_t")->residual < 1e-8);
  CHECK(rep.find("stationarity_p_m")->residual < 1e-8);
  auto const rt = [&](double pt, double pm) {
    auto const q = best_response(c, cfg, {pt, pm}).powers;
    return c.mu * pt / q.q_t;
  };
  auto const rm = [&](double pt, double pm) {
    auto const q = best_response(c, cfg, {pt, pm}).powers;
    return cfg.psi * pm / q.q_m;
  };
  double const rt_pt = (rt(p.p_t + h, p.p_m) - rt(p.p_t - h, p.p_m)) / (2 * h);
  double const rt_pm = (rt(p.p_t, p.p_m + h) - rt(p.p_t, p.p_m - h)) / (2 * h);
  double const rm_pt = (rm(p.p_t + h, p.p_m) - rm(p.p_t - h, p.p_m)) / (2 * h);
  double const rm_pm = (rm(p.p_t, p.p_m + h) - rm(p.p_t, p.p_m - h)) / (2 * h);
  CHECK(d_pt == doctest::Approx(theta1 * rt_pt + theta2 * rm_pt).epsilon(1e-5));
  CHECK(d_pm == doctest::Approx(theta1 * rt_pm + theta2 * rm_pm).epsilon(1e-5));
}

TEST_CASE("mining price variant differs from the substitution form")
{
  auto const         cfg = reference_config();
  auto const         c   = ref_client();
  ClientBounds const b{25.0, 5.0};
  double const       v   = printed_variant_mining_price(c, cfg, b);
  CHECK(v == doctest::Approx(5.0 / (15.0 - std::pow(0.1, 1.5) / 5.0)));
  double const closed = optimal_prices_complete(c, cfg, b).p_m;
  CHECK(std::abs(v - closed) / closed > 0.01);
}

TEST_CASE("price grid over a small roster")
{
  auto const cfg    = reference_config();
  auto       roster = reference_roster(2);
  roster[1].mu      = 12.0;
  RewardBounds b;
  b.train_bound = {30.0, 30.0};
  b.mine_bound  = {5.0, 5.0};
  std::vector<GridSpec> grids;
  for (auto const &c : roster)
  {
    grids.push_back(stage1_grid_around(
        optimal_prices_complete(c, cfg, {30.0, 5.0}), 40));
  }
  auto const r = grid_optimal_prices(roster, cfg, b, Scenario::kComplete, grids);
  REQUIRE(r.feasible);
  REQUIRE(r.per_client.size() == 2);
  double sum = performance_fn(cfg.perf_fn, 22.0);
  for (std::size_t i = 0; i < 2; ++i)
  {
    REQUIRE(r.per_client[i].feasible());
    auto const &best = *r.per_client[i].best;
    CHECK(best.value == doctest::Approx(*stage1_client_value(roster[i], cfg, {best.x, best.y})));
    // The point respects the bounds it was filtered by.
    auto const q = r.responses[i];
    CHECK(roster[i].mu * best.x / q.q_t <= 30.0 * (1 + 1e-9));
    CHECK(cfg.psi * best.y / q.q_m <= 5.0 * (1 + 1e-9));
    sum += best.value;
  }
  CHECK(r.mo_utility == doctest::Approx(sum));
}
