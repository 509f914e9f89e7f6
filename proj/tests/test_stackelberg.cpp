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
#include "bcfl/rng.hpp"
#include "bcfl/stackelberg.hpp"

#include "doctest.h"

#include <cmath>
#include <functional>
#include <vector>

using namespace bcfl;

namespace {

// Bisection on a monotone function over [lo, hi]; independent of the closed
// forms under test.
double bisect(std::function<double(double)> const &f, double lo, double hi)
{
  double flo = f(lo);
  for (int k = 0; k < 300; ++k)
  {
    double const mid  = 0.5 * (lo + hi);
    double const fmid = f(mid);
    if ((fmid > 0) == (flo > 0))
    {
      lo  = mid;
      flo = fmid;
    }
    else
    {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ClientProfile ref_client()
{
  return reference_roster(1).front();
}

bool rel_close(double a, double b, double tol)
{
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("scenario names")
{
  CHECK(scenario_from_string("complete") == Scenario::kComplete);
  CHECK(scenario_from_string("incomplete") == Scenario::kIncomplete);
  CHECK(to_string(Scenario::kIncomplete) == "incomplete");
  CHECK_THROWS_AS(scenario_from_string("partial"), ConfigError);
}

TEST_CASE("best response: payoff-neutral training frequency and exhausted time")
{
  auto const cfg = reference_config();
  auto const c   = ref_client();
  Rng        rng(1);
  for (int k = 0; k < 200; ++k)
  {
    PricePair const p{rng.log_uniform(0.01, 10.0), rng.log_uniform(0.01, 10.0)};
    auto const      r = best_response(c, cfg, p);
    // training payoff is exactly zero: mu p_t / q_t = rho mu q_t^2
    CHECK(rel_close(c.mu * p.p_t / r.powers.q_t, c.rho * c.mu * r.powers.q_t * r.powers.q_t,
                    1e-12));
    double const time = c.mu / r.powers.q_t + cfg.psi / r.powers.q_m;
    CHECK(rel_close(time, cfg.horizon, 1e-12));
  }
}

TEST_CASE("best response at the single-client reference point")
{
  auto const r = best_response(ref_client(), reference_config(), {0.08, 0.1});
  CHECK(r.powers.q_t == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.powers.q_m == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(r.q_cap_exceeded);
}

TEST_CASE("best response monotonicity in prices and mining work")
{
  auto       cfg = reference_config();
  auto const c   = ref_client();
  double     prev_qt = 0.0;
  double     prev_qm = 1e300;
  for (double pt = 0.01; pt <= 10.0; pt += 0.01)
  {
    auto const r = best_response(c, cfg, {pt, 1.0}).powers;
    CHECK(r.q_t > prev_qt);
    CHECK(r.q_m < prev_qm);
    prev_qt = r.q_t;
    prev_qm = r.q_m;
  }
  double prev = 0.0;
  for (double psi = 0.5; psi <= 10.0; psi += 0.5)
  {
    cfg.psi      = psi;
    auto const r = best_response(c, cfg, {1.0, 1.0}).powers;
    CHECK(r.q_m > prev);
    prev = r.q_m;
  }
}

TEST_CASE("best response infeasibility threshold")
{
  auto const   cfg = reference_config();
  auto const   c   = ref_client();
  double const pmin = min_feasible_training_price(c, cfg);
  CHECK(pmin == doctest::Approx(0.01 * std::pow(10.0 / 15.0, 3)));
  CHECK_NOTHROW(best_response(c, cfg, {pmin * 1.001, 1.0}));
  try
  {
    best_response(c, cfg, {pmin * 0.5, 1.0});
    FAIL("expected InfeasiblePriceError");
  }
  catch (InfeasiblePriceError const &e)
  {
    CHECK(e.minimum() == doctest::Approx(pmin));
  }
  CHECK_THROWS_AS(best_response(c, cfg, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(best_response(c, cfg, {-1.0, 1.0}), DomainError);
}

TEST_CASE("frequency cap produces a flag")
{
  auto const r = best_response(ref_client(), reference_config(), {1000.0, 1.0});
  CHECK(r.q_cap_exceeded);
}

TEST_CASE("complete-information prices make both reward bounds bind")
{
  auto const cfg = reference_config();
  Rng        rng(4);
  for (int k = 0; k < 100; ++k)
  {
    ClientProfile c = ref_client();
    c.mu            = rng.uniform(1.0, 20.0);
    ClientBounds const b{rng.uniform(5.0, 100.0), rng.uniform(1.0, 10.0)};
    if (b.train <= min_feasible_training_bound(c, cfg))
    {
      continue;
    }
    auto const p = optimal_prices_complete(c, cfg, b);

    // Independent: the training price solving mu p_t / (p_t / rho)^(1/3) = Rt.
    double const pt = bisect(
        [&](double x) { return c.mu * x / std::cbrt(x / c.rho) - b.train; }, 1e-9, 1e9);
    CHECK(rel_close(p.p_t, pt, 1e-9));

    auto const q = best_response(c, cfg, p).powers;
    auto const u = client_utility(c, cfg, p, q);
    CHECK(rel_close(u.breakdown.reward_train, b.train, 1e-9));
    CHECK(rel_close(u.breakdown.reward_mine, b.mine, 1e-9));
    auto const f = binding_flags(u, cfg, b);
    CHECK(f.time);
    CHECK(f.train_reward);
    CHECK(f.mine_reward);
  }
}

TEST_CASE("incomplete-information prices leave zero utility")
{
  auto const cfg = reference_config();
  Rng        rng(6);
  for (int k = 0; k < 100; ++k)
  {
    ClientProfile c = ref_client();
    c.mu            = rng.uniform(1.0, 20.0);
    ClientBounds const b{rng.uniform(5.0, 100.0), 5.0};
    if (b.train <= min_feasible_training_bound(c, cfg))
    {
      continue;
    }
    auto const p = optimal_prices_incomplete(c, cfg, b);
    auto const q = best_response(c, cfg, p).powers;
    auto const u = client_utility(c, cfg, p, q);
    CHECK(std::abs(u.value) <= 1e-9 * u.breakdown.total_cost());

    // Independent: the mining price at which the closed-form response earns
    // nothing, found by bisection on the utility.
    double const pm = bisect(
        [&](double x) {
          return client_utility(c, cfg, {p.p_t, x}, best_response(c, cfg, {p.p_t, x}).powers)
              .value;
        },
        1e-12, 10.0);
    CHECK(rel_close(p.p_m, pm, 1e-8));
    CHECK(binding_flags(u, cfg, b).ir);
  }
}

TEST_CASE("reference equilibrium prices")
{
  auto const         cfg = reference_config();
  auto const         c   = ref_client();
  ClientBounds const b{25.0, 5.0};
  auto const         pc = optimal_prices_complete(c, cfg, b);
  CHECK(pc.p_t == doctest::Approx(std::pow(2.5, 1.5) * 10.0).epsilon(1e-12));
  CHECK(pc.p_t == doctest::Approx(39.528471).epsilon(1e-7));
  double const left = 15.0 - 10.0 * std::cbrt(0.01 / pc.p_t);
  CHECK(pc.p_m == doctest::Approx(5.0 / left).epsilon(1e-12));
  auto const pi = optimal_prices_incomplete(c, cfg, b);
  CHECK(pi.p_t == pc.p_t);
  CHECK(pi.p_m == doctest::Approx(0.01 * 125.0 / (left * left * left)).epsilon(1e-12));
}

TEST_CASE("training bound threshold")
{
  auto const   cfg = reference_config();
  auto const   c   = ref_client();
  double const m   = min_feasible_training_bound(c, cfg);
  CHECK(m == doctest::Approx(0.01 * 1000.0 / 225.0));
  CHECK_NOTHROW(optimal_prices_complete(c, cfg, {m * 1.01, 5.0}));
  CHECK_THROWS_AS(optimal_prices_complete(c, cfg, {m, 5.0}), InfeasibleBudgetError);
  CHECK_THROWS_AS(optimal_prices_incomplete(c, cfg, {-1.0, 5.0}), InfeasibleBudgetError);
}

TEST_CASE("algorithm on the reference roster")
{
  auto const cfg    = reference_config();
  auto const roster = reference_roster();
  auto const eq     = run_algorithm_complete(roster, cfg);
  REQUIRE(eq.clients.size() == 50);
  for (std::size_t i = 0; i < 50; ++i)
  {
    CHECK(eq.bounds.train_bound[i] == doctest::Approx(25.0));
    CHECK(eq.clients[i].prices == eq.clients[0].prices);
    CHECK(eq.clients[i].id == i);
    CHECK(eq.clients[i].binds.time);
    CHECK(eq.clients[i].binds.train_reward);
    CHECK(eq.clients[i].binds.mine_reward);
  }
  CHECK(eq.mo_utility == doctest::Approx(eq.mo_utility_expected));

  auto const inc = run_algorithm(roster, cfg, Scenario::kIncomplete);
  for (auto const &c : inc.clients)
  {
    CHECK(std::abs(c.realized.value) <= 1e-9 * c.realized.breakdown.total_cost());
    CHECK(c.binds.ir);
    CHECK(c.expected_utility == doctest::Approx(c.realized.value));
  }
}

TEST_CASE("infeasibility names the client")
{
  auto cfg    = reference_config();
  auto roster = reference_roster(4);
  // Clients too slow for their share: rho mu^3 / T^2 exceeds the training bound.
  for (auto &c : roster)
  {
    c.mu = 250.0;
  }
  roster[2].id = 7;
  try
  {
    run_algorithm_complete(roster, cfg);
    FAIL("expected an infeasibility");
  }
  catch (InfeasibleError const &e)
  {
    REQUIRE(e.client_id().has_value());
    CHECK(*e.client_id() == 0);
    CHECK(std::string(e.what()).rfind("client 0: ", 0) == 0);
  }
}

TEST_CASE("incomplete information prices from reports and pays true types")
{
  auto const          cfg    = reference_config();
  auto const          roster = reference_roster(5);
  std::vector<double> reports(5, 12.0);
  auto const          eq = run_algorithm_incomplete(roster, cfg, reports);
  auto const          c  = eq.clients[0];
  CHECK(c.reported_mu == 12.0);
  CHECK(std::abs(c.expected_utility) < 1e-9);
  // The true client still best-responds, so the horizon binds but the
  // realized utility departs from the planned zero.
  CHECK(c.binds.time);
  CHECK(std::abs(c.realized.value) > 1e-6);
  std::vector<double> wrong(4, 10.0);
  CHECK_THROWS_AS(run_algorithm_incomplete(roster, cfg, wrong), ArgumentError);
}

TEST_CASE("truthfulness audit on the reference roster")
{
  auto const cfg    = reference_config();
  auto const roster = reference_roster();
  auto const audit  = ic_audit(roster, cfg, 0, {5.0, 15.0, 0.5});
  CHECK(audit.table.size() == 21);
  CHECK(audit.true_mu == 10.0);
  std::size_t truthful = 0;
  for (auto const &p : audit.table)
  {
    truthful += p.truthful ? 1 : 0;
    if (!p.feasible)
    {
      CHECK_FALSE(p.reason.empty());
    }
  }
  CHECK(truthful == 1);
  CHECK(audit.gain >= 0.0);
  CHECK(audit.best_utility == doctest::Approx(audit.truthful_utility + audit.gain));

  CHECK_THROWS_AS(ic_audit(roster, cfg, 0, {11.0, 15.0, 0.5}), ArgumentError);
  CHECK_THROWS_AS(ic_audit(roster, cfg, 99, {5.0, 15.0, 0.5}), ArgumentError);
}

TEST_CASE("truthfulness audit inserts an off-grid true value")
{
  auto roster = reference_roster(3);
  for (auto &c : roster)
  {
    c.mu = 10.25;
  }
  auto const audit = ic_audit(roster, reference_config(), 1, {5.0, 15.0, 0.5});
  CHECK(audit.table.size() == 22);
}
