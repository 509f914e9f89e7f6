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
#include "bcfl/shapley.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace bcfl;

namespace {

// Reference game written from the definition: W is the largest distance of
// any nonempty coalition's mean contribution from the target.
struct ReferenceGame
{
  std::vector<double> g;
  double              target;

  double distance(std::vector<std::size_t> const &members) const
  {
    double sum = 0.0;
    for (auto i : members)
    {
      sum += g[i];
    }
    return std::abs(sum / static_cast<double>(members.size()) - target);
  }

  double w() const
  {
    double best = 0.0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << g.size()); ++mask)
    {
      std::vector<std::size_t> m;
      for (std::size_t i = 0; i < g.size(); ++i)
      {
        if (mask & (std::size_t{1} << i))
        {
          m.push_back(i);
        }
      }
      best = std::max(best, distance(m));
    }
    return best;
  }

  double value(std::vector<std::size_t> const &members, double w_value) const
  {
    return members.empty() ? 0.0 : w_value - distance(members);
  }

  // Average marginal contribution over all n! orderings.
  std::vector<double> shapley() const
  {
    double const             wv = w();
    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> sv(g.size(), 0.0);
    double              count = 0.0;
    do
    {
      std::vector<std::size_t> prefix;
      double                   before = 0.0;
      for (auto i : order)
      {
        prefix.push_back(i);
        double const after = value(prefix, wv);
        sv[i] += after - before;
        before = after;
      }
      count += 1.0;
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto &v : sv)
    {
      v /= count;
    }
    return sv;
  }
};

std::vector<double> random_perf(Rng &rng, std::size_t n)
{
  std::vector<double> g(n);
  for (auto &x : g)
  {
    x = rng.uniform(1.0, 20.0);
  }
  return g;
}

}  // namespace

TEST_CASE("coalition value from the definition")
{
  auto const spec = CoalitionValueSpec::build({4.0, 10.0, 16.0}, 10.0);
  CHECK(spec.normalizer == doctest::Approx(6.0));
  std::vector<std::size_t> none;
  CHECK(coalition_value(spec, none) == 0.0);
  std::vector<std::size_t> a{0};
  CHECK(coalition_value(spec, a) == doctest::Approx(0.0));
  std::vector<std::size_t> ab{0, 1};
  CHECK(coalition_value(spec, ab) == doctest::Approx(3.0));
  std::vector<std::size_t> all{2, 0, 1};
  CHECK(coalition_value(spec, all) == doctest::Approx(6.0));

  std::vector<std::size_t> unknown{0, 3};
  CHECK_THROWS_AS(coalition_value(spec, unknown), ArgumentError);
  std::vector<std::size_t> repeated{1, 1};
  CHECK_THROWS_AS(coalition_value(spec, repeated), ArgumentError);
}

TEST_CASE("normalizer from singletons equals full enumeration")
{
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep)
  {
    auto const g   = random_perf(rng, 9);
    auto const all = CoalitionValueSpec::build(g, 10.0, 20);
    auto const fast = CoalitionValueSpec::build(g, 10.0, 0);
    CHECK(all.normalizer == doctest::Approx(fast.normalizer).epsilon(1e-14));
  }
}

TEST_CASE("exact enumeration matches the permutation definition")
{
  Rng rng(3);
  for (std::size_t n = 1; n <= 7; ++n)
  {
    auto const          g = random_perf(rng, n);
    ReferenceGame const ref{g, 10.0};
    auto const          expected = ref.shapley();
    auto const          got      = shapley_exact(CoalitionValueSpec::build(g, 10.0));
    REQUIRE(got.size() == n);
    for (std::size_t i = 0; i < n; ++i)
    {
      CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("shapley axioms on small rosters")
{
  Rng rng(5);
  for (std::size_t n = 2; n <= 8; ++n)
  {
    auto g = random_perf(rng, n);
    g[1]   = g[0];  // a symmetric pair
    auto const spec = CoalitionValueSpec::build(g, 10.0);
    auto const sv   = shapley_exact(spec);

    std::vector<std::size_t> everyone(n);
    std::iota(everyone.begin(), everyone.end(), std::size_t{0});
    double const grand = coalition_value(spec, everyone);
    double const sum   = std::accumulate(sv.begin(), sv.end(), 0.0);
    CHECK(std::abs(sum - grand) <= 1e-9 * std::max(1.0, std::abs(grand)));
    CHECK(std::abs(sv[0] - sv[1]) <= 1e-9 * std::max(1.0, std::abs(sv[0])));
  }

  // Identical contributions: every coalition is worth zero, so every client is
  // a null player.
  auto const flat = shapley_exact(CoalitionValueSpec::build(std::vector<double>(6, 7.0), 10.0));
  for (double v : flat)
  {
    CHECK(v == doctest::Approx(0.0));
  }
}

TEST_CASE("by-type computation matches enumeration")
{
  Rng rng(8);
  for (int rep = 0; rep < 10; ++rep)
  {
    std::vector<double> types{rng.uniform(1, 20), rng.uniform(1, 20), rng.uniform(1, 20)};
    std::vector<double> g;
    for (std::size_t i = 0; i < 12; ++i)
    {
      g.push_back(types[rng.below(3)]);
    }
    auto const spec = CoalitionValueSpec::build(g, 10.0);
    auto const a    = shapley_exact(spec);
    auto const b    = shapley_by_type(spec);
    for (std::size_t i = 0; i < g.size(); ++i)
    {
      CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("by-type computation scales to large rosters with two types")
{
  std::vector<double> g(60, 10.0);
  g[0]             = 8.0;
  auto const spec  = CoalitionValueSpec::build(g, 10.0);
  auto const sv    = shapley_by_type(spec);
  double const sum = std::accumulate(sv.begin(), sv.end(), 0.0);
  std::vector<std::size_t> everyone(60);
  std::iota(everyone.begin(), everyone.end(), std::size_t{0});
  CHECK(sum == doctest::Approx(coalition_value(spec, everyone)).epsilon(1e-9));
  CHECK(sv[0] < 0.0);
  CHECK(sv[1] == doctest::Approx(sv[59]).epsilon(1e-12));
}

TEST_CASE("exact enumeration refuses large rosters")
{
  auto const spec = CoalitionValueSpec::build(std::vector<double>(21, 1.0), 10.0);
  CHECK_THROWS_AS(shapley_exact(spec), EnumerationLimitError);
  CHECK_THROWS_AS(shapley_by_type(CoalitionValueSpec::build({1, 2, 3, 4, 5, 6, 7, 8}, 10.0), 10),
                  EnumerationLimitError);
}

TEST_CASE("sampled estimator is deterministic and close to exact")
{
  Rng        rng(21);
  auto const g    = random_perf(rng, 6);
  auto const spec = CoalitionValueSpec::build(g, 10.0);
  auto const a    = shapley_sampled(spec, 4000, 9);
  auto const b    = shapley_sampled(spec, 4000, 9);
  CHECK(a.value == b.value);
  auto const exact = shapley_exact(spec);
  for (std::size_t i = 0; i < g.size(); ++i)
  {
    CHECK(std::abs(a.value[i] - exact[i]) <= 5.0 * a.std_error[i] + 1e-12);
  }
  auto const one = shapley_sampled(spec, 1, 9);
  CHECK(std::isinf(one.std_error[0]));
}

TEST_CASE("reward bounds conserve the budget")
{
  auto       cfg = reference_config();
  std::vector<ClientProfile> roster;
  for (std::size_t i = 0; i < 8; ++i)
  {
    roster.push_back({i, 6.0 + static_cast<double>(i), 0.01, 20.0, {}, {}, {}});
  }
  auto const rb = reward_bounds(roster, cfg);
  CHECK(rb.method == "exact");
  double total = 0.0;
  for (std::size_t i = 0; i < roster.size(); ++i)
  {
    total += rb.train_bound[i] + rb.mine_bound[i];
  }
  CHECK(total == doctest::Approx(cfg.budget_total).epsilon(1e-12));

  cfg.mining_bound_per_client.reset();
  cfg.mining_budget = 300.0;
  auto const rb2    = reward_bounds(roster, cfg);
  CHECK(rb2.mine_bound[3] == doctest::Approx(37.5));
  double t2 = std::accumulate(rb2.train_bound.begin(), rb2.train_bound.end(), 0.0);
  CHECK(t2 + rb2.mining_budget == doctest::Approx(1500.0).epsilon(1e-12));
}

TEST_CASE("identical rosters split the training budget evenly")
{
  auto const cfg    = reference_config();
  auto const roster = reference_roster();
  auto const rb     = reward_bounds(roster, cfg);
  CHECK(rb.symmetric_split);
  CHECK(rb.grand_value == 0.0);
  for (double b : rb.train_bound)
  {
    CHECK(b == doctest::Approx(25.0));
  }
  ShapleyOptions strict;
  strict.degenerate = DegeneratePolicy::kError;
  CHECK_THROWS_AS(reward_bounds(roster, cfg, strict), DegenerateValueError);
}

TEST_CASE("forced methods agree on a mixed roster")
{
  auto const                 cfg = reference_config();
  std::vector<ClientProfile> roster;
  for (std::size_t i = 0; i < 10; ++i)
  {
    roster.push_back({i, i % 2 == 0 ? 8.0 : 11.0, 0.01, 20.0, {}, {}, {}});
  }
  ShapleyOptions exact;
  exact.method = ShapleyMethod::kExact;
  ShapleyOptions by_type;
  by_type.method = ShapleyMethod::kByType;
  auto const a   = reward_bounds(roster, cfg, exact);
  auto const b   = reward_bounds(roster, cfg, by_type);
  CHECK(b.method == "by_type");
  for (std::size_t i = 0; i < roster.size(); ++i)
  {
    CHECK(b.train_bound[i] == doctest::Approx(a.train_bound[i]).epsilon(1e-10));
  }
}
