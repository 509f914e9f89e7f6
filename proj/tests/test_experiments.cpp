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
#include "bcfl/experiments.hpp"

#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

using namespace bcfl;

namespace {

ExperimentSpec small_sweep()
{
  ExperimentSpec s;
  s.name      = "small";
  s.mode      = SweepMode::kEquilibrium;
  s.axes      = {{"mu", 0.0, 2.0, 0.5}};
  s.n_clients = 5;
  return s;
}

std::vector<std::string> lines(std::string const &text)
{
  std::vector<std::string> out;
  std::istringstream       in(text);
  for (std::string l; std::getline(in, l);)
  {
    out.push_back(l);
  }
  return out;
}

}  // namespace

TEST_CASE("sweep axis values")
{
  auto const v = SweepAxis{"mu", 0.0, 1.0, 0.25}.values(1e-3);
  REQUIRE(v.size() == 5);
  CHECK(v[0] == 1e-3);
  CHECK(v[4] == doctest::Approx(1.0));
  CHECK(SweepAxis{"mu", 2.0, 1.0, 0.5}.values(1e-3).empty());
  CHECK(SweepAxis{"pt", 0.0, 10.0, 0.1}.values(1e-3).size() == 101);
}

TEST_CASE("empty sweep range gives an empty table")
{
  auto spec    = small_sweep();
  spec.axes[0] = {"mu", 3.0, 1.0, 0.5};
  auto const t = run_sweep(spec);
  CHECK(t.rows.empty());
  CHECK(t.feasible_rows == 0);
  CHECK(t.infeasible_rows == 0);
  CHECK(lines(sweep_csv(t)).size() == 1);
}

TEST_CASE("spec validation")
{
  auto spec    = small_sweep();
  spec.axes[0] = {"pt", 0.0, 1.0, 0.1};
  CHECK_THROWS_AS(spec.validate(), ArgumentError);
  spec.axes[0] = {"speed", 0.0, 1.0, 0.1};
  spec.mode    = SweepMode::kFixedPrice;
  CHECK_THROWS_AS(spec.validate(), ArgumentError);
  CHECK_THROWS_AS(figure_specs(1), ArgumentError);
  CHECK_THROWS_AS(figure_specs(8), ArgumentError);
  CHECK(figure_specs(4).size() == 2);
  CHECK(figure_specs(5).front().name == figure_specs(6).front().name);
}

TEST_CASE("sweep rows are accounted and ordered")
{
  auto const t = run_sweep(small_sweep());
  CHECK(t.rows.size() == 10);
  CHECK(t.feasible_rows + t.infeasible_rows == t.rows.size());
  CHECK(t.rows.front().scenario == Scenario::kComplete);
  CHECK(t.rows.back().scenario == Scenario::kIncomplete);
  for (std::size_t k = 0; k < 5; ++k)
  {
    CHECK(t.rows[k].swept[0] == t.rows[k + 5].swept[0]);
  }
  for (auto const &r : t.rows)
  {
    if (!r.feasible)
    {
      CHECK(std::isnan(r.client_utility));
    }
  }
  auto const csv = lines(sweep_csv(t));
  CHECK(csv.size() == 11);
  auto const meta = sweep_metadata(small_sweep(), t);
  CHECK(meta.find("feasible_rows=") != std::string::npos);
}

TEST_CASE("sweeps are deterministic")
{
  auto const spec = figure_specs(7).front();
  CHECK(sweep_csv(run_sweep(spec)) == sweep_csv(run_sweep(spec)));
}

TEST_CASE("training-price sweep raises the training frequency")
{
  auto const t = run_sweep(figure_specs(7).front());
  for (auto s : {Scenario::kComplete, Scenario::kIncomplete})
  {
    std::vector<double> qt;
    for (auto const &r : t.rows)
    {
      if (r.scenario == s && r.feasible)
      {
        qt.push_back(r.powers.q_t);
      }
    }
    CHECK(qt.size() > 50);
    CHECK(check_strict_monotone(qt, true).pass);
  }
}

TEST_CASE("strict monotonicity check")
{
  std::vector<double> const up{1, 2, 3};
  std::vector<double> const flat{1, 1, 2};
  CHECK(check_strict_monotone(up, true).pass);
  CHECK_FALSE(check_strict_monotone(up, false).pass);
  auto const m = check_strict_monotone(flat, true);
  CHECK_FALSE(m.pass);
  CHECK(m.pairs == 2);
  CHECK(m.violations == 1);
}

TEST_CASE("tournament shape and determinism")
{
  auto spec      = figure_specs(2, 3, 4).front();
  spec.n_clients = 5;
  auto const a   = strategy_tournament(spec);
  auto const b   = strategy_tournament(spec);
  CHECK(a.summaries.size() == 8);
  // At participation-binding prices the client's feasible set is a single
  // point, so a random client never draws a feasible response there.
  auto const *ro = a.find(Scenario::kIncomplete, Strategy::kRandom, Strategy::kOptimal);
  REQUIRE(ro != nullptr);
  CHECK(ro->trials == 0);
  CHECK(ro->skipped_draws == 4);
  CHECK(std::isnan(ro->client_mean));
  CHECK(a.rows.size() == 2 * 4 * 4 - 4);
  CHECK(tournament_csv(a) == tournament_csv(b));
  auto const *oo = a.find(Scenario::kComplete, Strategy::kOptimal, Strategy::kOptimal);
  REQUIRE(oo != nullptr);
  CHECK(oo->trials == 4);
  CHECK(oo->client_std == doctest::Approx(0.0).epsilon(1e-9));
  auto const dom = a.dominance();
  REQUIRE(dom.size() == 2);
  CHECK(std::isfinite(dom[1].client_margin));

  spec.seed    = 4;
  auto const c = strategy_tournament(spec);
  CHECK(tournament_csv(a) != tournament_csv(c));
}

TEST_CASE("number formatting")
{
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("unwritable output path")
{
  CHECK_THROWS_AS(write_text_file("/nonexistent-dir/x/y.csv", "a"), IoError);
}
