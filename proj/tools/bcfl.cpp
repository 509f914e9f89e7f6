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

// bcfl: solve, verify and explore the training/mining pricing game.

#include "bcfl/cli.hpp"
#include "bcfl/stackelberg.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

std::optional<bcfl::Scenario> scenario_flag(std::string const &s)
{
  if (s.empty())
  {
    return std::nullopt;
  }
  return bcfl::scenario_from_string(s);
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Pricing and resource allocation for blockchain-based federated learning"};
  app.set_version_flag("--version", std::string(BCFL_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_root;
  app.add_option("--out-root", out_root,
                 "Output root for run directories (default: $BCFL_OUTPUT_ROOT, then ./runs)");

  std::string const scenario_help = "complete or incomplete (default: from the config)";

  // solve
  auto       *solve = app.add_subcommand("solve", "Compute the equilibrium for a configuration");
  std::string solve_config;
  std::string solve_scenario;
  solve->add_option("config,--config", solve_config, "Run configuration (JSON)")->required();
  solve->add_option("--scenario", solve_scenario, scenario_help);

  // verify
  auto       *verify = app.add_subcommand("verify", "Check the closed forms against the oracles");
  std::string verify_config;
  std::string verify_scenario;
  std::string prices_override;
  bool        nested_grid = false;
  double      tolerance   = 0.0;
  verify->add_option("config,--config", verify_config, "Run configuration (JSON)")->required();
  verify->add_option("--scenario", verify_scenario, scenario_help);
  verify->add_option("--prices-override", prices_override,
                     "Check these prices p_t,p_m for every client instead of the closed form");
  verify->add_flag("--nested-grid", nested_grid,
                   "Solve client responses by an inner grid (coarse resolution)");
  verify->add_option("--tolerance", tolerance, "Relative oracle gap tolerance");

  // sweep
  auto       *sweep = app.add_subcommand("sweep", "Run a parameter sweep and write CSV");
  int         figure = 7;
  std::string sweep_config;
  std::uint64_t sweep_seed   = 1;
  std::size_t   sweep_trials = 50;
  sweep->add_option("--figure", figure, "Experiment to run: 2 to 7")->required();
  sweep->add_option("--config", sweep_config, "Base system and client (default: reference)");
  sweep->add_option("--seed", sweep_seed, "Random seed");
  sweep->add_option("--trials", sweep_trials, "Trials for the strategy tournament");

  // tournament
  auto         *tournament = app.add_subcommand("tournament", "Compare strategy pairs");
  std::string   tour_config;
  std::uint64_t tour_seed   = 1;
  std::size_t   tour_trials = 50;
  tournament->add_option("--config", tour_config, "Base system and client (default: reference)");
  tournament->add_option("--seed", tour_seed, "Random seed");
  tournament->add_option("--trials", tour_trials, "Number of trials")->check(CLI::PositiveNumber);

  // shapley
  auto       *shapley = app.add_subcommand("shapley", "Shapley values and reward bounds");
  std::string shapley_config;
  bool        exact   = false;
  std::size_t samples = 0;
  shapley->add_option("config,--config", shapley_config, "Run configuration (JSON)")->required();
  auto *exact_flag = shapley->add_flag("--exact", exact, "Exact enumeration");
  shapley->add_option("--samples", samples, "Permutation samples (sampled estimator)")
      ->excludes(exact_flag);

  // audit-ic
  auto       *audit = app.add_subcommand("audit-ic", "Measure gains from misreporting mu");
  std::string audit_config;
  std::size_t audit_client = 0;
  std::string audit_grid   = "5:15:0.5";
  audit->add_option("config,--config", audit_config, "Run configuration (JSON)")->required();
  audit->add_option("--client", audit_client, "Client id to audit");
  audit->add_option("--grid", audit_grid, "Misreport grid lo:hi:step");

  // reproduce
  auto         *reproduce = app.add_subcommand("reproduce", "Run every experiment and summarise");
  std::uint64_t repro_seed   = 1;
  std::size_t   repro_trials = 50;
  reproduce->add_option("--seed", repro_seed, "Random seed");
  reproduce->add_option("--trials", repro_trials, "Tournament trials")->check(CLI::PositiveNumber);

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e);
    return code == 0 ? bcfl::kExitOk : bcfl::kExitUsage;
  }

  bcfl::CommandContext ctx{std::cout, std::cerr, std::nullopt};
  if (!out_root.empty())
  {
    ctx.out_root = out_root;
  }

  return bcfl::run_guarded(ctx, [&]() -> int {
    if (*solve)
    {
      return bcfl::cmd_solve({solve_config, scenario_flag(solve_scenario)}, ctx);
    }
    if (*verify)
    {
      bcfl::VerifyArgs args;
      args.config      = verify_config;
      args.scenario    = scenario_flag(verify_scenario);
      args.nested_grid = nested_grid;
      if (!prices_override.empty())
      {
        args.prices_override = bcfl::parse_price_pair(prices_override);
      }
      if (verify->count("--tolerance") > 0)
      {
        args.tolerance = tolerance;
      }
      return bcfl::cmd_verify(args, ctx);
    }
    if (*sweep)
    {
      bcfl::SweepArgs args;
      args.figure = figure;
      args.seed   = sweep_seed;
      args.trials = sweep_trials;
      if (!sweep_config.empty())
      {
        args.config = sweep_config;
      }
      return bcfl::cmd_sweep(args, ctx);
    }
    if (*tournament)
    {
      bcfl::TournamentArgs args;
      args.seed   = tour_seed;
      args.trials = tour_trials;
      if (!tour_config.empty())
      {
        args.config = tour_config;
      }
      return bcfl::cmd_tournament(args, ctx);
    }
    if (*shapley)
    {
      bcfl::ShapleyArgs args;
      args.config = shapley_config;
      args.exact  = exact;
      if (shapley->count("--samples") > 0)
      {
        args.samples = samples;
      }
      return bcfl::cmd_shapley(args, ctx);
    }
    if (*audit)
    {
      return bcfl::cmd_audit_ic({audit_config, audit_client, bcfl::parse_misreport_grid(audit_grid)},
                                ctx);
    }
    return bcfl::cmd_reproduce({repro_seed, repro_trials}, ctx);
  });
}
