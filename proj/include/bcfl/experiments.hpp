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

// Strategy tournaments, parameter sweeps and the one-shot reproduction run.
//
// Every experiment is a pure function of its spec: random draws come from
// streams derived from spec.seed, rows are emitted in a fixed order, numbers
// are written with 12 significant digits.

#include "bcfl/model.hpp"
#include "bcfl/shapley.hpp"
#include "bcfl/stackelberg.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bcfl {

enum class ExperimentKind
{
  kStrategyPairs,
  kSweep,
};

enum class SweepMode
{
  kEquilibrium,  ///< full pipeline per grid point
  kFixedPrice,   ///< prices held or swept, clients respond by the closed form
};

enum class Strategy
{
  kOptimal,
  kRandom,
};

std::string_view to_string(Strategy s);

/// One swept variable: "mu", "psi", "pt" or "pm". Values lo, lo + step, ...
/// up to hi; non-positive values are replaced by the spec's floor.
struct SweepAxis
{
  std::string name;
  double      lo   = 0.0;
  double      hi   = 0.0;
  double      step = 1.0;

  std::vector<double> values(double floor) const;
};

struct ExperimentSpec
{
  std::string            name;
  ExperimentKind         kind = ExperimentKind::kSweep;
  SweepMode              mode = SweepMode::kEquilibrium;
  std::vector<SweepAxis> axes;
  SystemConfig           config    = reference_config();
  ClientProfile          client    = reference_roster(1).front();
  std::size_t            n_clients = 50;
  std::vector<Scenario>  scenarios{Scenario::kComplete, Scenario::kIncomplete};
  std::size_t            trials = 1;
  std::uint64_t          seed   = 1;
  double                 floor  = 1e-3;
  double                 random_price_hi = 10.0;
  std::size_t            max_retries     = 1000;
  ShapleyOptions         shapley;

  /// Throws ArgumentError.
  void validate() const;
};

struct SweepRow
{
  Scenario            scenario = Scenario::kComplete;
  std::vector<double> swept;
  PricePair           prices;
  PowerPair           powers;
  double              client_utility = 0.0;
  double              mo_utility     = 0.0;
  bool                time_binds     = false;
  bool                ir_binds       = false;
  bool                feasible       = false;
  std::size_t         trial          = 0;
  std::uint64_t       seed           = 0;
};

struct SweepTable
{
  std::vector<std::string> swept_names;
  std::vector<SweepRow>    rows;
  std::size_t              feasible_rows   = 0;
  std::size_t              infeasible_rows = 0;
  /// Prices used where a fixed-price sweep holds a price at its equilibrium
  /// value, one entry per scenario.
  std::vector<std::pair<Scenario, PricePair>> base_prices;
};

/// Rows ordered by scenario, then grid index (first axis outermost), then trial.
SweepTable run_sweep(ExperimentSpec const &spec);

struct TournamentRow
{
  Scenario      scenario        = Scenario::kComplete;
  Strategy      client_strategy = Strategy::kOptimal;
  Strategy      mo_strategy     = Strategy::kOptimal;
  std::size_t   trial           = 0;
  double        client_utility  = 0.0;  ///< mean over clients
  double        mo_utility      = 0.0;
  std::uint64_t seed            = 0;
};

struct PairSummary
{
  Scenario    scenario        = Scenario::kComplete;
  Strategy    client_strategy = Strategy::kOptimal;
  Strategy    mo_strategy     = Strategy::kOptimal;
  double      client_mean     = 0.0;
  double      client_std      = 0.0;
  double      mo_mean         = 0.0;
  double      mo_std          = 0.0;
  std::size_t trials          = 0;
  std::size_t skipped_draws   = 0;
};

struct DominanceCheck
{
  Scenario scenario      = Scenario::kComplete;
  bool     pass          = false;
  double   client_margin = 0.0;  ///< (Optimal, Optimal) mean minus best other mean
  double   mo_margin     = 0.0;
};

struct TournamentResult
{
  std::vector<TournamentRow> rows;
  std::vector<PairSummary>   summaries;

  PairSummary const *find(Scenario s, Strategy client, Strategy mo) const;
  std::vector<DominanceCheck> dominance() const;
};

/// The four {Optimal, Random}^2 pairings for every trial and scenario.
TournamentResult strategy_tournament(ExperimentSpec const &spec);

struct MonotonicityCheck
{
  bool        pass       = true;
  std::size_t pairs      = 0;
  std::size_t violations = 0;
};

/// Strict monotonicity of y over consecutive entries (x assumed sorted).
MonotonicityCheck check_strict_monotone(std::span<double const> y, bool increasing);

std::string format_number(double v);
std::string sweep_csv(SweepTable const &table);
std::string tournament_csv(TournamentResult const &result);
/// key=value lines describing the spec and the table's accounting.
std::string sweep_metadata(ExperimentSpec const &spec, SweepTable const &table);
std::string tournament_metadata(ExperimentSpec const &spec, TournamentResult const &result);

/// Writes the whole string or throws IoError naming the path.
void write_text_file(std::filesystem::path const &path, std::string const &content);

/// The standard experiment specs. Figure 4 yields two specs (price_t, price_m).
/// Throws ArgumentError for figures other than 2 through 7.
std::vector<ExperimentSpec> figure_specs(int figure, std::uint64_t seed = 1,
                                         std::size_t trials = 50);

struct SummaryCheck
{
  std::string name;
  bool        pass = false;
  double      value = 0.0;
  std::string detail;
};

struct ReproduceOptions
{
  std::uint64_t seed   = 1;
  std::size_t   trials = 50;
};

struct ReproduceResult
{
  std::vector<std::filesystem::path> csv_files;
  std::filesystem::path              summary_file;
  std::vector<SummaryCheck>          checks;

  bool all_pass() const;
};

/// Runs figures 2 through 7, writes one CSV (plus .meta sidecar) per figure
/// analog and summary.json into `output_dir`.
ReproduceResult reproduce_all(std::filesystem::path const &output_dir,
                              ReproduceOptions const &options = {});

}  // namespace bcfl
