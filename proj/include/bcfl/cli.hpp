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

// Command implementations behind the `bcfl` executable. Each command prints a
// human-readable report, writes its artifacts under
// <output root>/<command>-<content hash>, and returns an exit code.

#include "bcfl/config.hpp"
#include "bcfl/model.hpp"
#include "bcfl/stackelberg.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

namespace bcfl {

enum ExitCode : int
{
  kExitOk         = 0,
  kExitInfeasible = 1,
  kExitCheckFail  = 2,
  kExitUsage      = 3,
};

inline constexpr char const *kOutputRootEnv = "BCFL_OUTPUT_ROOT";

struct CommandContext
{
  std::ostream              &out;
  std::ostream              &err;
  std::optional<std::string> out_root;  ///< --out-root
};

/// --out-root, then $BCFL_OUTPUT_ROOT, then the config's output_root, then ./runs.
std::filesystem::path resolve_output_root(CommandContext const &ctx, RunConfig const *config);

/// Runs `body`, mapping library exceptions to exit codes and printing the
/// message to ctx.err.
int run_guarded(CommandContext &ctx, std::function<int()> const &body);

/// Fixed 12-decimal formatting; a value that rounds to zero prints unsigned.
std::string fixed12(double v);

struct SolveArgs
{
  std::filesystem::path   config;
  std::optional<Scenario> scenario;
};
int cmd_solve(SolveArgs const &args, CommandContext &ctx);

struct VerifyArgs
{
  std::filesystem::path    config;
  std::optional<Scenario>  scenario;
  std::optional<PricePair> prices_override;
  bool                     nested_grid = false;
  std::optional<double>    tolerance;  ///< oracle gap; default 1e-3, 5e-2 nested
};
int cmd_verify(VerifyArgs const &args, CommandContext &ctx);

struct SweepArgs
{
  int                                  figure = 7;
  std::optional<std::filesystem::path> config;  ///< base system and first client
  std::uint64_t                        seed   = 1;
  std::size_t                          trials = 50;
};
int cmd_sweep(SweepArgs const &args, CommandContext &ctx);

struct TournamentArgs
{
  std::optional<std::filesystem::path> config;
  std::uint64_t                        seed   = 1;
  std::size_t                          trials = 50;
};
int cmd_tournament(TournamentArgs const &args, CommandContext &ctx);

struct ShapleyArgs
{
  std::filesystem::path      config;
  bool                       exact = false;
  std::optional<std::size_t> samples;
};
int cmd_shapley(ShapleyArgs const &args, CommandContext &ctx);

struct AuditArgs
{
  std::filesystem::path config;
  std::size_t           client = 0;
  MisreportGrid         grid{5.0, 15.0, 0.5};
};
int cmd_audit_ic(AuditArgs const &args, CommandContext &ctx);

/// Parses "lo:hi:step". Throws ArgumentError.
MisreportGrid parse_misreport_grid(std::string const &text);
/// Parses "p_t,p_m". Throws ArgumentError.
PricePair parse_price_pair(std::string const &text);

struct ReproduceArgs
{
  std::uint64_t seed   = 1;
  std::size_t   trials = 50;
};
int cmd_reproduce(ReproduceArgs const &args, CommandContext &ctx);

}  // namespace bcfl
