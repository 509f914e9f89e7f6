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

#include "bcfl/cli.hpp"

#include "bcfl/errors.hpp"
#include "bcfl/experiments.hpp"
#include "bcfl/oracle.hpp"
#include "bcfl/shapley.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace bcfl {
namespace {

using nlohmann::json;

constexpr double kKktTolerance = 1e-8;

std::string yes_no(bool b)
{
  return b ? "yes" : "no";
}

// Run directory for a command; the id hashes the effective inputs, never the
// output location.
std::filesystem::path make_run_dir(CommandContext const &ctx, RunConfig const *config,
                                   std::string const &command, json const &payload)
{
  auto const root = resolve_output_root(ctx, config);
  auto const dir  = root / run_id(command, payload);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
  {
    throw IoError("cannot create run directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
  return dir;
}

json config_payload(RunConfig const &config)
{
  auto j = to_json(config);
  j.erase("output_root");
  return j;
}

struct Check
{
  std::string name;
  bool        pass      = false;
  double      value     = 0.0;
  double      tolerance = 0.0;
  std::string detail;
};

json checks_json(std::vector<Check> const &checks)
{
  json out = json::array();
  for (auto const &c : checks)
  {
    out.push_back({{"name", c.name},
                   {"pass", c.pass},
                   {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                   {"tolerance", c.tolerance},
                   {"detail", c.detail}});
  }
  return out;
}

void print_checks(std::ostream &os, std::vector<Check> const &checks)
{
  for (auto const &c : checks)
  {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << format_number(c.value)
       << "  tolerance=" << format_number(c.tolerance);
    if (!c.detail.empty())
    {
      os << "  (" << c.detail << ")";
    }
    os << '\n';
  }
}

std::string equilibrium_csv(Equilibrium const &eq)
{
  std::string out = "id,reported_mu,train_bound,mine_bound,p_t,p_m,q_t,q_m,client_utility,"
                    "time_binds,train_reward_binds,mine_reward_binds,ir_binds,q_cap_exceeded\n";
  for (std::size_t i = 0; i < eq.clients.size(); ++i)
  {
    auto const &c  = eq.clients[i];
    auto const  cb = bounds_of(eq.bounds, i);
    out += std::to_string(c.id) + ',' + format_number(c.reported_mu) + ',' +
           format_number(cb.train) + ',' + format_number(cb.mine) + ',' +
           format_number(c.prices.p_t) + ',' + format_number(c.prices.p_m) + ',' +
           format_number(c.powers.q_t) + ',' + format_number(c.powers.q_m) + ',' +
           format_number(c.realized.value) + ',' + (c.binds.time ? "1" : "0") + ',' +
           (c.binds.train_reward ? "1" : "0") + ',' + (c.binds.mine_reward ? "1" : "0") + ',' +
           (c.binds.ir ? "1" : "0") + ',' + (c.q_cap_exceeded ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace

std::filesystem::path resolve_output_root(CommandContext const &ctx, RunConfig const *config)
{
  if (ctx.out_root && !ctx.out_root->empty())
  {
    return *ctx.out_root;
  }
  if (char const *env = std::getenv(kOutputRootEnv); env != nullptr && *env != '\0')
  {
    return env;
  }
  if (config != nullptr && config->output_root)
  {
    return *config->output_root;
  }
  return "runs";
}

int run_guarded(CommandContext &ctx, std::function<int()> const &body)
{
  try
  {
    return body();
  }
  catch (InfeasibleError const &e)
  {
    ctx.err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
  catch (MechanismRejectError const &e)
  {
    ctx.err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
  catch (DegenerateValueError const &e)
  {
    ctx.err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
  catch (ConfigError const &e)
  {
    ctx.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  catch (ArgumentError const &e)
  {
    ctx.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  catch (EnumerationLimitError const &e)
  {
    ctx.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  catch (IoError const &e)
  {
    ctx.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  catch (DomainError const &e)
  {
    ctx.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

std::string fixed12(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  std::string s = buf;
  if (s.rfind("-0.", 0) == 0 && s.find_first_not_of("-0.") == std::string::npos)
  {
    s.erase(0, 1);
  }
  return s;
}

int cmd_solve(SolveArgs const &args, CommandContext &ctx)
{
  auto config = load_run_config(args.config);
  if (args.scenario)
  {
    config.scenario = *args.scenario;
  }
  auto const eq = run_algorithm(config.clients, config.system, config.scenario, config.shapley);

  ctx.out << "scenario: " << to_string(eq.scenario) << "  clients: " << eq.clients.size()
          << "  shapley: " << eq.bounds.method
          << (eq.bounds.symmetric_split ? " (symmetric split)" : "") << '\n';
  char line[512];
  std::snprintf(line, sizeof line, "%6s %12s %12s %12s %14s %14s %14s %14s %20s  %s\n", "id", "mu",
                "R_t bound", "R_m bound", "p_t", "p_m", "q_t", "q_m", "utility",
                "binds (time/train/mine/ir)");
  ctx.out << line;
  for (std::size_t i = 0; i < eq.clients.size(); ++i)
  {
    auto const &c  = eq.clients[i];
    auto const  cb = bounds_of(eq.bounds, i);
    std::snprintf(line, sizeof line, "%6zu %12.6g %12.6g %12.6g %14.8g %14.8g %14.8g %14.8g %20s  %d/%d/%d/%d%s\n",
                  c.id, config.clients[i].mu, cb.train, cb.mine, c.prices.p_t, c.prices.p_m,
                  c.powers.q_t, c.powers.q_m, fixed12(c.realized.value).c_str(), c.binds.time,
                  c.binds.train_reward, c.binds.mine_reward, c.binds.ir,
                  c.q_cap_exceeded ? "  q_cap exceeded" : "");
    ctx.out << line;
  }
  ctx.out << "model owner utility: " << fixed12(eq.mo_utility) << '\n';

  json payload = {{"config", config_payload(config)}};
  auto const dir = make_run_dir(ctx, &config, "solve", payload);
  write_text_file(dir / "config.json", to_json(config).dump(2) + "\n");
  write_text_file(dir / "equilibrium.csv", equilibrium_csv(eq));
  ctx.out << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_verify(VerifyArgs const &args, CommandContext &ctx)
{
  auto config = load_run_config(args.config);
  if (args.scenario)
  {
    config.scenario = *args.scenario;
  }
  auto const &roster = config.clients;
  auto const &sys    = config.system;
  auto const  s      = config.scenario;
  double const tol   = args.tolerance.value_or(args.nested_grid ? 5e-2 : 1e-3);

  auto const rb = reward_bounds(roster, sys, config.shapley);
  std::vector<PricePair> prices;
  for (std::size_t i = 0; i < roster.size(); ++i)
  {
    try
    {
      prices.push_back(args.prices_override ? *args.prices_override
                                            : optimal_prices(roster[i], sys, bounds_of(rb, i), s));
    }
    catch (InfeasibleError &e)
    {
      e.set_client(roster[i].id);
      throw;
    }
  }

  std::vector<Check> checks;

  // Stage II: grid vs closed form, and first-order conditions.
  double worst_gap   = -std::numeric_limits<double>::infinity();
  double worst_kkt2  = 0.0;
  std::size_t worst_client = 0;
  std::map<std::tuple<double, double, double, double, double>, std::pair<double, double>> seen;
  std::vector<PowerPair> responses;
  for (std::size_t i = 0; i < roster.size(); ++i)
  {
    auto const &p = roster[i];
    auto const  q = best_response(p, sys, prices[i]).powers;
    responses.push_back(q);
    auto const key = std::make_tuple(p.mu, p.rho, p.q_cap, prices[i].p_t, prices[i].p_m);
    auto       it  = seen.find(key);
    if (it == seen.end())
    {
      double const cf   = client_utility(p, sys, prices[i], q).value;
      auto const   grid = grid_best_response(
          p, sys, prices[i], stage2_grid_around(q, args.nested_grid ? config.oracle.inner_points
                                                                      : config.oracle.stage2_points));
      double const gap = grid.best ? (grid.best->value - cf) / std::max(1.0, std::abs(cf))
                                   : std::numeric_limits<double>::infinity();
      double const kkt = kkt_residuals_stage2(p, sys, prices[i], q).max_residual;
      it = seen.emplace(key, std::make_pair(gap, kkt)).first;
    }
    if (it->second.first > worst_gap)
    {
      worst_gap    = it->second.first;
      worst_client = p.id;
    }
    worst_kkt2 = std::max(worst_kkt2, it->second.second);
  }
  checks.push_back({"stage2_grid_gap", worst_gap <= tol, worst_gap, tol,
                    std::isinf(worst_gap) ? "no feasible grid point around client " +
                                                std::to_string(worst_client) + "'s response"
                                          : "largest relative excess of the grid optimum, client " +
                                                std::to_string(worst_client)});
  checks.push_back({"stage2_kkt", worst_kkt2 <= kKktTolerance, worst_kkt2, kKktTolerance, ""});

  // Stage I: grid over prices vs the prices under test.
  {
    std::size_t const points = args.nested_grid ? config.oracle.inner_points
                                                : config.oracle.stage1_points;
    std::vector<GridSpec> grids;
    for (auto const &p : prices)
    {
      grids.push_back(stage1_grid_around(p, points));
    }
    StageOneOptions opts;
    opts.nested       = args.nested_grid;
    opts.inner_points = config.oracle.inner_points;
    auto const grid   = grid_optimal_prices(roster, sys, rb, s, grids, opts);
    double const cf   = mo_utility(roster, sys, prices, responses);
    double const gap  = grid.feasible ? (grid.mo_utility - cf) / std::max(1.0, std::abs(cf))
                                      : std::numeric_limits<double>::infinity();
    double cells = 0.0;
    if (grid.feasible)
    {
      for (std::size_t i = 0; i < roster.size(); ++i)
      {
        auto const &b = *grid.per_client[i].best;
        cells = std::max({cells, grids[i].first.cells_between(b.x, prices[i].p_t),
                          grids[i].second.cells_between(b.y, prices[i].p_m)});
      }
    }
    checks.push_back({"stage1_grid_gap", gap <= tol, gap, tol,
                      grid.feasible ? "" : "no feasible grid point"});
    checks.push_back({"stage1_grid_argmax_cells", grid.feasible && cells <= 1.0, cells, 1.0,
                      "distance of the grid argmax from the prices, in grid cells"});
  }

  auto const k1 = kkt_residuals_stage1(roster, sys, rb, prices, s);
  auto const worst = std::max_element(k1.conditions.begin(), k1.conditions.end(),
                                       [](auto const &a, auto const &b) {
                                         return a.residual < b.residual;
                                       });
  checks.push_back({"stage1_kkt", k1.max_residual <= kKktTolerance, k1.max_residual, kKktTolerance,
                    worst == k1.conditions.end() ? "" : "worst condition " + worst->name});

  bool const all = std::all_of(checks.begin(), checks.end(), [](auto const &c) { return c.pass; });
  ctx.out << "scenario: " << to_string(s) << (args.prices_override ? "  (prices overridden)" : "")
          << (args.nested_grid ? "  (nested grid)" : "") << '\n';
  print_checks(ctx.out, checks);
  ctx.out << (all ? "verify: pass" : "verify: FAIL") << '\n';

  json payload = {{"config", config_payload(config)},
                  {"nested_grid", args.nested_grid},
                  {"tolerance", tol}};
  if (args.prices_override)
  {
    payload["prices_override"] = {args.prices_override->p_t, args.prices_override->p_m};
  }
  auto const dir = make_run_dir(ctx, &config, "verify", payload);
  json report    = payload;
  report["checks"] = checks_json(checks);
  report["pass"]   = all;
  json multipliers = json::object();
  for (auto const &[name, value] : k1.multipliers)
  {
    multipliers[name] = value;
  }
  report["stage1_multipliers"] = multipliers;
  report.erase("config");
  write_text_file(dir / "config.json", to_json(config).dump(2) + "\n");
  write_text_file(dir / "verify.json", report.dump(2) + "\n");
  ctx.out << "run directory: " << dir.string() << '\n';
  return all ? kExitOk : kExitCheckFail;
}

int cmd_sweep(SweepArgs const &args, CommandContext &ctx)
{
  std::optional<RunConfig> config;
  if (args.config)
  {
    config = load_run_config(*args.config);
  }
  auto specs = figure_specs(args.figure, args.seed, args.trials);
  json payload = {{"figure", args.figure}, {"seed", args.seed}, {"trials", args.trials}};
  if (config)
  {
    payload["config"] = config_payload(*config);
    for (auto &spec : specs)
    {
      double const mu = spec.client.mu;
      spec.config     = config->system;
      spec.client     = config->clients.front();
      if (args.figure == 7)
      {
        spec.client.mu = mu;
      }
      spec.n_clients = config->clients.size();
      spec.shapley   = config->shapley;
    }
  }
  auto const dir = make_run_dir(ctx, config ? &*config : nullptr, "sweep", payload);
  for (auto const &spec : specs)
  {
    if (spec.kind == ExperimentKind::kStrategyPairs)
    {
      auto const t = strategy_tournament(spec);
      write_text_file(dir / (spec.name + ".csv"), tournament_csv(t));
      write_text_file(dir / (spec.name + ".meta"), tournament_metadata(spec, t));
      ctx.out << spec.name << ": " << t.rows.size() << " rows\n";
      continue;
    }
    auto const t = run_sweep(spec);
    write_text_file(dir / (spec.name + ".csv"), sweep_csv(t));
    write_text_file(dir / (spec.name + ".meta"), sweep_metadata(spec, t));
    ctx.out << spec.name << ": " << t.rows.size() << " rows (" << t.feasible_rows
            << " feasible, " << t.infeasible_rows << " infeasible)\n";
  }
  ctx.out << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_tournament(TournamentArgs const &args, CommandContext &ctx)
{
  std::optional<RunConfig> config;
  auto spec = figure_specs(2, args.seed, args.trials).front();
  json payload = {{"seed", args.seed}, {"trials", args.trials}};
  if (args.config)
  {
    config = load_run_config(*args.config);
    spec.config       = config->system;
    spec.client       = config->clients.front();
    spec.n_clients    = config->clients.size();
    spec.shapley      = config->shapley;
    payload["config"] = config_payload(*config);
  }
  auto const t = strategy_tournament(spec);

  char line[256];
  std::snprintf(line, sizeof line, "%-11s %-8s %-8s %16s %14s %16s %14s %7s %8s\n", "scenario",
                "client", "owner", "client mean", "client std", "owner mean", "owner std",
                "trials", "skipped");
  ctx.out << line;
  for (auto const &p : t.summaries)
  {
    std::snprintf(line, sizeof line, "%-11s %-8s %-8s %16.8g %14.6g %16.8g %14.6g %7zu %8zu\n",
                  std::string(to_string(p.scenario)).c_str(),
                  std::string(to_string(p.client_strategy)).c_str(),
                  std::string(to_string(p.mo_strategy)).c_str(), p.client_mean, p.client_std,
                  p.mo_mean, p.mo_std, p.trials, p.skipped_draws);
    ctx.out << line;
  }
  for (auto const &d : t.dominance())
  {
    ctx.out << "dominance " << to_string(d.scenario) << ": " << (d.pass ? "holds" : "violated")
            << "  client margin " << format_number(d.client_margin) << "  owner margin "
            << format_number(d.mo_margin) << '\n';
  }

  auto const dir = make_run_dir(ctx, config ? &*config : nullptr, "tournament", payload);
  write_text_file(dir / (spec.name + ".csv"), tournament_csv(t));
  write_text_file(dir / (spec.name + ".meta"), tournament_metadata(spec, t));
  ctx.out << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_shapley(ShapleyArgs const &args, CommandContext &ctx)
{
  auto config = load_run_config(args.config);
  if (args.exact)
  {
    config.shapley.method = ShapleyMethod::kExact;
  }
  if (args.samples)
  {
    config.shapley.method  = ShapleyMethod::kSampled;
    config.shapley.samples = *args.samples;
  }
  auto const &roster = config.clients;
  auto const  spec   = coalition_spec_for(roster, config.system, config.shapley.exact_limit);

  std::vector<double> std_error(roster.size(), 0.0);
  if (config.shapley.method == ShapleyMethod::kSampled)
  {
    auto const est = shapley_sampled(spec, config.shapley.samples, config.shapley.seed);
    std_error      = est.std_error;
  }
  auto const rb = reward_bounds(roster, config.system, config.shapley);

  std::string csv = "id,mu,performance,shapley_value,std_error,train_bound,mine_bound\n";
  char        line[256];
  std::snprintf(line, sizeof line, "%6s %12s %20s %12s %16s %12s\n", "id", "mu", "shapley value",
                "std error", "R_t bound", "R_m bound");
  ctx.out << "method: " << rb.method << '\n' << line;
  double sum = 0.0;
  for (std::size_t i = 0; i < roster.size(); ++i)
  {
    sum += rb.sv[i];
    std::snprintf(line, sizeof line, "%6zu %12.6g %20.12g %12.4g %16.10g %12.6g\n", roster[i].id,
                  roster[i].mu, rb.sv[i], std_error[i], rb.train_bound[i], rb.mine_bound[i]);
    ctx.out << line;
    csv += std::to_string(roster[i].id) + ',' + format_number(roster[i].mu) + ',' +
           format_number(spec.per_client_perf[i]) + ',' + format_number(rb.sv[i]) + ',' +
           format_number(std_error[i]) + ',' + format_number(rb.train_bound[i]) + ',' +
           format_number(rb.mine_bound[i]) + '\n';
  }
  double const diff = std::abs(sum - rb.grand_value);
  ctx.out << "efficiency: sum of shapley values " << format_number(sum) << ", v(N) "
          << format_number(rb.grand_value) << ", difference " << format_number(diff) << '\n';
  double budget = rb.mining_budget;
  for (double b : rb.train_bound)
  {
    budget += b;
  }
  ctx.out << "budget: training bounds plus mining budget " << format_number(budget) << " of "
          << format_number(config.system.budget_total) << '\n';

  json payload = {{"config", config_payload(config)}};
  auto const dir = make_run_dir(ctx, &config, "shapley", payload);
  write_text_file(dir / "config.json", to_json(config).dump(2) + "\n");
  write_text_file(dir / "shapley.csv", csv);
  ctx.out << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

MisreportGrid parse_misreport_grid(std::string const &text)
{
  MisreportGrid g;
  char          tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &g.lo, &g.hi, &g.step, &tail) != 3)
  {
    throw ArgumentError("grid must look like lo:hi:step, got '" + text + "'");
  }
  if (!(g.lo > 0.0) || !(g.hi >= g.lo) || !(g.step > 0.0))
  {
    throw ArgumentError("grid needs 0 < lo <= hi and step > 0");
  }
  return g;
}

PricePair parse_price_pair(std::string const &text)
{
  PricePair p;
  char      tail = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf%c", &p.p_t, &p.p_m, &tail) != 2)
  {
    throw ArgumentError("prices must look like p_t,p_m, got '" + text + "'");
  }
  if (!(p.p_t > 0.0) || !(p.p_m > 0.0))
  {
    throw ArgumentError("prices must be positive");
  }
  return p;
}

int cmd_audit_ic(AuditArgs const &args, CommandContext &ctx)
{
  auto config = load_run_config(args.config);
  std::size_t index = config.clients.size();
  for (std::size_t i = 0; i < config.clients.size(); ++i)
  {
    if (config.clients[i].id == args.client)
    {
      index = i;
    }
  }
  if (index == config.clients.size())
  {
    throw ArgumentError("no client with id " + std::to_string(args.client));
  }
  auto const report = ic_audit(config.clients, config.system, index, args.grid, config.shapley);

  std::string csv = "reported_mu,truthful,feasible,train_bound,p_t,p_m,q_t,q_m,utility,reason\n";
  char        line[512];
  std::snprintf(line, sizeof line, "%12s %9s %9s %14s %14s %14s %20s  %s\n", "reported mu",
                "truthful", "feasible", "R_t bound", "p_t", "p_m", "utility", "reason");
  ctx.out << "client " << args.client << ", true mu " << format_number(report.true_mu) << '\n'
          << line;
  for (auto const &p : report.table)
  {
    std::snprintf(line, sizeof line, "%12.6g %9s %9s %14.8g %14.8g %14.8g %20s  %s\n",
                  p.reported_mu, yes_no(p.truthful).c_str(), yes_no(p.feasible).c_str(),
                  p.train_bound, p.prices.p_t, p.prices.p_m,
                  p.feasible ? fixed12(p.utility).c_str() : "-", p.reason.c_str());
    ctx.out << line;
    std::string reason = p.reason;
    std::replace(reason.begin(), reason.end(), '"', '\'');
    csv += format_number(p.reported_mu) + ',' + (p.truthful ? "1" : "0") + ',' +
           (p.feasible ? "1" : "0") + ',' + format_number(p.feasible ? p.train_bound : NAN) +
           ',' + format_number(p.feasible ? p.prices.p_t : NAN) + ',' +
           format_number(p.feasible ? p.prices.p_m : NAN) + ',' +
           format_number(p.feasible ? p.powers.q_t : NAN) + ',' +
           format_number(p.feasible ? p.powers.q_m : NAN) + ',' +
           format_number(p.feasible ? p.utility : NAN) + ",\"" + reason + "\"\n";
  }
  double const rel = report.gain / std::max(1.0, std::abs(report.truthful_utility));
  bool const   ok  = rel <= 1e-6;
  ctx.out << "truthful utility " << fixed12(report.truthful_utility) << ", best report "
          << format_number(report.best_reported_mu) << " with utility "
          << fixed12(report.best_utility) << ", gain " << format_number(report.gain) << " ("
          << report.infeasible_points << " infeasible reports)\n"
          << (ok ? "truthfulness: holds on this grid" : "truthfulness: VIOLATED on this grid")
          << '\n';

  json payload = {{"config", config_payload(config)},
                  {"client", args.client},
                  {"grid", {args.grid.lo, args.grid.hi, args.grid.step}}};
  auto const dir = make_run_dir(ctx, &config, "audit-ic", payload);
  write_text_file(dir / "config.json", to_json(config).dump(2) + "\n");
  write_text_file(dir / "audit.csv", csv);
  ctx.out << "run directory: " << dir.string() << '\n';
  return ok ? kExitOk : kExitCheckFail;
}

int cmd_reproduce(ReproduceArgs const &args, CommandContext &ctx)
{
  json payload = {{"seed", args.seed}, {"trials", args.trials}};
  auto const dir    = make_run_dir(ctx, nullptr, "reproduce", payload);
  auto const result = reproduce_all(dir, {args.seed, args.trials});
  for (auto const &f : result.csv_files)
  {
    ctx.out << "wrote " << f.string() << '\n';
  }
  for (auto const &c : result.checks)
  {
    ctx.out << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << format_number(c.value)
            << "  (" << c.detail << ")\n";
  }
  ctx.out << "summary: " << result.summary_file.string() << '\n';
  return result.all_pass() ? kExitOk : kExitCheckFail;
}

}  // namespace bcfl
