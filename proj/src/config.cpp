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

#include "bcfl/config.hpp"

#include "bcfl/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace bcfl {
namespace {

using nlohmann::json;

// Walks one JSON object, remembering its key path for error messages and
// which keys were consumed.
class ObjectReader
{
public:
  ObjectReader(json const &j, std::string path)
    : j_(j)
    , path_(std::move(path))
  {
    if (!j_.is_object())
    {
      throw ConfigError("config: '" + label() + "' must be an object");
    }
  }

  bool has(std::string const &key) const
  {
    return j_.contains(key);
  }

  std::string key_path(std::string const &key) const
  {
    return path_.empty() ? key : path_ + "." + key;
  }

  json const &get(std::string const &key)
  {
    if (!j_.contains(key))
    {
      throw ConfigError("config: missing required key '" + key_path(key) + "'");
    }
    seen_.push_back(key);
    return j_.at(key);
  }

  double number(std::string const &key)
  {
    auto const &v = get(key);
    if (!v.is_number())
    {
      throw ConfigError("config: key '" + key_path(key) + "' must be a number");
    }
    return v.get<double>();
  }

  std::optional<double> optional_number(std::string const &key)
  {
    if (!has(key))
    {
      return std::nullopt;
    }
    return number(key);
  }

  std::uint64_t unsigned_integer(std::string const &key)
  {
    auto const &v = get(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    {
      throw ConfigError("config: key '" + key_path(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(std::string const &key)
  {
    auto const &v = get(key);
    if (!v.is_string())
    {
      throw ConfigError("config: key '" + key_path(key) + "' must be a string");
    }
    return v.get<std::string>();
  }

  void finish() const
  {
    for (auto const &[key, value] : j_.items())
    {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
      {
        throw ConfigError("config: unknown key '" + key_path(key) + "'");
      }
    }
  }

private:
  std::string label() const
  {
    return path_.empty() ? "<root>" : path_;
  }

  json const              &j_;
  std::string              path_;
  std::vector<std::string> seen_;
};

// ConfigError messages from model validation get the key path prefixed.
template <typename F>
void validated(std::string const &where, F &&check)
{
  try
  {
    check();
  }
  catch (ConfigError const &e)
  {
    throw ConfigError("config: " + where + ": " + e.what());
  }
}

json parse_text(std::string_view text, std::string const &source)
{
  try
  {
    return json::parse(text.begin(), text.end());
  }
  catch (json::parse_error const &e)
  {
    std::size_t line   = 1;
    std::size_t column = 1;
    std::size_t const end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < end; ++k)
    {
      if (text[k] == '\n')
      {
        ++line;
        column = 1;
      }
      else
      {
        ++column;
      }
    }
    throw ConfigError(source + ": line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": malformed JSON");
  }
}

std::string read_file(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw ConfigError("config: cannot read " + path.string());
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SystemConfig read_system(json const &j)
{
  ObjectReader r(j, "system");
  SystemConfig s;
  s.horizon                 = r.number("horizon");
  s.psi                     = r.number("psi");
  s.budget_total            = r.number("budget_total");
  s.mining_budget           = r.optional_number("mining_budget");
  s.mining_bound_per_client = r.optional_number("mining_bound_per_client");
  s.xi                      = r.number("xi");
  s.target_perf             = r.number("target_perf");
  if (r.has("perf_fn"))
  {
    ObjectReader f(r.get("perf_fn"), "system.perf_fn");
    auto const   kind = f.string("kind");
    if (kind == "identity")
    {
      s.perf_fn = PerformanceFn::identity();
    }
    else if (kind == "scaled")
    {
      s.perf_fn = PerformanceFn::scaled(f.number("kappa"));
    }
    else
    {
      double const a = f.has("a") ? f.number("a") : 1.0;
      double const b = f.has("b") ? f.number("b") : 1.0;
      validated("system.perf_fn", [&] { s.perf_fn = PerformanceFn::from_name(kind, a, b); });
    }
    f.finish();
  }
  r.finish();
  validated("system", [&] { s.validate(); });
  return s;
}

ClientProfile read_client(json const &j, std::string const &path, std::size_t index)
{
  ObjectReader  r(j, path);
  ClientProfile c;
  c.id    = r.has("id") ? static_cast<std::size_t>(r.unsigned_integer("id")) : index;
  c.rho   = r.number("rho");
  c.q_cap = r.number("q_cap");
  if (r.has("mu"))
  {
    c.mu = r.number("mu");
  }
  if (r.has("data_size") || r.has("cycles_per_sample") || r.has("iterations"))
  {
    c.data_size         = r.number("data_size");
    c.cycles_per_sample = r.number("cycles_per_sample");
    c.iterations        = r.number("iterations");
    double const mu     = *c.iterations * *c.cycles_per_sample * *c.data_size;
    if (!r.has("mu"))
    {
      c.mu = mu;
    }
  }
  else if (!r.has("mu"))
  {
    throw ConfigError("config: missing required key '" + r.key_path("mu") + "'");
  }
  r.finish();
  validated(path, [&] { c.validate(); });
  return c;
}

std::vector<ClientProfile> read_clients(json const &j, std::filesystem::path const &base_dir,
                                        int depth = 0)
{
  std::vector<ClientProfile> out;
  if (j.is_string())
  {
    if (depth > 0)
    {
      throw ConfigError("config: a client file cannot refer to another client file");
    }
    auto path = std::filesystem::path(j.get<std::string>());
    if (path.is_relative())
    {
      path = base_dir / path;
    }
    auto const doc = parse_text(read_file(path), path.string());
    return read_clients(doc, path.parent_path(), depth + 1);
  }
  if (j.is_array())
  {
    for (std::size_t i = 0; i < j.size(); ++i)
    {
      out.push_back(read_client(j[i], "clients[" + std::to_string(i) + "]", i));
    }
  }
  else if (j.is_object())
  {
    ObjectReader r(j, "clients");
    auto const   count = r.unsigned_integer("count");
    ClientProfile proto;
    proto.mu    = r.number("mu");
    proto.rho   = r.number("rho");
    proto.q_cap = r.number("q_cap");
    r.finish();
    for (std::uint64_t i = 0; i < count; ++i)
    {
      ClientProfile c = proto;
      c.id            = static_cast<std::size_t>(i);
      validated("clients", [&] { c.validate(); });
      out.push_back(c);
    }
  }
  else
  {
    throw ConfigError("config: 'clients' must be an array, an object or a file path");
  }
  if (out.empty())
  {
    throw ConfigError("config: 'clients' must list at least one client");
  }
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    for (std::size_t k = i + 1; k < out.size(); ++k)
    {
      if (out[i].id == out[k].id)
      {
        throw ConfigError("config: duplicate client id " + std::to_string(out[i].id));
      }
    }
  }
  return out;
}

ShapleyMethod method_from(std::string const &s)
{
  if (s == "auto")
  {
    return ShapleyMethod::kAuto;
  }
  if (s == "exact")
  {
    return ShapleyMethod::kExact;
  }
  if (s == "by_type")
  {
    return ShapleyMethod::kByType;
  }
  if (s == "sampled")
  {
    return ShapleyMethod::kSampled;
  }
  throw ConfigError("config: 'shapley.method' must be auto, exact, by_type or sampled");
}

std::string method_name(ShapleyMethod m)
{
  switch (m)
  {
  case ShapleyMethod::kExact:
    return "exact";
  case ShapleyMethod::kByType:
    return "by_type";
  case ShapleyMethod::kSampled:
    return "sampled";
  case ShapleyMethod::kAuto:
    break;
  }
  return "auto";
}

}  // namespace

RunConfig default_run_config()
{
  RunConfig c;
  c.system  = reference_config();
  c.clients = reference_roster();
  return c;
}

RunConfig parse_run_config(std::string_view text, std::filesystem::path const &base_dir)
{
  auto const   doc = parse_text(text, "config");
  ObjectReader r(doc, "");
  RunConfig    c;
  c.system  = read_system(r.get("system"));
  c.clients = read_clients(r.get("clients"), base_dir);
  if (r.has("scenario"))
  {
    c.scenario = scenario_from_string(r.string("scenario"));
  }
  if (r.has("seed"))
  {
    c.seed = r.unsigned_integer("seed");
  }
  if (r.has("output_root"))
  {
    c.output_root = r.string("output_root");
  }
  if (r.has("oracle"))
  {
    ObjectReader o(r.get("oracle"), "oracle");
    if (o.has("stage2_points"))
    {
      c.oracle.stage2_points = o.unsigned_integer("stage2_points");
    }
    if (o.has("stage1_points"))
    {
      c.oracle.stage1_points = o.unsigned_integer("stage1_points");
    }
    if (o.has("inner_points"))
    {
      c.oracle.inner_points = o.unsigned_integer("inner_points");
    }
    o.finish();
    if (c.oracle.stage2_points < 2 || c.oracle.stage1_points < 2 || c.oracle.inner_points < 2)
    {
      throw ConfigError("config: oracle grids need at least 2 points per axis");
    }
  }
  if (r.has("shapley"))
  {
    ObjectReader s(r.get("shapley"), "shapley");
    if (s.has("method"))
    {
      c.shapley.method = method_from(s.string("method"));
    }
    if (s.has("samples"))
    {
      c.shapley.samples = s.unsigned_integer("samples");
    }
    if (s.has("seed"))
    {
      c.shapley.seed = s.unsigned_integer("seed");
    }
    if (s.has("exact_limit"))
    {
      c.shapley.exact_limit = s.unsigned_integer("exact_limit");
    }
    if (s.has("degenerate"))
    {
      auto const d = s.string("degenerate");
      if (d == "symmetric_split")
      {
        c.shapley.degenerate = DegeneratePolicy::kSymmetricSplit;
      }
      else if (d == "error")
      {
        c.shapley.degenerate = DegeneratePolicy::kError;
      }
      else
      {
        throw ConfigError("config: 'shapley.degenerate' must be symmetric_split or error");
      }
    }
    s.finish();
  }
  r.finish();
  return c;
}

RunConfig load_run_config(std::filesystem::path const &path)
{
  auto const text = read_file(path);
  try
  {
    return parse_run_config(text, path.parent_path());
  }
  catch (ConfigError const &e)
  {
    std::string msg = e.what();
    if (msg.rfind("config", 0) == 0)
    {
      msg = path.string() + msg.substr(6);
    }
    throw ConfigError(msg);
  }
}

nlohmann::json to_json(RunConfig const &c)
{
  json system = {{"horizon", c.system.horizon},
                 {"psi", c.system.psi},
                 {"budget_total", c.system.budget_total},
                 {"xi", c.system.xi},
                 {"target_perf", c.system.target_perf}};
  if (c.system.mining_budget)
  {
    system["mining_budget"] = *c.system.mining_budget;
  }
  if (c.system.mining_bound_per_client)
  {
    system["mining_bound_per_client"] = *c.system.mining_bound_per_client;
  }
  auto const &f = c.system.perf_fn;
  json        perf{{"kind", std::string(f.name())}};
  if (f.kind == PerformanceFn::Kind::kScaled)
  {
    perf["kappa"] = f.kappa;
  }
  if (f.kind == PerformanceFn::Kind::kSaturating)
  {
    perf["a"] = f.a;
    perf["b"] = f.b;
  }
  system["perf_fn"] = perf;

  json clients = json::array();
  for (auto const &p : c.clients)
  {
    json e = {{"id", p.id}, {"mu", p.mu}, {"rho", p.rho}, {"q_cap", p.q_cap}};
    if (p.data_size)
    {
      e["data_size"]         = *p.data_size;
      e["cycles_per_sample"] = *p.cycles_per_sample;
      e["iterations"]        = *p.iterations;
    }
    clients.push_back(e);
  }

  json out = {{"system", system},
              {"clients", clients},
              {"scenario", std::string(to_string(c.scenario))},
              {"seed", c.seed},
              {"oracle",
               {{"stage2_points", c.oracle.stage2_points},
                {"stage1_points", c.oracle.stage1_points},
                {"inner_points", c.oracle.inner_points}}},
              {"shapley",
               {{"method", method_name(c.shapley.method)},
                {"samples", c.shapley.samples},
                {"seed", c.shapley.seed},
                {"exact_limit", c.shapley.exact_limit},
                {"degenerate", c.shapley.degenerate == DegeneratePolicy::kError
                                   ? "error"
                                   : "symmetric_split"}}}};
  if (c.output_root)
  {
    out["output_root"] = *c.output_root;
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes)
  {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string run_id(std::string_view command, nlohmann::json const &payload)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(payload.dump())));
  return std::string(command) + "-" + buf;
}

}  // namespace bcfl
