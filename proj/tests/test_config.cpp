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

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

using namespace bcfl;

namespace {

std::string const kBase = R"({
  "system": {"horizon": 15, "psi": 5, "budget_total": 1500,
             "mining_bound_per_client": 5, "xi": 0.1, "target_perf": 10},
  "clients": {"count": 3, "mu": 10, "rho": 0.01, "q_cap": 20}
})";

std::string error_of(std::string const &text)
{
  try
  {
    parse_run_config(text);
  }
  catch (ConfigError const &e)
  {
    return e.what();
  }
  return {};
}

std::filesystem::path temp_dir(std::string const &name)
{
  auto const d = std::filesystem::temp_directory_path() / ("bcfl-config-" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("minimal config")
{
  auto const c = parse_run_config(kBase);
  CHECK(c.clients.size() == 3);
  CHECK(c.clients[2].id == 2);
  CHECK(c.system.horizon == 15.0);
  CHECK(c.scenario == Scenario::kComplete);
  CHECK(c.seed == 1);
}

TEST_CASE("round trip keeps the configuration and the run id")
{
  auto const c    = parse_run_config(kBase);
  auto const json = to_json(c);
  auto const back = parse_run_config(json.dump());
  CHECK(back == c);
  CHECK(run_id("solve", to_json(back)) == run_id("solve", json));
  CHECK(run_id("solve", json).rfind("solve-", 0) == 0);
  CHECK(run_id("solve", json).size() == 6 + 16);
  CHECK(run_id("verify", json) != run_id("solve", json));
}

TEST_CASE("reference file matches the built-in defaults")
{
  auto const file = load_run_config(std::filesystem::path(BCFL_SOURCE_DIR) / "configs/reference.json");
  CHECK(file == default_run_config());
}

TEST_CASE("errors name the key")
{
  std::string text = kBase;
  text.replace(text.find("\"horizon\": 15, "), 15, "");
  CHECK(error_of(text).find("'system.horizon'") != std::string::npos);

  text = kBase;
  text.replace(text.find("\"xi\""), 4, "\"xj\": 1, \"xi\"");
  CHECK(error_of(text).find("unknown key 'system.xj'") != std::string::npos);

  text = kBase;
  text.replace(text.find("15"), 2, "\"15\"");
  CHECK(error_of(text).find("must be a number") != std::string::npos);

  CHECK(error_of(R"({"system": 1, "clients": []})").find("'system'") != std::string::npos);
}

TEST_CASE("syntax errors give the line")
{
  std::string const text = "{\n  \"system\": {\n    \"horizon\": 15,,\n  }\n}";
  auto const        msg  = error_of(text);
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("mining bound forms are exclusive")
{
  std::string text = kBase;
  text.replace(text.find("\"mining_bound_per_client\": 5"), 28,
               "\"mining_bound_per_client\": 5, \"mining_budget\": 10");
  CHECK_FALSE(error_of(text).empty());
}

TEST_CASE("client arrays")
{
  std::string const arr = R"({
    "system": {"horizon": 15, "psi": 5, "budget_total": 1500,
               "mining_bound_per_client": 5, "xi": 0.1, "target_perf": 10},
    "clients": [{"id": 4, "mu": 10, "rho": 0.01, "q_cap": 20},
                {"id": 9, "mu": 12, "rho": 0.01, "q_cap": 20}]
  })";
  auto const c = parse_run_config(arr);
  CHECK(c.clients[1].id == 9);
  CHECK(c.clients[1].mu == 12.0);

  std::string dup = arr;
  dup.replace(dup.find("\"id\": 9"), 7, "\"id\": 4");
  CHECK(error_of(dup).find("duplicate client id 4") != std::string::npos);
}

TEST_CASE("client file resolves next to the config")
{
  auto const dir = temp_dir("clients");
  std::ofstream(dir / "roster.json")
      << R"([{"mu": 8, "rho": 0.01, "q_cap": 20}, {"mu": 9, "rho": 0.01, "q_cap": 20}])";
  std::string text = kBase;
  auto const  from = text.find("{\"count\"");
  text.replace(from, text.find('}', from) - from + 1, "\"roster.json\"");
  std::ofstream(dir / "run.json") << text;
  auto const c = load_run_config(dir / "run.json");
  REQUIRE(c.clients.size() == 2);
  CHECK(c.clients[0].mu == 8.0);

  std::filesystem::remove(dir / "roster.json");
  try
  {
    load_run_config(dir / "run.json");
    FAIL("expected ConfigError");
  }
  catch (ConfigError const &e)
  {
    CHECK(std::string(e.what()).find("run.json") != std::string::npos);
  }
}

TEST_CASE("missing file")
{
  CHECK_THROWS_AS(load_run_config("/nonexistent/run.json"), ConfigError);
}

TEST_CASE("fnv1a64 reference values")
{
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}
