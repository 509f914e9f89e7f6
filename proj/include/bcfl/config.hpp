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

// JSON run configuration. The schema is described in docs/config.md.

#include "bcfl/model.hpp"
#include "bcfl/shapley.hpp"
#include "bcfl/stackelberg.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcfl {

struct OracleSettings
{
  std::size_t stage2_points = 500;
  std::size_t stage1_points = 500;
  std::size_t inner_points  = 50;

  bool operator==(OracleSettings const &) const = default;
};

struct RunConfig
{
  SystemConfig               system;
  std::vector<ClientProfile> clients;
  Scenario                   scenario = Scenario::kComplete;
  std::uint64_t              seed     = 1;
  std::optional<std::string> output_root;
  OracleSettings             oracle;
  ShapleyOptions             shapley;

  bool operator==(RunConfig const &) const = default;
};

/// Reference settings with 50 identical clients.
RunConfig default_run_config();

/// Parses and validates. Syntax errors name the line; missing, unknown or
/// mistyped keys name the key path. `base_dir` resolves a client-file path.
/// Throws ConfigError.
RunConfig parse_run_config(std::string_view text, std::filesystem::path const &base_dir = {});

/// Reads `path` and parses it; client files resolve relative to its directory.
RunConfig load_run_config(std::filesystem::path const &path);

/// Effective configuration, clients written inline.
nlohmann::json to_json(RunConfig const &config);

std::uint64_t fnv1a64(std::string_view bytes);

/// "<command>-<16 hex digits>" from the canonical serialisation of `payload`.
std::string run_id(std::string_view command, nlohmann::json const &payload);

}  // namespace bcfl
