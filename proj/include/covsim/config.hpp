// Copyright 2026 The covsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "covsim/city.hpp"
#include "covsim/intervention.hpp"
#include "covsim/testing.hpp"
#include "covsim/types.hpp"

namespace covsim {

struct CitySource {
  std::optional<std::filesystem::path> file;
  GridSpec grid{11, 18, WeightFn::kRandom, 7, 20, 0.5};
};

struct ClusteredSeeding {
  std::int64_t locality = 120;  // file id of the seeded locality
  int count = 50;
};

struct UniformSeeding {
  int trials = 5;
  double prob = 0.1;
};

using Seeding = std::variant<ClusteredSeeding, UniformSeeding>;

struct UniformReporting {
  double rho = 1.0;
};

/// floor(fraction * #localities) localities, chosen with `seed`, report at
/// `low`; the rest at `high`.
struct NonuniformReporting {
  double fraction = 1.0 / 3.0;
  double low = 0.05;
  double high = 1.0;
  std::uint64_t seed = 1;
};

using Reporting = std::variant<UniformReporting, NonuniformReporting>;

struct RunConfig {
  CitySource city;
  std::size_t agents = 100000;
  SimParams params;
  Policy policy = Policy::kNone;
  LbtParams lbt;
  Intervention intervention = Intervention::kNone;
  TriggerParams trigger;
  Seeding seeding = ClusteredSeeding{};
  Reporting reporting = UniformReporting{};
  std::uint64_t master_seed = 1;
  int runs = 1;

  /// Range checks that do not need the city; throws InputError.
  void validate() const;
};

/// Strict reader: unknown keys and wrong types are errors, missing keys take
/// defaults. Relative city paths are resolved against `base_dir`.
RunConfig config_from_json(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir = {});
/// Reads a config file, applying `key.path=value` overrides before parsing.
RunConfig load_config(const std::filesystem::path& path,
                      std::span<const std::string> overrides = {});
/// Fully resolved form (every key present); config_from_json round-trips it.
nlohmann::json config_to_json(const RunConfig& config);

/// Applies a dotted-path override such as "params.p=0.05" or "budget=200" to
/// a config document. The value is parsed as JSON when possible, otherwise
/// taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// FNV-1a 64 of the canonical resolved config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace covsim
