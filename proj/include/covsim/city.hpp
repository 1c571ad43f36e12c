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
#include <vector>

#include <nlohmann/json.hpp>

#include "covsim/types.hpp"

namespace covsim {

struct Locality {
  std::int64_t id = 0;  // identifier used in city files and outputs
  double population = 0.0;
};

/// Row-stochastic origin-destination matrix. Column `cols() - 1` is the
/// no-visit pseudo-destination.
class ODMatrix {
 public:
  ODMatrix() = default;
  ODMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), p_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& at(std::size_t r, std::size_t c) { return p_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return p_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return {p_.data() + r * cols_, cols_};
  }

  bool operator==(const ODMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> p_;
};

struct CityModel {
  std::vector<Locality> localities;
  // Sorted, contains the locality itself, symmetric.
  std::vector<std::vector<LocalityId>> adjacency;
  // Visited slots, as locality indices. OD column d maps to destinations[d].
  std::vector<LocalityId> destinations;
  ODMatrix od;

  std::size_t size() const { return localities.size(); }
  std::size_t no_visit_column() const { return destinations.size(); }

  /// Dense index of the locality with file id `id`; throws InputError.
  LocalityId index_of(std::int64_t id) const;

  bool operator==(const CityModel&) const = default;
};

/// Checks every CityModel invariant; throws InputError naming the first
/// violation.
void validate_city(const CityModel& city);

/// Parses the city JSON format. Adjacency is closed under self-loops and
/// symmetry (asymmetry is repaired with a warning); OD rows within 1e-6 of
/// summing to one are renormalized, others are rejected.
CityModel parse_city(const nlohmann::json& doc);
CityModel load_city(const std::filesystem::path& path);

nlohmann::json city_to_json(const CityModel& city);
void save_city(const CityModel& city, const std::filesystem::path& path);

enum class WeightFn { kUniform, kRandom };

struct GridSpec {
  int rows = 1;
  int cols = 1;
  WeightFn weights = WeightFn::kUniform;
  std::uint64_t seed = 0;
  // The `destinations` heaviest localities become visit slots.
  int destinations = 20;
  double no_visit = 0.5;
};

/// Rectangular test city: 4-neighborhood adjacency, gravity-style OD rows
/// (destination weight over 1 + Manhattan distance) scaled to
/// 1 - no_visit.
CityModel generate_grid_city(const GridSpec& spec);

/// One simulated person. Contact lists live in AgentRoster.
struct Agent {
  AgentId id = 0;
  LocalityId home = 0;
  std::optional<DestinationId> visit_place;
  CovidState covid = CovidState::kS;
  FluState flu = FluState::kS;
  // Quarantined on days [quarantined_from, quarantined_until).
  Day quarantined_from = 0;
  Day quarantined_until = 0;
  double reporting_prob = 1.0;

  bool quarantined_on(Day d) const {
    return d >= quarantined_from && d < quarantined_until;
  }
  bool operator==(const Agent&) const = default;
};

/// Compressed adjacency lists (one per agent).
struct ContactLists {
  std::vector<std::size_t> offsets{0};
  std::vector<AgentId> targets;

  std::span<const AgentId> of(AgentId i) const {
    return {targets.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  bool operator==(const ContactLists&) const = default;
};

class AgentRoster {
 public:
  std::size_t size() const { return agents_.size(); }

  Agent& operator[](AgentId i) { return agents_[i]; }
  const Agent& operator[](AgentId i) const { return agents_[i]; }
  std::span<Agent> agents() { return agents_; }
  std::span<const Agent> agents() const { return agents_; }

  std::size_t locality_count() const { return locality_offsets_.size() - 1; }
  std::size_t destination_count() const { return visit_offsets_.size() - 1; }

  /// Agents whose home is `l`; ids are contiguous and ascending.
  std::span<const AgentId> residents(LocalityId l) const;
  /// Agents whose visit place is `d`, ascending.
  std::span<const AgentId> visitors(DestinationId d) const;
  /// Residents of every locality adjacent to `l` (itself included), ascending.
  std::span<const AgentId> neighborhood_pool(LocalityId l) const;

  std::span<const AgentId> neighborhood_contacts(AgentId i) const {
    return neighborhood_contacts_.of(i);
  }
  std::span<const AgentId> workplace_contacts(AgentId i) const {
    return workplace_contacts_.of(i);
  }

  bool operator==(const AgentRoster&) const = default;

 private:
  friend AgentRoster build_roster(const CityModel&, std::size_t,
                                  const SimParams&, std::uint64_t);

  std::vector<Agent> agents_;
  std::vector<AgentId> resident_ids_;
  std::vector<std::size_t> locality_offsets_{0};
  std::vector<std::size_t> visit_offsets_{0};
  std::vector<AgentId> by_visit_;
  std::vector<std::size_t> pool_offsets_{0};
  std::vector<AgentId> pools_;
  ContactLists neighborhood_contacts_;
  ContactLists workplace_contacts_;
};

/// Largest-remainder apportionment of `n` units to `weights`. Ties in the
/// fractional part go to the lower index.
std::vector<std::size_t> apportion(std::span<const double> weights,
                                   std::size_t n);

/// Places n agents in proportion to locality populations, samples each
/// agent's visit place from its home OD row, then samples fixed contacts.
/// Fixed contact relations are closed under symmetry, so lists may be longer
/// than k_nf / k_wf.
AgentRoster build_roster(const CityModel& city, std::size_t n,
                         const SimParams& params, std::uint64_t seed);

/// Sorted residents of the neighborhood of `l`; throws std::out_of_range for
/// an unknown locality.
std::vector<AgentId> neighborhood_residents(const AgentRoster& roster,
                                            const CityModel& city,
                                            LocalityId l);

}  // namespace covsim
