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
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "covsim/city.hpp"
#include "covsim/rng.hpp"
#include "covsim/types.hpp"

namespace covsim {

enum class TestResult : std::int8_t { kNone = 0, kPositive = 1, kNegative = -1 };

/// Agents x days matrix of test outcomes (days 1..horizon), plus per-day
/// positive lists.
class TestingHistory {
 public:
  TestingHistory(std::size_t agents, Day horizon);

  std::size_t agents() const { return agents_; }
  Day horizon() const { return horizon_; }

  /// Throws std::logic_error if (agent, day) is already set or out of range,
  /// or if `result` is kNone.
  void record(AgentId agent, Day day, TestResult result);

  TestResult at(AgentId agent, Day day) const;
  /// Positives of `day`, ascending. Empty for days outside 1..horizon.
  std::span<const AgentId> positives_on(Day day) const;
  std::size_t tests_on(Day day) const;
  bool ever_positive(AgentId agent) const { return ever_positive_[agent] != 0; }

 private:
  std::size_t index(AgentId agent, Day day) const;

  std::size_t agents_;
  Day horizon_;
  std::vector<std::int8_t> matrix_;  // day-major
  std::vector<std::vector<AgentId>> positives_;
  std::vector<std::size_t> tests_;
  std::vector<std::uint8_t> ever_positive_;
};

/// Algorithm-2 individual test: never positive unless COVID-I; a COVID-I
/// agent tests positive with probability 1 - r.
template <class Rng>
TestResult test_individual(const Agent& agent, double r, Rng& rng) {
  if (agent.covid != CovidState::kI) return TestResult::kNegative;
  return bernoulli(rng, 1.0 - r) ? TestResult::kPositive : TestResult::kNegative;
}

struct SymptomaticPool {
  Day day = 0;
  std::vector<AgentId> members;  // ascending

  std::size_t size() const { return members.size(); }
  bool contains(AgentId i) const;
};

/// Agents showing symptoms (COVID-I or flu-I) who report on `day`
/// (Bernoulli with their home locality's probability) and have never tested
/// positive before.
SymptomaticPool build_pool(const AgentRoster& roster, Day day,
                           std::span<const double> reporting_by_locality,
                           const TestingHistory& history,
                           const RandomStreams& streams);

/// The attributes a selection rule may look at. Deliberately has no access
/// to disease states.
class ObservableView {
 public:
  explicit ObservableView(const AgentRoster& roster) : roster_(&roster) {}

  std::size_t size() const { return roster_->size(); }
  std::size_t locality_count() const { return roster_->locality_count(); }
  std::size_t destination_count() const { return roster_->destination_count(); }
  LocalityId home(AgentId i) const { return (*roster_)[i].home; }
  std::optional<DestinationId> visit_place(AgentId i) const {
    return (*roster_)[i].visit_place;
  }
  std::span<const AgentId> neighborhood_contacts(AgentId i) const {
    return roster_->neighborhood_contacts(i);
  }
  std::span<const AgentId> workplace_contacts(AgentId i) const {
    return roster_->workplace_contacts(i);
  }

 private:
  const AgentRoster* roster_;
};

/// Uniform subset of min(b, |pool|) members, ascending.
std::vector<AgentId> select_rst(const SymptomaticPool& pool, int budget,
                                CounterRng& rng);

/// Pool members that are fixed contacts of agents who tested positive on
/// day-1 or day-2, ascending.
std::vector<AgentId> traced_contacts(const SymptomaticPool& pool,
                                     const TestingHistory& history,
                                     const ObservableView& view, Day day);

/// Contact tracing: traced contacts first; any remaining budget is filled
/// uniformly from the rest of the pool. If tracing alone exceeds the budget,
/// a uniform subset of the traced contacts is taken.
std::vector<AgentId> select_ct(const SymptomaticPool& pool,
                               const TestingHistory& history,
                               const ObservableView& view, int budget, Day day,
                               CounterRng& rng);

struct LbtParams {
  double alpha_loc = 1.0;  // weight per positive case for a home locality
  double alpha_vis = 1.0;  // weight per positive case for a visit place
  double beta = 1.0;       // locality weight relative to visit place
  double epsilon = 0.1;    // amplification factor
  double floor = 1e-6;     // baseline sampling weight

  void validate() const;
};

/// Running location scores. After update_scores(..., day), each entry equals
/// sum over tau < day of alpha * positives(tau) * (1 + epsilon)^(day-1-tau).
struct ScoreTables {
  std::vector<double> locality;
  std::vector<double> visit;
  Day day = 1;

  ScoreTables() = default;
  ScoreTables(std::size_t localities, std::size_t destinations)
      : locality(localities, 0.0), visit(destinations, 0.0) {}
};

/// Advances `tables` to `day`, one recurrence step per elapsed day.
void update_scores(ScoreTables& tables, const TestingHistory& history,
                   const ObservableView& view, Day day, const LbtParams& params);

double get_score(AgentId agent, const ScoreTables& tables,
                 const ObservableView& view, const LbtParams& params);

/// Successive weighted sampling without replacement of min(b, |pool|)
/// members, weight = score + floor. Ascending.
std::vector<AgentId> select_lbt(const SymptomaticPool& pool,
                                const ScoreTables& tables,
                                const ObservableView& view, int budget,
                                const LbtParams& params, CounterRng& rng);

enum class Policy { kNone, kRst, kCt, kLbt };

std::string_view to_string(Policy p);
/// Accepts "none", "RST", "CT", "LBT" (case-insensitive).
Policy parse_policy(std::string_view text);

using TestOutcome = std::pair<AgentId, TestResult>;

/// Selects agents with `policy`, tests them and records the results in
/// `history`. LBT tables are brought up to `day` first. Never tests more
/// than params.budget agents.
std::vector<TestOutcome> run_policy(Policy policy, const SymptomaticPool& pool,
                                    const AgentRoster& roster,
                                    TestingHistory& history,
                                    ScoreTables& tables, Day day,
                                    const SimParams& params,
                                    const LbtParams& lbt,
                                    const RandomStreams& streams);

}  // namespace covsim
