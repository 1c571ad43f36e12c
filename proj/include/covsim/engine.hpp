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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "covsim/city.hpp"
#include "covsim/config.hpp"
#include "covsim/epidemic.hpp"
#include "covsim/rng.hpp"
#include "covsim/testing.hpp"

namespace covsim {

/// Daily series of one run (index d-1 holds day d) plus per-locality counts.
struct RunOutput {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t agents = 0;

  std::vector<double> ground_truth_active;   // COVID-I at end of day
  std::vector<double> new_infections;
  std::vector<double> cumulative_infected;   // seeds included
  std::vector<double> positives;
  std::vector<double> tests;
  std::vector<double> symptomatic_reported;  // pool size
  std::vector<double> lockdown;              // 1 if locked down that day
  std::vector<double> quarantined;
  // COVID-I members of the reported pool: the quantity the ground-truth
  // estimator targets. Not part of the CSV layout.
  std::vector<double> symptomatic_covid;

  std::vector<std::int64_t> locality_ids;
  // [day-1][locality]
  std::vector<std::vector<double>> active_by_locality;
  std::vector<std::vector<double>> positives_by_locality;

  std::size_t lockdown_episodes = 0;

  std::size_t days() const { return ground_truth_active.size(); }
};

using SeriesMember = std::vector<double> RunOutput::*;

/// Columns of the time-series CSV, in order.
inline constexpr std::array<std::pair<const char*, SeriesMember>, 8> kTimeseriesColumns{{
    {"ground_truth_active", &RunOutput::ground_truth_active},
    {"new_infections", &RunOutput::new_infections},
    {"cumulative", &RunOutput::cumulative_infected},
    {"positives", &RunOutput::positives},
    {"tests", &RunOutput::tests},
    {"symptomatic_reported", &RunOutput::symptomatic_reported},
    {"lockdown", &RunOutput::lockdown},
    {"quarantined", &RunOutput::quarantined},
}};

/// Per-day mean and (population) standard deviation of every series over
/// the runs of a batch.
struct BatchOutput {
  std::vector<RunOutput> runs;
  RunOutput mean;
  RunOutput stddev;
};

/// Infects `count` distinct residents of locality `l` (or all of them, with
/// a warning, if there are fewer). Returns the number infected.
enum class DayPhase { kTested, kEvolved };

// Read-only view of a run in progress, for audits.
struct DayContext {
  DayPhase phase;
  Day day;
  const AgentRoster& roster;
  const RestrictionView& restrictions;
  const SymptomaticPool& pool;
  std::span<const TestOutcome> outcomes;
  const TestingHistory& history;
  const SimParams& params;
  const RandomStreams& streams;
};

using DayObserver = std::function<void(const DayContext&)>;

std::size_t seed_clustered(AgentRoster& roster, LocalityId l, int count,
                           const RandomStreams& streams);

/// Each locality gets Binomial(trials, prob) infected residents, capped at
/// its population. Returns the total.
std::size_t seed_uniform(AgentRoster& roster, int trials, double prob,
                         const RandomStreams& streams);

/// Per-locality reporting probabilities for `config.reporting`.
std::vector<double> reporting_probabilities(const Reporting& reporting,
                                            std::size_t localities);

/// The city a config describes (loaded or generated).
CityModel resolve_city(const RunConfig& config);

/// Fully validates `config` against `city`; throws InputError.
void validate_run(const RunConfig& config, const CityModel& city);

/// One run. Each day: build the pool and test, update interventions from the
/// testing history, evolve the epidemic under the restrictions in force,
/// record. Deterministic in (config, run_index).
RunOutput run_simulation(const RunConfig& config, const CityModel& city,
                         std::size_t run_index = 0, const DayObserver& observer = {});
RunOutput run_simulation(const RunConfig& config);

/// Mean / std of each series over runs (any number >= 1).
BatchOutput aggregate(std::vector<RunOutput> runs);

/// `config.runs` runs with child seeds derive_seed(master_seed, index),
/// spread over `threads` workers. Output does not depend on `threads`.
BatchOutput run_batch(const RunConfig& config, const CityModel& city, int threads = 1);
BatchOutput run_batch(const RunConfig& config, int threads = 1);

}  // namespace covsim
