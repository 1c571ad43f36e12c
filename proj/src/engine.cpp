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

#include "covsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include <spdlog/spdlog.h>

#include "covsim/epidemic.hpp"
#include "covsim/intervention.hpp"
#include "covsim/testing.hpp"

namespace covsim {

namespace {

// Partial Fisher-Yates over `items`; returns the first k after shuffling.
std::vector<AgentId> choose(std::span<const AgentId> items, std::size_t k, CounterRng& rng) {
  std::vector<AgentId> v(items.begin(), items.end());
  k = std::min(k, v.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(v[i], v[i + uniform_below(rng, v.size() - i)]);
  }
  v.resize(k);
  return v;
}

}  // namespace

std::size_t seed_clustered(AgentRoster& roster, LocalityId l, int count,
                           const RandomStreams& streams) {
  if (count <= 0) return 0;
  const auto residents = roster.residents(l);
  if (residents.size() < std::size_t(count)) {
    spdlog::warn("locality {} has {} residents, fewer than the {} requested seeds",
                 l, residents.size(), count);
  }
  auto rng = streams.stream(Stream::kSeeding, 0, l);
  const auto chosen = choose(residents, std::size_t(count), rng);
  for (AgentId i : chosen) roster[i].covid = CovidState::kI;
  return chosen.size();
}

std::size_t seed_uniform(AgentRoster& roster, int trials, double prob,
                         const RandomStreams& streams) {
  std::size_t total = 0;
  for (LocalityId l = 0; l < roster.locality_count(); ++l) {
    auto rng = streams.stream(Stream::kSeeding, 0, l);
    std::size_t k = 0;
    for (int t = 0; t < trials; ++t) k += bernoulli(rng, prob) ? 1 : 0;
    for (AgentId i : choose(roster.residents(l), k, rng)) {
      roster[i].covid = CovidState::kI;
      ++total;
    }
  }
  return total;
}

std::vector<double> reporting_probabilities(const Reporting& reporting,
                                            std::size_t localities) {
  if (const auto* u = std::get_if<UniformReporting>(&reporting)) {
    return std::vector<double>(localities, u->rho);
  }
  const auto& n = std::get<NonuniformReporting>(reporting);
  std::vector<double> rho(localities, n.high);
  std::vector<AgentId> ids(localities);
  std::iota(ids.begin(), ids.end(), AgentId(0));
  auto rng = RandomStreams(n.seed).stream(Stream::kReportingPartition, 0, 0);
  const auto low_count = static_cast<std::size_t>(std::floor(n.fraction * double(localities)));
  for (AgentId l : choose(ids, low_count, rng)) rho[l] = n.low;
  return rho;
}

CityModel resolve_city(const RunConfig& config) {
  if (config.city.file) return load_city(*config.city.file);
  return generate_grid_city(config.city.grid);
}

void validate_run(const RunConfig& config, const CityModel& city) {
  config.validate();
  validate_city(city);
  if (const auto* c = std::get_if<ClusteredSeeding>(&config.seeding)) {
    city.index_of(c->locality);
  }
}

RunOutput run_simulation(const RunConfig& config, const CityModel& city,
                         std::size_t run_index, const DayObserver& observer) {
  validate_run(config, city);
  const SimParams& params = config.params;
  const Day horizon = params.horizon;
  const std::uint64_t seed = derive_seed(config.master_seed, run_index);
  const RandomStreams streams(seed);

  AgentRoster roster = build_roster(city, config.agents, params, seed);
  const auto rho = reporting_probabilities(config.reporting, city.size());
  const double flu_prevalence = params.t_is / (params.t_si + params.t_is);
  for (Agent& a : roster.agents()) {
    a.reporting_prob = rho[a.home];
    auto rng = streams.stream(Stream::kFluInit, 0, a.id);
    a.flu = bernoulli(rng, flu_prevalence) ? FluState::kI : FluState::kS;
  }
  std::size_t seeds = 0;
  if (const auto* c = std::get_if<ClusteredSeeding>(&config.seeding)) {
    seeds = seed_clustered(roster, city.index_of(c->locality), c->count, streams);
  } else {
    const auto& u = std::get<UniformSeeding>(config.seeding);
    seeds = seed_uniform(roster, u.trials, u.prob, streams);
  }

  RunOutput out;
  out.seed = seed;
  out.config_hash = config_hash(config);
  out.agents = roster.size();
  for (const auto& loc : city.localities) out.locality_ids.push_back(loc.id);

  TestingHistory history(roster.size(), horizon);
  ScoreTables tables(city.size(), city.destinations.size());
  std::optional<LockdownController> lockdown;
  if (config.intervention == Intervention::kLockdownIndefinite) {
    lockdown.emplace(LockdownMode::kIndefinite, config.trigger);
  } else if (config.intervention == Intervention::kLockdownFixed) {
    lockdown.emplace(LockdownMode::kFixed, config.trigger);
  }

  std::vector<double> daily_positives;
  double cumulative = double(seeds);
  for (Day t = 1; t <= horizon; ++t) {
    const RestrictionView restrictions(roster, t, lockdown && lockdown->active_on(t));

    const SymptomaticPool pool = build_pool(roster, t, rho, history, streams);
    std::size_t pool_covid = 0;
    for (AgentId i : pool.members) pool_covid += roster[i].covid == CovidState::kI ? 1 : 0;
    const auto outcomes = run_policy(config.policy, pool, roster, history, tables, t,
                                     params, config.lbt, streams);
    const auto positives = history.positives_on(t);
    std::vector<double> positives_here(city.size(), 0.0);
    for (AgentId i : positives) positives_here[roster[i].home] += 1.0;

    if (config.intervention == Intervention::kQuarantine) {
      quarantine_update(roster, positives, t, config.trigger);
    }
    daily_positives.push_back(double(positives.size()));
    if (lockdown) lockdown->update(chord_slope(daily_positives, t, config.trigger), t);

    if (observer) {
      observer({DayPhase::kTested, t, roster, restrictions, pool, outcomes, history, params,
                streams});
    }
    const double quarantined = double(restrictions.quarantined_count());
    const DayDelta delta = advance_epidemic_day(roster, params, restrictions, streams);
    if (observer) {
      observer({DayPhase::kEvolved, t, roster, restrictions, pool, outcomes, history, params,
                streams});
    }
    cumulative += double(delta.new_infections);

    out.ground_truth_active.push_back(double(delta.count(CovidState::kI)));
    out.new_infections.push_back(double(delta.new_infections));
    out.cumulative_infected.push_back(cumulative);
    out.positives.push_back(double(positives.size()));
    out.tests.push_back(double(outcomes.size()));
    out.symptomatic_reported.push_back(double(pool.size()));
    out.lockdown.push_back(restrictions.lockdown_active() ? 1.0 : 0.0);
    out.quarantined.push_back(quarantined);
    out.symptomatic_covid.push_back(double(pool_covid));
    out.active_by_locality.emplace_back(delta.active_by_locality.begin(),
                                        delta.active_by_locality.end());
    out.positives_by_locality.push_back(std::move(positives_here));
  }
  out.lockdown_episodes = lockdown ? lockdown->episodes().size() : 0;
  return out;
}

RunOutput run_simulation(const RunConfig& config) {
  return run_simulation(config, resolve_city(config), 0);
}

BatchOutput aggregate(std::vector<RunOutput> runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  BatchOutput batch;
  const double k = double(runs.size());
  const RunOutput& first = runs.front();
  batch.mean = first;
  batch.stddev = first;
  batch.mean.lockdown_episodes = 0;
  batch.stddev.lockdown_episodes = 0;

  auto reduce = [&](auto&& get) {
    auto& mean = get(batch.mean);
    auto& sd = get(batch.stddev);
    for (std::size_t d = 0; d < mean.size(); ++d) {
      double sum = 0.0;
      for (auto& r : runs) sum += get(r)[d];
      const double m = sum / k;
      double sq = 0.0;
      for (auto& r : runs) sq += (get(r)[d] - m) * (get(r)[d] - m);
      mean[d] = m;
      sd[d] = std::sqrt(sq / k);
    }
  };
  for (const auto& [name, member] : kTimeseriesColumns) {
    reduce([member = member](RunOutput& r) -> std::vector<double>& { return r.*member; });
  }
  reduce([](RunOutput& r) -> std::vector<double>& { return r.symptomatic_covid; });
  for (std::size_t d = 0; d < first.days(); ++d) {
    reduce([d](RunOutput& r) -> std::vector<double>& { return r.active_by_locality[d]; });
    reduce([d](RunOutput& r) -> std::vector<double>& { return r.positives_by_locality[d]; });
  }
  batch.runs = std::move(runs);
  return batch;
}

BatchOutput run_batch(const RunConfig& config, const CityModel& city, int threads) {
  validate_run(config, city);
  const std::size_t runs = std::size_t(config.runs);
  std::vector<RunOutput> outputs(runs);
  const std::size_t workers = std::clamp<std::size_t>(std::size_t(std::max(threads, 1)), 1, runs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      try {
        outputs[i] = run_simulation(config, city, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(std::move(outputs));
}

BatchOutput run_batch(const RunConfig& config, int threads) {
  return run_batch(config, resolve_city(config), threads);
}

}  // namespace covsim
