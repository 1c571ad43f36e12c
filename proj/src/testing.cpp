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

#include "covsim/testing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <string>

namespace covsim {

TestingHistory::TestingHistory(std::size_t agents, Day horizon)
    : agents_(agents),
      horizon_(horizon),
      matrix_(agents * std::size_t(std::max<Day>(horizon, 0)), 0),
      positives_(std::size_t(std::max<Day>(horizon, 0)) + 1),
      tests_(std::size_t(std::max<Day>(horizon, 0)) + 1, 0),
      ever_positive_(agents, 0) {}

std::size_t TestingHistory::index(AgentId agent, Day day) const {
  if (agent >= agents_ || day < 1 || day > horizon_) {
    throw std::logic_error("testing history index out of range");
  }
  return std::size_t(day - 1) * agents_ + agent;
}

void TestingHistory::record(AgentId agent, Day day, TestResult result) {
  if (result == TestResult::kNone) {
    throw std::logic_error("cannot record an empty test result");
  }
  auto& cell = matrix_[index(agent, day)];
  if (cell != 0) {
    throw std::logic_error("agent " + std::to_string(agent) +
                           " already tested on day " + std::to_string(day));
  }
  cell = static_cast<std::int8_t>(result);
  ++tests_[std::size_t(day)];
  if (result == TestResult::kPositive) {
    auto& list = positives_[std::size_t(day)];
    list.insert(std::upper_bound(list.begin(), list.end(), agent), agent);
    ever_positive_[agent] = 1;
  }
}

TestResult TestingHistory::at(AgentId agent, Day day) const {
  return static_cast<TestResult>(matrix_[index(agent, day)]);
}

std::span<const AgentId> TestingHistory::positives_on(Day day) const {
  if (day < 1 || day > horizon_) return {};
  return positives_[std::size_t(day)];
}

std::size_t TestingHistory::tests_on(Day day) const {
  if (day < 1 || day > horizon_) return 0;
  return tests_[std::size_t(day)];
}

bool SymptomaticPool::contains(AgentId i) const {
  return std::binary_search(members.begin(), members.end(), i);
}

SymptomaticPool build_pool(const AgentRoster& roster, Day day,
                           std::span<const double> reporting_by_locality,
                           const TestingHistory& history,
                           const RandomStreams& streams) {
  SymptomaticPool pool;
  pool.day = day;
  for (const Agent& a : roster.agents()) {
    if (a.covid != CovidState::kI && a.flu != FluState::kI) continue;
    if (history.ever_positive(a.id)) continue;
    auto rng = streams.stream(Stream::kReporting, day, a.id);
    if (bernoulli(rng, reporting_by_locality[a.home])) pool.members.push_back(a.id);
  }
  return pool;
}

namespace {

// Uniform k-subset of `items` (partial Fisher-Yates), ascending.
std::vector<AgentId> sample_uniform(std::vector<AgentId> items, std::size_t k,
                                    CounterRng& rng) {
  k = std::min(k, items.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_below(rng, items.size() - i);
    std::swap(items[i], items[j]);
  }
  items.resize(k);
  std::sort(items.begin(), items.end());
  return items;
}

std::size_t budget_of(int budget) { return budget > 0 ? std::size_t(budget) : 0; }

}  // namespace

std::vector<AgentId> select_rst(const SymptomaticPool& pool, int budget,
                                CounterRng& rng) {
  return sample_uniform(pool.members, budget_of(budget), rng);
}

std::vector<AgentId> traced_contacts(const SymptomaticPool& pool,
                                     const TestingHistory& history,
                                     const ObservableView& view, Day day) {
  std::vector<AgentId> traced;
  for (Day d : {day - 1, day - 2}) {
    for (AgentId positive : history.positives_on(d)) {
      for (auto contacts : {view.neighborhood_contacts(positive),
                            view.workplace_contacts(positive)}) {
        for (AgentId c : contacts) {
          if (pool.contains(c) && !history.ever_positive(c)) traced.push_back(c);
        }
      }
    }
  }
  std::sort(traced.begin(), traced.end());
  traced.erase(std::unique(traced.begin(), traced.end()), traced.end());
  return traced;
}

std::vector<AgentId> select_ct(const SymptomaticPool& pool,
                               const TestingHistory& history,
                               const ObservableView& view, int budget, Day day,
                               CounterRng& rng) {
  const std::size_t b = budget_of(budget);
  auto traced = traced_contacts(pool, history, view, day);
  if (traced.size() >= b) return sample_uniform(std::move(traced), b, rng);

  std::vector<AgentId> rest;
  rest.reserve(pool.size() - traced.size());
  std::set_difference(pool.members.begin(), pool.members.end(), traced.begin(),
                      traced.end(), std::back_inserter(rest));
  auto fill = sample_uniform(std::move(rest), b - traced.size(), rng);
  std::vector<AgentId> selected;
  selected.reserve(traced.size() + fill.size());
  std::merge(traced.begin(), traced.end(), fill.begin(), fill.end(),
             std::back_inserter(selected));
  return selected;
}

void LbtParams::validate() const {
  if (!(alpha_loc >= 0.0 && alpha_vis >= 0.0 && beta >= 0.0 && epsilon >= 0.0)) {
    throw InputError("invalid parameter: LBT weights must be >= 0");
  }
  if (!(floor > 0.0)) throw InputError("invalid parameter: LBT floor must be > 0");
}

void update_scores(ScoreTables& tables, const TestingHistory& history,
                   const ObservableView& view, Day day, const LbtParams& params) {
  if (tables.locality.size() != view.locality_count() ||
      tables.visit.size() != view.destination_count()) {
    tables = ScoreTables(view.locality_count(), view.destination_count());
  }
  const double growth = 1.0 + params.epsilon;
  for (; tables.day < day; ++tables.day) {
    for (double& s : tables.locality) s *= growth;
    for (double& s : tables.visit) s *= growth;
    for (AgentId j : history.positives_on(tables.day)) {
      tables.locality[view.home(j)] += params.alpha_loc;
      if (auto v = view.visit_place(j)) tables.visit[*v] += params.alpha_vis;
    }
  }
}

double get_score(AgentId agent, const ScoreTables& tables,
                 const ObservableView& view, const LbtParams& params) {
  double score = params.beta * tables.locality[view.home(agent)];
  if (auto v = view.visit_place(agent)) score += tables.visit[*v];
  return score;
}

std::vector<AgentId> select_lbt(const SymptomaticPool& pool,
                                const ScoreTables& tables,
                                const ObservableView& view, int budget,
                                const LbtParams& params, CounterRng& rng) {
  const std::size_t b = budget_of(budget);
  if (pool.size() <= b) return pool.members;

  std::vector<double> weight(pool.size());
  for (std::size_t k = 0; k < pool.size(); ++k) {
    weight[k] = get_score(pool.members[k], tables, view, params) + params.floor;
  }
  std::vector<AgentId> selected;
  selected.reserve(b);
  for (std::size_t draw = 0; draw < b; ++draw) {
    double total = 0.0;
    for (double w : weight) total += w;
    const double target = uniform01(rng) * total;
    double cumulative = 0.0;
    std::size_t pick = weight.size();
    std::size_t last_live = weight.size();
    for (std::size_t k = 0; k < weight.size(); ++k) {
      if (weight[k] <= 0.0) continue;
      last_live = k;
      cumulative += weight[k];
      if (target < cumulative) {
        pick = k;
        break;
      }
    }
    if (pick == weight.size()) pick = last_live;  // rounding at the top end
    selected.push_back(pool.members[pick]);
    weight[pick] = 0.0;
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::kNone: return "none";
    case Policy::kRst: return "RST";
    case Policy::kCt: return "CT";
    case Policy::kLbt: return "LBT";
  }
  return "?";
}

Policy parse_policy(std::string_view text) {
  std::string lower;
  for (char c : text) lower.push_back(char(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "none") return Policy::kNone;
  if (lower == "rst") return Policy::kRst;
  if (lower == "ct") return Policy::kCt;
  if (lower == "lbt") return Policy::kLbt;
  throw InputError("unknown policy '" + std::string(text) + "'");
}

std::vector<TestOutcome> run_policy(Policy policy, const SymptomaticPool& pool,
                                    const AgentRoster& roster,
                                    TestingHistory& history,
                                    ScoreTables& tables, Day day,
                                    const SimParams& params,
                                    const LbtParams& lbt,
                                    const RandomStreams& streams) {
  const ObservableView view(roster);
  auto rng = streams.stream(Stream::kPolicy, day, 0);
  std::vector<AgentId> selected;
  switch (policy) {
    case Policy::kNone:
      break;
    case Policy::kRst:
      selected = select_rst(pool, params.budget, rng);
      break;
    case Policy::kCt:
      selected = select_ct(pool, history, view, params.budget, day, rng);
      break;
    case Policy::kLbt:
      update_scores(tables, history, view, day, lbt);
      selected = select_lbt(pool, tables, view, params.budget, lbt, rng);
      break;
  }
  if (selected.size() > budget_of(params.budget)) {
    throw std::logic_error("testing budget exceeded");
  }

  std::vector<TestOutcome> outcomes;
  outcomes.reserve(selected.size());
  for (AgentId i : selected) {
    auto test_rng = streams.stream(Stream::kTestResult, day, i);
    const TestResult result = test_individual(roster[i], params.fn_rate, test_rng);
    history.record(i, day, result);
    outcomes.emplace_back(i, result);
  }
  return outcomes;
}

}  // namespace covsim
