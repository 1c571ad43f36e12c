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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "covsim/testing.hpp"
#include "lbt_oracle.hpp"
#include "support.hpp"

namespace covsim {
namespace {

using testutil::grid;
using testutil::within_sigma;

SymptomaticPool pool_of(std::vector<AgentId> ids, Day day = 1) {
  std::sort(ids.begin(), ids.end());
  return SymptomaticPool{day, std::move(ids)};
}

std::vector<AgentId> iota_ids(AgentId from, AgentId to) {
  std::vector<AgentId> v;
  for (AgentId i = from; i < to; ++i) v.push_back(i);
  return v;
}

TEST(History, RecordsOnceAndIndexesPositives) {
  TestingHistory h(5, 10);
  EXPECT_EQ(h.at(2, 3), TestResult::kNone);
  h.record(2, 3, TestResult::kPositive);
  h.record(4, 3, TestResult::kNegative);
  h.record(0, 3, TestResult::kPositive);
  EXPECT_EQ(h.at(2, 3), TestResult::kPositive);
  EXPECT_EQ(h.at(4, 3), TestResult::kNegative);
  EXPECT_EQ(std::vector<AgentId>(h.positives_on(3).begin(), h.positives_on(3).end()),
            (std::vector<AgentId>{0, 2}));
  EXPECT_EQ(h.tests_on(3), 3u);
  EXPECT_TRUE(h.ever_positive(2));
  EXPECT_FALSE(h.ever_positive(4));
  EXPECT_THROW(h.record(2, 3, TestResult::kNegative), std::logic_error);
  EXPECT_THROW(h.record(1, 11, TestResult::kNegative), std::logic_error);
  EXPECT_THROW(h.record(1, 4, TestResult::kNone), std::logic_error);
  EXPECT_TRUE(h.positives_on(0).empty());
  EXPECT_TRUE(h.positives_on(99).empty());
}

TEST(TestIndividual, NoFalsePositives) {
  CounterRng rng(1);
  Agent a;
  for (CovidState s : {CovidState::kS, CovidState::kE, CovidState::kR}) {
    a.covid = s;
    for (double r : {0.0, 0.3, 1.0}) {
      for (int k = 0; k < 200; ++k) EXPECT_EQ(test_individual(a, r, rng), TestResult::kNegative);
    }
  }
}

TEST(TestIndividual, PerfectSensitivityAtZeroFalseNegatives) {
  CounterRng rng(2);
  Agent a;
  a.covid = CovidState::kI;
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(test_individual(a, 0.0, rng), TestResult::kPositive);
}

TEST(TestIndividual, FalseNegativeRate) {
  const RandomStreams streams(3);
  Agent a;
  a.covid = CovidState::kI;
  const std::size_t n = 100000;
  std::size_t pos = 0;
  for (std::size_t t = 0; t < n; ++t) {
    auto rng = streams.stream(Stream::kTestResult, 1, t);
    pos += test_individual(a, 0.3, rng) == TestResult::kPositive;
  }
  EXPECT_TRUE(within_sigma(pos, n, 0.7)) << pos;
}

struct PoolWorld {
  CityModel city = grid(2, 2, 0.5, 2);
  AgentRoster roster;
  explicit PoolWorld(std::size_t n) { roster = build_roster(city, n, SimParams{}, 5); }
};

TEST(BuildPool, FullReportingTakesEverySymptomatic) {
  PoolWorld w(200);
  for (AgentId i = 0; i < 10; ++i) w.roster[i * 7].covid = CovidState::kI;
  const std::vector<double> rho(4, 1.0);
  TestingHistory h(200, 5);
  const auto pool = build_pool(w.roster, 1, rho, h, RandomStreams(1));
  EXPECT_EQ(pool.size(), 10u);
  EXPECT_TRUE(pool.contains(14));
  EXPECT_FALSE(pool.contains(15));
}

TEST(BuildPool, ZeroReportingIsEmpty) {
  PoolWorld w(200);
  for (Agent& a : w.roster.agents()) a.flu = FluState::kI;
  const std::vector<double> rho(4, 0.0);
  TestingHistory h(200, 5);
  EXPECT_EQ(build_pool(w.roster, 1, rho, h, RandomStreams(1)).size(), 0u);
}

TEST(BuildPool, PartialReportingIsBinomial) {
  PoolWorld w(1000);
  for (Agent& a : w.roster.agents()) a.flu = FluState::kI;
  const std::vector<double> rho(4, 0.1);
  TestingHistory h(1000, 5);
  const auto pool = build_pool(w.roster, 1, rho, h, RandomStreams(4));
  EXPECT_TRUE(within_sigma(pool.size(), 1000, 0.1)) << pool.size();
}

TEST(BuildPool, ExcludesPriorPositivesAndAsymptomatic) {
  PoolWorld w(100);
  for (AgentId i = 0; i < 20; ++i) w.roster[i].covid = CovidState::kI;
  w.roster[50].flu = FluState::kI;
  w.roster[60].covid = CovidState::kE;
  TestingHistory h(100, 5);
  h.record(3, 1, TestResult::kPositive);
  h.record(4, 1, TestResult::kNegative);
  const std::vector<double> rho(4, 1.0);
  const auto pool = build_pool(w.roster, 2, rho, h, RandomStreams(1));
  EXPECT_FALSE(pool.contains(3));
  EXPECT_TRUE(pool.contains(4));
  EXPECT_TRUE(pool.contains(50));
  EXPECT_FALSE(pool.contains(60));
  EXPECT_EQ(pool.size(), 20u);
}

TEST(Rst, SmallPoolIsTakenWhole) {
  CounterRng rng(1);
  EXPECT_EQ(select_rst(pool_of({4, 9, 2}), 50, rng), (std::vector<AgentId>{2, 4, 9}));
  EXPECT_TRUE(select_rst(pool_of({}), 50, rng).empty());
  EXPECT_TRUE(select_rst(pool_of({1, 2}), 0, rng).empty());
}

TEST(Rst, SelectionIsUniform) {
  const auto pool = pool_of({10, 11, 12, 13, 14});
  const RandomStreams streams(6);
  const std::size_t n = 100000;
  std::map<AgentId, std::size_t> hits;
  for (std::size_t t = 0; t < n; ++t) {
    auto rng = streams.stream(Stream::kPolicy, 1, t);
    const auto s = select_rst(pool, 2, rng);
    ASSERT_EQ(s.size(), 2u);
    ASSERT_NE(s[0], s[1]);
    for (AgentId i : s) ++hits[i];
  }
  for (AgentId i = 10; i < 15; ++i) EXPECT_TRUE(within_sigma(hits[i], n, 0.4)) << i;
}

// A star of fixed contacts around a positive agent, plus unrelated symptomatic agents.
struct TraceWorld {
  CityModel city = grid(1, 1, 1.0, 0);
  AgentRoster roster;
  TestingHistory history;
  explicit TraceWorld(int contacts, std::size_t n = 400)
      : history(n, 20) {
    SimParams params;
    params.k_nf = contacts;
    params.k_wf = 0;
    roster = build_roster(city, n, params, 3);
  }
};

TEST(Ct, TracesFixedContactsOfRecentPositives) {
  TraceWorld w(5);
  const ObservableView view(w.roster);
  w.history.record(0, 4, TestResult::kPositive);
  w.history.record(1, 3, TestResult::kPositive);
  w.history.record(2, 2, TestResult::kPositive);  // too old on day 5
  const auto pool = pool_of(iota_ids(0, 400), 5);
  const auto traced = traced_contacts(pool, w.history, view, 5);
  std::set<AgentId> expected;
  for (AgentId p : {0u, 1u}) {
    for (AgentId c : w.roster.neighborhood_contacts(p)) {
      if (c != 0 && c != 1 && c != 2) expected.insert(c);
    }
  }
  EXPECT_EQ(std::set<AgentId>(traced.begin(), traced.end()), expected);
  // Same-day positives are not traced.
  w.history.record(7, 5, TestResult::kPositive);
  EXPECT_EQ(traced_contacts(pool, w.history, view, 5), traced);
}

TEST(Ct, ManyTracedContactsFillTheBudget) {
  TraceWorld w(30, 600);
  const ObservableView view(w.roster);
  w.history.record(0, 1, TestResult::kPositive);
  w.history.record(1, 1, TestResult::kPositive);
  const auto pool = pool_of(iota_ids(2, 600), 2);
  const auto traced = traced_contacts(pool, w.history, view, 2);
  ASSERT_GE(traced.size(), 60u);
  CounterRng rng(3);
  const auto s = select_ct(pool, w.history, view, 50, 2, rng);
  EXPECT_EQ(s.size(), 50u);
  for (AgentId i : s) EXPECT_TRUE(std::binary_search(traced.begin(), traced.end(), i));
}

TEST(Ct, WithoutRecentPositivesMatchesRst) {
  TraceWorld w(5);
  const ObservableView view(w.roster);
  const auto pool = pool_of(iota_ids(0, 300), 3);
  const RandomStreams streams(8);
  for (std::uint64_t t = 0; t < 20; ++t) {
    auto a = streams.stream(Stream::kPolicy, 3, t);
    auto b = streams.stream(Stream::kPolicy, 3, t);
    EXPECT_EQ(select_ct(pool, w.history, view, 50, 3, a), select_rst(pool, 50, b));
  }
}

TEST(Ct, TopUpComesFromTheRestOfThePool) {
  TraceWorld w(5, 400);
  const ObservableView view(w.roster);
  w.history.record(0, 1, TestResult::kPositive);
  // Pool: ten traced contacts of agent 0 plus 100 others.
  std::vector<AgentId> traced_ids;
  for (AgentId c : w.roster.neighborhood_contacts(0)) traced_ids.push_back(c);
  ASSERT_GE(traced_ids.size(), 5u);
  traced_ids.resize(std::min<std::size_t>(traced_ids.size(), 10));
  std::set<AgentId> others;
  for (AgentId i = 1; others.size() < 100; ++i) {
    if (std::find(traced_ids.begin(), traced_ids.end(), i) == traced_ids.end()) others.insert(i);
  }
  std::vector<AgentId> members(traced_ids);
  members.insert(members.end(), others.begin(), others.end());
  const auto pool = pool_of(members, 2);
  const auto traced = traced_contacts(pool, w.history, view, 2);
  ASSERT_EQ(traced.size(), traced_ids.size());
  CounterRng rng(4);
  const auto s = select_ct(pool, w.history, view, 50, 2, rng);
  EXPECT_EQ(s.size(), 50u);
  EXPECT_EQ(std::set<AgentId>(s.begin(), s.end()).size(), 50u);
  for (AgentId c : traced) EXPECT_TRUE(std::binary_search(s.begin(), s.end(), c));
  std::size_t from_rest = 0;
  for (AgentId i : s) from_rest += others.count(i);
  EXPECT_EQ(from_rest, 50 - traced.size());
}

TEST(Lbt, NoPositivesMeansZeroScores) {
  PoolWorld w(100);
  const ObservableView view(w.roster);
  TestingHistory h(100, 10);
  ScoreTables tables(4, w.roster.destination_count());
  update_scores(tables, h, view, 8, LbtParams{});
  for (double s : tables.locality) EXPECT_EQ(s, 0.0);
  for (double s : tables.visit) EXPECT_EQ(s, 0.0);
  for (AgentId i = 0; i < 100; ++i) EXPECT_EQ(get_score(i, tables, view, LbtParams{}), 0.0);
}

TEST(Lbt, HandEvaluatedRecurrence) {
  PoolWorld w(100);
  const ObservableView view(w.roster);
  TestingHistory h(100, 10);
  const AgentId a = w.roster.residents(2)[0];
  const AgentId b = w.roster.residents(2)[1];
  h.record(a, 1, TestResult::kPositive);
  h.record(b, 2, TestResult::kPositive);
  ScoreTables tables(4, w.roster.destination_count());
  update_scores(tables, h, view, 3, LbtParams{});
  EXPECT_NEAR(tables.locality[2], 2.1, 1e-12);
  EXPECT_EQ(tables.locality[0], 0.0);
}

TEST(Lbt, ScoreFormula) {
  PoolWorld w(200);
  const ObservableView view(w.roster);
  ScoreTables tables(4, w.roster.destination_count());
  AgentId visitor = 0;
  while (!w.roster[visitor].visit_place) ++visitor;
  tables.visit[*w.roster[visitor].visit_place] = 2.0;
  tables.locality[w.roster[visitor].home] = 3.0;
  EXPECT_DOUBLE_EQ(get_score(visitor, tables, view, LbtParams{}), 5.0);

  LbtParams no_locality;
  no_locality.beta = 0.0;
  for (double& s : tables.locality) s = 7.0 + s;
  std::set<double> by_visit;
  for (const Agent& a : w.roster.agents()) {
    if (a.visit_place == w.roster[visitor].visit_place) {
      by_visit.insert(get_score(a.id, tables, view, no_locality));
    }
  }
  EXPECT_EQ(by_visit.size(), 1u);

  AgentId stay_home = 0;
  while (w.roster[stay_home].visit_place) ++stay_home;
  EXPECT_DOUBLE_EQ(get_score(stay_home, tables, view, LbtParams{}),
                   tables.locality[w.roster[stay_home].home]);
}

TEST(Lbt, IncrementalMatchesBruteForce) {
  const CityModel city = grid(3, 3, 0.4, 4, WeightFn::kRandom, 2);
  const AgentRoster roster = build_roster(city, 600, SimParams{}, 2);
  const ObservableView view(roster);
  std::mt19937_64 gen(2);
  LbtParams p;
  p.alpha_loc = 1.3;
  p.alpha_vis = 0.7;
  p.epsilon = 0.25;
  TestingHistory h(600, 30);
  for (Day d = 1; d <= 30; ++d) {
    for (AgentId i = 0; i < 600; ++i) {
      if (gen() % 40 == 0) h.record(i, d, TestResult::kPositive);
    }
  }
  ScoreTables tables(city.size(), roster.destination_count());
  for (Day t = 1; t <= 30; ++t) {
    update_scores(tables, h, view, t, p);
    for (LocalityId l = 0; l < city.size(); ++l) {
      const double want = oracle::locality_score(h, view, l, t, p);
      EXPECT_LE(std::abs(tables.locality[l] - want), 1e-9 * std::max(1.0, std::abs(want)));
    }
    for (DestinationId d = 0; d < roster.destination_count(); ++d) {
      const double want = oracle::visit_score(h, view, d, t, p);
      EXPECT_LE(std::abs(tables.visit[d] - want), 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(Lbt, SmallPoolIsTakenWhole) {
  PoolWorld w(50);
  const ObservableView view(w.roster);
  ScoreTables tables(4, w.roster.destination_count());
  CounterRng rng(1);
  const auto pool = pool_of({1, 5, 9});
  EXPECT_EQ(select_lbt(pool, tables, view, 3, LbtParams{}, rng), pool.members);
  EXPECT_EQ(select_lbt(pool, tables, view, 50, LbtParams{}, rng), pool.members);
}

TEST(Lbt, DominantScoreIsAlmostAlwaysPicked) {
  PoolWorld w(100);
  const ObservableView view(w.roster);
  ScoreTables tables(4, w.roster.destination_count());
  const AgentId hot = w.roster.residents(3)[0];
  tables.locality[3] = 1e6;
  std::vector<AgentId> members{hot};
  for (LocalityId l = 0; l < 3; ++l) {
    for (AgentId i : w.roster.residents(l)) {
      if (!w.roster[i].visit_place) members.push_back(i);
    }
  }
  const auto pool = pool_of(members);
  ASSERT_GT(pool.size(), 10u);
  const RandomStreams streams(5);
  std::size_t hits = 0;
  const std::size_t n = 10000;
  for (std::size_t t = 0; t < n; ++t) {
    auto rng = streams.stream(Stream::kPolicy, 1, t);
    const auto s = select_lbt(pool, tables, view, 1, LbtParams{}, rng);
    hits += s == std::vector<AgentId>{hot};
  }
  EXPECT_GE(double(hits) / double(n), 0.999);
}

TEST(Lbt, ZeroScoresBehaveLikeRst) {
  PoolWorld w(100);
  const ObservableView view(w.roster);
  ScoreTables tables(4, w.roster.destination_count());
  const auto pool = pool_of({3, 17, 29, 41, 55, 68});
  const RandomStreams streams(9);
  const std::size_t n = 60000;
  std::map<AgentId, std::size_t> lbt_hits, rst_hits;
  for (std::size_t t = 0; t < n; ++t) {
    auto a = streams.stream(Stream::kPolicy, 1, t);
    auto b = streams.stream(Stream::kPolicy, 2, t);
    for (AgentId i : select_lbt(pool, tables, view, 2, LbtParams{}, a)) ++lbt_hits[i];
    for (AgentId i : select_rst(pool, 2, b)) ++rst_hits[i];
  }
  // Two-sample test on each agent's selection frequency (p = 1/3 under both).
  for (AgentId i : pool.members) {
    const double p = 1.0 / 3.0;
    const double sigma = std::sqrt(2.0 * double(n) * p * (1 - p));
    EXPECT_LE(std::abs(double(lbt_hits[i]) - double(rst_hits[i])), 3.0 * sigma) << i;
    EXPECT_TRUE(within_sigma(lbt_hits[i], n, p)) << i;
  }
}

TEST(RunPolicy, ZeroBudgetRecordsNothing) {
  PoolWorld w(200);
  for (Agent& a : w.roster.agents()) a.flu = FluState::kI;
  TestingHistory h(200, 5);
  ScoreTables tables;
  SimParams params;
  params.budget = 0;
  const std::vector<double> rho(4, 1.0);
  const RandomStreams streams(1);
  const auto pool = build_pool(w.roster, 1, rho, h, streams);
  for (Policy p : {Policy::kRst, Policy::kCt, Policy::kLbt}) {
    EXPECT_TRUE(run_policy(p, pool, w.roster, h, tables, 1, params, LbtParams{}, streams).empty());
  }
  EXPECT_EQ(h.tests_on(1), 0u);
}

TEST(RunPolicy, RecordsEveryOutcome) {
  PoolWorld w(300);
  for (AgentId i = 0; i < 300; i += 3) w.roster[i].covid = CovidState::kI;
  for (AgentId i = 1; i < 300; i += 3) w.roster[i].flu = FluState::kI;
  TestingHistory h(300, 5);
  ScoreTables tables;
  const std::vector<double> rho(4, 1.0);
  const RandomStreams streams(2);
  const auto pool = build_pool(w.roster, 1, rho, h, streams);
  const auto out = run_policy(Policy::kRst, pool, w.roster, h, tables, 1, SimParams{},
                              LbtParams{}, streams);
  EXPECT_EQ(out.size(), 50u);
  EXPECT_EQ(h.tests_on(1), 50u);
  for (const auto& [id, result] : out) {
    EXPECT_TRUE(pool.contains(id));
    EXPECT_EQ(h.at(id, 1), result);
    EXPECT_EQ(result == TestResult::kPositive, w.roster[id].covid == CovidState::kI);
  }
}

TEST(Policy, Names) {
  EXPECT_EQ(parse_policy("ct"), Policy::kCt);
  EXPECT_EQ(parse_policy("LBT"), Policy::kLbt);
  EXPECT_EQ(parse_policy("Rst"), Policy::kRst);
  EXPECT_EQ(parse_policy("none"), Policy::kNone);
  EXPECT_THROW(parse_policy("pooled"), InputError);
  EXPECT_EQ(parse_policy(to_string(Policy::kLbt)), Policy::kLbt);
}

TEST(LbtParams, Validation) {
  LbtParams p;
  EXPECT_NO_THROW(p.validate());
  p.floor = 0.0;
  EXPECT_THROW(p.validate(), InputError);
  p = LbtParams{};
  p.beta = -1;
  EXPECT_THROW(p.validate(), InputError);
}

}  // namespace
}  // namespace covsim
