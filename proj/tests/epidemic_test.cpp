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
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "covsim/epidemic.hpp"
#include "support.hpp"

namespace covsim {
namespace {

using testutil::grid;
using testutil::within_sigma;

constexpr std::size_t kTrials = 100000;

TEST(CovidStep, RecoveredIsAbsorbing) {
  CounterRng rng(1);
  SimParams params;
  params.t_ir = 1.0;
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(covid_local_step(CovidState::kR, params, rng), CovidState::kR);
  }
}

TEST(CovidStep, SusceptibleNeverMovesLocally) {
  CounterRng rng(2);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(covid_local_step(CovidState::kS, SimParams{}, rng), CovidState::kS);
  }
}

TEST(CovidStep, ExposedSkippedWhenDwellIsOneDay) {
  CounterRng rng(3);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(covid_local_step(CovidState::kE, SimParams{}, rng), CovidState::kI);
  }
}

TEST(CovidStep, RecoveryRateMatchesDwell) {
  const RandomStreams streams(11);
  std::size_t moved = 0;
  for (std::size_t t = 0; t < kTrials; ++t) {
    auto rng = streams.stream(Stream::kCovidStep, 1, t);
    moved += covid_local_step(CovidState::kI, SimParams{}, rng) == CovidState::kR;
  }
  EXPECT_TRUE(within_sigma(moved, kTrials, 0.125)) << moved;
}

TEST(FluStep, OnsetAndRecoveryRates) {
  const RandomStreams streams(12);
  std::size_t onset = 0, recovery = 0;
  for (std::size_t t = 0; t < kTrials; ++t) {
    auto a = streams.stream(Stream::kFluStep, 1, t);
    onset += flu_step(FluState::kS, SimParams{}, a) == FluState::kI;
    auto b = streams.stream(Stream::kFluStep, 2, t);
    recovery += flu_step(FluState::kI, SimParams{}, b) == FluState::kS;
  }
  EXPECT_TRUE(within_sigma(onset, kTrials, 0.02)) << onset;
  EXPECT_TRUE(within_sigma(recovery, kTrials, 0.125)) << recovery;
}

TEST(FluStep, UnitDwellForcesOnset) {
  SimParams params;
  params.t_si = 1.0;
  CounterRng rng(5);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(flu_step(FluState::kS, params, rng), FluState::kI);
}

struct World {
  CityModel city;
  AgentRoster roster;
};

World make_world(std::size_t n, std::uint64_t seed, double no_visit = 0.3) {
  World w{grid(3, 4, no_visit, 3, WeightFn::kRandom, seed), {}};
  w.roster = build_roster(w.city, n, SimParams{}, seed);
  return w;
}

TEST(Contacts, LockdownSilencesEveryone) {
  World w = make_world(500, 1);
  const RestrictionView view(w.roster, 3, true);
  EXPECT_TRUE(generate_contacts(w.roster, SimParams{}, view, RandomStreams(1)).empty());
}

TEST(Contacts, SingleAgentMeetsNobody) {
  const CityModel city = grid(1, 1, 0.0, 1);
  const AgentRoster roster = build_roster(city, 1, SimParams{}, 1);
  const RestrictionView view(roster, 1, false);
  EXPECT_TRUE(generate_contacts(roster, SimParams{}, view, RandomStreams(1)).empty());
}

TEST(Contacts, OwnDrawCountWithinParameterBounds) {
  World w = make_world(2000, 4, 0.0);
  const SimParams params;
  const RestrictionView view(w.roster, 1, false);
  const auto events = generate_contacts(w.roster, params, view, RandomStreams(4));
  std::map<AgentId, int> own_random;
  std::map<AgentId, int> involved;
  for (const auto& e : events) {
    if (e.channel == Channel::kNeighborhoodRandom || e.channel == Channel::kWorkplaceRandom) {
      ++own_random[e.a];
    }
    ++involved[e.a];
    ++involved[e.b];
  }
  for (const Agent& a : w.roster.agents()) {
    if (!a.visit_place) continue;
    const int own = own_random[a.id] + params.k_nf + params.k_wf;
    EXPECT_GE(own, params.k_nr + params.k_nf);
    EXPECT_LE(own, params.k_nr + params.k_nf + params.k_wr + params.k_wf);
    EXPECT_GE(involved[a.id], params.k_nf + params.k_wf);
  }
}

TEST(Contacts, EventsAreWellFormedAndUnique) {
  World w = make_world(1500, 5);
  const RestrictionView view(w.roster, 2, false);
  const auto events = generate_contacts(w.roster, SimParams{}, view, RandomStreams(5));
  std::set<std::tuple<AgentId, AgentId, Channel>> seen;
  for (const auto& e : events) {
    EXPECT_NE(e.a, e.b);
    EXPECT_EQ(e.day, 2);
    EXPECT_TRUE(seen.insert({e.low(), e.high(), e.channel}).second);
    const ContactEvent flipped{e.b, e.a, e.channel, e.day};
    EXPECT_TRUE(flipped == e);
  }
  // Every fixed pair meets every day.
  std::size_t fixed_pairs = 0;
  for (const Agent& a : w.roster.agents()) {
    fixed_pairs += w.roster.neighborhood_contacts(a.id).size();
    fixed_pairs += w.roster.workplace_contacts(a.id).size();
  }
  const auto fixed_events = std::count_if(events.begin(), events.end(), [](const auto& e) {
    return e.channel == Channel::kNeighborhoodFixed || e.channel == Channel::kWorkplaceFixed;
  });
  EXPECT_EQ(std::size_t(fixed_events) * 2, fixed_pairs);
}

TEST(Contacts, RandomPartnersComeFromTheRightPools) {
  World w = make_world(1500, 6);
  const RestrictionView view(w.roster, 1, false);
  for (const auto& e : generate_contacts(w.roster, SimParams{}, view, RandomStreams(6))) {
    if (e.channel == Channel::kNeighborhoodRandom) {
      const auto& adj = w.city.adjacency[w.roster[e.a].home];
      EXPECT_TRUE(std::binary_search(adj.begin(), adj.end(), w.roster[e.b].home));
    } else if (e.channel == Channel::kWorkplaceRandom) {
      ASSERT_TRUE(w.roster[e.a].visit_place.has_value());
      EXPECT_EQ(w.roster[e.a].visit_place, w.roster[e.b].visit_place);
    }
  }
}

TEST(Contacts, RestrictedAgentsNeverAppear) {
  World w = make_world(1200, 7);
  std::mt19937_64 gen(7);
  for (Agent& a : w.roster.agents()) {
    if (gen() % 5 == 0) {
      a.quarantined_from = 2;
      a.quarantined_until = 6;
    }
  }
  for (Day d : {1, 2, 5, 6}) {
    const RestrictionView view(w.roster, d, false);
    std::size_t restricted = 0;
    for (const Agent& a : w.roster.agents()) restricted += view.restricted(a.id);
    EXPECT_EQ(view.quarantined_count(), restricted);
    for (const auto& e : generate_contacts(w.roster, SimParams{}, view, RandomStreams(7))) {
      EXPECT_FALSE(view.restricted(e.a));
      EXPECT_FALSE(view.restricted(e.b));
    }
  }
}

TEST(Transmit, NoInfectiousAgentsMeansNoExposure) {
  World w = make_world(800, 8);
  const RestrictionView view(w.roster, 1, false);
  const RandomStreams streams(8);
  const auto events = generate_contacts(w.roster, SimParams{}, view, streams);
  EXPECT_TRUE(transmit(w.roster, events, 1.0, streams).empty());
}

TEST(Transmit, CertainInfectionAtUnitProbability) {
  const AgentRoster base = build_roster(grid(1, 1, 1.0, 0), 2, SimParams{}, 1);
  AgentRoster roster = base;
  roster[0].covid = CovidState::kI;
  const std::vector<ContactEvent> events{{0, 1, Channel::kNeighborhoodRandom, 1}};
  EXPECT_EQ(transmit(roster, events, 1.0, RandomStreams(1)), std::vector<AgentId>{1});
  roster[1].covid = CovidState::kR;
  EXPECT_TRUE(transmit(roster, events, 1.0, RandomStreams(1)).empty());
}

TEST(Transmit, IndependentTrialsMatchClosedForm) {
  SimParams params;
  params.k_nf = 0;
  params.k_wf = 0;
  AgentRoster roster = build_roster(grid(1, 1, 1.0, 0), 4, params, 1);
  for (AgentId i : {1u, 2u, 3u}) roster[i].covid = CovidState::kI;
  const RandomStreams streams(99);
  std::size_t infected = 0;
  for (std::size_t t = 1; t <= kTrials; ++t) {
    const Day day = Day(t);
    const std::vector<ContactEvent> events{{0, 1, Channel::kNeighborhoodFixed, day},
                                           {2, 0, Channel::kNeighborhoodRandom, day},
                                           {0, 3, Channel::kWorkplaceFixed, day}};
    infected += !transmit(roster, events, 0.1, streams).empty();
  }
  const double expected = 1.0 - std::pow(0.9, 3);
  EXPECT_NEAR(expected, 0.271, 1e-12);
  EXPECT_TRUE(within_sigma(infected, kTrials, expected)) << infected;
}

TEST(Transmit, FastPathEqualsEventPath) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    World w = make_world(900 + 50 * seed, seed, 0.2 + 0.05 * double(seed % 5));
    std::mt19937_64 gen(seed);
    for (Agent& a : w.roster.agents()) {
      const auto r = gen() % 10;
      a.covid = r < 2 ? CovidState::kI : r < 3 ? CovidState::kR : CovidState::kS;
      if (gen() % 7 == 0) {
        a.quarantined_from = 1;
        a.quarantined_until = 4;
      }
    }
    SimParams params;
    params.p = 0.3;
    const RandomStreams streams(seed * 17);
    for (Day d : {1, 3, 4}) {
      const RestrictionView view(w.roster, d, false);
      const auto events = generate_contacts(w.roster, params, view, streams);
      EXPECT_EQ(transmit_day(w.roster, params, view, streams),
                transmit(w.roster, events, params.p, streams))
          << "seed " << seed << " day " << d;
    }
  }
}

TEST(AdvanceDay, AllRecoveredIsStationary) {
  World w = make_world(600, 9);
  for (Agent& a : w.roster.agents()) a.covid = CovidState::kR;
  const RestrictionView view(w.roster, 1, false);
  const DayDelta d = advance_epidemic_day(w.roster, SimParams{}, view, RandomStreams(9));
  EXPECT_EQ(d.new_infections, 0u);
  EXPECT_EQ(d.count(CovidState::kR), 600u);
}

TEST(AdvanceDay, ZeroProbabilityOnlyRecovers) {
  World w = make_world(1000, 10);
  for (AgentId i = 0; i < 200; ++i) w.roster[i].covid = CovidState::kI;
  SimParams params;
  params.p = 0.0;
  std::size_t prev_i = 200;
  for (Day t = 1; t <= 10; ++t) {
    const RestrictionView view(w.roster, t, false);
    const DayDelta d = advance_epidemic_day(w.roster, params, view, RandomStreams(10));
    EXPECT_EQ(d.new_infections, 0u);
    EXPECT_EQ(d.count(CovidState::kS), 800u);
    EXPECT_EQ(d.count(CovidState::kI) + d.count(CovidState::kR), 200u);
    EXPECT_LE(d.count(CovidState::kI), prev_i);
    prev_i = d.count(CovidState::kI);
  }
}

TEST(AdvanceDay, NewlyExposedBecomeInfectiousWithUnitDwell) {
  const AgentRoster base = build_roster(grid(1, 1, 1.0, 0), 30, SimParams{}, 3);
  AgentRoster roster = base;
  roster[0].covid = CovidState::kI;
  SimParams params;
  params.p = 1.0;
  const RestrictionView view(roster, 1, false);
  const DayDelta d = advance_epidemic_day(roster, params, view, RandomStreams(3));
  EXPECT_GT(d.new_infections, 0u);
  EXPECT_EQ(d.count(CovidState::kE), 0u);
  for (AgentId j : base.neighborhood_contacts(0)) EXPECT_NE(roster[j].covid, CovidState::kS);
}

TEST(AdvanceDay, IterationOrderDoesNotMatter) {
  World a = make_world(1500, 13);
  for (AgentId i = 0; i < 40; ++i) a.roster[i].covid = CovidState::kI;
  World b = a;
  std::vector<AgentId> order(a.roster.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(13));
  const RandomStreams streams(13);
  for (Day t = 1; t <= 15; ++t) {
    const RestrictionView va(a.roster, t, false);
    const RestrictionView vb(b.roster, t, false);
    advance_epidemic_day(a.roster, SimParams{}, va, streams);
    advance_epidemic_day(b.roster, SimParams{}, vb, streams, order);
    ASSERT_TRUE(a.roster == b.roster) << "day " << t;
  }
}

TEST(AdvanceDay, CensusCountsByLocality) {
  World w = make_world(1000, 14);
  for (AgentId i = 0; i < 1000; i += 9) w.roster[i].covid = CovidState::kI;
  const DayDelta d = census(w.roster);
  EXPECT_EQ(std::accumulate(d.active_by_locality.begin(), d.active_by_locality.end(), 0u),
            d.count(CovidState::kI));
  EXPECT_EQ(d.covid_totals[0] + d.covid_totals[1] + d.covid_totals[2] + d.covid_totals[3],
            1000u);
}

}  // namespace
}  // namespace covsim
