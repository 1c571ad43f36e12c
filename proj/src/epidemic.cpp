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

#include "covsim/epidemic.hpp"

#include <algorithm>

namespace covsim {

std::size_t RestrictionView::quarantined_count() const {
  std::size_t count = 0;
  for (const Agent& a : roster_->agents()) count += a.quarantined_on(day_) ? 1 : 0;
  return count;
}

namespace {

constexpr std::uint64_t pair_key(AgentId x, AgentId y) {
  return x < y ? (std::uint64_t(x) << 32) | y : (std::uint64_t(y) << 32) | x;
}

bool is_random(Channel c) {
  return c == Channel::kNeighborhoodRandom || c == Channel::kWorkplaceRandom;
}

// Calls emit(other) for each of k uniform draws from `pool` excluding `self`.
template <class Emit>
void draw_partners(std::span<const AgentId> pool, AgentId self, int k,
                   CounterRng rng, Emit&& emit) {
  if (k <= 0 || pool.size() < 2) return;
  for (int draw = 0; draw < k; ++draw) {
    AgentId other = self;
    while (other == self) other = pool[uniform_below(rng, pool.size())];
    emit(other);
  }
}

// Enumerates every random-channel draw of unrestricted agents whose partner
// is also unrestricted.
template <class Emit>
void for_each_random_draw(const AgentRoster& roster, const SimParams& params,
                          const RestrictionView& restrictions,
                          const RandomStreams& streams, Emit&& emit) {
  const Day day = restrictions.day();
  for (const Agent& agent : roster.agents()) {
    const AgentId i = agent.id;
    if (restrictions.restricted(i)) continue;
    draw_partners(roster.neighborhood_pool(agent.home), i, params.k_nr,
                  streams.stream(Stream::kRandomNeighborhood, day, i),
                  [&](AgentId j) {
                    if (!restrictions.restricted(j)) emit(i, j, Channel::kNeighborhoodRandom);
                  });
    if (agent.visit_place) {
      draw_partners(roster.visitors(*agent.visit_place), i, params.k_wr,
                    streams.stream(Stream::kRandomWorkplace, day, i),
                    [&](AgentId j) {
                      if (!restrictions.restricted(j)) emit(i, j, Channel::kWorkplaceRandom);
                    });
    }
  }
}

bool trial(const RandomStreams& streams, Day day, std::uint64_t key,
           Channel channel, double p) {
  auto rng = streams.stream(Stream::kTransmission, day, key,
                            static_cast<std::uint64_t>(channel));
  return bernoulli(rng, p);
}

}  // namespace

std::vector<ContactEvent> generate_contacts(const AgentRoster& roster,
                                            const SimParams& params,
                                            const RestrictionView& restrictions,
                                            const RandomStreams& streams) {
  std::vector<ContactEvent> events;
  if (restrictions.lockdown_active()) return events;
  const Day day = restrictions.day();

  for_each_random_draw(roster, params, restrictions, streams,
                       [&](AgentId i, AgentId j, Channel c) {
                         events.push_back({i, j, c, day});
                       });
  for (const Agent& agent : roster.agents()) {
    const AgentId i = agent.id;
    if (restrictions.restricted(i)) continue;
    for (AgentId j : roster.neighborhood_contacts(i)) {
      if (i < j && !restrictions.restricted(j)) {
        events.push_back({i, j, Channel::kNeighborhoodFixed, day});
      }
    }
    for (AgentId j : roster.workplace_contacts(i)) {
      if (i < j && !restrictions.restricted(j)) {
        events.push_back({i, j, Channel::kWorkplaceFixed, day});
      }
    }
  }

  auto key_less = [](const ContactEvent& x, const ContactEvent& y) {
    if (x.low() != y.low()) return x.low() < y.low();
    if (x.high() != y.high()) return x.high() < y.high();
    if (x.channel != y.channel) return x.channel < y.channel;
    return x.a < y.a;
  };
  std::sort(events.begin(), events.end(), key_less);
  events.erase(std::unique(events.begin(), events.end()), events.end());
  return events;
}

std::vector<AgentId> transmit(const AgentRoster& roster,
                              std::span<const ContactEvent> contacts, double p,
                              const RandomStreams& streams) {
  std::vector<AgentId> exposed;
  for (const ContactEvent& e : contacts) {
    const CovidState sa = roster[e.a].covid;
    const CovidState sb = roster[e.b].covid;
    AgentId target;
    if (sa == CovidState::kI && sb == CovidState::kS) {
      target = e.b;
    } else if (sb == CovidState::kI && sa == CovidState::kS) {
      target = e.a;
    } else {
      continue;
    }
    if (trial(streams, e.day, pair_key(e.a, e.b), e.channel, p)) {
      exposed.push_back(target);
    }
  }
  std::sort(exposed.begin(), exposed.end());
  exposed.erase(std::unique(exposed.begin(), exposed.end()), exposed.end());
  return exposed;
}

std::vector<AgentId> transmit_day(const AgentRoster& roster,
                                  const SimParams& params,
                                  const RestrictionView& restrictions,
                                  const RandomStreams& streams) {
  std::vector<AgentId> exposed;
  if (restrictions.lockdown_active()) return exposed;
  const Day day = restrictions.day();

  auto infectious_pair = [&](AgentId x, AgentId y) -> const Agent* {
    const Agent& ax = roster[x];
    const Agent& ay = roster[y];
    if (ax.covid == CovidState::kI && ay.covid == CovidState::kS) return &ay;
    if (ay.covid == CovidState::kI && ax.covid == CovidState::kS) return &ax;
    return nullptr;
  };

  std::array<std::vector<std::uint64_t>, kChannelCount> keys;
  for_each_random_draw(roster, params, restrictions, streams,
                       [&](AgentId i, AgentId j, Channel c) {
                         if (infectious_pair(i, j)) {
                           keys[static_cast<std::size_t>(c)].push_back(pair_key(i, j));
                         }
                       });
  for (const Agent& agent : roster.agents()) {
    if (agent.covid != CovidState::kI || restrictions.restricted(agent.id)) continue;
    for (AgentId j : roster.neighborhood_contacts(agent.id)) {
      if (roster[j].covid == CovidState::kS && !restrictions.restricted(j)) {
        keys[static_cast<std::size_t>(Channel::kNeighborhoodFixed)].push_back(pair_key(agent.id, j));
      }
    }
    for (AgentId j : roster.workplace_contacts(agent.id)) {
      if (roster[j].covid == CovidState::kS && !restrictions.restricted(j)) {
        keys[static_cast<std::size_t>(Channel::kWorkplaceFixed)].push_back(pair_key(agent.id, j));
      }
    }
  }

  for (std::size_t c = 0; c < kChannelCount; ++c) {
    auto& list = keys[c];
    const auto channel = static_cast<Channel>(c);
    if (is_random(channel)) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    for (std::uint64_t key : list) {
      if (trial(streams, day, key, channel, params.p)) {
        const auto x = AgentId(key >> 32);
        const auto y = AgentId(key & 0xffffffffULL);
        exposed.push_back(infectious_pair(x, y)->id);
      }
    }
  }
  std::sort(exposed.begin(), exposed.end());
  exposed.erase(std::unique(exposed.begin(), exposed.end()), exposed.end());
  return exposed;
}

DayDelta census(const AgentRoster& roster) {
  DayDelta delta;
  delta.active_by_locality.assign(roster.locality_count(), 0);
  for (const Agent& a : roster.agents()) {
    ++delta.covid_totals[static_cast<std::size_t>(a.covid)];
    if (a.flu == FluState::kI) ++delta.flu_infected;
    if (a.covid == CovidState::kI) ++delta.active_by_locality[a.home];
  }
  return delta;
}

DayDelta advance_epidemic_day(AgentRoster& roster, const SimParams& params,
                              const RestrictionView& restrictions,
                              const RandomStreams& streams,
                              std::span<const AgentId> order) {
  const Day day = restrictions.day();
  const auto exposed = transmit_day(roster, params, restrictions, streams);
  for (AgentId i : exposed) roster[i].covid = CovidState::kE;

  auto step = [&](Agent& a) {
    auto covid_rng = streams.stream(Stream::kCovidStep, day, a.id);
    a.covid = covid_local_step(a.covid, params, covid_rng);
    auto flu_rng = streams.stream(Stream::kFluStep, day, a.id);
    a.flu = flu_step(a.flu, params, flu_rng);
  };
  if (order.empty()) {
    for (Agent& a : roster.agents()) step(a);
  } else {
    for (AgentId i : order) step(roster[i]);
  }

  DayDelta delta = census(roster);
  delta.new_infections = exposed.size();
  return delta;
}

}  // namespace covsim
