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
#include <span>
#include <vector>

#include "covsim/city.hpp"
#include "covsim/rng.hpp"
#include "covsim/types.hpp"

namespace covsim {

/// Local COVID transition for one day: E->I w.p. 1/t_ei, I->R w.p. 1/t_ir.
/// S only leaves through infection; R is absorbing.
template <class Rng>
CovidState covid_local_step(CovidState state, const SimParams& params, Rng& rng) {
  switch (state) {
    case CovidState::kE:
      return bernoulli(rng, 1.0 / params.t_ei) ? CovidState::kI : CovidState::kE;
    case CovidState::kI:
      return bernoulli(rng, 1.0 / params.t_ir) ? CovidState::kR : CovidState::kI;
    default:
      return state;
  }
}

/// Flu is an intrinsic S <-> I chain, independent of everything else.
template <class Rng>
FluState flu_step(FluState state, const SimParams& params, Rng& rng) {
  if (state == FluState::kS) {
    return bernoulli(rng, 1.0 / params.t_si) ? FluState::kI : FluState::kS;
  }
  return bernoulli(rng, 1.0 / params.t_is) ? FluState::kS : FluState::kI;
}

enum class Channel : std::uint8_t {
  kNeighborhoodRandom,
  kNeighborhoodFixed,
  kWorkplaceRandom,
  kWorkplaceFixed,
};
inline constexpr std::size_t kChannelCount = 4;

/// A meeting between two agents. `a` initiated it (the drawing agent for
/// random channels, the lower id for fixed ones); equality ignores direction.
struct ContactEvent {
  AgentId a = 0;
  AgentId b = 0;
  Channel channel = Channel::kNeighborhoodRandom;
  Day day = 0;

  AgentId low() const { return a < b ? a : b; }
  AgentId high() const { return a < b ? b : a; }
  friend bool operator==(const ContactEvent& x, const ContactEvent& y) {
    return x.low() == y.low() && x.high() == y.high() &&
           x.channel == y.channel && x.day == y.day;
  }
};

/// Which agents may meet anyone on a given day.
class RestrictionView {
 public:
  RestrictionView(const AgentRoster& roster, Day day, bool global_lockdown)
      : roster_(&roster), day_(day), lockdown_(global_lockdown) {}

  Day day() const { return day_; }
  bool lockdown_active() const { return lockdown_; }
  bool quarantined(AgentId i) const { return (*roster_)[i].quarantined_on(day_); }
  bool restricted(AgentId i) const { return lockdown_ || quarantined(i); }
  std::size_t quarantined_count() const;

 private:
  const AgentRoster* roster_;
  Day day_;
  bool lockdown_;
};

/// All meetings of one day. Unrestricted agents draw k_nr neighborhood and
/// (with a visit place) k_wr workplace partners afresh, and meet every fixed
/// contact. Events touching a restricted agent are dropped; duplicate pairs
/// within a channel are merged. Output is sorted by (low, high, channel).
std::vector<ContactEvent> generate_contacts(const AgentRoster& roster,
                                            const SimParams& params,
                                            const RestrictionView& restrictions,
                                            const RandomStreams& streams);

/// Newly exposed agents (sorted, unique). Each S-I event is an independent
/// trial with probability p; states are read from `roster` as given, so the
/// caller must pass day-start states.
std::vector<AgentId> transmit(const AgentRoster& roster,
                              std::span<const ContactEvent> contacts, double p,
                              const RandomStreams& streams);

/// Same result as transmit(generate_contacts(...)) without materializing
/// events that cannot transmit.
std::vector<AgentId> transmit_day(const AgentRoster& roster,
                                  const SimParams& params,
                                  const RestrictionView& restrictions,
                                  const RandomStreams& streams);

struct DayDelta {
  std::size_t new_infections = 0;
  std::array<std::size_t, 4> covid_totals{};  // indexed by CovidState
  std::size_t flu_infected = 0;
  std::vector<std::uint32_t> active_by_locality;

  std::size_t count(CovidState s) const {
    return covid_totals[static_cast<std::size_t>(s)];
  }
};

/// One day of dynamics: contacts and transmission against day-start states,
/// then commit S->E, then the local COVID step and the flu step for every
/// agent. `order`, if given, is the agent visiting order for the local
/// steps; the result does not depend on it.
DayDelta advance_epidemic_day(AgentRoster& roster, const SimParams& params,
                              const RestrictionView& restrictions,
                              const RandomStreams& streams,
                              std::span<const AgentId> order = {});

/// Totals and per-locality active counts of the current state.
DayDelta census(const AgentRoster& roster);

}  // namespace covsim
