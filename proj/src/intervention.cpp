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

#include "covsim/intervention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace covsim {

void TriggerParams::validate() const {
  if (chord < 1) throw InputError("invalid parameter: chord must be >= 1");
  if (window < 1) throw InputError("invalid parameter: window must be >= 1");
  if (!std::isfinite(tau)) throw InputError("invalid parameter: tau");
  if (quarantine_days < 0) {
    throw InputError("invalid parameter: quarantine_days must be >= 0");
  }
  if (lockdown_days && *lockdown_days < 1) {
    throw InputError("invalid parameter: lockdown_days must be >= 1");
  }
}

double smoothed_positives(std::span<const double> daily_positives, Day t, int window) {
  if (t < 1 || std::size_t(t) > daily_positives.size()) {
    throw std::out_of_range("smoothed_positives: day out of range");
  }
  if (window < 1) throw std::invalid_argument("smoothed_positives: window < 1");
  const Day first = std::max<Day>(1, t - window + 1);
  double sum = 0.0;
  for (Day d = first; d <= t; ++d) sum += daily_positives[std::size_t(d - 1)];
  return sum / double(t - first + 1);
}

namespace {

std::vector<double> positive_counts(const TestingHistory& history, Day through) {
  std::vector<double> counts(std::size_t(std::max<Day>(through, 0)));
  for (Day d = 1; d <= through; ++d) {
    counts[std::size_t(d - 1)] = double(history.positives_on(d).size());
  }
  return counts;
}

}  // namespace

double smoothed_positives(const TestingHistory& history, Day t, int window) {
  return smoothed_positives(positive_counts(history, t), t, window);
}

double chord_slope(std::span<const double> daily_positives, Day t,
                   const TriggerParams& params) {
  if (t <= params.chord) return 0.0;
  const double now = smoothed_positives(daily_positives, t, params.window);
  const double before = smoothed_positives(daily_positives, t - params.chord, params.window);
  return (now - before) / double(params.chord);
}

double chord_slope(const TestingHistory& history, Day t, const TriggerParams& params) {
  if (t <= params.chord) return 0.0;
  return chord_slope(positive_counts(history, t), t, params);
}

LockdownController::LockdownController(LockdownMode mode, const TriggerParams& params)
    : mode_(mode), params_(params) {
  if (mode_ == LockdownMode::kFixed && !params_.lockdown_days) {
    throw InputError("fixed-duration lockdown needs lockdown_days");
  }
}

bool LockdownController::active_on(Day day) const {
  return std::any_of(episodes_.begin(), episodes_.end(), [&](const LockdownEpisode& e) {
    return day >= e.start && day < e.end;
  });
}

bool LockdownController::update(double theta, Day t) {
  if (active_on(t) || !(theta > params_.tau)) return false;
  LockdownEpisode episode;
  episode.start = t + 1;
  episode.end = mode_ == LockdownMode::kFixed ? t + 1 + *params_.lockdown_days
                                              : std::numeric_limits<Day>::max();
  episodes_.push_back(episode);
  return true;
}

void quarantine_update(AgentRoster& roster, std::span<const AgentId> new_positives,
                       Day t, const TriggerParams& params) {
  const Day until = t + 1 + params.quarantine_days;
  auto isolate = [&](AgentId i) {
    Agent& a = roster[i];
    if (a.quarantined_until > t) {
      a.quarantined_until = std::max(a.quarantined_until, until);
    } else {
      a.quarantined_from = t + 1;
      a.quarantined_until = until;
    }
  };
  for (AgentId p : new_positives) {
    isolate(p);
    for (AgentId c : roster.neighborhood_contacts(p)) isolate(c);
    for (AgentId c : roster.workplace_contacts(p)) isolate(c);
  }
}

std::string_view to_string(Intervention i) {
  switch (i) {
    case Intervention::kNone: return "none";
    case Intervention::kQuarantine: return "quarantine";
    case Intervention::kLockdownIndefinite: return "lockdown-indefinite";
    case Intervention::kLockdownFixed: return "lockdown-fixed";
  }
  return "?";
}

Intervention parse_intervention(std::string_view text) {
  if (text == "none") return Intervention::kNone;
  if (text == "quarantine") return Intervention::kQuarantine;
  if (text == "lockdown-indefinite") return Intervention::kLockdownIndefinite;
  if (text == "lockdown-fixed") return Intervention::kLockdownFixed;
  throw InputError("unknown intervention '" + std::string(text) + "'");
}

}  // namespace covsim
