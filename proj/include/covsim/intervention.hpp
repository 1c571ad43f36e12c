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

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "covsim/city.hpp"
#include "covsim/testing.hpp"
#include "covsim/types.hpp"

namespace covsim {

struct TriggerParams {
  double tau = 0.5;          // slope threshold
  int chord = 10;            // chord length, days
  int window = 8;            // smoothing window, days
  int quarantine_days = 10;
  std::optional<int> lockdown_days = 14;  // fixed-duration episodes

  void validate() const;
};

/// Trailing mean of P over days max(1, t-window+1)..t. `daily_positives[d-1]`
/// holds P(d).
double smoothed_positives(std::span<const double> daily_positives, Day t, int window);
double smoothed_positives(const TestingHistory& history, Day t, int window);

/// theta(t) = (Pbar(t) - Pbar(t - chord)) / chord, and 0 while t <= chord.
double chord_slope(std::span<const double> daily_positives, Day t,
                   const TriggerParams& params);
double chord_slope(const TestingHistory& history, Day t,
                   const TriggerParams& params);

enum class LockdownMode { kIndefinite, kFixed };

struct LockdownEpisode {
  Day start = 0;
  Day end = 0;  // exclusive
};

/// City-wide lockdown driven by the smoothed-slope trigger. A trigger on day
/// t locks down from day t+1. The trigger is not evaluated on days when a
/// lockdown is in force; fixed episodes re-arm it once they end.
class LockdownController {
 public:
  LockdownController(LockdownMode mode, const TriggerParams& params);

  bool active_on(Day day) const;
  /// Feeds theta(t); returns true if a new episode starts on t + 1.
  bool update(double theta, Day t);
  std::span<const LockdownEpisode> episodes() const { return episodes_; }

 private:
  LockdownMode mode_;
  TriggerParams params_;
  std::vector<LockdownEpisode> episodes_;
};

/// Quarantines each positive of day t and all its fixed contacts for days
/// t+1 .. t+quarantine_days. Existing quarantines only ever get longer.
void quarantine_update(AgentRoster& roster, std::span<const AgentId> new_positives,
                       Day t, const TriggerParams& params);

enum class Intervention { kNone, kQuarantine, kLockdownIndefinite, kLockdownFixed };

std::string_view to_string(Intervention i);
Intervention parse_intervention(std::string_view text);

}  // namespace covsim
