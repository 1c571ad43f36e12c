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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace covsim {

using AgentId = std::uint32_t;
// Dense index into CityModel::localities (not the id written in city files).
using LocalityId = std::uint32_t;
// Index into CityModel::destinations.
using DestinationId = std::uint32_t;
// Simulation days are numbered 1..horizon; day 0 is the seeded initial state.
using Day = std::int32_t;

enum class CovidState : std::uint8_t { kS, kE, kI, kR };
enum class FluState : std::uint8_t { kS, kI };

const char* to_string(CovidState s);

/// Malformed input: city files, run configs, command-line overrides.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Disease, contact and testing-budget parameters of a run.
struct SimParams {
  double p = 0.1;       // per-meeting infection probability
  double t_ei = 1.0;    // mean E -> I dwell (days)
  double t_ir = 8.0;    // mean I -> R dwell
  double t_si = 50.0;   // mean flu S -> I dwell
  double t_is = 8.0;    // mean flu I -> S dwell
  int k_nr = 1;         // random neighborhood meetings per day
  int k_nf = 5;         // fixed neighborhood contacts
  int k_wr = 2;         // random workplace meetings per day
  int k_wf = 10;        // fixed workplace contacts
  Day horizon = 100;
  int budget = 50;      // tests per day
  double fn_rate = 0.0; // false-negative probability

  /// Throws InputError if any field is out of range.
  void validate() const;
};

}  // namespace covsim
