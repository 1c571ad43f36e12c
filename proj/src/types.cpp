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

#include "covsim/types.hpp"

#include <cmath>

namespace covsim {

const char* to_string(CovidState s) {
  switch (s) {
    case CovidState::kS: return "S";
    case CovidState::kE: return "E";
    case CovidState::kI: return "I";
    case CovidState::kR: return "R";
  }
  return "?";
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError("invalid parameter: " + what);
}

bool unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

void SimParams::validate() const {
  require(unit_interval(p), "p must lie in [0,1]");
  require(unit_interval(fn_rate), "fn_rate must lie in [0,1]");
  require(t_ei >= 1.0 && t_ir >= 1.0 && t_si >= 1.0 && t_is >= 1.0,
          "dwell times must be >= 1");
  require(k_nr >= 0 && k_nf >= 0 && k_wr >= 0 && k_wf >= 0,
          "contact counts must be >= 0");
  require(horizon >= 1, "horizon must be >= 1");
  require(budget >= 0, "budget must be >= 0");
}

}  // namespace covsim
