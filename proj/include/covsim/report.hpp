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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "covsim/engine.hpp"

namespace covsim {

/// Trailing mean; the first window-1 entries average over what is available.
std::vector<double> smooth_series(std::span<const double> series, int window);

/// symptomatic * positives / tests, or 0 when no tests were run.
double estimate_ground_truth(double symptomatic, double positives, double tests);

/// Shortest decimal that round-trips; integral values print without a point.
std::string format_number(double value);

void write_timeseries(std::ostream& os, const RunOutput& output);
void write_timeseries(std::ostream& os, const BatchOutput& batch);
void write_geo(std::ostream& os, const RunOutput& output, int window = 8);

void export_timeseries(const RunOutput& output, const std::filesystem::path& path);
void export_timeseries(const BatchOutput& batch, const std::filesystem::path& path);
// Batches export the per-day mean.
void export_geo(const RunOutput& output, const std::filesystem::path& path);
void export_geo(const BatchOutput& batch, const std::filesystem::path& path);

}  // namespace covsim
