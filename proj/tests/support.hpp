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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "covsim/city.hpp"
#include "covsim/types.hpp"

namespace covsim::testutil {

inline CityModel grid(int rows, int cols, double no_visit = 0.5, int destinations = 4,
                      WeightFn weights = WeightFn::kUniform, std::uint64_t seed = 3) {
  GridSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.weights = weights;
  spec.seed = seed;
  spec.destinations = destinations;
  spec.no_visit = no_visit;
  return generate_grid_city(spec);
}

// True when `hits` out of `trials` is within k binomial standard deviations of p.
inline bool within_sigma(std::size_t hits, std::size_t trials, double p, double k = 3.0) {
  const double n = double(trials);
  const double sigma = std::sqrt(n * p * (1.0 - p));
  return std::abs(double(hits) - n * p) <= k * sigma + 1e-9;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("covsim-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace covsim::testutil
