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
#include <limits>

namespace covsim {

// Every random decision in a run is drawn from its own counter-based stream,
// keyed by (seed, purpose, day, subject). Results therefore do not depend on
// the order in which agents are visited or on how work is split over threads.
enum class Stream : std::uint32_t {
  kCityWeights = 1,
  kVisitPlace,
  kNeighborhoodContacts,
  kWorkplaceContacts,
  kFluInit,
  kSeeding,
  kReportingPartition,
  kRandomNeighborhood,
  kRandomWorkplace,
  kTransmission,
  kCovidStep,
  kFluStep,
  kReporting,
  kTestResult,
  kPolicy,
};

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t value) {
  return mix64(key + kGoldenGamma + mix64(value));
}

/// Child seed for run `index` of a batch.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return combine(mix64(master ^ 0x6a09e667f3bcc909ULL), index);
}

/// SplitMix64 sequence started at a fixed key. Satisfies
/// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGoldenGamma);
  }

  constexpr std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

class RandomStreams {
 public:
  constexpr explicit RandomStreams(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t seed() const { return seed_; }

  constexpr CounterRng stream(Stream purpose, std::int64_t day,
                              std::uint64_t subject,
                              std::uint64_t extra = 0) const {
    std::uint64_t k = combine(seed_, static_cast<std::uint64_t>(purpose));
    k = combine(k, static_cast<std::uint64_t>(day));
    k = combine(k, subject);
    k = combine(k, extra);
    return CounterRng(k);
  }

 private:
  std::uint64_t seed_;
};

/// Uniform double in [0, 1) with 53 random bits.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

template <class Rng>
bool bernoulli(Rng& rng, double p) {
  return uniform01(rng) < p;
}

}  // namespace covsim
