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

#include "covsim/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace covsim {

std::vector<double> smooth_series(std::span<const double> series, int window) {
  if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t lo = i + 1 >= std::size_t(window) ? i + 1 - window : 0;
    double s = 0.0;
    for (std::size_t j = lo; j <= i; ++j) s += series[j];
    out[i] = s / double(i + 1 - lo);
  }
  return out;
}

double estimate_ground_truth(double symptomatic, double positives, double tests) {
  if (tests < 0) throw std::invalid_argument("tests must be >= 0");
  if (tests == 0) return 0.0;
  return symptomatic * positives / tests;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), end);
}

void write_timeseries(std::ostream& os, const RunOutput& output) {
  os << "day";
  for (const auto& [name, member] : kTimeseriesColumns) os << ',' << name;
  os << '\n';
  for (std::size_t d = 0; d < output.days(); ++d) {
    os << d + 1;
    for (const auto& [name, member] : kTimeseriesColumns) {
      os << ',' << format_number((output.*member)[d]);
    }
    os << '\n';
  }
}

void write_timeseries(std::ostream& os, const BatchOutput& batch) {
  os << "day";
  for (const auto& [name, member] : kTimeseriesColumns) {
    os << ',' << name << "_mean," << name << "_std";
  }
  os << '\n';
  for (std::size_t d = 0; d < batch.mean.days(); ++d) {
    os << d + 1;
    for (const auto& [name, member] : kTimeseriesColumns) {
      os << ',' << format_number((batch.mean.*member)[d]) << ','
         << format_number((batch.stddev.*member)[d]);
    }
    os << '\n';
  }
}

void write_geo(std::ostream& os, const RunOutput& output, int window) {
  os << "day,locality,active_I,positives_last_8_days\n";
  const std::size_t localities = output.locality_ids.size();
  for (std::size_t d = 0; d < output.days(); ++d) {
    const std::size_t lo = d + 1 >= std::size_t(window) ? d + 1 - window : 0;
    for (std::size_t l = 0; l < localities; ++l) {
      double recent = 0.0;
      for (std::size_t k = lo; k <= d; ++k) recent += output.positives_by_locality[k][l];
      os << d + 1 << ',' << output.locality_ids[l] << ','
         << format_number(output.active_by_locality[d][l]) << ','
         << format_number(recent) << '\n';
    }
  }
}

namespace {

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  writer(os);
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void export_timeseries(const RunOutput& output, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& os) { write_timeseries(os, output); });
}

void export_timeseries(const BatchOutput& batch, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& os) { write_timeseries(os, batch); });
}

void export_geo(const RunOutput& output, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& os) { write_geo(os, output); });
}

void export_geo(const BatchOutput& batch, const std::filesystem::path& path) {
  export_geo(batch.mean, path);
}

}  // namespace covsim
