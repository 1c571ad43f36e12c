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

#include "covsim/cli.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <nlohmann/json.hpp>

#include "covsim/config.hpp"
#include "covsim/engine.hpp"
#include "covsim/report.hpp"

namespace covsim {

namespace {

namespace fs = std::filesystem;

// Writes every file under a temporary name first so a failure leaves
// nothing behind.
void commit_files(const std::vector<std::pair<fs::path, std::string>>& files) {
  std::vector<fs::path> staged;
  auto discard = [&] {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
  };
  try {
    for (const auto& [path, body] : files) {
      fs::path tmp = path;
      tmp += ".partial";
      staged.push_back(tmp);
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw std::runtime_error("cannot write " + path.string());
      os << body;
      os.flush();
      if (!os) throw std::runtime_error("write failed: " + path.string());
    }
    for (std::size_t i = 0; i < files.size(); ++i) fs::rename(staged[i], files[i].first);
  } catch (...) {
    discard();
    throw;
  }
}

RunConfig load_for_cli(const fs::path& path, const std::vector<std::string>& overrides) {
  if (!fs::exists(path)) throw InputError("config file not found: " + path.string());
  RunConfig cfg = load_config(path, overrides);
  if (cfg.city.file) cfg.city.file = fs::absolute(*cfg.city.file).lexically_normal();
  return cfg;
}

// Everything except the policy and intervention choices, which compare may vary.
nlohmann::json comparable_part(const RunConfig& cfg) {
  auto doc = config_to_json(cfg);
  for (const char* key : {"policy", "lbt", "intervention", "trigger"}) doc.erase(key);
  return doc;
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    body();
    return 0;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_run(const RunCommand& cmd, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_for_cli(cmd.config, cmd.overrides);
    const BatchOutput batch = run_batch(cfg, cmd.threads);

    std::ostringstream ts, geo;
    if (cfg.runs == 1) {
      write_timeseries(ts, batch.mean);
    } else {
      write_timeseries(ts, batch);
    }
    write_geo(geo, batch.mean);
    fs::create_directories(cmd.out_dir);
    commit_files({{cmd.out_dir / "timeseries.csv", ts.str()},
                  {cmd.out_dir / "geo.csv", geo.str()},
                  {cmd.out_dir / "config.resolved.json", config_to_json(cfg).dump(2) + "\n"}});
  });
}

int cmd_gencity(const GridSpec& spec, const fs::path& out, std::ostream& err) {
  return guarded(err, [&] {
    const CityModel city = generate_grid_city(spec);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    commit_files({{out, city_to_json(city).dump(1) + "\n"}});
  });
}

int cmd_compare(const CompareCommand& cmd, std::ostream& err) {
  return guarded(err, [&] {
    if (cmd.configs.size() < 2) throw InputError("compare needs at least two configs");
    std::vector<RunConfig> configs;
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& path : cmd.configs) {
      configs.push_back(load_for_cli(path, cmd.overrides));
      std::string label = path.stem().string();
      for (int k = 2; seen.contains(label); ++k) label = path.stem().string() + "_" + std::to_string(k);
      seen.insert(label);
      labels.push_back(label);
    }
    const auto reference = comparable_part(configs.front());
    for (std::size_t i = 1; i < configs.size(); ++i) {
      const auto diff = nlohmann::json::diff(reference, comparable_part(configs[i]));
      if (!diff.empty()) {
        throw InputError("config " + cmd.configs[i].string() +
                         " differs from " + cmd.configs.front().string() +
                         " outside policy/intervention at " +
                         diff.front().value("path", std::string("?")));
      }
    }

    std::vector<BatchOutput> batches;
    for (const auto& cfg : configs) batches.push_back(run_batch(cfg, cmd.threads));

    std::ostringstream os;
    os << "day";
    for (const auto& label : labels) {
      for (const auto& [name, member] : kTimeseriesColumns) {
        os << ',' << label << '.' << name << "_mean," << label << '.' << name << "_std";
      }
    }
    os << '\n';
    for (std::size_t d = 0; d < batches.front().mean.days(); ++d) {
      os << d + 1;
      for (const auto& b : batches) {
        for (const auto& [name, member] : kTimeseriesColumns) {
          os << ',' << format_number((b.mean.*member)[d]) << ','
             << format_number((b.stddev.*member)[d]);
        }
      }
      os << '\n';
    }
    if (cmd.out.has_parent_path()) fs::create_directories(cmd.out.parent_path());
    commit_files({{cmd.out, os.str()}});
  });
}

}  // namespace covsim
