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

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "covsim/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"covsim: agent-based COVID testing-policy simulator"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  covsim::RunCommand run;
  auto* run_cmd = app.add_subcommand("run", "Run a batch of simulations and write CSVs");
  run_cmd->add_option("--config", run.config, "Run config (JSON)")->required();
  run_cmd->add_option("--out", run.out_dir, "Output directory")->required();
  run_cmd->add_option("--set", run.overrides, "Override, e.g. budget=200 or params.p=0.05");
  run_cmd->add_option("--threads", run.threads, "Worker threads for batch runs")
      ->check(CLI::PositiveNumber);

  covsim::GridSpec grid;
  std::string weights = "uniform";
  std::string city_out;
  auto* gen_cmd = app.add_subcommand("gencity", "Write a synthetic grid city file");
  gen_cmd->add_option("--rows", grid.rows)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--cols", grid.cols)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out", city_out)->required();
  gen_cmd->add_option("--seed", grid.seed);
  gen_cmd->add_option("--weights", weights)->check(CLI::IsMember({"uniform", "random"}));
  gen_cmd->add_option("--destinations", grid.destinations);
  gen_cmd->add_option("--no-visit", grid.no_visit);

  covsim::CompareCommand compare;
  std::vector<std::string> compare_configs;
  auto* cmp_cmd = app.add_subcommand("compare", "Run several configs and merge their series");
  cmp_cmd->add_option("configs", compare_configs, "Config files")->required()->expected(2, -1);
  cmp_cmd->add_option("--out", compare.out, "Merged CSV path")->required();
  cmp_cmd->add_option("--set", compare.overrides, "Override applied to every config");
  cmp_cmd->add_option("--threads", compare.threads)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  if (quiet) spdlog::set_level(spdlog::level::err);

  if (*run_cmd) return covsim::cmd_run(run, std::cerr);
  if (*gen_cmd) {
    grid.weights = weights == "random" ? covsim::WeightFn::kRandom : covsim::WeightFn::kUniform;
    return covsim::cmd_gencity(grid, city_out, std::cerr);
  }
  compare.configs.assign(compare_configs.begin(), compare_configs.end());
  return covsim::cmd_compare(compare, std::cerr);
}
