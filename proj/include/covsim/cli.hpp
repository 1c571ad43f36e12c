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
#include <string>
#include <vector>

#include "covsim/city.hpp"

namespace covsim {

struct RunCommand {
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::vector<std::string> overrides;
  int threads = 1;
};

struct CompareCommand {
  std::vector<std::filesystem::path> configs;
  std::filesystem::path out;
  std::vector<std::string> overrides;
  int threads = 1;
};

// Each returns a process exit code and reports failures on `err`.
int cmd_run(const RunCommand& cmd, std::ostream& err);
int cmd_gencity(const GridSpec& spec, const std::filesystem::path& out, std::ostream& err);
int cmd_compare(const CompareCommand& cmd, std::ostream& err);

}  // namespace covsim
