// Copyright 2026 The Anuvaad Authors
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

// Access to the committed metric fixtures.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace anuvaad::testing {

inline std::filesystem::path metric_fixture_dir() { return std::filesystem::path(ANUVAAD_FIXTURE_DIR) / "metrics"; }

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

struct MetricFixture {
  std::string name;
  std::vector<std::string> refs, hyps, hyps_b;
  nlohmann::json expected;
};

inline nlohmann::json expected_metrics() {
  std::ifstream in(metric_fixture_dir() / "expected.json");
  return nlohmann::json::parse(in);
}

inline std::vector<MetricFixture> metric_fixtures() {
  const nlohmann::json all = expected_metrics();
  std::vector<MetricFixture> out;
  for (const auto& [name, exp] : all.at("fixtures").items()) {
    const auto dir = metric_fixture_dir() / name;
    out.push_back({name, read_lines(dir / "ref.txt"), read_lines(dir / "hyp.txt"), read_lines(dir / "hyp_b.txt"), exp});
  }
  return out;
}

}  // namespace anuvaad::testing
