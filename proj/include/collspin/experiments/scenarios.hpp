// Copyright 2026 The collspin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scenario configs compiled into the library from scenarios/*.json.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace collspin::experiments {

struct BundledScenario {
  std::string name;
  std::string json;
};

/// Sorted by name.
const std::vector<BundledScenario>& bundled_scenarios();

/// nullptr when no bundled scenario has this name.
const BundledScenario* find_bundled_scenario(std::string_view name);

}  // namespace collspin::experiments
