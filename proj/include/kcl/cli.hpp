// Copyright 2026 The KCL Workbench Authors
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

#pragma once

#include <string>
#include <vector>

namespace kcl {

/// Exit codes: 0 success / all checks passed, 1 usage or IO error,
/// 2 a bound or assumption check failed.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace kcl
