// Copyright 2026 The momsnet Authors.
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

#include <cstddef>
#include <functional>
#include <string_view>

namespace moms {

// Worker count for internal parallel loops. Reads MOMS_THREADS once; falls
// back to the hardware concurrency. Always >= 1.
std::size_t worker_count();

// Runs body(i) for i in [0, n) over up to worker_count() threads using static
// contiguous chunks. Bodies must write only to slots owned by their index so
// results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Diagnostics go to stderr; stdout is reserved for command output.
void log_warning(std::string_view message);
void log_info(std::string_view message);

// Silences log_info/log_warning (tests flip this to keep output readable).
void set_quiet(bool quiet);

}  // namespace moms
