// Copyright 2026 The ppbs Authors
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

// Line-oriented count files:
//
//   # ppbs-counts 1
//   HD 1234 100000 987654321
//
// One record per line: setting label, count, total scale, stream seed.
// Blank lines and further '#' lines are ignored.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ppbs/tomography.hpp"

namespace ppbs::cli {

void write_counts(std::ostream& out, const std::vector<CountRecord>& records);
void write_counts(const std::filesystem::path& path, const std::vector<CountRecord>& records);

/// Throws ConfigError on malformed content, IoError when unreadable.
std::vector<CountRecord> read_counts(std::istream& in);
std::vector<CountRecord> read_counts(const std::filesystem::path& path);

}  // namespace ppbs::cli
