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

#include "ppbs_cli/counts_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "ppbs_cli/bundle.hpp"

namespace ppbs::cli {

namespace {
constexpr const char* kMagic = "# ppbs-counts 1";
}

void write_counts(std::ostream& out, const std::vector<CountRecord>& records) {
  out << kMagic << "\n# setting count total_scale seed\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : records) {
    out << r.setting.label() << " " << r.count << " " << r.total_scale << " " << r.rng_seed << "\n";
  }
}

void write_counts(const std::filesystem::path& path, const std::vector<CountRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_counts(out, records);
  out.flush();
  if (!out) throw IoError("error while writing " + path.string());
}

std::vector<CountRecord> read_counts(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kMagic, 0) != 0) {
    throw ConfigError("count file must start with '" + std::string(kMagic) + "'");
  }
  std::vector<CountRecord> records;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string label;
    std::string count;
    CountRecord r;
    if (!(fields >> label >> count >> r.total_scale >> r.rng_seed)) {
      throw ConfigError("count file line " + std::to_string(lineno) + ": expected 4 fields");
    }
    // operator>> on unsigned happily wraps "-5"; reject signs explicitly
    if (count.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("count file line " + std::to_string(lineno) + ": bad count '" + count + "'");
    }
    r.count = std::stoull(count);
    const auto setting = MeasurementSetting::parse(label);
    if (!setting) {
      throw ConfigError("count file line " + std::to_string(lineno) + ": bad setting '" + label + "'");
    }
    r.setting = *setting;
    std::string extra;
    if (fields >> extra) {
      throw ConfigError("count file line " + std::to_string(lineno) + ": trailing field");
    }
    records.push_back(r);
  }
  if (records.empty()) throw ConfigError("count file holds no records");
  return records;
}

std::vector<CountRecord> read_counts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return read_counts(in);
}

}  // namespace ppbs::cli
