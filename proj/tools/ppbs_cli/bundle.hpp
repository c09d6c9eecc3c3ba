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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppbs/qubits.hpp"

namespace ppbs::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kBundleFormat = "ppbs-result";
inline constexpr int kBundleFormatVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scalar {
  double value = 0.0;
  std::optional<double> error;

  bool operator==(const Scalar&) const = default;
};

/// Row-major matrix with real and imaginary parts stored separately.
struct MatrixRecord {
  int rows = 0;
  int cols = 0;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  /// Alternative labelling (logical basis); empty when there is none.
  std::vector<std::string> row_labels_alt;
  std::vector<std::string> col_labels_alt;
  std::vector<double> re;
  std::vector<double> im;

  cplx at(int r, int c) const { return {re[r * cols + c], im[r * cols + c]}; }
  bool operator==(const MatrixRecord&) const = default;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool operator==(const Table&) const = default;
};

struct ResultBundle {
  nlohmann::json config;
  std::string pipeline;
  std::string tool_version = kToolVersion;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> timestamp;
  std::map<std::string, Scalar> scalars;
  std::map<std::string, MatrixRecord> matrices;
  std::map<std::string, Table> tables;

  bool operator==(const ResultBundle&) const = default;
};

MatrixRecord record_state(const Mat4& rho);
MatrixRecord record_chi(const Mat16& chi);
MatrixRecord record_real(const Eigen::MatrixXd& m, std::vector<std::string> row_labels,
                         std::vector<std::string> col_labels);
Mat4 state_matrix(const MatrixRecord& r);
Mat16 chi_matrix(const MatrixRecord& r);
Eigen::MatrixXd real_matrix(const MatrixRecord& r);

nlohmann::json to_json(const ResultBundle& bundle);
/// Throws ConfigError when the document is not a result bundle.
ResultBundle bundle_from_json(const nlohmann::json& j);

enum class OutputFormat { kText, kTable };

OutputFormat parse_format(const std::string& s);

/// Writes result.json (text) or one CSV per scalar set, matrix and table
/// (table). Returns the written paths. Throws IoError naming the path.
std::vector<std::filesystem::path> emit(const ResultBundle& bundle, OutputFormat format,
                                        const std::filesystem::path& dir);

ResultBundle read_bundle(const std::filesystem::path& path);

struct VerifyReport {
  int checked = 0;
  int mismatched = 0;
  std::vector<std::string> lines;

  bool ok() const { return mismatched == 0; }
};

/// Recomputes every derivable scalar from the embedded matrices.
VerifyReport verify(const ResultBundle& bundle, double tolerance = 1e-9);

}  // namespace ppbs::cli
