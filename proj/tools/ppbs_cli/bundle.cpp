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

#include "ppbs_cli/bundle.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ppbs/metrics.hpp"
#include "ppbs/tomography.hpp"

namespace ppbs::cli {
namespace {

using nlohmann::json;

std::vector<std::string> basis_labels(bool logical) {
  std::vector<std::string> out;
  for (int i = 0; i < 4; ++i) out.push_back(logical ? logical_label(i) : polarization_label(i));
  return out;
}

template <typename M>
MatrixRecord record_complex(const M& m) {
  MatrixRecord r;
  r.rows = static_cast<int>(m.rows());
  r.cols = static_cast<int>(m.cols());
  for (int i = 0; i < r.rows; ++i) {
    for (int j = 0; j < r.cols; ++j) {
      r.re.push_back(m(i, j).real());
      r.im.push_back(m(i, j).imag());
    }
  }
  return r;
}

void check_shape(const MatrixRecord& r, int rows, int cols, const char* what) {
  if (r.rows != rows || r.cols != cols ||
      r.re.size() != static_cast<std::size_t>(rows * cols) ||
      r.im.size() != static_cast<std::size_t>(rows * cols)) {
    throw ConfigError(std::string("bundle matrix has the wrong shape for ") + what);
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("error while writing " + path.string());
}

std::string label_at(const std::vector<std::string>& labels, int i) {
  return i < static_cast<int>(labels.size()) ? labels[i] : std::string();
}

}  // namespace

MatrixRecord record_state(const Mat4& rho) {
  MatrixRecord r = record_complex(rho);
  r.row_labels = r.col_labels = basis_labels(false);
  r.row_labels_alt = r.col_labels_alt = basis_labels(true);
  return r;
}

MatrixRecord record_chi(const Mat16& chi) {
  MatrixRecord r = record_complex(chi);
  const auto& labels = pauli2_labels();
  r.row_labels.assign(labels.begin(), labels.end());
  r.col_labels = r.row_labels;
  return r;
}

MatrixRecord record_real(const Eigen::MatrixXd& m, std::vector<std::string> row_labels,
                         std::vector<std::string> col_labels) {
  MatrixRecord r;
  r.rows = static_cast<int>(m.rows());
  r.cols = static_cast<int>(m.cols());
  for (int i = 0; i < r.rows; ++i) {
    for (int j = 0; j < r.cols; ++j) {
      r.re.push_back(m(i, j));
      r.im.push_back(0.0);
    }
  }
  r.row_labels = std::move(row_labels);
  r.col_labels = std::move(col_labels);
  return r;
}

Mat4 state_matrix(const MatrixRecord& r) {
  check_shape(r, 4, 4, "a density matrix");
  Mat4 m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = r.at(i, j);
  }
  return m;
}

Mat16 chi_matrix(const MatrixRecord& r) {
  check_shape(r, 16, 16, "a chi matrix");
  Mat16 m;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) m(i, j) = r.at(i, j);
  }
  return m;
}

Eigen::MatrixXd real_matrix(const MatrixRecord& r) {
  Eigen::MatrixXd m(r.rows, r.cols);
  for (int i = 0; i < r.rows; ++i) {
    for (int j = 0; j < r.cols; ++j) m(i, j) = r.re.at(i * r.cols + j);
  }
  return m;
}

json to_json(const ResultBundle& b) {
  json j;
  j["format"] = kBundleFormat;
  j["format_version"] = kBundleFormatVersion;
  j["pipeline"] = b.pipeline;
  j["config"] = b.config;
  j["provenance"] = {{"tool", "ppbs"},
                     {"version", b.tool_version},
                     {"seed", b.seed ? json(*b.seed) : json(nullptr)},
                     {"timestamp", b.timestamp ? json(*b.timestamp) : json(nullptr)}};
  json scalars = json::object();
  for (const auto& [name, s] : b.scalars) {
    scalars[name] = {{"value", s.value}, {"error", s.error ? json(*s.error) : json(nullptr)}};
  }
  j["scalars"] = scalars;
  json matrices = json::object();
  for (const auto& [name, m] : b.matrices) {
    json mj = {{"rows", m.rows},           {"cols", m.cols},
               {"row_labels", m.row_labels}, {"col_labels", m.col_labels},
               {"re", m.re},               {"im", m.im}};
    if (!m.row_labels_alt.empty()) mj["row_labels_logical"] = m.row_labels_alt;
    if (!m.col_labels_alt.empty()) mj["col_labels_logical"] = m.col_labels_alt;
    matrices[name] = mj;
  }
  j["matrices"] = matrices;
  json tables = json::object();
  for (const auto& [name, t] : b.tables) tables[name] = {{"columns", t.columns}, {"rows", t.rows}};
  j["tables"] = tables;
  return j;
}

ResultBundle bundle_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kBundleFormat) {
      throw ConfigError("not a ppbs result bundle");
    }
    if (j.at("format_version").get<int>() != kBundleFormatVersion) {
      throw ConfigError("unsupported bundle format version");
    }
    ResultBundle b;
    b.pipeline = j.at("pipeline").get<std::string>();
    b.config = j.at("config");
    const auto& prov = j.at("provenance");
    b.tool_version = prov.at("version").get<std::string>();
    if (!prov.at("seed").is_null()) b.seed = prov.at("seed").get<std::uint64_t>();
    if (!prov.at("timestamp").is_null()) b.timestamp = prov.at("timestamp").get<std::string>();
    for (const auto& [name, s] : j.at("scalars").items()) {
      Scalar sc;
      sc.value = s.at("value").get<double>();
      if (!s.at("error").is_null()) sc.error = s.at("error").get<double>();
      b.scalars[name] = sc;
    }
    for (const auto& [name, m] : j.at("matrices").items()) {
      MatrixRecord r;
      r.rows = m.at("rows").get<int>();
      r.cols = m.at("cols").get<int>();
      r.row_labels = m.at("row_labels").get<std::vector<std::string>>();
      r.col_labels = m.at("col_labels").get<std::vector<std::string>>();
      if (m.contains("row_labels_logical")) r.row_labels_alt = m["row_labels_logical"].get<std::vector<std::string>>();
      if (m.contains("col_labels_logical")) r.col_labels_alt = m["col_labels_logical"].get<std::vector<std::string>>();
      r.re = m.at("re").get<std::vector<double>>();
      r.im = m.at("im").get<std::vector<double>>();
      if (r.re.size() != static_cast<std::size_t>(r.rows * r.cols) || r.im.size() != r.re.size()) {
        throw ConfigError("matrix '" + name + "' has inconsistent dimensions");
      }
      b.matrices[name] = std::move(r);
    }
    for (const auto& [name, t] : j.at("tables").items()) {
      Table tab;
      tab.columns = t.at("columns").get<std::vector<std::string>>();
      tab.rows = t.at("rows").get<std::vector<std::vector<double>>>();
      b.tables[name] = std::move(tab);
    }
    return b;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed result bundle: ") + e.what());
  }
}

OutputFormat parse_format(const std::string& s) {
  if (s == "text") return OutputFormat::kText;
  if (s == "table") return OutputFormat::kTable;
  throw ConfigError("unknown output format '" + s + "' (expected text or table)");
}

std::vector<std::filesystem::path> emit(const ResultBundle& bundle, OutputFormat format,
                                        const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  if (format == OutputFormat::kText) {
    const auto path = dir / "result.json";
    auto out = open_for_write(path);
    out << to_json(bundle).dump(2) << "\n";
    finish(out, path);
    written.push_back(path);
    return written;
  }

  {
    const auto path = dir / "scalars.csv";
    auto out = open_for_write(path);
    out << "name,value,error\n";
    for (const auto& [name, s] : bundle.scalars) {
      out << csv_escape(name) << "," << s.value << ",";
      if (s.error) out << *s.error;
      out << "\n";
    }
    finish(out, path);
    written.push_back(path);
  }
  for (const auto& [name, m] : bundle.matrices) {
    const auto path = dir / (name + ".csv");
    auto out = open_for_write(path);
    out << "row,col,row_label,col_label,row_label_logical,col_label_logical,re,im\n";
    for (int i = 0; i < m.rows; ++i) {
      for (int j = 0; j < m.cols; ++j) {
        out << i << "," << j << "," << csv_escape(label_at(m.row_labels, i)) << ","
            << csv_escape(label_at(m.col_labels, j)) << ","
            << csv_escape(label_at(m.row_labels_alt, i)) << ","
            << csv_escape(label_at(m.col_labels_alt, j)) << "," << m.re[i * m.cols + j] << ","
            << m.im[i * m.cols + j] << "\n";
      }
    }
    finish(out, path);
    written.push_back(path);
  }
  for (const auto& [name, t] : bundle.tables) {
    const auto path = dir / (name + ".csv");
    auto out = open_for_write(path);
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << csv_escape(t.columns[c]);
    out << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
      out << "\n";
    }
    finish(out, path);
    written.push_back(path);
  }
  return written;
}

ResultBundle read_bundle(const std::filesystem::path& path) {
  std::filesystem::path file = path;
  if (std::filesystem::is_directory(file)) file /= "result.json";
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + file.string() + ": " + e.what());
  }
  return bundle_from_json(j);
}

VerifyReport verify(const ResultBundle& bundle, double tolerance) {
  VerifyReport report;
  auto check = [&](const std::string& name, const std::function<double()>& recompute) {
    const auto it = bundle.scalars.find(name);
    if (it == bundle.scalars.end()) return;
    const double fresh = recompute();
    const double diff = std::abs(fresh - it->second.value);
    ++report.checked;
    const bool ok = diff <= tolerance;
    if (!ok) ++report.mismatched;
    std::ostringstream line;
    line << std::setprecision(12) << (ok ? "ok       " : "MISMATCH ") << name
         << " stored=" << it->second.value << " recomputed=" << fresh;
    report.lines.push_back(line.str());
  };
  auto has = [&](const std::string& m) { return bundle.matrices.count(m) > 0; };
  auto chi = [&](const std::string& m) { return ChiMatrix(chi_matrix(bundle.matrices.at(m))); };
  auto state = [&](const std::string& m) {
    return TwoQubitState(state_matrix(bundle.matrices.at(m)));
  };

  try {
    if (has("chi")) {
      check("process_fidelity", [&] { return process_fidelity(chi("chi"), chi_ideal_cz()); });
      check("average_gate_fidelity", [&] {
        return average_gate_fidelity(process_fidelity(chi("chi"), chi_ideal_cz()));
      });
      check("chi_II_II", [&] { return chi("chi")(0, 0).real(); });
    }
    if (has("chi_corrected")) {
      check("process_fidelity_optimized",
            [&] { return process_fidelity(chi("chi_corrected"), chi_ideal_cz()); });
      check("average_gate_fidelity_optimized", [&] {
        return average_gate_fidelity(process_fidelity(chi("chi_corrected"), chi_ideal_cz()));
      });
    }
    if (has("rho_est")) {
      check("tangle", [&] { return tangle(state("rho_est")); });
      check("linear_entropy", [&] { return linear_entropy(state("rho_est")); });
      check("purity", [&] { return state("rho_est").purity(); });
      if (has("rho_true")) {
        check("fidelity", [&] { return state_fidelity(state("rho_est"), state("rho_true")); });
      }
    }
    if (has("rho_out")) {
      check("output_tangle", [&] { return tangle(state("rho_out")); });
      check("output_linear_entropy", [&] { return linear_entropy(state("rho_out")); });
      if (has("rho_ideal_out")) {
        check("fidelity_to_ideal",
              [&] { return state_fidelity(state("rho_out"), state("rho_ideal_out")); });
      }
    }
    if (has("rho_in")) {
      check("input_tangle", [&] { return tangle(state("rho_in")); });
      check("input_linear_entropy", [&] { return linear_entropy(state("rho_in")); });
    }
    if (has("truth_table")) {
      check("truth_table_mean_diagonal",
            [&] { return real_matrix(bundle.matrices.at("truth_table")).diagonal().mean(); });
    }
    if (has("mutual_fidelity")) {
      check("mutual_fidelity_mean",
            [&] { return mean_off_diagonal(real_matrix(bundle.matrices.at("mutual_fidelity"))); });
    }
  } catch (const DomainError& e) {
    ++report.mismatched;
    report.lines.push_back(std::string("INVALID  embedded matrix: ") + e.what());
  }
  return report;
}

}  // namespace ppbs::cli
