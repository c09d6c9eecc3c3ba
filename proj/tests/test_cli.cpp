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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "ppbs/errors.hpp"
#include "ppbs_cli/bundle.hpp"
#include "ppbs_cli/counts_io.hpp"
#include "ppbs_cli/runner.hpp"

namespace ppbs::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            ("ppbs_test_" + std::string(info->test_suite_name()) + "_" + info->name() + "_" +
             std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int ppbs_exit(const std::string& args) {
  const std::string cmd = std::string(PPBS_EXECUTABLE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig config(Pipeline p, const json& j = json::object()) {
  return config_from_json(j, p);
}

double scalar(const RunOutput& out, const std::string& name) {
  return out.bundle.scalars.at(name).value;
}

TEST(Bundle, JsonRoundTripIsBitExact) {
  ResultBundle b;
  b.pipeline = "simulate";
  b.config = {{"gate", {{"eta", {0.1, 0.2, 0.3}}}}, {"seed", 5}};
  b.seed = 18446744073709551615ull;
  b.timestamp = "2026-01-01T00:00:00Z";
  b.scalars["tiny"] = {std::numeric_limits<double>::denorm_min(), 1e-300};
  b.scalars["negzero"] = {-0.0, std::nullopt};
  b.scalars["third"] = {1.0 / 3.0, 0.1 + 0.2};
  MatrixRecord m = record_state(Mat4::Identity() / 4.0);
  m.re[1] = std::nextafter(0.25, 1.0);
  m.im[2] = -1.0 / 7.0;
  b.matrices["rho"] = m;
  b.tables["t"] = {{"x", "y"}, {{1.0, 2.5}, {std::numeric_limits<double>::max(), -1e-17}}};

  const ResultBundle back = bundle_from_json(json::parse(to_json(b).dump()));
  EXPECT_EQ(back, b);
  EXPECT_TRUE(std::signbit(back.scalars.at("negzero").value));

  TempDir dir;
  emit(b, OutputFormat::kText, dir.path());
  EXPECT_EQ(read_bundle(dir.path()), b);
}

TEST(Bundle, RejectsForeignDocuments) {
  EXPECT_THROW(bundle_from_json(json{{"format", "other"}}), ConfigError);
  ResultBundle b;
  json j = to_json(b);
  j["format_version"] = 99;
  EXPECT_THROW(bundle_from_json(j), ConfigError);
  j = to_json(b);
  j["matrices"]["bad"] = {{"rows", 2}, {"cols", 2}, {"row_labels", json::array()},
                          {"col_labels", json::array()}, {"re", {1.0}}, {"im", {0.0}}};
  EXPECT_THROW(bundle_from_json(j), ConfigError);
}

TEST(Bundle, TableFormatWritesChiRowMajor) {
  TempDir dir;
  const RunOutput out = run(config(Pipeline::kProcessTomography));
  const auto written = emit(out.bundle, OutputFormat::kTable, dir.path());
  EXPECT_FALSE(written.empty());
  std::ifstream in(dir / "chi_ideal.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "row,col,row_label,col_label,row_label_logical,col_label_logical,re,im");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 12), "0,0,II,II,,,");
  EXPECT_NEAR(std::stod(line.substr(12)), 0.25, 1e-15);
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 10), "0,1,II,IX,");  // column index runs fastest
  int rows = 2;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 256);
  const std::string scalars = slurp(dir / "scalars.csv");
  EXPECT_EQ(scalars.substr(0, scalars.find('\n')), "name,value,error");
}

TEST(Bundle, StateMatricesCarryBothLabelSets) {
  const MatrixRecord r = record_state(Mat4::Identity() / 4.0);
  EXPECT_EQ(r.row_labels[0], "VV");
  EXPECT_EQ(r.row_labels_alt[3], "11");
  EXPECT_EQ(r.rows, 4);
}

TEST(Bundle, UnwritableDirectoryNamesPath) {
  ResultBundle b;
  try {
    emit(b, OutputFormat::kText, "/proc/ppbs-no-such-dir/out");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/proc/ppbs-no-such-dir/out"), std::string::npos);
  }
}

TEST(Verify, RecomputesEveryPipeline) {
  json tomo = {{"tomography", {{"counts", 20000}}}, {"seed", 3}};
  const std::pair<Pipeline, json> runs[] = {
      {Pipeline::kSimulate, json::object()},
      {Pipeline::kStateTomography, tomo},
      {Pipeline::kProcessTomography, json::object()},
      {Pipeline::kBellAnalysis, {{"gate", {{"overlap", 0.8}}}}},
      {Pipeline::kCorrectionOptimization, {{"optimize", {{"restarts", 3}}}}},
  };
  for (const auto& [p, j] : runs) {
    const RunOutput out = run(config(p, j));
    const VerifyReport report = verify(bundle_from_json(json::parse(to_json(out.bundle).dump())));
    EXPECT_TRUE(report.ok()) << to_string(p);
    EXPECT_GE(report.checked, 2) << to_string(p);
  }
}

TEST(Verify, DetectsTampering) {
  RunOutput out = run(config(Pipeline::kProcessTomography, {{"gate", {{"overlap", 0.5}}}}));
  out.bundle.scalars["process_fidelity"].value += 1e-6;
  const VerifyReport report = verify(out.bundle);
  EXPECT_EQ(report.mismatched, 1);
  EXPECT_FALSE(report.ok());
}

TEST(Pipelines, NoiselessProcessTomographyOfIdealGate) {
  const RunOutput out = run(config(Pipeline::kProcessTomography));
  EXPECT_NEAR(scalar(out, "process_fidelity"), 1.0, 1e-9);
  EXPECT_NEAR(scalar(out, "chi_II_II"), 0.25, 1e-9);
  EXPECT_NEAR(scalar(out, "mean_success_probability"), 1.0 / 9.0, 1e-9);
}

TEST(Pipelines, CorrectionOptimizationAtMeasuredReflectivities) {
  const RunOutput out = run(config(Pipeline::kCorrectionOptimization,
                                   {{"gate", {{"eta", {0.28, 0.28, 0.29}}}}}));
  EXPECT_NEAR(scalar(out, "process_fidelity_optimized"), 0.96, 0.01);
  EXPECT_GE(scalar(out, "process_fidelity_optimized"), scalar(out, "process_fidelity"));
  EXPECT_EQ(out.bundle.tables.at("corrections").rows.size(), 4u);
}

TEST(Pipelines, SweepTable) {
  const RunOutput out = run(config(Pipeline::kSweep));
  const Table& t = out.bundle.tables.at("sweep");
  ASSERT_EQ(t.rows.size(), 11u);
  EXPECT_EQ(t.columns[1], "process_fidelity");
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    EXPECT_NEAR(t.rows[k][0], k / 10.0, 1e-12);
    EXPECT_GT(t.rows[k][1], t.rows[k - 1][1]);
    EXPECT_LE(t.rows[k][3], t.rows[k - 1][3] + 1e-12);
  }
}

TEST(Pipelines, EmptySweepIsHeaderOnly) {
  TempDir dir;
  ExperimentConfig c = config(Pipeline::kSweep, {{"sweep", {{"points", 0}}}});
  c.out_dir = dir.path();
  c.format = OutputFormat::kTable;
  write_outputs(run(c), c);
  EXPECT_EQ(slurp(dir / "sweep.csv"),
            "overlap,process_fidelity,average_gate_fidelity,chi_II_II,mean_success_probability,"
            "truth_table_mean_diagonal\n");
}

TEST(Pipelines, BellAnalysisLabels) {
  const RunOutput out = run(config(Pipeline::kBellAnalysis));
  const MatrixRecord& t = out.bundle.matrices.at("truth_table");
  EXPECT_EQ(t.row_labels[1], "psi'-");
  EXPECT_EQ(t.col_labels[1], "AD");
  EXPECT_EQ(t.col_labels_alt[1], "-+");
  EXPECT_NEAR(scalar(out, "truth_table_mean_diagonal"), 1.0, 1e-10);
}

TEST(Pipelines, StateTomographyFromCountFile) {
  TempDir dir;
  ExperimentConfig c = config(Pipeline::kStateTomography, {{"tomography", {{"counts", 50000}}}, {"seed", 11}});
  c.out_dir = dir / "sim";
  const RunOutput simulated = run(c);
  write_outputs(simulated, c);

  ExperimentConfig from_file = c;
  from_file.tomography.counts = 0;
  from_file.tomography.counts_file = dir / "sim" / "counts.txt";
  const RunOutput replay = run(from_file);
  EXPECT_EQ(replay.bundle.matrices.at("rho_est"), simulated.bundle.matrices.at("rho_est"));
  EXPECT_TRUE(replay.counts.empty());
}

TEST(Pipelines, NoisyProcessTomographyWithErrors) {
  const RunOutput out = run(config(Pipeline::kProcessTomography,
                                   {{"tomography", {{"counts", 20000}, {"resamples", 3}}}, {"seed", 2}}));
  EXPECT_GT(scalar(out, "process_fidelity"), 0.9);
  ASSERT_TRUE(out.bundle.scalars.at("process_fidelity").error.has_value());
  EXPECT_GT(*out.bundle.scalars.at("process_fidelity").error, 0.0);
  EXPECT_EQ(out.counts.size(), 16u * 36u);
}

TEST(Determinism, SameConfigSameBundle) {
  const json j = {{"tomography", {{"counts", 30000}, {"resamples", 4}}}, {"seed", 99}};
  const auto a = run(config(Pipeline::kStateTomography, j));
  const auto b = run(config(Pipeline::kStateTomography, j));
  EXPECT_EQ(to_json(a.bundle).dump(), to_json(b.bundle).dump());
  const auto c = run(config(Pipeline::kStateTomography, {{"tomography", {{"counts", 30000}}}, {"seed", 100}}));
  EXPECT_NE(a.bundle.matrices.at("rho_est"), c.bundle.matrices.at("rho_est"));
}

TEST(Determinism, ExecutableOutputIsByteIdentical) {
  TempDir dir;
  for (const char* fmt : {"text", "table"}) {
    const std::string common = std::string("tomo-state --counts 20000 --seed 4 --format ") + fmt;
    ASSERT_EQ(ppbs_exit(common + " --out " + (dir / (std::string(fmt) + "1")).string()), 0);
    ASSERT_EQ(ppbs_exit(common + " --out " + (dir / (std::string(fmt) + "2")).string()), 0);
    for (const auto& entry : fs::directory_iterator(dir / (std::string(fmt) + "1"))) {
      const auto twin = dir / (std::string(fmt) + "2") / entry.path().filename();
      EXPECT_EQ(slurp(entry.path()), slurp(twin)) << entry.path();
    }
  }
}

TEST(Config, StrictParsing) {
  EXPECT_THROW(config(Pipeline::kSimulate, {{"gaet", {}}}), ConfigError);
  EXPECT_THROW(config(Pipeline::kSimulate, {{"gate", {{"eta", "0.3"}}}}), ConfigError);
  EXPECT_THROW(config(Pipeline::kSimulate, {{"gate", {{"eta", {0.3, 0.3}}}}}), ConfigError);
  EXPECT_THROW(config(Pipeline::kSimulate, {{"gate", {{"architecture", "bulk"}}}}), ConfigError);
  EXPECT_THROW(config(Pipeline::kSimulate, {{"seed", -1}}), ConfigError);
  EXPECT_THROW(config(Pipeline::kSimulate, {{"pipeline", "sweep"}}), ConfigError);
  EXPECT_THROW(config(Pipeline::kSimulate, {{"source", {{"phi", 0.1}, {"state", {}}}}}), ConfigError);
  EXPECT_NO_THROW(config(Pipeline::kSweep, {{"pipeline", "sweep"}, {"metadata", {{"note", "x"}}}}));
}

TEST(Config, ValidationErrors) {
  EXPECT_THROW(config(Pipeline::kStateTomography, {{"tomography", {{"counts", 100}}}}).validate(),
               ConfigError);  // no seed
  EXPECT_THROW(config(Pipeline::kStateTomography, {{"seed", 1}}).validate(), ConfigError);
  EXPECT_THROW(config(Pipeline::kSimulate, {{"gate", {{"eta", 1.5}}}}).validate(), DomainError);
  EXPECT_THROW(config(Pipeline::kSimulate, {{"gate", {{"overlap", -0.1}}}}).validate(), DomainError);
  EXPECT_THROW(config(Pipeline::kSimulate, {{"gate", {{"architecture", "interferometric"},
                                                      {"eta", {0.3, 0.3, 0.2}}}}})
                   .validate(),
               ConfigError);
  EXPECT_THROW(config(Pipeline::kProcessTomography, {{"tomography", {{"resamples", 1}}}}).validate(),
               DomainError);
  EXPECT_NO_THROW(config(Pipeline::kProcessTomography).validate());  // noiseless needs no seed
}

TEST(Config, FlagsOverrideFile) {
  ExperimentConfig c = config(Pipeline::kSimulate, {{"gate", {{"eta", 0.3}, {"overlap", 0.5}}}, {"seed", 1}});
  Overrides o;
  o.eta = "0.28,0.28,0.29";
  o.overlap = 0.9;
  o.seed = 7;
  o.format = "table";
  apply_overrides(c, o);
  EXPECT_EQ(c.gate.eta[2], 0.29);
  EXPECT_EQ(c.gate.overlap, 0.9);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.format, OutputFormat::kTable);
  EXPECT_EQ(parse_eta("0.25")[1], 0.25);
  EXPECT_THROW(parse_eta("0.1,0.2"), ConfigError);
  EXPECT_THROW(parse_eta("0.1,x,0.2"), ConfigError);
  o.format = "yaml";
  EXPECT_THROW(apply_overrides(c, o), ConfigError);
}

TEST(Config, EchoRoundTrips) {
  const ExperimentConfig c = config(Pipeline::kStateTomography, json::parse(R"({
      "gate": {"eta": [0.3, 0.31, 0.32], "overlap": 0.7},
      "source": {"state": {"re": [[0.5,0,0,0],[0,0.5,0,0],[0,0,0,0],[0,0,0,0]]}, "white_noise": 0.1},
      "tomography": {"counts": 1000, "settings": "minimal", "target": "source"},
      "seed": 12})"));
  const json echo = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(echo, Pipeline::kStateTomography)), echo);
}

TEST(CountsIo, RoundTripAndErrors) {
  const auto rec = simulate_counts(TwoQubitState::maximally_mixed(), minimal_settings(), 123.5, 77);
  std::stringstream ss;
  write_counts(ss, rec);
  const auto back = read_counts(ss);
  ASSERT_EQ(back.size(), rec.size());
  for (std::size_t k = 0; k < rec.size(); ++k) {
    EXPECT_EQ(back[k].setting, rec[k].setting);
    EXPECT_EQ(back[k].count, rec[k].count);
    EXPECT_EQ(back[k].total_scale, rec[k].total_scale);
    EXPECT_EQ(back[k].rng_seed, rec[k].rng_seed);
  }
  for (const char* bad : {"HH 1 2 3\n", "# ppbs-counts 1\nHX 1 2 3\n", "# ppbs-counts 1\nHH -1 2 3\n",
                          "# ppbs-counts 1\nHH 1 2\n", "# ppbs-counts 1\nHH 1 2 3 4\n",
                          "# ppbs-counts 1\n"}) {
    std::stringstream in(bad);
    EXPECT_THROW(read_counts(in), ConfigError) << bad;
  }
  EXPECT_THROW(read_counts(fs::path("/nonexistent/counts.txt")), IoError);
}

TEST(Executable, ExitCodes) {
  TempDir dir;
  const std::string out = " --out " + (dir / "o").string();
  EXPECT_EQ(ppbs_exit("simulate" + out), 0);
  EXPECT_EQ(ppbs_exit("--version"), 0);
  EXPECT_EQ(ppbs_exit("frobnicate"), 2);
  EXPECT_EQ(ppbs_exit("simulate --seed notanumber" + out), 2);
  EXPECT_EQ(ppbs_exit("tomo-state --counts 100" + out), 2);  // missing seed
  write_file(dir / "bad.json", "{\"gate\": ");
  EXPECT_EQ(ppbs_exit("simulate --config " + (dir / "bad.json").string() + out), 2);
  EXPECT_EQ(ppbs_exit("simulate --eta 1.5" + out), 3);
  EXPECT_EQ(ppbs_exit("simulate --overlap 2" + out), 3);
  write_file(dir / "null.json",
             R"({"source": {"state": {"re": [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}},
                 "gate": {"eta": [0.3, 0.0, 0.3]}})");
  EXPECT_EQ(ppbs_exit("simulate --config " + (dir / "null.json").string() + out), 4);
  EXPECT_EQ(ppbs_exit("simulate --config " + (dir / "missing.json").string() + out), 5);
  EXPECT_EQ(ppbs_exit("simulate --out /proc/ppbs-no-such-dir"), 5);

  EXPECT_EQ(ppbs_exit("bell" + out), 0);
  EXPECT_EQ(ppbs_exit("verify " + (dir / "o").string()), 0);
  json j = json::parse(slurp(dir / "o" / "result.json"));
  j["scalars"]["truth_table_mean_diagonal"]["value"] = 0.5;
  write_file(dir / "o" / "result.json", j.dump());
  EXPECT_EQ(ppbs_exit("verify " + (dir / "o").string()), 3);
}

TEST(Executable, ShippedConfigsRunQuickly) {
  TempDir dir;
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(PPBS_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const json j = json::parse(slurp(entry.path()));
    const std::string pipeline = j.at("pipeline").get<std::string>();
    const std::map<std::string, std::string> commands = {
        {"simulate", "simulate"},   {"state_tomography", "tomo-state"},
        {"process_tomography", "tomo-process"}, {"bell_analysis", "bell"},
        {"correction_optimization", "optimize"}, {"sweep", "sweep"}};
    const auto start = std::chrono::steady_clock::now();
    const int code = ppbs_exit(commands.at(pipeline) + " --config " + entry.path().string() + " --out " +
                               (dir / entry.path().stem().string()).string());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(code, 0) << entry.path();
    EXPECT_LT(seconds, 60.0) << entry.path();
    const fs::path produced = dir / entry.path().stem().string();
    if (fs::exists(produced / "result.json")) {
      EXPECT_EQ(ppbs_exit("verify " + produced.string()), 0) << entry.path();
    }
    ++seen;
  }
  EXPECT_GE(seen, 6);
}

}  // namespace
}  // namespace ppbs::cli
