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

#include <chrono>
#include <ctime>
#include <iostream>

#include <CLI11.hpp>

#include "ppbs/errors.hpp"
#include "ppbs_cli/runner.hpp"

namespace {

using namespace ppbs::cli;

enum ExitCode { kOk = 0, kConfig = 2, kDomain = 3, kNull = 4, kIo = 5 };

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunArgs {
  std::string config;
  Overrides overrides;
  bool stamp = false;
  bool quiet = false;
};

void add_run_options(CLI::App* sub, RunArgs& a) {
  sub->add_option("--config", a.config, "experiment config (JSON)");
  sub->add_option("--seed", a.overrides.seed, "run seed");
  sub->add_option("--out", a.overrides.out_dir, "output directory");
  sub->add_option("--format", a.overrides.format, "text or table")
      ->check(CLI::IsMember({"text", "table"}));
  sub->add_option("--counts", a.overrides.counts, "expected counts per tomography setting");
  sub->add_option("--eta", a.overrides.eta, "splitter reflectivities A,B,C");
  sub->add_option("--overlap", a.overrides.overlap, "photon mode overlap V");
  sub->add_flag("--stamp", a.stamp, "record a UTC timestamp (output is then not reproducible)");
  sub->add_flag("--quiet", a.quiet, "no summary on stdout");
}

int run_pipeline(Pipeline pipeline, const RunArgs& a) {
  ExperimentConfig config;
  config.pipeline = pipeline;
  if (!a.config.empty()) config = load_config(a.config, pipeline);
  apply_overrides(config, a.overrides);
  RunOutput out = run(config);
  if (a.stamp) out.bundle.timestamp = utc_now();
  const auto written = write_outputs(out, config);
  if (!a.quiet) {
    std::cout << summary(out.bundle);
    for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  }
  return kOk;
}

int run_verify(const std::string& path, double tolerance) {
  const ResultBundle bundle = read_bundle(path);
  const VerifyReport report = verify(bundle, tolerance);
  for (const auto& line : report.lines) std::cout << line << "\n";
  std::cout << report.checked << " checked, " << report.mismatched << " mismatched\n";
  return report.ok() ? kOk : kDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ppbs: linear-optics CZ gate simulator and tomography toolkit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    Pipeline pipeline;
  };
  const Entry entries[] = {
      {"simulate", "send the source state through the gate", Pipeline::kSimulate},
      {"tomo-state", "simulated state tomography with ML reconstruction", Pipeline::kStateTomography},
      {"tomo-process", "process tomography of the gate", Pipeline::kProcessTomography},
      {"bell", "Bell-state analyser truth table", Pipeline::kBellAnalysis},
      {"optimize", "search local corrections that maximize process fidelity",
       Pipeline::kCorrectionOptimization},
      {"sweep", "scan the mode overlap", Pipeline::kSweep},
  };
  RunArgs args[std::size(entries)];
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    auto* sub = app.add_subcommand(entries[i].name, entries[i].help);
    add_run_options(sub, args[i]);
    subs.push_back(sub);
  }
  std::string bundle_path;
  double tolerance = 1e-9;
  auto* verify_cmd = app.add_subcommand("verify", "recompute scalars from a result bundle");
  verify_cmd->add_option("bundle", bundle_path, "result.json or its directory")->required();
  verify_cmd->add_option("--tolerance", tolerance, "absolute tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (verify_cmd->parsed()) return run_verify(bundle_path, tolerance);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) return run_pipeline(entries[i].pipeline, args[i]);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ppbs::NullPostselection& e) {
    std::cerr << "null post-selection: " << e.what() << "\n";
    return kNull;
  } catch (const ppbs::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
  return kConfig;
}
