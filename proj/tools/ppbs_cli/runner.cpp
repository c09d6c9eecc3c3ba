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

#include "ppbs_cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "ppbs/errors.hpp"
#include "ppbs/metrics.hpp"
#include "ppbs_cli/counts_io.hpp"

namespace ppbs::cli {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError("unknown key '" + where + "." + item.key() + "'");
  }
}

double get_number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  if (!v.is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  if (!v.is_number_integer()) throw ConfigError("'" + where + "." + key + "' must be an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const char* key, const std::string& where,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  if (!v.is_string()) throw ConfigError("'" + where + "." + key + "' must be a string");
  return v.get<std::string>();
}

Mat4 matrix_from_json(const json& j) {
  check_keys(j, {"re", "im"}, "source.state");
  auto part = [](const json& rows, const char* name) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    if (!rows.is_array() || rows.size() != 4) {
      throw ConfigError(std::string("'source.state.") + name + "' must be a 4x4 array");
    }
    for (int i = 0; i < 4; ++i) {
      if (!rows[i].is_array() || rows[i].size() != 4) {
        throw ConfigError(std::string("'source.state.") + name + "' must be a 4x4 array");
      }
      for (int k = 0; k < 4; ++k) {
        if (!rows[i][k].is_number()) {
          throw ConfigError(std::string("'source.state.") + name + "' entries must be numbers");
        }
        m(i, k) = rows[i][k].get<double>();
      }
    }
    return m;
  };
  if (!j.contains("re")) throw ConfigError("'source.state' needs 're'");
  const Eigen::Matrix4d re = part(j["re"], "re");
  const Eigen::Matrix4d im = j.contains("im") ? part(j["im"], "im") : Eigen::Matrix4d::Zero();
  Mat4 m;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) m(i, k) = cplx(re(i, k), im(i, k));
  }
  return m;
}

json matrix_to_json(const Mat4& m) {
  json re = json::array();
  json im = json::array();
  for (int i = 0; i < 4; ++i) {
    json r = json::array();
    json c = json::array();
    for (int k = 0; k < 4; ++k) {
      r.push_back(m(i, k).real());
      c.push_back(m(i, k).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

void require_unit(double x, const std::string& what) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(what + " must lie in [0, 1]");
}

std::string architecture_name(Architecture a) {
  return a == Architecture::kPPBS ? "ppbs" : "interferometric";
}

void put(ResultBundle& b, const std::string& name, double value,
         std::optional<double> error = std::nullopt) {
  b.scalars[name] = Scalar{value, error};
}

std::vector<MeasurementSetting> settings_for(const TomographyConfig& t) {
  return t.overcomplete ? overcomplete_settings() : minimal_settings();
}

ReconstructionOptions reconstruction_options(const ExperimentConfig& config) {
  ReconstructionOptions options;
  if (config.seed) {
    options.seed = stream_seed(*config.seed, static_cast<std::uint64_t>(RngStage::kReconstructionStarts), 0);
  }
  return options;
}

std::uint64_t bootstrap_seed(const ExperimentConfig& config) {
  return stream_seed(*config.seed, static_cast<std::uint64_t>(RngStage::kBootstrap), 0);
}

TwoQubitState gate_output(const GateInstance& gate, const TwoQubitState& input, double* probability) {
  const GateRun run = run_gate(gate, input);
  if (!run.output) throw NullPostselection("the gate never produces a coincidence for this input");
  if (probability) *probability = run.success_probability;
  return *run.output;
}

std::vector<std::string> bell_row_labels() {
  std::vector<std::string> out;
  for (const auto& in : bell_inputs()) out.push_back(to_string(in.label));
  return out;
}

std::vector<std::string> outcome_labels(bool logical) {
  std::vector<std::string> out;
  for (int k = 0; k < 4; ++k) {
    const auto o = static_cast<BellOutcome>(k);
    out.push_back(logical ? to_logical_string(o) : to_string(o));
  }
  return out;
}

// --- pipelines -------------------------------------------------------------

void run_simulate(const ExperimentConfig& config, RunOutput& out) {
  const GateInstance gate = build_gate(config.gate);
  const TwoQubitState input = source_density(config.source);
  double p = 0.0;
  const TwoQubitState output = gate_output(gate, input, &p);
  const Mat4 cz = cz_matrix();
  const TwoQubitState ideal(cz * input.matrix() * cz.adjoint());

  auto& b = out.bundle;
  b.matrices["rho_in"] = record_state(input.matrix());
  b.matrices["rho_out"] = record_state(output.matrix());
  b.matrices["rho_ideal_out"] = record_state(ideal.matrix());
  put(b, "success_probability", p);
  put(b, "mean_success_probability", mean_success_probability(gate));
  put(b, "input_tangle", tangle(input));
  put(b, "input_linear_entropy", linear_entropy(input));
  put(b, "output_tangle", tangle(output));
  put(b, "output_linear_entropy", linear_entropy(output));
  put(b, "fidelity_to_ideal", state_fidelity(output, ideal));
}

void run_state_tomography(const ExperimentConfig& config, RunOutput& out) {
  const TwoQubitState source = source_density(config.source);
  TwoQubitState truth = source;
  if (config.tomography.target == TomographyTarget::kOutput) {
    truth = gate_output(build_gate(config.gate), source, nullptr);
  }

  std::vector<CountRecord> records;
  if (config.tomography.counts_file) {
    records = read_counts(*config.tomography.counts_file);
  } else {
    const auto settings = settings_for(config.tomography);
    records = simulate_counts(truth, settings, config.tomography.counts, *config.seed);
    out.counts = records;
  }

  const ReconstructionOptions options = reconstruction_options(config);
  const StateEstimate est = reconstruct_state_detailed(records, options);

  auto& b = out.bundle;
  b.matrices["rho_est"] = record_state(est.state.matrix());
  b.matrices["rho_true"] = record_state(truth.matrix());
  put(b, "intensity", est.intensity);
  put(b, "negative_log_likelihood", est.negative_log_likelihood);
  put(b, "iterations", est.iterations);
  put(b, "converged", est.converged ? 1.0 : 0.0);

  struct Metric {
    const char* name;
    double (*value)(const TwoQubitState&, const TwoQubitState&);
  };
  const Metric metrics[] = {
      {"fidelity", [](const TwoQubitState& r, const TwoQubitState& t) { return state_fidelity(r, t); }},
      {"tangle", [](const TwoQubitState& r, const TwoQubitState&) { return tangle(r); }},
      {"linear_entropy", [](const TwoQubitState& r, const TwoQubitState&) { return linear_entropy(r); }},
      {"purity", [](const TwoQubitState& r, const TwoQubitState&) { return r.purity(); }},
  };
  const int resamples = config.tomography.resamples;
  for (const auto& m : metrics) {
    const double value = m.value(est.state, truth);
    std::optional<double> error;
    if (resamples > 0) {
      const auto estimator = [&](std::span<const CountRecord> rs) {
        return m.value(reconstruct_state_detailed(rs, options).state, truth);
      };
      const ErrorEstimate e = monte_carlo_errors(records, resamples, estimator, bootstrap_seed(config));
      error = e.stddev;
    }
    put(b, m.name, value, error);
  }

  Table counts{{"setting_index", "count", "total_scale"}, {}};
  for (std::size_t i = 0; i < records.size(); ++i) {
    counts.rows.push_back({static_cast<double>(i), static_cast<double>(records[i].count),
                           records[i].total_scale});
  }
  b.tables["counts"] = std::move(counts);
}

// Process estimate from noisy counts, one record block per preparation.
ProcessEstimate process_from_counts(std::span<const TwoQubitState> inputs,
                                    std::span<const CountRecord> records,
                                    std::size_t block, double scale,
                                    const ReconstructionOptions& options) {
  std::vector<TwoQubitState> outputs;
  std::vector<double> weights;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto est = reconstruct_state_detailed(records.subspan(i * block, block), options);
    outputs.push_back(est.state);
    weights.push_back(est.intensity / scale);
  }
  return reconstruct_process_detailed(inputs, outputs, weights, options);
}

void run_process_tomography(const ExperimentConfig& config, RunOutput& out) {
  const GateInstance gate = build_gate(config.gate);
  const auto inputs = preparation_states();
  const ReconstructionOptions options = reconstruction_options(config);
  const double scale = config.tomography.counts;

  std::vector<TwoQubitState> outputs;
  std::vector<double> weights;
  for (const auto& in : inputs) {
    double p = 0.0;
    outputs.push_back(gate_output(gate, in, &p));
    weights.push_back(p);
  }

  ProcessEstimate est;
  std::optional<double> fp_error;
  if (scale > 0.0) {
    const auto settings = settings_for(config.tomography);
    std::vector<CountRecord> records;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto seed = stream_seed(*config.seed, static_cast<std::uint64_t>(RngStage::kPreparation), i);
      const auto block = simulate_counts(outputs[i], settings, scale, seed, weights[i]);
      records.insert(records.end(), block.begin(), block.end());
    }
    est = process_from_counts(inputs, records, settings.size(), scale, options);
    if (config.tomography.resamples > 0) {
      const ChiMatrix ideal = chi_ideal_cz();
      const auto estimator = [&](std::span<const CountRecord> rs) {
        return process_fidelity(process_from_counts(inputs, rs, settings.size(), scale, options).chi, ideal);
      };
      fp_error = monte_carlo_errors(records, config.tomography.resamples, estimator,
                                    bootstrap_seed(config)).stddev;
    }
    out.counts = std::move(records);
  } else {
    est = reconstruct_process_detailed(inputs, outputs, weights, options);
  }

  const ChiMatrix ideal = chi_ideal_cz();
  const double fp = process_fidelity(est.chi, ideal);
  auto& b = out.bundle;
  b.matrices["chi"] = record_chi(est.chi.matrix());
  b.matrices["chi_ideal"] = record_chi(ideal.matrix());
  put(b, "process_fidelity", fp, fp_error);
  put(b, "average_gate_fidelity", average_gate_fidelity(fp),
      fp_error ? std::optional<double>(0.8 * *fp_error) : std::nullopt);
  put(b, "chi_II_II", est.chi(0, 0).real());
  put(b, "mean_success_probability", est.trace);
  put(b, "fit_residual", est.residual);
  put(b, "model_process_fidelity", process_fidelity(process_chi(gate), ideal));
}

void run_bell(const ExperimentConfig& config, RunOutput& out) {
  const GateInstance gate = build_gate(config.gate);
  const TruthTable table = truth_table(gate);
  const Eigen::MatrixXd mutual = mutual_fidelity_matrix(table.outputs);
  const PhaseFit phases = fit_output_phases(table.outputs);

  auto& b = out.bundle;
  MatrixRecord tt = record_real(table.probabilities, bell_row_labels(), outcome_labels(false));
  tt.col_labels_alt = outcome_labels(true);
  b.matrices["truth_table"] = std::move(tt);
  b.matrices["mutual_fidelity"] = record_real(mutual, bell_row_labels(), bell_row_labels());
  put(b, "truth_table_mean_diagonal", table.mean_diagonal());
  double mean_p = 0.0;
  for (double p : table.success_probabilities) mean_p += p / 4.0;
  put(b, "mean_success_probability", mean_p);
  put(b, "mutual_fidelity_mean", mean_off_diagonal(mutual));
  put(b, "control_phase", phases.control_phase);
  put(b, "target_phase", phases.target_phase);
  put(b, "phase_fit_fidelity", phases.mean_fidelity);
}

void run_optimize(const ExperimentConfig& config, RunOutput& out) {
  const GateInstance gate = build_gate(config.gate);
  const ChiMatrix chi = process_chi(gate);
  const ChiMatrix ideal = chi_ideal_cz();
  CorrectionOptions options;
  options.restarts = config.restarts;
  if (config.seed) {
    options.seed = stream_seed(*config.seed, static_cast<std::uint64_t>(RngStage::kOptimizerStarts), 0);
  }
  const CorrectionResult result = optimize_corrections(chi, ideal, options);
  const ChiMatrix corrected = result.correction.apply(chi);

  auto& b = out.bundle;
  b.matrices["chi"] = record_chi(chi.matrix());
  b.matrices["chi_corrected"] = record_chi(corrected.matrix());
  put(b, "process_fidelity", result.fidelity_before);
  put(b, "average_gate_fidelity", average_gate_fidelity(result.fidelity_before));
  put(b, "chi_II_II", chi(0, 0).real());
  put(b, "process_fidelity_optimized", result.fidelity_after);
  put(b, "average_gate_fidelity_optimized", average_gate_fidelity(result.fidelity_after));
  put(b, "restarts_at_best", result.restarts_at_best);
  put(b, "converged", result.converged ? 1.0 : 0.0);
  put(b, "mean_success_probability", mean_success_probability(gate));

  Table angles{{"unitary", "alpha", "beta", "gamma"}, {}};
  for (int u = 0; u < 4; ++u) {
    const auto& a = result.correction.angles;
    angles.rows.push_back({static_cast<double>(u), a[3 * u], a[3 * u + 1], a[3 * u + 2]});
  }
  b.tables["corrections"] = std::move(angles);
}

void run_sweep(const ExperimentConfig& config, RunOutput& out) {
  Table table{{"overlap", "process_fidelity", "average_gate_fidelity", "chi_II_II",
               "mean_success_probability", "truth_table_mean_diagonal"},
              {}};
  const auto& s = config.sweep;
  const ChiMatrix ideal = chi_ideal_cz();
  for (int k = 0; k < s.points; ++k) {
    const double t = s.points == 1 ? 0.0 : static_cast<double>(k) / (s.points - 1);
    GateConfig gc = config.gate;
    gc.overlap = std::clamp(s.overlap_start + t * (s.overlap_stop - s.overlap_start), 0.0, 1.0);
    const GateInstance gate = build_gate(gc);
    const ChiMatrix chi = process_chi(gate);
    const double fp = process_fidelity(chi, ideal);
    table.rows.push_back({gc.overlap, fp, average_gate_fidelity(fp), chi(0, 0).real(),
                          mean_success_probability(gate), truth_table(gate).mean_diagonal()});
  }
  out.bundle.tables["sweep"] = std::move(table);
}

}  // namespace

std::string to_string(Pipeline p) {
  switch (p) {
    case Pipeline::kSimulate: return "simulate";
    case Pipeline::kStateTomography: return "state_tomography";
    case Pipeline::kProcessTomography: return "process_tomography";
    case Pipeline::kBellAnalysis: return "bell_analysis";
    case Pipeline::kCorrectionOptimization: return "correction_optimization";
    case Pipeline::kSweep: return "sweep";
  }
  return "?";
}

Pipeline parse_pipeline(const std::string& name) {
  for (auto p : {Pipeline::kSimulate, Pipeline::kStateTomography, Pipeline::kProcessTomography,
                 Pipeline::kBellAnalysis, Pipeline::kCorrectionOptimization, Pipeline::kSweep}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown pipeline '" + name + "'");
}

bool ExperimentConfig::stochastic() const {
  switch (pipeline) {
    case Pipeline::kStateTomography:
      return !tomography.counts_file || tomography.resamples > 0;
    case Pipeline::kProcessTomography:
      return tomography.counts > 0.0;
    default:
      return false;
  }
}

void ExperimentConfig::validate() const {
  for (int i = 0; i < 3; ++i) require_unit(gate.eta[i], "eta" + std::to_string(i + 1));
  require_unit(gate.overlap, "overlap");
  require_unit(source.white_noise, "source.white_noise");
  if (!std::isfinite(source.phi)) throw DomainError("source.phi must be finite");
  if (gate.architecture == Architecture::kInterferometric &&
      (gate.eta[1] != gate.eta[0] || gate.eta[2] != gate.eta[0])) {
    throw ConfigError("the interferometric gate takes a single eta");
  }
  if (!(std::isfinite(tomography.counts) && tomography.counts >= 0.0)) {
    throw DomainError("tomography.counts must be a non-negative number");
  }
  if (tomography.resamples < 0 || tomography.resamples == 1) {
    throw DomainError("tomography.resamples must be 0 or at least 2");
  }
  if (restarts < 1) throw DomainError("optimize.restarts must be at least 1");
  if (sweep.points < 0) throw DomainError("sweep.points must be non-negative");
  require_unit(sweep.overlap_start, "sweep.overlap_start");
  require_unit(sweep.overlap_stop, "sweep.overlap_stop");

  if (pipeline == Pipeline::kStateTomography && !tomography.counts_file &&
      !(tomography.counts > 0.0)) {
    throw ConfigError("state tomography needs tomography.counts > 0 or tomography.counts_file");
  }
  if (pipeline == Pipeline::kProcessTomography && tomography.counts_file) {
    throw ConfigError("tomography.counts_file is only read by state tomography");
  }
  if (pipeline == Pipeline::kProcessTomography && tomography.resamples > 0 &&
      !(tomography.counts > 0.0)) {
    throw ConfigError("bootstrap resampling needs simulated counts (tomography.counts > 0)");
  }
  if (stochastic() && !seed) {
    throw ConfigError("pipeline " + to_string(pipeline) + " is stochastic here and needs a seed");
  }
}

ExperimentConfig config_from_json(const json& j, Pipeline fallback) {
  check_keys(j, {"pipeline", "gate", "source", "tomography", "sweep", "optimize", "seed",
                 "output", "metadata"},
             "config");
  ExperimentConfig c;
  c.pipeline = fallback;
  if (j.contains("pipeline")) {
    const Pipeline named = parse_pipeline(get_string(j, "pipeline", "config", ""));
    if (named != fallback) {
      throw ConfigError("config is for pipeline '" + to_string(named) + "' but the subcommand runs '" +
                        to_string(fallback) + "'");
    }
  }

  if (j.contains("gate")) {
    const auto& g = j["gate"];
    check_keys(g, {"architecture", "eta", "overlap", "relabel"}, "gate");
    const std::string arch = get_string(g, "architecture", "gate", "ppbs");
    if (arch == "ppbs") {
      c.gate.architecture = Architecture::kPPBS;
    } else if (arch == "interferometric") {
      c.gate.architecture = Architecture::kInterferometric;
    } else {
      throw ConfigError("unknown gate.architecture '" + arch + "'");
    }
    if (g.contains("eta")) {
      const auto& e = g["eta"];
      if (e.is_number()) {
        c.gate.eta.fill(e.get<double>());
      } else if (e.is_array() && e.size() == 3 &&
                 std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_number(); })) {
        for (int i = 0; i < 3; ++i) c.gate.eta[i] = e[i].get<double>();
      } else {
        throw ConfigError("'gate.eta' must be a number or an array of three numbers");
      }
    }
    c.gate.overlap = get_number(g, "overlap", "gate", c.gate.overlap);
    if (g.contains("relabel")) {
      if (!g["relabel"].is_boolean()) throw ConfigError("'gate.relabel' must be true or false");
      c.gate.relabel = g["relabel"].get<bool>();
    }
  }

  if (j.contains("source")) {
    const auto& s = j["source"];
    check_keys(s, {"phi", "state", "white_noise"}, "source");
    if (s.contains("phi") && s.contains("state")) {
      throw ConfigError("'source' takes either phi or state, not both");
    }
    c.source.phi = get_number(s, "phi", "source", 0.0);
    if (s.contains("state")) c.source.state = matrix_from_json(s["state"]);
    c.source.white_noise = get_number(s, "white_noise", "source", 0.0);
  }

  if (j.contains("tomography")) {
    const auto& t = j["tomography"];
    check_keys(t, {"counts", "settings", "resamples", "counts_file", "target"}, "tomography");
    c.tomography.counts = get_number(t, "counts", "tomography", 0.0);
    const std::string settings = get_string(t, "settings", "tomography", "overcomplete");
    if (settings != "overcomplete" && settings != "minimal") {
      throw ConfigError("'tomography.settings' must be overcomplete or minimal");
    }
    c.tomography.overcomplete = settings == "overcomplete";
    c.tomography.resamples = get_int(t, "resamples", "tomography", 0);
    if (t.contains("counts_file")) {
      c.tomography.counts_file = get_string(t, "counts_file", "tomography", "");
    }
    const std::string target = get_string(t, "target", "tomography", "output");
    if (target == "output") {
      c.tomography.target = TomographyTarget::kOutput;
    } else if (target == "source") {
      c.tomography.target = TomographyTarget::kSource;
    } else {
      throw ConfigError("'tomography.target' must be output or source");
    }
  }

  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    check_keys(s, {"overlap_start", "overlap_stop", "points"}, "sweep");
    c.sweep.overlap_start = get_number(s, "overlap_start", "sweep", c.sweep.overlap_start);
    c.sweep.overlap_stop = get_number(s, "overlap_stop", "sweep", c.sweep.overlap_stop);
    c.sweep.points = get_int(s, "points", "sweep", c.sweep.points);
  }

  if (j.contains("optimize")) {
    check_keys(j["optimize"], {"restarts"}, "optimize");
    c.restarts = get_int(j["optimize"], "restarts", "optimize", c.restarts);
  }

  if (j.contains("seed") && !j["seed"].is_null()) {
    const auto& seed = j["seed"];
    // literals built in code are signed even when non-negative
    const bool ok = seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<std::int64_t>() >= 0);
    if (!ok) throw ConfigError("'seed' must be a non-negative integer");
    c.seed = seed.get<std::uint64_t>();
  }

  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, {"dir", "format"}, "output");
    c.out_dir = get_string(o, "dir", "output", c.out_dir.string());
    c.format = parse_format(get_string(o, "format", "output", "text"));
  }

  if (j.contains("metadata")) c.metadata = j["metadata"];
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["pipeline"] = to_string(c.pipeline);
  j["gate"] = {{"architecture", architecture_name(c.gate.architecture)},
               {"eta", c.gate.eta},
               {"overlap", c.gate.overlap},
               {"relabel", c.gate.relabel}};
  json source = {{"white_noise", c.source.white_noise}};
  if (c.source.state) {
    source["state"] = matrix_to_json(*c.source.state);
  } else {
    source["phi"] = c.source.phi;
  }
  j["source"] = source;
  json tomo = {{"counts", c.tomography.counts},
               {"settings", c.tomography.overcomplete ? "overcomplete" : "minimal"},
               {"resamples", c.tomography.resamples},
               {"target", c.tomography.target == TomographyTarget::kOutput ? "output" : "source"}};
  if (c.tomography.counts_file) tomo["counts_file"] = c.tomography.counts_file->string();
  j["tomography"] = tomo;
  j["sweep"] = {{"overlap_start", c.sweep.overlap_start},
                {"overlap_stop", c.sweep.overlap_stop},
                {"points", c.sweep.points}};
  j["optimize"] = {{"restarts", c.restarts}};
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  // output location is deliberately not echoed: moving a run must not change it
  j["metadata"] = c.metadata;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path, Pipeline fallback) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  ExperimentConfig c = config_from_json(j, fallback);
  // relative count files resolve against the config's directory
  if (c.tomography.counts_file && c.tomography.counts_file->is_relative()) {
    c.tomography.counts_file = path.parent_path() / *c.tomography.counts_file;
  }
  return c;
}

std::array<double, 3> parse_eta(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("--eta: '" + item + "' is not a number");
    }
    if (used != item.size()) throw ConfigError("--eta: '" + item + "' is not a number");
    values.push_back(v);
  }
  if (values.size() == 1) return {values[0], values[0], values[0]};
  if (values.size() == 3) return {values[0], values[1], values[2]};
  throw ConfigError("--eta takes one value or three comma-separated values");
}

void apply_overrides(ExperimentConfig& c, const Overrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (o.format) c.format = parse_format(*o.format);
  if (o.counts) c.tomography.counts = *o.counts;
  if (o.eta) c.gate.eta = parse_eta(*o.eta);
  if (o.overlap) c.gate.overlap = *o.overlap;
}

GateInstance build_gate(const GateConfig& g) {
  if (g.architecture == Architecture::kInterferometric) {
    if (!g.relabel) throw ConfigError("the interferometric gate has no relabeling to switch off");
    return build_interferometric_cz(g.eta[0], g.overlap);
  }
  return build_ppbs_cz(g.eta[0], g.eta[1], g.eta[2], g.overlap, g.relabel ? Relabel::kXX : Relabel::kNone);
}

TwoQubitState source_density(const SourceConfig& s) {
  const TwoQubitState base = s.state ? TwoQubitState(*s.state) : source_state(s.phi);
  const Mat4 mixed = (1.0 - s.white_noise) * base.matrix() + s.white_noise * Mat4::Identity() / 4.0;
  return TwoQubitState(mixed);
}

RunOutput run(const ExperimentConfig& config) {
  config.validate();
  RunOutput out;
  out.bundle.config = config_to_json(config);
  out.bundle.pipeline = to_string(config.pipeline);
  out.bundle.seed = config.seed;
  switch (config.pipeline) {
    case Pipeline::kSimulate: run_simulate(config, out); break;
    case Pipeline::kStateTomography: run_state_tomography(config, out); break;
    case Pipeline::kProcessTomography: run_process_tomography(config, out); break;
    case Pipeline::kBellAnalysis: run_bell(config, out); break;
    case Pipeline::kCorrectionOptimization: run_optimize(config, out); break;
    case Pipeline::kSweep: run_sweep(config, out); break;
  }
  return out;
}

std::vector<std::filesystem::path> write_outputs(const RunOutput& output,
                                                 const ExperimentConfig& config) {
  auto written = emit(output.bundle, config.format, config.out_dir);
  if (!output.counts.empty()) {
    const auto path = config.out_dir / "counts.txt";
    write_counts(path, output.counts);
    written.push_back(path);
  }
  return written;
}

std::string summary(const ResultBundle& b) {
  std::ostringstream out;
  out << "pipeline: " << b.pipeline << "\n";
  out << std::setprecision(6);
  for (const auto& [name, s] : b.scalars) {
    out << "  " << name << " = " << s.value;
    if (s.error) out << " +- " << *s.error;
    out << "\n";
  }
  for (const auto& [name, t] : b.tables) {
    out << "  table " << name << ": " << t.rows.size() << " rows\n";
  }
  return out.str();
}

}  // namespace ppbs::cli
