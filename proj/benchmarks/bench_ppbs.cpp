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

#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "ppbs/fock.hpp"
#include "ppbs/gates.hpp"
#include "ppbs/metrics.hpp"
#include "ppbs/optics.hpp"
#include "ppbs/tomography.hpp"

namespace {

using namespace ppbs;

void BM_Permanent(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(permanent(m));
}
BENCHMARK(BM_Permanent)->DenseRange(2, 12, 2);

// one circuit pass, overlap < 1 so the internal index doubles the mode count
void BM_Evolve(benchmark::State& state) {
  const GateInstance gate = build_ppbs_cz(0.28, 0.28, 0.29, 0.8);
  const TransferMatrix m = compile(gate.circuit);
  const Vec4 psi = Vec4::Constant(0.5);
  const PhotonicState in = prepare_input(gate, psi);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(in, m));
}
BENCHMARK(BM_Evolve);

void BM_InducedKraus(benchmark::State& state) {
  const GateInstance gate = build_ppbs_cz(1.0 / 3, 1.0 / 3, 1.0 / 3, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(induced_kraus(gate));
}
BENCHMARK(BM_InducedKraus);

void BM_ProcessChi(benchmark::State& state) {
  const GateInstance gate = build_ppbs_cz(0.28, 0.28, 0.29, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(process_chi(gate));
}
BENCHMARK(BM_ProcessChi);

void BM_ReconstructState(benchmark::State& state) {
  const auto truth = source_state(-2.094);
  const auto records = simulate_counts(truth, overcomplete_settings(), 1e5, 42);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_state(records));
}
BENCHMARK(BM_ReconstructState)->Unit(benchmark::kMillisecond);

void BM_ReconstructProcess(benchmark::State& state) {
  const GateInstance gate = build_ppbs_cz(0.28, 0.28, 0.29, 0.85);
  const auto inputs = preparation_states();
  std::vector<TwoQubitState> outputs;
  std::vector<double> weights;
  for (const auto& in : inputs) {
    const GateRun run = run_gate(gate, in);
    outputs.push_back(*run.output);
    weights.push_back(run.success_probability);
  }
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_process(inputs, outputs, weights));
}
BENCHMARK(BM_ReconstructProcess)->Unit(benchmark::kMillisecond);

void BM_OptimizeCorrections(benchmark::State& state) {
  const ChiMatrix chi = process_chi(build_ppbs_cz(0.28, 0.28, 0.29));
  const ChiMatrix ideal = chi_ideal_cz();
  for (auto _ : state) benchmark::DoNotOptimize(optimize_corrections(chi, ideal));
}
BENCHMARK(BM_OptimizeCorrections)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
