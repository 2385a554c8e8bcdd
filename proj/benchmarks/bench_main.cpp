// Copyright 2026 The nmrqpt Authors
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


// Timings of the hot paths: propagators, the incoherent ensemble, CPTP
// projection and a full simulated tomography run.

#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "nmrqpt/config.hpp"
#include "nmrqpt/pulsesim.hpp"
#include "nmrqpt/qpt.hpp"
#include "nmrqpt/superop.hpp"

namespace {

using namespace nmrqpt;

PulseSchedule random_schedule(int intervals, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PulseSchedule s;
  for (int k = 0; k < intervals; ++k) {
    PulseInterval iv;
    iv.duration_s = 5e-6 + 20e-6 * u(rng);
    iv.amplitude = u(rng);
    iv.rf_frequency_hz = 2000.0 * (u(rng) - 0.5);
    iv.rf_phase_rad = 2.0 * kPi * u(rng);
    s.items.push_back(iv);
  }
  return s;
}

void BM_SchedulePropagator(benchmark::State& state) {
  const SpinSystem sys = alanine_system();
  const PulseSchedule s = random_schedule(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(schedule_propagator(s, sys, 1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SchedulePropagator)->RangeMultiplier(2)->Range(1, 16)->Complexity();

void BM_IncoherentSuperop(benchmark::State& state) {
  const SpinSystem sys = load_spin_system(std::string(NMRQPT_DATA_DIR) + "/alanine.json");
  const RfHistogram hist = load_histogram(std::string(NMRQPT_DATA_DIR) + "/rf_histogram_default.json");
  const PulseSchedule s = random_schedule(6, 2);
  const bool spectators = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(incoherent_superop(s, sys, hist, spectators).super.matrix);
}
BENCHMARK(BM_IncoherentSuperop)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ChoiEigendecomposition(benchmark::State& state) {
  const Supermatrix s = unitary_superop(qft_unitary(3));
  for (auto _ : state) benchmark::DoNotOptimize(choi_of(s).eigenvalues);
}
BENCHMARK(BM_ChoiEigendecomposition)->Unit(benchmark::kMillisecond);

void BM_ProjectCptp(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  CMatrix noise(64, 64);
  for (Index i = 0; i < 64; ++i)
    for (Index j = 0; j < 64; ++j) noise(i, j) = Complex(g(rng), g(rng));
  // Hermitian noise on the Choi matrix keeps the map Hermiticity preserving.
  const CMatrix t = choi_of(unitary_superop(qft_unitary(3))).matrix + 0.01 * (noise + noise.adjoint());
  const Supermatrix s = super_of_choi(t);
  for (auto _ : state) benchmark::DoNotOptimize(project_cptp(s).projected.matrix);
}
BENCHMARK(BM_ProjectCptp)->Unit(benchmark::kMillisecond);

void BM_RunQptNoiseless(benchmark::State& state) {
  const RunConfig cfg = load_run_config(std::string(NMRQPT_DATA_DIR) + "/configs/noiseless_secular.json");
  const QptSettings settings = settings_from_config(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(run_qpt(settings).m_obs.matrix);
}
BENCHMARK(BM_RunQptNoiseless)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
BENCHMARK_MAIN();
