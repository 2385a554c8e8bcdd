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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nmrqpt/pulsesim.hpp"

namespace nmrqpt {

struct DesignOptions {
  int k_max = 4;                // RF intervals in the schedule
  int budget = 20000;           // full-model objective evaluations
  std::uint64_t seed = 1;
  int restarts = 12;            // random starts of the uncoupled search
  int surrogate_evals = 20000;  // simplex evaluations per uncoupled start
  double fidelity_floor = 0.99;
  bool spectators = false;      // average over spectator configurations too
  double nominal_rf_rad_s = 2.0 * kPi * 10e3;
  int threads = 1;
};

struct DesignResult {
  PulseSchedule schedule;
  double fidelity = 0.0;            // histogram-averaged Kraus gate fidelity
  double surrogate_fidelity = 0.0;  // same average with couplings dropped
  int evaluations = 0;              // full-model evaluations
  bool reached_floor = false;
};

// Histogram-averaged gate fidelity of a schedule against a target unitary.
double schedule_fidelity(const CMatrix& u_target, const PulseSchedule& sched, const SpinSystem& sys,
                         const RfHistogram& hist, bool spectators, int threads = 1);

// Splits a unitary into one 2x2 factor per spin, or returns nothing when it
// is entangling. Factors carry arbitrary phases.
std::optional<std::vector<CMatrix>> single_spin_factors(const CMatrix& u, int n_spins);

// Search over (duration, amplitude, frequency, phase) of every interval.
// Product targets first go through a cheap uncoupled model (each spin a
// lone two-level system) with many seeded random starts; the best of those
// is then polished with the full Hamiltonian. Entangling targets skip the
// first stage. Deterministic for a fixed seed.
DesignResult design_pulse(const CMatrix& u_target, const SpinSystem& sys, const RfHistogram& hist,
                          const DesignOptions& opts,
                          const std::optional<PulseSchedule>& initial = std::nullopt);

}  // namespace nmrqpt
