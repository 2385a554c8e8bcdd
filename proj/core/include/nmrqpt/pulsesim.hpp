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

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nmrqpt/errors.hpp"
#include "nmrqpt/spinsys.hpp"
#include "nmrqpt/superop.hpp"
#include "nmrqpt/types.hpp"

namespace nmrqpt {

// Constant-parameter RF segment. The field in the rotating frame is
//   (scale * amplitude * gammaB1 / 2) * sum_j [cos(2 pi nu t + phi) X_j + sin(2 pi nu t + phi) Y_j]
// with t measured from the start of the interval.
struct PulseInterval {
  double duration_s = 0.0;
  double amplitude = 0.0;        // relative to the nominal gammaB1
  double rf_frequency_hz = 0.0;  // rotating-frame frequency of the carrier
  double rf_phase_rad = 0.0;
  std::vector<int> targets;      // 0-based spins the field reaches; empty = all

  void validate(int n_spins) const;
};

// Free evolution split into equal segments. walsh[s][k] = +1/-1 is the toggling
// sign of spin s in segment k; an ideal pi_x pulse is applied to a spin whenever
// its sign changes and after the last segment when it ends at -1.
struct Delay {
  double duration_s = 0.0;
  std::vector<std::vector<int>> walsh;  // empty: plain free evolution

  int segments() const;
  void validate(int n_spins) const;
};

// An instantaneous ideal unitary named by the gate grammar of ideal_gate_unitary.
struct IdealGate {
  std::string label;
};

using ScheduleItem = std::variant<PulseInterval, Delay, IdealGate>;

struct PulseSchedule {
  std::vector<ScheduleItem> items;
  double nominal_rf_rad_s = 2.0 * kPi * 10e3;

  double duration() const;
  void validate(int n_spins) const;
};

struct RfBin {
  double scale = 1.0;
  double weight = 1.0;
};

struct RfHistogram {
  std::vector<RfBin> bins;

  void validate() const;  // weights >= 0 summing to 1, scales > 0
  static RfHistogram single(double scale = 1.0);
};

// ---------------------------------------------------------------------------
// Propagators.

// Exact propagator of one RF interval on top of H_int, which must commute with
// the total z magnetization (true for every internal Hamiltonian built here).
CMatrix interval_propagator(const CMatrix& h_int, const PulseInterval& iv, double scale,
                            double nominal_rf_rad_s, int n_spins);

// Free evolution with the Walsh toggling pattern of the delay.
CMatrix delay_propagator(const CMatrix& h_int, const Delay& d, int n_spins);

// Gate grammar:
//   R<axis><angle deg>@<spins>   axis in {x, y, z}, e.g. Rx180@12, Ry-90@1, Rx22.5@13
//   H@<spin>                     Hadamard
//   B<j><k>:<angle deg>          diag(1, 1, 1, e^{i theta}) on spins j, k
//   SWAP<j><k>
// Spins are 1-based and may appear in any order. Throws PreconditionError on
// anything else.
CMatrix ideal_gate_unitary(const std::string& label, int n_spins);

// Product of the item propagators, first item acting first. With a spectator
// index the offsets of that spectator configuration are used.
CMatrix schedule_propagator(const PulseSchedule& sched, const SpinSystem& sys, double scale,
                            std::optional<std::size_t> spectator_index = std::nullopt);

// Same, for a system whose spectator shifts are already folded in.
CMatrix schedule_propagator_folded(const PulseSchedule& sched, const SpinSystem& shifted,
                                   double scale);

// ---------------------------------------------------------------------------
// Incoherent ensemble.

struct EnsembleMember {
  double weight = 1.0;
  double scale = 1.0;
  std::size_t spectator_index = 0;
  SpinSystem system;  // spectator shifts folded in
};

// Histogram bins crossed with spectator configurations (when enabled), bin
// index slowest. Weights multiply.
std::vector<EnsembleMember> ensemble_members(const SpinSystem& sys, const RfHistogram& hist,
                                             bool spectators);

struct IncoherentChannel {
  KrausSet kraus;  // sqrt(w_m) U_m, not mutually orthogonal in general
  Supermatrix super;
};

IncoherentChannel incoherent_superop(const PulseSchedule& sched, const SpinSystem& sys,
                                     const RfHistogram& hist, bool spectators, int threads = 1);

// sum_m |tr(U_th^dag A_m)|^2 / N^2.
double kraus_gate_fidelity(const CMatrix& u_th, const std::vector<CMatrix>& operators);
double kraus_gate_fidelity(const CMatrix& u_th, const KrausSet& k);

// ---------------------------------------------------------------------------
// QFT.

// (U)_{x', x} = exp(2 pi i x x' / N) / sqrt(N).
CMatrix qft_unitary(int n_spins);

enum class GateKind { hadamard, controlled_phase, relabel };

struct Gate {
  GateKind kind = GateKind::hadamard;
  int j = 0;           // 0-based
  int k = 0;           // 0-based; unused for hadamard
  double theta = 0.0;  // controlled_phase only

  std::string name() const;  // H1, B12(pi/2), SWAP13 style
};

// Application order: H_1, B_12(pi/2), ..., H_n, then the bit-reversal relabel.
std::vector<Gate> qft_circuit(int n_spins);

// Ideal unitary of a gate. The relabel gate returns the spin-reversal
// permutation.
CMatrix gate_unitary(const Gate& g, int n_spins);

// Maps gate labels of the ideal grammar onto schedules. An ideal library
// answers every label with a single IdealGate item.
class PulseLibrary {
 public:
  static PulseLibrary ideal();
  // Reads <dir>/index.json: {"schema_version": 1, "pulses": {"<label>": "<file>", ...}}.
  static PulseLibrary load(const std::string& dir);

  bool is_ideal() const noexcept { return ideal_; }
  bool contains(const std::string& label) const;
  PulseSchedule lookup(const std::string& label) const;
  void insert(const std::string& label, PulseSchedule sched);
  std::vector<std::string> labels() const;

 private:
  bool ideal_ = false;
  std::map<std::string, PulseSchedule> pulses_;
};

// Pulse-level realization of one gate.
struct CompiledGate {
  Gate gate;
  PulseSchedule schedule;
};

struct CompiledCircuit {
  std::vector<CompiledGate> gates;  // relabel gates excluded
  std::vector<int> relabel;         // output spin s carries input spin relabel[s]

  double duration() const;
};

// Hadamards become Ry90@j then Rx180@j. B_jk(theta) becomes
// [Rx180@j] Delay(|theta|/(2 pi |J_jk|)) [Rx180@j] Ry90@jk Rx(theta/2)@jk Ry-90@jk,
// the bracketed pulses present only when J_jk > 0, where the delay keeps only
// the j-k coupling through Walsh toggling.
CompiledCircuit compile_to_schedule(const std::vector<Gate>& gates, const SpinSystem& sys,
                                    const PulseLibrary& lib);

// Delay of `duration_s` keeping only the j-k zz coupling.
Delay coupling_delay(double duration_s, int j, int k, int n_spins);

// The relabel as a unitary permutation on the register.
CMatrix relabel_unitary(const std::vector<int>& relabel);

// Product of the ideal gate unitaries followed by the relabel permutation.
CMatrix ideal_circuit_unitary(const std::vector<Gate>& gates, int n_spins);

}  // namespace nmrqpt
