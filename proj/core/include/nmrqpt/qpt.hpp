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
#include "nmrqpt/relax.hpp"
#include "nmrqpt/spinsys.hpp"
#include "nmrqpt/superop.hpp"

namespace nmrqpt {

// One readout: per spin 'I' (nothing), 'X' (90 deg about x) or 'Y' (90 deg about y).
struct Readout {
  std::string per_spin;

  std::string name() const;                        // e.g. "IXY"
  std::vector<std::string> pulse_labels() const;   // e.g. {"Rx90@2", "Ry90@3"}
  CMatrix ideal_unitary() const;
};

// Product operators a readout turns into observables (indices into po_basis).
std::vector<std::size_t> exposed_products(const Readout& r);

// Smallest readout set containing the identity readout whose exposed products
// cover every non-identity product operator, found by exhaustive search (ties
// resolved lexicographically). Throws NumericalError listing the unspanned
// products if no cover exists.
std::vector<Readout> readout_pulses(int n_spins);

// Linear map from the 4^n - 1 traceless PO coefficients to the readout signals,
// one row per (readout, observable) pair in readout-major order.
struct TomographyDesign {
  int n_spins = 1;
  std::vector<Readout> readouts;
  std::vector<PauliProduct> observables;
  RMatrix matrix;   // rows: readouts x observables, cols: PO indices 1..4^n-1
  RMatrix solver;   // least-squares left inverse of `matrix`
};

// Throws RankDeficientError when the readouts do not determine every coefficient.
TomographyDesign tomography_design(int n_spins, const std::vector<Readout>& readouts);

// Observable coefficients tr(O rho) / N of a state, in observable_set order.
RVector observe(const CMatrix& rho, const std::vector<PauliProduct>& observables);

// Least-squares estimate from signals; the identity coefficient is supplied.
CMatrix estimate_state(const TomographyDesign& design, const RVector& signals, double identity_coefficient);

struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Deterministic stream key for (seed, state, readout, phase).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t state, std::uint64_t readout, std::uint64_t phase);

// Weighted readout realizations: unitaries[m][r] is readout r in ensemble
// member m. Empty means ideal readouts.
struct ReadoutEnsemble {
  std::vector<double> weights;
  std::vector<std::vector<CMatrix>> unitaries;
};

// Readout signals of rho, averaged over the readout ensemble.
RVector tomography_signals(const CMatrix& rho, const TomographyDesign& design,
                           const ReadoutEnsemble& ensemble = {});

// Full simulated state tomography with Gaussian noise on every signal.
CMatrix state_tomography(const CMatrix& rho, const TomographyDesign& design, const NoiseModel& noise,
                         std::uint64_t state_index = 0, std::uint64_t phase = 0,
                         const ReadoutEnsemble& ensemble = {});

// 64 deviation inputs: the identity, then P_a for every non-identity product.
std::vector<DensityMatrix> prepare_input_states(int n_spins);
// Same, each passed through `imperfection` (zeeman basis).
std::vector<DensityMatrix> prepare_input_states(int n_spins, const Supermatrix& imperfection);

// M_obs = R_out R_in^-1. Throws IllConditionedError above `condition_bound`.
Supermatrix reconstruct_supermatrix(const CMatrix& r_in, const CMatrix& r_out, double condition_bound = 1e6,
                                    double* condition = nullptr);

// ---------------------------------------------------------------------------

struct QptSettings {
  SpinSystem system;
  PulseLibrary library = PulseLibrary::ideal();
  RfHistogram histogram = RfHistogram::single();
  std::optional<RelaxationModel> relaxation;  // po_rates per gate, uniform once at the end
  bool incoherence = false;                   // off: single bin at scale 1
  bool spectators = false;
  bool preparation_imperfection = false;
  bool readout_imperfection = true;           // readouts through the pulse library
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
  double condition_bound = 1e6;
  std::vector<Gate> circuit;                  // empty: qft_circuit(n)
};

struct TomographyRecord {
  int phase = 0;  // 0 input, 1 output
  std::size_t state = 0;
  std::size_t readout = 0;
  std::uint64_t noise_seed = 0;
  RVector signals;  // observed, noise included
};

struct QptRun {
  std::vector<std::string> input_labels;
  std::vector<Readout> readouts;
  std::vector<TomographyRecord> records;
  std::vector<CMatrix> inputs_estimated;
  std::vector<CMatrix> outputs_estimated;
  Supermatrix r_in, r_out, m_obs;
  double condition_number = 0.0;
  Supermatrix simulated;   // the exact ensemble channel, relabel included
  CMatrix u_theory;        // ideal circuit, relabel included
  std::vector<double> input_correlations;   // per non-identity state
  std::vector<double> output_correlations;  // against U_th P_a U_th^dag
  std::vector<double> attenuated_output_correlations;
  double circuit_duration_s = 0.0;
  std::uint64_t seed = 0;
};

QptRun run_qpt(const QptSettings& settings);

}  // namespace nmrqpt
