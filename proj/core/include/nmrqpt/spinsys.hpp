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

#include <string>
#include <vector>

#include "nmrqpt/errors.hpp"
#include "nmrqpt/types.hpp"

namespace nmrqpt {

enum class CouplingForm {
  isotropic,  // J (sigma_i . sigma_j)
  secular,    // J sigma_z^i sigma_z^j
};

// A spin that is not part of the register but shifts the register's
// resonance frequencies depending on its (constant) z state.
struct Spectator {
  std::string label;
  // Coupling to each system spin, Hz. Size equals SpinSystem::n_spins.
  std::vector<double> couplings_hz;
};

// Rotating-frame description of the system spins. Offsets are relative to the
// rotating-frame reference (spin 1 sits at 0 Hz in the shipped alanine data).
struct SpinSystem {
  int n_spins = 1;
  std::vector<double> offsets_hz;
  RMatrix j_couplings_hz;  // symmetric, zero diagonal
  CouplingForm coupling_form = CouplingForm::isotropic;
  std::vector<Spectator> spectators;

  // Throws PreconditionError/DimensionError when an invariant is broken.
  void validate() const;

  static SpinSystem uncoupled(int n_spins);
};

// Three 13C spins of alanine with the published offsets and couplings.
SpinSystem alanine_system(CouplingForm form = CouplingForm::isotropic);

// ---------------------------------------------------------------------------
// Single-spin operators and their embedding.

const CMatrix& pauli(char axis);  // '1', 'X', 'Y', 'Z'

// Operator acting as `op` on `spin` (0-based; spin 0 is the leftmost tensor
// factor, i.e. the most significant bit of the computational index).
CMatrix embed(const CMatrix& op, int spin, int n_spins);

// Sum over spins of sigma_axis / 2.
CMatrix total_spin(char axis, int n_spins);

// pi * sum_i nu_i Z_i + (pi/2) sum_{i<j} J_ij (sigma_i . sigma_j), in rad/s.
CMatrix internal_hamiltonian(const SpinSystem& sys);

// ---------------------------------------------------------------------------
// Product-operator basis.

struct PauliProduct {
  std::string label;  // one of 1XYZ per spin, spin 1 first
  std::size_t index = 0;

  CMatrix matrix() const;
  bool is_identity() const;
};

// Index in the canonical order; the label alphabet is ordered 1 < X < Y < Z and
// the last spin is the fastest-varying digit.
std::size_t po_index(const std::string& label);
PauliProduct po_product(const std::string& label);

// All 4^n products, identity first and all-Z last.
std::vector<PauliProduct> po_basis(int n_spins);

// c_a = tr(P_a rho) / N. Throws NotHermitianError beyond `tol`.
RVector po_decompose(const CMatrix& rho, double tol = 1e-10);
CMatrix po_assemble(const RVector& coefficients);

// Products with exactly one transverse (X or Y) factor and 1/Z elsewhere.
std::vector<PauliProduct> observable_set(int n_spins);

// ---------------------------------------------------------------------------
// Density matrices.

class DensityMatrix {
 public:
  // A deviation matrix carries no fixed trace; otherwise tr(rho) must be 1.
  explicit DensityMatrix(CMatrix rho, bool deviation = false);

  const CMatrix& matrix() const noexcept { return rho_; }
  bool is_deviation() const noexcept { return deviation_; }
  Index dim() const noexcept { return rho_.rows(); }

 private:
  CMatrix rho_;
  bool deviation_;
};

// ---------------------------------------------------------------------------
// Spectator configurations.

struct SpectatorConfiguration {
  std::vector<int> states;  // delta_j in {0, 1} for every spectator
  double weight = 1.0;
  SpinSystem shifted;        // spectators folded into the offsets
};

// One configuration per delta in {0,1}^m; offsets shifted by
// sum_j (-1)^delta_j J_j / 2; uniform weights. A system without spectators
// yields a single configuration equal to itself.
std::vector<SpectatorConfiguration> spectator_configurations(const SpinSystem& sys);

struct WeightedHamiltonian {
  double weight = 1.0;
  CMatrix hamiltonian;
};

std::vector<WeightedHamiltonian> spectator_hamiltonians(const SpinSystem& sys);

}  // namespace nmrqpt
