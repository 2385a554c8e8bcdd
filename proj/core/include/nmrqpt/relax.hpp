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

#include "nmrqpt/superop.hpp"
#include "nmrqpt/types.hpp"

namespace nmrqpt {

// Decoherence without cross-relaxation: each product operator decays at its
// own rate, or every traceless component shrinks by a common factor.
struct RelaxationModel {
  enum class Variant { po_rates, uniform };

  Variant variant = Variant::uniform;
  int n_spins = 1;
  RVector rates;     // per PO index, s^-1; rates(0) = 0 (po_rates only)
  double eta = 1.0;  // per-application factor (uniform only)

  void validate() const;

  static RelaxationModel uniform(int n_spins, double eta);
  static RelaxationModel po_rates(int n_spins, RVector rates);
};

// Diagonal supermatrix in the product-operator basis. The uniform variant
// ignores t: it is applied once per application.
Supermatrix relax_superop(const RelaxationModel& model, double t);

// Same map in the zeeman basis.
Supermatrix relax_superop_zeeman(const RelaxationModel& model, double t);

// Smallest Choi eigenvalue of the relaxation map over t (diagonal decay need
// not be completely positive).
double relax_min_choi_eigenvalue(const RelaxationModel& model, double t);

// Identity component kept, traceless part scaled by eta.
CMatrix apply_uniform_attenuation(const CMatrix& rho, double eta);
// D_eta composed after S.
Supermatrix apply_uniform_attenuation(const Supermatrix& s, double eta);

}  // namespace nmrqpt
