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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nmrqpt/superop.hpp"
#include "nmrqpt/types.hpp"

namespace nmrqpt {

struct LabeledSupermatrix {
  std::string label;
  Supermatrix matrix;
};

struct CorrelationEntry {
  std::string row;
  std::string col;
  double correlation = 0.0;
  double attenuated = 0.0;  // Re tr(S_row^dag S_col) / tr(S_row^dag S_row)
};

struct FixedPointEntry {
  std::string label;
  double correlation = 0.0;
  double attenuated = 0.0;
};

struct ErrorReport {
  std::vector<double> kraus_amplitudes;  // descending
  double positivity = 1.0;
  double choi_min_max_ratio = 0.0;
  CMatrix largest_kraus;                 // A_1
  CMatrix largest_kraus_unitary;         // closest unitary to A_1
  double kraus1_theory_correlation = 0.0;    // Re-part correlation of A_1 with U_th, phase aligned
  double unitary1_theory_overlap = 0.0;      // |tr(U_th^dag U_1)| / N
  std::vector<CorrelationEntry> correlations;  // every ordered pair of labeled maps
  std::vector<FixedPointEntry> fixed_points;
};

// Full report of an observed map against the theoretical unitary and any
// number of labeled references. The observed map is labeled "observed" and the
// theoretical channel "theory" in the correlation table.
ErrorReport decompose(const Supermatrix& observed, const CMatrix& u_theory,
                      const std::vector<LabeledSupermatrix>& references = {});

enum class CorrectionSide { left, right };

std::string to_string(CorrectionSide side);

// left:  (conj(U_th) (x) U_th) (conj(U_1) (x) U_1)^dag M
// right: M (conj(U_1) (x) U_1)^dag (conj(U_th) (x) U_th)
Supermatrix coherent_correction(const Supermatrix& m, const CMatrix& u1, const CMatrix& u_theory,
                                CorrectionSide side = CorrectionSide::left);

// Residual unitary the correction removes: U_1 U_th^dag (left) or U_th^dag U_1 (right).
CMatrix delta_unitary(const CMatrix& u1, const CMatrix& u_theory, CorrectionSide side);

struct SpinRotation {
  std::array<double, 3> axis{1.0, 0.0, 0.0};  // unit vector
  double angle_deg = 0.0;                     // in [0, 180]
};

struct RotationFit {
  std::vector<SpinRotation> rotations;  // one per spin
  CorrectionSide side = CorrectionSide::left;
  double correlation = 0.0;             // |tr(R^dag U_delta)| / N for the fitted product R
  bool low_confidence = false;          // correlation below 0.5
};

// exp(-i angle (axis . sigma) / 2).
CMatrix spin_rotation_matrix(const SpinRotation& r);
CMatrix rotation_product(const std::vector<SpinRotation>& rotations);

// Product of single-spin rotations closest to U_delta up to global phase:
// partial-trace warm start, then a seeded multi-start simplex over spherical
// axis angles and rotation angle per spin.
RotationFit fit_single_spin_rotations(const CMatrix& u_delta, CorrectionSide side = CorrectionSide::left,
                                      std::uint64_t seed = 7);

// Correlation between op and S(op).
double fixed_point_check(const Supermatrix& s, const CMatrix& op);
// Attenuated form: correlation scaled by ||S(op)|| / ||op|| on traceless parts.
double fixed_point_attenuated(const Supermatrix& s, const CMatrix& op);

struct LabeledSpectrum {
  std::string label;
  std::vector<Complex> eigenvalues;   // magnitude sorted
  std::vector<Complex> rms_normalized;  // same, scaled to unit RMS magnitude
};

std::vector<LabeledSpectrum> spectrum_report(const std::vector<LabeledSupermatrix>& maps, int threads = 1);

// RMS angular distance (radians) of each eigenvalue to the nearest reference phase.
double angular_spread(const std::vector<Complex>& eigenvalues, const std::vector<double>& reference_phases);

// Phases of the fourth roots of unity, the spectrum of every QFT superoperator.
std::vector<double> qft_reference_phases();

}  // namespace nmrqpt
