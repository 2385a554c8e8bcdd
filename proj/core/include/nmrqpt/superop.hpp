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

enum class Basis { zeeman, product_operator };

std::string to_string(Basis b);
Basis basis_from_string(const std::string& s);

// Linear map on columnized N x N matrices. In the zeeman basis the vector
// index of entry (i, j) is i + N * j.
struct Supermatrix {
  CMatrix matrix;
  Basis basis = Basis::zeeman;

  Index hilbert_dim() const;  // N, from N^2 = matrix.rows()
};

struct ChoiMatrix {
  CMatrix matrix;
  RVector eigenvalues;  // descending
  CMatrix eigenvectors; // columns match `eigenvalues`
};

struct NegativeMode {
  double eigenvalue = 0.0;
  CVector eigenvector;
};

// Operators of an operator-sum representation, sorted by descending amplitude
// a_k = ||A_k||_F / sqrt(N). Sets produced by kraus_of_choi are mutually
// trace-orthogonal; sets built from ensembles (see pulsesim) need not be.
struct KrausSet {
  std::vector<CMatrix> operators;
  std::vector<double> amplitudes;
  std::vector<NegativeMode> negativity;  // Choi eigenvalues below -tol
};

// ---------------------------------------------------------------------------
// Columnization.

CVector col(const CMatrix& m);
CMatrix uncol(const CVector& v);

// ---------------------------------------------------------------------------
// Representations.

// conj(U) (x) U. Throws NotUnitaryError when ||U^dag U - I||_F > tol.
Supermatrix unitary_superop(const CMatrix& u, double tol = 1e-10);

// The index rearrangement T[(p,q),(r,s)] = S[(s,q),(r,p)]; it is its own
// inverse, so super_of_choi applies the same map.
CMatrix choi_rearrange(const CMatrix& m);
ChoiMatrix choi_of(const Supermatrix& s);
Supermatrix super_of_choi(const ChoiMatrix& t);
Supermatrix super_of_choi(const CMatrix& t);

// Eigenvalues with |lambda| <= rel_tol * lambda_max count as zero; more
// negative ones land in KrausSet::negativity.
KrausSet kraus_of_choi(const ChoiMatrix& t, double rel_tol = 1e-9);
Supermatrix super_of_kraus(const std::vector<CMatrix>& operators);
Supermatrix super_of_kraus(const KrausSet& k);

// Sum of all Choi eigenvalues over the sum of the positive ones.
// Returns 0 (and fills `diagnostic`) when no eigenvalue is positive.
double positivity(const ChoiMatrix& t, std::string* diagnostic = nullptr);

// Partial trace of a Choi matrix over its second (fast) index. It equals the
// transpose of sum_k A_k^dag A_k, so a trace-preserving map gives I_N.
CMatrix choi_partial_trace(const CMatrix& t);
double tp_defect(const CMatrix& choi);
double min_eigenvalue_hermitian(const CMatrix& h);

// ---------------------------------------------------------------------------
// CPTP projection.

struct CptpOptions {
  double tol = 1e-9;
  int max_iter = 5000;
};

struct CptpIterate {
  int iteration = 0;
  double psd_defect = 0.0;  // max(0, -lambda_min) before the final fix-up
  double tp_defect = 0.0;
  double distance = 0.0;    // Frobenius distance of the Choi iterate to the input Choi
};

struct CptpResult {
  Supermatrix projected;
  std::vector<CptpIterate> log;
  bool converged = false;
  int iterations = 0;
  double min_eigenvalue = 0.0;  // of the returned Choi matrix
  double tp_defect = 0.0;       // of the returned Choi matrix
};

// Nearest completely-positive trace-preserving map in Choi/Frobenius norm by
// alternating projections (PSD clamp and trace-preservation subspace) with
// Dykstra corrections.
CptpResult project_cptp(const Supermatrix& s, const CptpOptions& opts = {});

// ---------------------------------------------------------------------------
// Correlations and fidelities.

// Traceless part.
CMatrix traceless(const CMatrix& m);

// Correlation of the traceless parts; throws UndefinedCorrelationError when a
// traceless part vanishes.
double state_correlation(const CMatrix& rho_th, const CMatrix& rho);
double attenuated_state_correlation(const CMatrix& rho_th, const CMatrix& rho,
                                    const CMatrix& rho_in);

// Re tr(S_th^dag S_op) normalized by both norms.
double super_correlation(const Supermatrix& s_th, const Supermatrix& s_op);
double super_correlation(const CMatrix& s_th, const CMatrix& s_op);
// Re tr(S_th^dag S_op) / tr(S_th^dag S_th); the entanglement fidelity when
// S_th is unitary.
double gate_fidelity(const Supermatrix& s_th, const Supermatrix& s_op);

// |tr(U^dag V)| / N: phase-quotiented overlap of two operators.
double unitary_overlap(const CMatrix& u, const CMatrix& v);
// V times the phase that maximizes Re tr(U^dag V).
CMatrix phase_aligned(const CMatrix& u, const CMatrix& v);

// ---------------------------------------------------------------------------
// Bases and spectra.

// Orthonormal change-of-basis matrix; column a is col(P_a)/sqrt(N).
const CMatrix& po_change_of_basis(int n_spins);
Supermatrix change_basis(const Supermatrix& s, Basis to);

// Full spectrum sorted by descending magnitude, then ascending phase.
// Throws NumericalError when the eigen-decomposition residual exceeds 1e-9.
std::vector<Complex> eigenvalues(const Supermatrix& s);
std::vector<Complex> eigenvalues(const CMatrix& m);

// Closest unitary in Frobenius norm, W V^dag from A = W Sigma V^dag.
CMatrix best_unitary_approx(const CMatrix& a);

}  // namespace nmrqpt
