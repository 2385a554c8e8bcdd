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


// Writes a Hermiticity- and trace-preserving map that is not completely
// positive: a 2-qubit amplitude-damped QFT whose Choi matrix is pushed along
// a seeded random direction with zero partial trace.
//
//   make_fixture <out file>

#include <cstdio>
#include <random>

#include "nmrqpt/matrix_io.hpp"
#include "nmrqpt/pulsesim.hpp"
#include "nmrqpt/superop.hpp"

int main(int argc, char** argv) {
  using namespace nmrqpt;
  if (argc != 2) {
    std::fprintf(stderr, "usage: make_fixture <out file>\n");
    return 2;
  }
  const int n = 2;
  const Index dim = hilbert_dim(n);
  const CMatrix u = qft_unitary(n);

  // Amplitude damping with gamma = 0.1 on every spin after the gate.
  const double g = 0.1;
  CMatrix k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1 - g);
  k1 << 0, std::sqrt(g), 0, 0;
  std::vector<CMatrix> kraus;
  for (const CMatrix& a : {k0, k1}) {
    for (const CMatrix& b : {k0, k1}) {
      CMatrix ab(dim, dim);
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) ab.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
      kraus.push_back(ab * u);
    }
  }
  const Supermatrix cptp = super_of_kraus(kraus);

  std::mt19937_64 rng(20020817);
  std::normal_distribution<double> gauss;
  CMatrix h(dim * dim, dim * dim);
  for (Index i = 0; i < h.rows(); ++i)
    for (Index j = 0; j < h.cols(); ++j) h(i, j) = Complex(gauss(rng), gauss(rng));
  h = (h + h.adjoint()).eval() / 2.0;
  // Remove the partial trace so the perturbation keeps the map trace preserving.
  const CMatrix pt = choi_partial_trace(h);
  for (Index a = 0; a < dim; ++a)
    for (Index b = 0; b < dim; ++b)
      for (Index k = 0; k < dim; ++k) h(a * dim + k, b * dim + k) -= pt(a, b) / static_cast<double>(dim);

  const CMatrix choi = choi_of(cptp).matrix + 0.02 * h;
  save_supermatrix(argv[1], super_of_choi(choi));
  std::printf("min Choi eigenvalue %.6g, tp defect %.3g\n", min_eigenvalue_hermitian(choi), tp_defect(choi));
  return 0;
}
