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


#include <gtest/gtest.h>

#include <random>

#include "nmrqpt/config.hpp"
#include "nmrqpt/pulsesim.hpp"
#include "nmrqpt/relax.hpp"
#include "nmrqpt/spinsys.hpp"
#include "oracles.hpp"

using namespace nmrqpt;

namespace {

RelaxationModel table() { return load_relaxation_rates(std::string(NMRQPT_DATA_DIR) + "/relax_rates_alanine.json"); }

}  // namespace

TEST(Relax, ZeroTimeIsIdentity) {
  const Supermatrix s = relax_superop(table(), 0.0);
  EXPECT_EQ(s.basis, Basis::product_operator);
  EXPECT_EQ(s.matrix, CMatrix(CMatrix::Identity(64, 64)));
}

TEST(Relax, TableEntries) {
  const RelaxationModel m = table();
  EXPECT_DOUBLE_EQ(m.rates(0), 0.0);
  EXPECT_NEAR(relax_superop(m, 1.0).matrix(po_index("Z11"), po_index("Z11")).real(), std::exp(-0.032), 1e-15);
  EXPECT_NEAR(relax_superop(m, 0.1).matrix(po_index("XXX"), po_index("XXX")).real(), std::exp(-1.458), 1e-15);
  // x|y groups share a rate.
  EXPECT_DOUBLE_EQ(m.rates(po_index("XYZ")), m.rates(po_index("YXZ")));
}

TEST(Relax, SemigroupAndDiagonal) {
  const RelaxationModel m = table();
  const CMatrix a = relax_superop(m, 0.013).matrix;
  const CMatrix b = relax_superop(m, 0.021).matrix;
  const CMatrix ab = relax_superop(m, 0.034).matrix;
  EXPECT_LT((a * b - ab).norm(), 1e-15);
  EXPECT_EQ((a - CMatrix(a.diagonal().asDiagonal())).norm(), 0.0);
  EXPECT_EQ(a(0, 0), Complex(1.0));
}

TEST(Relax, ZeemanImageMatchesDecayOfProducts) {
  const RelaxationModel m = table();
  const double t = 0.05;
  const Supermatrix z = relax_superop_zeeman(m, t);
  for (const auto& p : po_basis(3)) {
    const CMatrix img = uncol(z.matrix * col(p.matrix()));
    EXPECT_LT((img - std::exp(-m.rates(p.index) * t) * p.matrix()).norm(), 1e-12) << p.label;
  }
}

TEST(Relax, ChoiSpectrumIsReported) {
  const RelaxationModel m = table();
  EXPECT_NEAR(relax_min_choi_eigenvalue(m, 0.0), 0.0, 1e-12);
  const double lmin = relax_min_choi_eigenvalue(m, 0.05);
  EXPECT_NEAR(lmin, min_eigenvalue_hermitian(choi_of(relax_superop_zeeman(m, 0.05)).matrix), 1e-12);
}

TEST(Relax, Validation) {
  EXPECT_THROW(RelaxationModel::uniform(3, 0.0), PreconditionError);
  EXPECT_THROW(RelaxationModel::uniform(3, 1.2), PreconditionError);
  RVector r = RVector::Ones(64);
  EXPECT_THROW(RelaxationModel::po_rates(3, r), PreconditionError);  // identity rate must be zero
  r(0) = 0.0;
  r(5) = -1.0;
  EXPECT_THROW(RelaxationModel::po_rates(3, r), PreconditionError);
  EXPECT_THROW(RelaxationModel::po_rates(3, RVector::Zero(16)), Error);
  EXPECT_THROW(relax_superop(table(), -1.0), PreconditionError);
}

TEST(Relax, UniformAttenuationOfStates) {
  std::mt19937_64 rng(1);
  const CMatrix rho = oracle::random_density(rng, 8);
  EXPECT_LT((apply_uniform_attenuation(rho, 1.0) - rho).norm(), 1e-15);

  // Pure state: tr rho'^2 = (1 + eta^2 (N tr rho^2 - 1)) / N.
  const oracle::V psi = oracle::random_complex(rng, 8, 1).col(0).normalized();
  const CMatrix pure = psi * psi.adjoint();
  const double eta = 0.82;
  const CMatrix out = apply_uniform_attenuation(pure, eta);
  EXPECT_NEAR(out.trace().real(), 1.0, 1e-14);
  EXPECT_NEAR((out * out).trace().real(), (1.0 + eta * eta * (8.0 - 1.0)) / 8.0, 1e-12);
}

TEST(Relax, UniformAttenuationOfChannels) {
  const double eta = 0.82;
  const Supermatrix q = unitary_superop(qft_unitary(3));
  const Supermatrix a = apply_uniform_attenuation(q, eta);
  // Correlation over the traceless block stays 1; gate fidelity picks up eta.
  const RelaxationModel u = RelaxationModel::uniform(3, eta);
  const Supermatrix d = relax_superop(u, 123.0);
  EXPECT_NEAR(d.matrix(0, 0).real(), 1.0, 0.0);
  for (Index i = 1; i < 64; ++i) EXPECT_NEAR(d.matrix(i, i).real(), eta, 1e-15);
  const auto ev = eigenvalues(a);
  int ones = 0;
  for (const Complex& z : ev) {
    if (std::abs(std::abs(z) - 1.0) < 1e-10) {
      ++ones;
    } else {
      EXPECT_NEAR(std::abs(z), eta, 1e-10);
    }
  }
  EXPECT_EQ(ones, 1);
  const Supermatrix qp = change_basis(q, Basis::product_operator);
  const Supermatrix ap = change_basis(a, Basis::product_operator);
  CMatrix qt = qp.matrix, at = ap.matrix;
  qt.row(0).setZero();
  qt.col(0).setZero();
  at.row(0).setZero();
  at.col(0).setZero();
  EXPECT_NEAR(super_correlation(qt, at), 1.0, 1e-12);
  EXPECT_NEAR(gate_fidelity(Supermatrix{qt, Basis::product_operator}, Supermatrix{at, Basis::product_operator}), eta, 1e-12);
}
