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

#include "nmrqpt/pulsesim.hpp"
#include "nmrqpt/superop.hpp"
#include "oracles.hpp"

using namespace nmrqpt;

namespace {

Supermatrix zs(const CMatrix& m) { return {m, Basis::zeeman}; }

}  // namespace

TEST(Superop, ColumnizationDefinition) {
  CMatrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const CVector v = col(m);
  EXPECT_EQ(v(0), Complex(1.0));
  EXPECT_EQ(v(1), Complex(3.0));
  EXPECT_EQ(v(2), Complex(2.0));
  EXPECT_EQ(v(3), Complex(4.0));
  const CVector i2 = col(CMatrix::Identity(2, 2));
  EXPECT_EQ(i2, oracle::col(CMatrix::Identity(2, 2)));
  std::mt19937_64 rng(1);
  const CMatrix r = oracle::random_complex(rng, 8, 8);
  EXPECT_EQ(uncol(col(r)), r);
  EXPECT_THROW(col(CMatrix::Zero(2, 3)), DimensionError);
}

TEST(Superop, UnitarySuperopActsAsConjugation) {
  std::mt19937_64 rng(2);
  EXPECT_LT((unitary_superop(CMatrix::Identity(8, 8)).matrix - CMatrix::Identity(64, 64)).norm(), 1e-15);
  const CMatrix u = oracle::random_unitary(rng, 8);
  const Supermatrix s = unitary_superop(u);
  const CMatrix rho = oracle::random_density(rng, 8);
  EXPECT_LT((uncol(s.matrix * col(rho)) - u * rho * u.adjoint()).norm(), 1e-12);
  EXPECT_LT((s.matrix - oracle::super_from_kraus({u})).norm(), 1e-12);
  for (const Complex& z : eigenvalues(s)) EXPECT_NEAR(std::abs(z), 1.0, 1e-9);
  EXPECT_THROW(unitary_superop(2.0 * u), NotUnitaryError);
}

TEST(Superop, ChoiMatchesDefinitionAndIsInvolution) {
  std::mt19937_64 rng(3);
  const CMatrix s = oracle::random_complex(rng, 16, 16);
  EXPECT_LT((choi_rearrange(s) - oracle::choi(s)).norm(), 1e-12);
  EXPECT_EQ(choi_rearrange(choi_rearrange(s)), s);
  EXPECT_EQ(super_of_choi(choi_of(zs(s))).matrix, s);
}

TEST(Superop, ChoiOfIdentityAndDepolarizing) {
  const ChoiMatrix t = choi_of(zs(CMatrix::Identity(64, 64)));
  EXPECT_NEAR(t.eigenvalues(0), 8.0, 1e-10);
  EXPECT_LT(t.eigenvalues.tail(63).cwiseAbs().maxCoeff(), 1e-10);

  // rho -> tr(rho) I / N.
  const Index n = 4;
  CMatrix dep = CMatrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) dep(k + n * k, i + n * i) = 1.0 / n;
  const ChoiMatrix td = choi_of(zs(dep));
  EXPECT_LT((td.matrix - CMatrix::Identity(n * n, n * n) / double(n)).norm(), 1e-14);
  for (Index a = 0; a < td.eigenvalues.size(); ++a) EXPECT_NEAR(td.eigenvalues(a), 1.0 / n, 1e-12);
}

TEST(Superop, KrausRoundTripOnRandomChannels) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 3;
    const auto kraus = oracle::random_kraus(rng, hilbert_dim(n), 1 + trial % 4);
    const CMatrix s = oracle::super_from_kraus(kraus);
    EXPECT_LT((super_of_kraus(kraus).matrix - s).norm(), 1e-12);
    const KrausSet k = kraus_of_choi(choi_of(zs(s)));
    EXPECT_TRUE(k.negativity.empty());
    EXPECT_LT((super_of_kraus(k).matrix - s).norm(), 1e-10);
    for (std::size_t a = 1; a < k.amplitudes.size(); ++a) EXPECT_LE(k.amplitudes[a], k.amplitudes[a - 1]);
    double total = 0.0;
    for (const auto& a : k.operators) total += (a.adjoint() * a).trace().real();
    EXPECT_NEAR(total, double(hilbert_dim(n)), 1e-10);
    for (std::size_t a = 0; a < k.operators.size(); ++a)
      for (std::size_t b = a + 1; b < k.operators.size(); ++b)
        EXPECT_LT(std::abs((k.operators[a].adjoint() * k.operators[b]).trace()), 1e-10);
  }
}

TEST(Superop, KrausExamples) {
  std::mt19937_64 rng(5);
  const CMatrix u = oracle::random_unitary(rng, 4);
  const KrausSet k = kraus_of_choi(choi_of(unitary_superop(u)));
  ASSERT_EQ(k.operators.size(), 1u);
  EXPECT_NEAR(k.amplitudes[0], 1.0, 1e-12);
  EXPECT_NEAR(unitary_overlap(u, k.operators[0]), 1.0, 1e-12);

  const double h = std::sqrt(0.5);
  const KrausSet mix = kraus_of_choi(choi_of(super_of_kraus(std::vector<CMatrix>{h * oracle::sigma('1'), h * oracle::sigma('Z')})));
  ASSERT_EQ(mix.amplitudes.size(), 2u);
  EXPECT_NEAR(mix.amplitudes[0], h, 1e-12);
  EXPECT_NEAR(mix.amplitudes[1], h, 1e-12);

  const double p = 0.75;
  const Supermatrix s = super_of_kraus(std::vector<CMatrix>{std::sqrt(p) * oracle::sigma('1'), std::sqrt(1 - p) * oracle::sigma('Z')});
  CMatrix expect = CMatrix::Zero(4, 4);
  expect.diagonal() << 1.0, 2 * p - 1, 2 * p - 1, 1.0;
  EXPECT_LT((s.matrix - expect).norm(), 1e-14);
  EXPECT_LT((super_of_kraus(std::vector<CMatrix>{CMatrix::Identity(4, 4)}).matrix - CMatrix::Identity(16, 16)).norm(), 1e-15);
}

TEST(Superop, KrausNegativityIsReportedNotDropped) {
  CMatrix t = CMatrix::Zero(4, 4);
  t.diagonal() << 1.5, 0.7, 0.3, -0.2;
  const KrausSet k = kraus_of_choi(choi_of(super_of_choi(t)));
  EXPECT_EQ(k.operators.size(), 3u);
  ASSERT_EQ(k.negativity.size(), 1u);
  EXPECT_NEAR(k.negativity[0].eigenvalue, -0.2, 1e-12);
}

TEST(Superop, Positivity) {
  std::mt19937_64 rng(6);
  const auto kraus = oracle::random_kraus(rng, 4, 3);
  EXPECT_NEAR(positivity(choi_of(super_of_kraus(kraus))), 1.0, 1e-12);
  CMatrix d = CMatrix::Zero(4, 4);
  d.diagonal() << 3.0, 1.0, -1.0, 0.0;
  EXPECT_NEAR(positivity(choi_of(super_of_choi(d))), 0.75, 1e-12);
  std::string diag;
  EXPECT_EQ(positivity(choi_of(super_of_choi(CMatrix(-CMatrix::Identity(4, 4)))), &diag), 0.0);
  EXPECT_FALSE(diag.empty());
}

TEST(Superop, CptpProjectionFixesCptpMaps) {
  std::mt19937_64 rng(7);
  const Supermatrix s = super_of_kraus(oracle::random_kraus(rng, 4, 2));
  const CptpResult r = project_cptp(s);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LT((r.projected.matrix - s.matrix).norm(), 1e-9);
}

TEST(Superop, CptpProjectionOfPerturbedUnitaryStaysClose) {
  // One qubit: compare with a brute-force constrained least-squares descent.
  std::mt19937_64 rng(8);
  const CMatrix u = oracle::random_unitary(rng, 2);
  const CMatrix t0 = choi_of(unitary_superop(u)).matrix;
  CMatrix h = oracle::random_hermitian(rng, 4);
  const CMatrix pt = choi_partial_trace(h);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b)
      for (Index k = 0; k < 2; ++k) h(a * 2 + k, b * 2 + k) -= pt(a, b) / 2.0;
  const double eps = 1e-3;
  h *= eps / h.norm();
  const CMatrix perturbed = t0 + h;
  const CptpResult r = project_cptp(super_of_choi(perturbed));
  EXPECT_LT((r.projected.matrix - unitary_superop(u).matrix).norm(), 2 * eps);

  // Brute force: best CPTP Choi among T(G) = G G^dag with TP enforced by
  // whitening, minimizing distance by random small steps.
  auto cptp_of = [](const CMatrix& g) {
    CMatrix t = g * g.adjoint();
    const CMatrix p = choi_partial_trace(t);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(p);
    const CMatrix w = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                      es.eigenvectors().adjoint();
    // (W (x) I) T (W (x) I) has partial trace W P W = I.
    const CMatrix big = oracle::kron(w, CMatrix::Identity(2, 2));
    return CMatrix(big * t * big.adjoint());
  };
  Eigen::SelfAdjointEigenSolver<CMatrix> es0(t0);
  CMatrix g = es0.eigenvectors() * es0.eigenvalues().cwiseMax(1e-6).cwiseSqrt().asDiagonal();
  double best = (cptp_of(g) - perturbed).norm();
  std::normal_distribution<double> gauss;
  double step = 1e-3;
  for (int it = 0; it < 20000; ++it) {
    const CMatrix trial = g + step * oracle::random_complex(rng, 4, 4);
    const double d = (cptp_of(trial) - perturbed).norm();
    if (d < best) {
      best = d;
      g = trial;
    } else if (it % 2000 == 1999) {
      step *= 0.5;
    }
  }
  const double ours = (choi_of(r.projected).matrix - perturbed).norm();
  EXPECT_LE(ours, best + 1e-6);
}

TEST(Superop, CptpProjectionRepairsNonCpInputs) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Supermatrix s = super_of_kraus(oracle::random_kraus(rng, 4, 2));
    const CMatrix feasible = choi_of(s).matrix;
    const CMatrix t = feasible + 0.2 * oracle::random_hermitian(rng, 16);
    const CptpResult r = project_cptp(super_of_choi(t));
    EXPECT_TRUE(r.converged);
    EXPECT_GE(r.min_eigenvalue, -1e-9);
    EXPECT_LT(r.tp_defect, 1e-6);
    // Any CPTP map is at least as far from the input as the projection.
    EXPECT_LE((choi_of(r.projected).matrix - t).norm(), (feasible - t).norm() + 1e-6);
    ASSERT_FALSE(r.log.empty());
    EXPECT_EQ(r.log.back().iteration, r.iterations);
  }
}

TEST(Superop, CorrelationsExamples) {
  std::mt19937_64 rng(10);
  const CMatrix rho = oracle::random_hermitian(rng, 8);
  EXPECT_NEAR(state_correlation(rho, rho), 1.0, 1e-12);
  const CMatrix half = 0.5 * rho;
  const CMatrix rho_in = rho;
  EXPECT_NEAR(state_correlation(rho, half), 1.0, 1e-12);
  EXPECT_NEAR(attenuated_state_correlation(rho, half, rho_in), 0.5, 1e-12);
  EXPECT_THROW(state_correlation(rho, CMatrix::Identity(8, 8)), Error);

  const Supermatrix s = unitary_superop(oracle::random_unitary(rng, 4));
  EXPECT_NEAR(super_correlation(s, s), 1.0, 1e-12);
  EXPECT_NEAR(gate_fidelity(s, s), 1.0, 1e-12);
  const Supermatrix scaled{0.82 * s.matrix, Basis::zeeman};
  EXPECT_NEAR(gate_fidelity(s, scaled), 0.82, 1e-12);
}

TEST(Superop, GateFidelityVersusMeanAttenuatedStateCorrelation) {
  // For trace-preserving channels and exact product-operator inputs the
  // identity block contributes exactly 1, so the full-space fidelity F and
  // the traceless mean m obey N^2 F = 1 + (N^2 - 1) m. Hence m <= F <= 1.
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix u = oracle::random_unitary(rng, 4);
    const Supermatrix op = super_of_kraus(oracle::random_kraus(rng, 4, 3));
    const Supermatrix th = unitary_superop(u);
    double mean = 0.0;
    const auto basis = po_basis(2);
    for (std::size_t a = 1; a < basis.size(); ++a) {
      const CMatrix p = basis[a].matrix();
      mean += attenuated_state_correlation(u * p * u.adjoint(), uncol(op.matrix * col(p)), p);
    }
    mean /= 15.0;
    const double f = gate_fidelity(th, op);
    EXPECT_NEAR(16.0 * f, 1.0 + 15.0 * mean, 1e-12);
    EXPECT_LE(mean, f + 1e-12);
  }
}

TEST(Superop, ChangeBasisInvariants) {
  std::mt19937_64 rng(13);
  const Supermatrix s{oracle::random_complex(rng, 16, 16), Basis::zeeman};
  const Supermatrix p = change_basis(s, Basis::product_operator);
  EXPECT_EQ(p.basis, Basis::product_operator);
  EXPECT_NEAR(p.matrix.norm(), s.matrix.norm(), 1e-10);
  EXPECT_LT((change_basis(p, Basis::zeeman).matrix - s.matrix).norm(), 1e-10);
  const auto e1 = eigenvalues(s);
  const auto e2 = eigenvalues(p);
  for (std::size_t i = 0; i < e1.size(); ++i) EXPECT_LT(std::abs(e1[i] - e2[i]), 1e-9);
  EXPECT_LT((change_basis(Supermatrix{CMatrix::Identity(64, 64), Basis::zeeman}, Basis::product_operator).matrix -
             CMatrix::Identity(64, 64)).norm(), 1e-12);
}

TEST(Superop, QftIsRealInPoBasisWithFixedPoint) {
  const Supermatrix q = change_basis(unitary_superop(qft_unitary(3)), Basis::product_operator);
  EXPECT_LT(q.matrix.imag().cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(q.matrix(19, 19).real(), 1.0, 1e-12);
}

TEST(Superop, EigenvaluesOfCptpMaps) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ev = eigenvalues(super_of_kraus(oracle::random_kraus(rng, 4, 3)));
    for (const Complex& z : ev) EXPECT_LE(std::abs(z), 1.0 + 1e-9);
    EXPECT_NEAR(std::abs(ev.front() - Complex(1.0)), 0.0, 1e-9);
    for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_LE(std::abs(ev[i]), std::abs(ev[i - 1]) + 1e-9);
  }
}

TEST(Superop, BestUnitaryApprox) {
  std::mt19937_64 rng(15);
  const CMatrix u = oracle::random_unitary(rng, 8);
  EXPECT_LT((best_unitary_approx(u) - u).norm(), 1e-12);
  const CMatrix q = qft_unitary(3);
  EXPECT_LT((best_unitary_approx(0.86 * q) - q).norm(), 1e-12);
  EXPECT_THROW(best_unitary_approx(CMatrix::Zero(2, 2)), Error);

  const CMatrix a = oracle::random_complex(rng, 4, 4);
  const CMatrix w = best_unitary_approx(a);
  const Complex tr = (w.adjoint() * a).trace();
  EXPECT_NEAR(tr.imag(), 0.0, 1e-10);
  for (int k = 0; k < 1000; ++k) {
    const CMatrix h = oracle::random_hermitian(rng, 4);
    const CMatrix wp = w * oracle::expm(Complex(0, 1e-2) * h);
    EXPECT_LE((wp.adjoint() * a).trace().real(), tr.real() + 1e-12);
  }
}

TEST(Superop, KrausFidelityEqualsAttenuatedCorrelation) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix u = oracle::random_unitary(rng, 8);
    const auto kraus = oracle::random_kraus(rng, 8, 1 + trial % 5);
    EXPECT_NEAR(kraus_gate_fidelity(u, kraus), gate_fidelity(unitary_superop(u), super_of_kraus(kraus)), 1e-12);
  }
}
