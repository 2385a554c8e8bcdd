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

#include "nmrqpt/relax.hpp"

#include <cmath>

namespace nmrqpt {

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("attenuation factor must lie in (0, 1]");
}

}  // namespace

void RelaxationModel::validate() const {
  if (n_spins < 1 || n_spins > kMaxSpins) throw DimensionError("relaxation model: bad spin count");
  if (variant == Variant::uniform) {
    check_eta(eta);
    return;
  }
  const Index count = hilbert_dim(n_spins) * hilbert_dim(n_spins);
  if (rates.size() != count) throw PreconditionError("relaxation model: need one rate per product operator");
  if (rates(0) != 0.0) throw PreconditionError("relaxation model: the identity must not decay");
  for (Index i = 0; i < count; ++i) {
    if (!(rates(i) >= 0.0) || !std::isfinite(rates(i))) {
      throw PreconditionError("relaxation model: rates must be finite and nonnegative");
    }
  }
}

RelaxationModel RelaxationModel::uniform(int n_spins, double eta) {
  RelaxationModel m;
  m.variant = Variant::uniform;
  m.n_spins = n_spins;
  m.eta = eta;
  m.validate();
  return m;
}

RelaxationModel RelaxationModel::po_rates(int n_spins, RVector rates) {
  RelaxationModel m;
  m.variant = Variant::po_rates;
  m.n_spins = n_spins;
  m.rates = std::move(rates);
  m.validate();
  return m;
}

Supermatrix relax_superop(const RelaxationModel& model, double t) {
  model.validate();
  if (!(t >= 0.0)) throw PreconditionError("relax_superop: t must be nonnegative");
  const Index count = hilbert_dim(model.n_spins) * hilbert_dim(model.n_spins);
  RVector diag(count);
  for (Index a = 0; a < count; ++a) {
    if (a == 0) {
      diag(a) = 1.0;
    } else if (model.variant == RelaxationModel::Variant::uniform) {
      diag(a) = model.eta;
    } else {
      diag(a) = std::exp(-model.rates(a) * t);
    }
  }
  return {diag.cast<Complex>().asDiagonal(), Basis::product_operator};
}

Supermatrix relax_superop_zeeman(const RelaxationModel& model, double t) {
  return change_basis(relax_superop(model, t), Basis::zeeman);
}

double relax_min_choi_eigenvalue(const RelaxationModel& model, double t) {
  return choi_of(relax_superop_zeeman(model, t)).eigenvalues.minCoeff();
}

CMatrix apply_uniform_attenuation(const CMatrix& rho, double eta) {
  check_eta(eta);
  if (rho.rows() != rho.cols()) throw DimensionError("apply_uniform_attenuation: matrix is not square");
  CMatrix out = eta * rho;
  out.diagonal().array() += (1.0 - eta) * rho.trace() / static_cast<double>(rho.rows());
  return out;
}

Supermatrix apply_uniform_attenuation(const Supermatrix& s, double eta) {
  check_eta(eta);
  if (s.basis == Basis::product_operator) {
    Supermatrix out = s;
    out.matrix.bottomRows(out.matrix.rows() - 1) *= eta;
    return out;
  }
  // D = eta I + (1 - eta) col(I) col(I)^dag / N maps col(rho) to the
  // attenuated state.
  const Index n = s.hilbert_dim();
  const CVector ci = col(CMatrix::Identity(n, n));
  Supermatrix out = s;
  out.matrix = eta * s.matrix + ((1.0 - eta) / static_cast<double>(n)) * ci * (ci.adjoint() * s.matrix);
  return out;
}

}  // namespace nmrqpt
