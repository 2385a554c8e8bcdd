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

#include "nmrqpt/spinsys.hpp"

#include <cmath>
#include <sstream>

namespace nmrqpt {

namespace {

int spins_for_dim(Index dim) {
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  if ((Index{1} << n) != dim || n < 1) {
    throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two >= 2");
  }
  return n;
}

void check_spin_count(int n_spins) {
  if (n_spins < 1) throw PreconditionError("n_spins must be >= 1");
  if (n_spins > kMaxSpins) {
    throw DimensionError("n_spins = " + std::to_string(n_spins) + " exceeds the limit of " +
                         std::to_string(kMaxSpins));
  }
}

}  // namespace

void SpinSystem::validate() const {
  check_spin_count(n_spins);
  if (static_cast<int>(offsets_hz.size()) != n_spins) {
    throw PreconditionError("offsets_hz must have n_spins entries");
  }
  for (double v : offsets_hz) {
    if (!std::isfinite(v)) throw PreconditionError("offsets_hz must be finite");
  }
  if (j_couplings_hz.rows() != n_spins || j_couplings_hz.cols() != n_spins) {
    throw PreconditionError("j_couplings_hz must be n_spins x n_spins");
  }
  for (int i = 0; i < n_spins; ++i) {
    if (j_couplings_hz(i, i) != 0.0) throw PreconditionError("j_couplings_hz diagonal must be zero");
    for (int k = 0; k < n_spins; ++k) {
      if (!std::isfinite(j_couplings_hz(i, k)) || j_couplings_hz(i, k) != j_couplings_hz(k, i)) {
        throw PreconditionError("j_couplings_hz must be finite and symmetric");
      }
    }
  }
  for (const auto& s : spectators) {
    if (static_cast<int>(s.couplings_hz.size()) != n_spins) {
      throw PreconditionError("spectator '" + s.label + "' needs one coupling per system spin");
    }
  }
}

SpinSystem SpinSystem::uncoupled(int n_spins) {
  check_spin_count(n_spins);
  SpinSystem sys;
  sys.n_spins = n_spins;
  sys.offsets_hz.assign(n_spins, 0.0);
  sys.j_couplings_hz = RMatrix::Zero(n_spins, n_spins);
  return sys;
}

SpinSystem alanine_system(CouplingForm form) {
  SpinSystem sys;
  sys.n_spins = 3;
  sys.offsets_hz = {0.0, 9456.5, 12050.8};
  sys.j_couplings_hz = RMatrix::Zero(3, 3);
  sys.j_couplings_hz(0, 1) = sys.j_couplings_hz(1, 0) = 54.2;
  sys.j_couplings_hz(1, 2) = sys.j_couplings_hz(2, 1) = 35.1;
  sys.j_couplings_hz(0, 2) = sys.j_couplings_hz(2, 0) = -1.2;
  sys.coupling_form = form;
  return sys;
}

const CMatrix& pauli(char axis) {
  static const CMatrix id = CMatrix::Identity(2, 2);
  static const CMatrix x = (CMatrix(2, 2) << 0, 1, 1, 0).finished();
  static const CMatrix y = (CMatrix(2, 2) << 0, -kI, kI, 0).finished();
  static const CMatrix z = (CMatrix(2, 2) << 1, 0, 0, -1).finished();
  switch (axis) {
    case '1':
    case 'I':
      return id;
    case 'X':
    case 'x':
      return x;
    case 'Y':
    case 'y':
      return y;
    case 'Z':
    case 'z':
      return z;
    default:
      throw PreconditionError(std::string("unknown Pauli axis '") + axis + "'");
  }
}

CMatrix embed(const CMatrix& op, int spin, int n_spins) {
  if (spin < 0 || spin >= n_spins) throw PreconditionError("spin index out of range");
  const Index below = Index{1} << (n_spins - spin - 1);  // factors to the right
  const Index above = Index{1} << spin;
  const Index d = op.rows();
  const Index dim = above * d * below;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Index a = 0; a < above; ++a) {
    for (Index r = 0; r < d; ++r) {
      for (Index c = 0; c < d; ++c) {
        const Complex v = op(r, c);
        if (v == Complex{}) continue;
        for (Index b = 0; b < below; ++b) {
          out((a * d + r) * below + b, (a * d + c) * below + b) = v;
        }
      }
    }
  }
  return out;
}

CMatrix total_spin(char axis, int n_spins) {
  const Index dim = hilbert_dim(n_spins);
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int s = 0; s < n_spins; ++s) out += 0.5 * embed(pauli(axis), s, n_spins);
  return out;
}

CMatrix internal_hamiltonian(const SpinSystem& sys) {
  sys.validate();
  const int n = sys.n_spins;
  const Index dim = hilbert_dim(n);
  CMatrix h = CMatrix::Zero(dim, dim);
  std::vector<CMatrix> zs;
  for (int i = 0; i < n; ++i) {
    zs.push_back(embed(pauli('Z'), i, n));
    h += kPi * sys.offsets_hz[i] * zs.back();
  }
  for (int i = 0; i < n; ++i) {
    for (int k = i + 1; k < n; ++k) {
      const double j = sys.j_couplings_hz(i, k);
      if (j == 0.0) continue;
      CMatrix coupling = zs[i] * zs[k];
      if (sys.coupling_form == CouplingForm::isotropic) {
        coupling += embed(pauli('X'), i, n) * embed(pauli('X'), k, n);
        coupling += embed(pauli('Y'), i, n) * embed(pauli('Y'), k, n);
      }
      h += 0.5 * kPi * j * coupling;
    }
  }
  return h;
}

// ---------------------------------------------------------------------------

namespace {

int digit_of(char c) {
  switch (c) {
    case '1':
      return 0;
    case 'X':
      return 1;
    case 'Y':
      return 2;
    case 'Z':
      return 3;
    default:
      throw PreconditionError(std::string("invalid product-operator character '") + c + "'");
  }
}

constexpr char kAlphabet[4] = {'1', 'X', 'Y', 'Z'};

std::string label_of(std::size_t index, int n_spins) {
  std::string label(n_spins, '1');
  for (int s = n_spins - 1; s >= 0; --s) {
    label[s] = kAlphabet[index % 4];
    index /= 4;
  }
  return label;
}

}  // namespace

std::size_t po_index(const std::string& label) {
  if (label.empty()) throw PreconditionError("empty product-operator label");
  std::size_t idx = 0;
  for (char c : label) idx = idx * 4 + static_cast<std::size_t>(digit_of(c));
  return idx;
}

PauliProduct po_product(const std::string& label) {
  return PauliProduct{label, po_index(label)};
}

CMatrix PauliProduct::matrix() const {
  CMatrix m = pauli(label.at(0));
  for (std::size_t s = 1; s < label.size(); ++s) {
    const CMatrix& p = pauli(label[s]);
    CMatrix next(m.rows() * 2, m.cols() * 2);
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) next.block<2, 2>(2 * r, 2 * c) = m(r, c) * p;
    }
    m = std::move(next);
  }
  return m;
}

bool PauliProduct::is_identity() const {
  return label.find_first_not_of('1') == std::string::npos;
}

std::vector<PauliProduct> po_basis(int n_spins) {
  check_spin_count(n_spins);
  const std::size_t count = std::size_t{1} << (2 * n_spins);
  std::vector<PauliProduct> basis;
  basis.reserve(count);
  for (std::size_t i = 0; i < count; ++i) basis.push_back({label_of(i, n_spins), i});
  return basis;
}

RVector po_decompose(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols()) throw DimensionError("po_decompose: matrix is not square");
  const double defect = (rho - rho.adjoint()).norm();
  if (defect > tol) throw NotHermitianError("po_decompose", defect);
  const int n = spins_for_dim(rho.rows());
  const auto basis = po_basis(n);
  const double inv_dim = 1.0 / static_cast<double>(rho.rows());
  RVector c(static_cast<Index>(basis.size()));
  for (const auto& p : basis) {
    // tr(P rho) without forming the product.
    const CMatrix pm = p.matrix();
    c(static_cast<Index>(p.index)) = (pm.transpose().cwiseProduct(rho)).sum().real() * inv_dim;
  }
  return c;
}

CMatrix po_assemble(const RVector& coefficients) {
  Index count = coefficients.size();
  int n = 0;
  while ((Index{1} << (2 * n)) < count) ++n;
  if ((Index{1} << (2 * n)) != count || n < 1) {
    throw DimensionError("po_assemble: coefficient count is not a power of four");
  }
  const auto basis = po_basis(n);
  const Index dim = hilbert_dim(n);
  CMatrix rho = CMatrix::Zero(dim, dim);
  for (const auto& p : basis) {
    const double c = coefficients(static_cast<Index>(p.index));
    if (c != 0.0) rho += c * p.matrix();
  }
  return rho;
}

std::vector<PauliProduct> observable_set(int n_spins) {
  std::vector<PauliProduct> out;
  for (auto& p : po_basis(n_spins)) {
    int transverse = 0;
    for (char c : p.label) transverse += (c == 'X' || c == 'Y');
    if (transverse == 1) out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(CMatrix rho, bool deviation)
    : rho_(std::move(rho)), deviation_(deviation) {
  if (rho_.rows() != rho_.cols()) throw DimensionError("density matrix must be square");
  spins_for_dim(rho_.rows());
  const double defect = (rho_ - rho_.adjoint()).norm();
  if (defect > 1e-12 * std::max(1.0, rho_.norm())) {
    throw NotHermitianError("DensityMatrix", defect);
  }
  if (!deviation_ && std::abs(rho_.trace() - Complex{1.0}) > 1e-12) {
    throw PreconditionError("density matrix trace must be 1");
  }
}

// ---------------------------------------------------------------------------

std::vector<SpectatorConfiguration> spectator_configurations(const SpinSystem& sys) {
  sys.validate();
  const std::size_t m = sys.spectators.size();
  if (m > 16) throw DimensionError("too many spectators");
  const std::size_t count = std::size_t{1} << m;
  std::vector<SpectatorConfiguration> out;
  out.reserve(count);
  for (std::size_t cfg = 0; cfg < count; ++cfg) {
    SpectatorConfiguration c;
    c.weight = 1.0 / static_cast<double>(count);
    c.shifted = sys;
    c.shifted.spectators.clear();
    for (std::size_t j = 0; j < m; ++j) {
      // delta_1 is the most significant bit so configurations enumerate
      // lexicographically.
      const int delta = static_cast<int>((cfg >> (m - 1 - j)) & 1U);
      c.states.push_back(delta);
      const double sign = delta == 0 ? 1.0 : -1.0;
      for (int i = 0; i < sys.n_spins; ++i) {
        c.shifted.offsets_hz[i] += sign * 0.5 * sys.spectators[j].couplings_hz[i];
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<WeightedHamiltonian> spectator_hamiltonians(const SpinSystem& sys) {
  if (sys.spectators.empty()) throw PreconditionError("spectator_hamiltonians: no spectators configured");
  std::vector<WeightedHamiltonian> out;
  for (const auto& cfg : spectator_configurations(sys)) {
    out.push_back({cfg.weight, internal_hamiltonian(cfg.shifted)});
  }
  return out;
}

}  // namespace nmrqpt
