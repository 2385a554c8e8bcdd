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

#include "nmrqpt/superop.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nmrqpt/spinsys.hpp"

namespace nmrqpt {

namespace {

Index sqrt_dim(Index n2, const char* where) {
  const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n2))));
  if (n * n != n2) throw DimensionError(std::string(where) + ": size is not a perfect square");
  return n;
}

int spins_of(Index dim, const char* where) {
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  if ((Index{1} << n) != dim) {
    throw DimensionError(std::string(where) + ": Hilbert dimension is not a power of two");
  }
  return n;
}

// Frobenius inner product <a, b> = tr(a^dag b).
Complex frob(const CMatrix& a, const CMatrix& b) { return a.conjugate().cwiseProduct(b).sum(); }

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

struct HermitianEig {
  RVector values;   // ascending
  CMatrix vectors;
};

HermitianEig hermitian_eig(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

CMatrix psd_clamp(const HermitianEig& e) {
  RVector clamped = e.values.cwiseMax(0.0);
  return e.vectors * clamped.asDiagonal() * e.vectors.adjoint();
}

// Orthogonal projection onto {T : Tr_2 T = I_N}.
CMatrix tp_project(const CMatrix& t, Index n) {
  const CMatrix excess = choi_partial_trace(t) - CMatrix::Identity(n, n);
  CMatrix out = t;
  for (Index p = 0; p < n; ++p) {
    for (Index r = 0; r < n; ++r) {
      const Complex c = excess(p, r) / static_cast<double>(n);
      if (c == Complex{}) continue;
      for (Index q = 0; q < n; ++q) out(p * n + q, r * n + q) -= c;
    }
  }
  return out;
}

}  // namespace

std::string to_string(Basis b) {
  return b == Basis::zeeman ? "zeeman" : "product_operator";
}

Basis basis_from_string(const std::string& s) {
  if (s == "zeeman") return Basis::zeeman;
  if (s == "product_operator") return Basis::product_operator;
  throw PreconditionError("unsupported basis tag '" + s + "'");
}

Index Supermatrix::hilbert_dim() const { return sqrt_dim(matrix.rows(), "Supermatrix"); }

CVector col(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("col: matrix is not square");
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix uncol(const CVector& v) {
  const Index n = sqrt_dim(v.size(), "uncol");
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

Supermatrix unitary_superop(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) throw DimensionError("unitary_superop: matrix is not square");
  const double defect = (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
  if (defect > tol) throw NotUnitaryError("unitary_superop", defect);
  const Index n = u.rows();
  CMatrix s(n * n, n * n);
  const CMatrix ubar = u.conjugate();
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) s.block(a * n, b * n, n, n) = ubar(a, b) * u;
  }
  return {std::move(s), Basis::zeeman};
}

CMatrix choi_rearrange(const CMatrix& m) {
  const Index n = sqrt_dim(m.rows(), "choi_rearrange");
  if (m.cols() != m.rows()) throw DimensionError("choi_rearrange: matrix is not square");
  CMatrix t(m.rows(), m.cols());
  for (Index p = 0; p < n; ++p) {
    for (Index q = 0; q < n; ++q) {
      for (Index r = 0; r < n; ++r) {
        for (Index s = 0; s < n; ++s) t(p * n + q, r * n + s) = m(s * n + q, r * n + p);
      }
    }
  }
  return t;
}

ChoiMatrix choi_of(const Supermatrix& s) {
  if (s.basis != Basis::zeeman) throw PreconditionError("choi_of: supermatrix must be in the zeeman basis");
  ChoiMatrix t;
  t.matrix = choi_rearrange(s.matrix);
  const auto e = hermitian_eig(hermitian_part(t.matrix));
  t.eigenvalues = e.values.reverse();
  t.eigenvectors = e.vectors.rowwise().reverse();
  return t;
}

Supermatrix super_of_choi(const CMatrix& t) { return {choi_rearrange(t), Basis::zeeman}; }
Supermatrix super_of_choi(const ChoiMatrix& t) { return super_of_choi(t.matrix); }

KrausSet kraus_of_choi(const ChoiMatrix& t, double rel_tol) {
  KrausSet k;
  if (t.eigenvalues.size() == 0) return k;
  const double scale = std::max(std::abs(t.eigenvalues(0)),
                                std::abs(t.eigenvalues(t.eigenvalues.size() - 1)));
  const double threshold = rel_tol * scale;
  const double sqrt_n = std::sqrt(static_cast<double>(sqrt_dim(t.matrix.rows(), "kraus_of_choi")));
  for (Index i = 0; i < t.eigenvalues.size(); ++i) {
    const double lambda = t.eigenvalues(i);
    if (lambda > threshold) {
      const CVector v = std::sqrt(lambda) * t.eigenvectors.col(i);
      k.operators.push_back(uncol(v));
      k.amplitudes.push_back(std::sqrt(lambda) / sqrt_n);
    } else if (lambda < -threshold) {
      k.negativity.push_back({lambda, t.eigenvectors.col(i)});
    }
  }
  return k;
}

Supermatrix super_of_kraus(const std::vector<CMatrix>& operators) {
  if (operators.empty()) throw PreconditionError("super_of_kraus: empty operator list");
  const Index n = operators.front().rows();
  CMatrix s = CMatrix::Zero(n * n, n * n);
  for (const auto& a : operators) {
    if (a.rows() != n || a.cols() != n) throw DimensionError("super_of_kraus: inconsistent dimensions");
    const CMatrix abar = a.conjugate();
    for (Index p = 0; p < n; ++p) {
      for (Index q = 0; q < n; ++q) s.block(p * n, q * n, n, n) += abar(p, q) * a;
    }
  }
  return {std::move(s), Basis::zeeman};
}

Supermatrix super_of_kraus(const KrausSet& k) { return super_of_kraus(k.operators); }

double positivity(const ChoiMatrix& t, std::string* diagnostic) {
  double total = 0.0;
  double positive = 0.0;
  for (Index i = 0; i < t.eigenvalues.size(); ++i) {
    total += t.eigenvalues(i);
    if (t.eigenvalues(i) > 0) positive += t.eigenvalues(i);
  }
  if (positive <= 0.0) {
    if (diagnostic) *diagnostic = "positivity: Choi spectrum has no positive eigenvalue";
    return 0.0;
  }
  return total / positive;
}

CMatrix choi_partial_trace(const CMatrix& t) {
  const Index n = sqrt_dim(t.rows(), "choi_partial_trace");
  CMatrix out = CMatrix::Zero(n, n);
  for (Index p = 0; p < n; ++p) {
    for (Index r = 0; r < n; ++r) {
      Complex acc{};
      for (Index q = 0; q < n; ++q) acc += t(p * n + q, r * n + q);
      out(p, r) = acc;
    }
  }
  return out;
}

double tp_defect(const CMatrix& choi) {
  const CMatrix pt = choi_partial_trace(choi);
  return (pt - CMatrix::Identity(pt.rows(), pt.cols())).norm();
}

double min_eigenvalue_hermitian(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

CptpResult project_cptp(const Supermatrix& s, const CptpOptions& opts) {
  if (s.basis != Basis::zeeman) {
    return project_cptp(change_basis(s, Basis::zeeman), opts);
  }
  const Index n = s.hilbert_dim();
  const CMatrix raw = choi_rearrange(s.matrix);
  const double hermiticity = (raw - raw.adjoint()).norm();
  if (hermiticity > 1e-8 * std::max(1.0, raw.norm())) {
    throw NotHermitianError("project_cptp (Choi matrix)", hermiticity);
  }
  const CMatrix x0 = hermitian_part(raw);

  CptpResult result;
  CMatrix x = x0;
  CMatrix p = CMatrix::Zero(x.rows(), x.cols());
  CMatrix q = CMatrix::Zero(x.rows(), x.cols());
  for (int it = 1; it <= opts.max_iter; ++it) {
    const CMatrix y = psd_clamp(hermitian_eig(hermitian_part(x + p)));
    p = x + p - y;
    const CMatrix x_next = hermitian_part(tp_project(y + q, n));
    q = y + q - x_next;
    x = x_next;

    const auto e = hermitian_eig(x);
    CptpIterate rec;
    rec.iteration = it;
    rec.psd_defect = std::max(0.0, -e.values(0));
    rec.tp_defect = tp_defect(y);
    rec.distance = (x - x0).norm();
    result.log.push_back(rec);
    result.iterations = it;
    if (rec.psd_defect < opts.tol && rec.tp_defect < opts.tol) {
      result.converged = true;
      break;
    }
  }

  // x is trace preserving; remove any residual negative eigenvalue by mixing
  // with the completely depolarizing Choi matrix I/N, which keeps TP exactly.
  const double lmin = min_eigenvalue_hermitian(x);
  if (lmin < 0.0) {
    const double inv_n = 1.0 / static_cast<double>(n);
    const double t = -lmin / (-lmin + inv_n);
    x = (1.0 - t) * x;
    x.diagonal().array() += t * inv_n;
  }
  result.min_eigenvalue = min_eigenvalue_hermitian(x);
  result.tp_defect = tp_defect(x);
  result.projected = super_of_choi(x);
  return result;
}

// ---------------------------------------------------------------------------

CMatrix traceless(const CMatrix& m) {
  CMatrix t = m;
  const Complex shift = m.trace() / static_cast<double>(m.rows());
  t.diagonal().array() -= shift;
  return t;
}

double state_correlation(const CMatrix& rho_th, const CMatrix& rho) {
  if (rho_th.rows() != rho.rows() || rho_th.cols() != rho.cols()) {
    throw DimensionError("state_correlation: dimension mismatch");
  }
  const CMatrix a = traceless(rho_th);
  const CMatrix b = traceless(rho);
  const double na = frob(a, a).real();
  const double nb = frob(b, b).real();
  if (na <= 0.0 || nb <= 0.0) throw UndefinedCorrelationError("state_correlation");
  return frob(a, b).real() / std::sqrt(na * nb);
}

double attenuated_state_correlation(const CMatrix& rho_th, const CMatrix& rho,
                                    const CMatrix& rho_in) {
  const double c = state_correlation(rho_th, rho);
  const CMatrix b = traceless(rho);
  const CMatrix in = traceless(rho_in);
  const double nin = frob(in, in).real();
  if (nin <= 0.0) throw UndefinedCorrelationError("attenuated_state_correlation (input)");
  return c * std::sqrt(frob(b, b).real() / nin);
}

double super_correlation(const CMatrix& s_th, const CMatrix& s_op) {
  if (s_th.rows() != s_op.rows() || s_th.cols() != s_op.cols()) {
    throw DimensionError("super_correlation: dimension mismatch");
  }
  const double na = frob(s_th, s_th).real();
  const double nb = frob(s_op, s_op).real();
  if (na <= 0.0 || nb <= 0.0) throw UndefinedCorrelationError("super_correlation");
  return frob(s_th, s_op).real() / std::sqrt(na * nb);
}

double super_correlation(const Supermatrix& s_th, const Supermatrix& s_op) {
  if (s_th.basis != s_op.basis) throw PreconditionError("super_correlation: basis mismatch");
  return super_correlation(s_th.matrix, s_op.matrix);
}

double gate_fidelity(const Supermatrix& s_th, const Supermatrix& s_op) {
  if (s_th.basis != s_op.basis) throw PreconditionError("gate_fidelity: basis mismatch");
  if (s_th.matrix.rows() != s_op.matrix.rows()) throw DimensionError("gate_fidelity: dimension mismatch");
  const double na = frob(s_th.matrix, s_th.matrix).real();
  if (na <= 0.0) throw UndefinedCorrelationError("gate_fidelity");
  return frob(s_th.matrix, s_op.matrix).real() / na;
}

double unitary_overlap(const CMatrix& u, const CMatrix& v) {
  return std::abs(frob(u, v)) / static_cast<double>(u.rows());
}

CMatrix phase_aligned(const CMatrix& u, const CMatrix& v) {
  const Complex overlap = frob(u, v);
  if (std::abs(overlap) == 0.0) return v;
  return v * std::polar(1.0, -std::arg(overlap));
}

// ---------------------------------------------------------------------------

const CMatrix& po_change_of_basis(int n_spins) {
  if (n_spins < 1 || n_spins > kMaxSpins) throw DimensionError("po_change_of_basis: unsupported size");
  static std::array<CMatrix, kMaxSpins + 1> cache;
  static std::array<std::once_flag, kMaxSpins + 1> flags;
  std::call_once(flags[n_spins], [n_spins] {
    const auto basis = po_basis(n_spins);
    const Index n = hilbert_dim(n_spins);
    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    CMatrix b(n * n, n * n);
    for (const auto& p : basis) b.col(static_cast<Index>(p.index)) = col(p.matrix()) * inv;
    cache[n_spins] = std::move(b);
  });
  return cache[n_spins];
}

Supermatrix change_basis(const Supermatrix& s, Basis to) {
  if (s.basis == to) return s;
  const CMatrix& b = po_change_of_basis(spins_of(s.hilbert_dim(), "change_basis"));
  if (to == Basis::product_operator) return {b.adjoint() * s.matrix * b, to};
  return {b * s.matrix * b.adjoint(), to};
}

std::vector<Complex> eigenvalues(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("eigenvalues: matrix is not square");
  Eigen::ComplexEigenSolver<CMatrix> es(m, true);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: Schur iteration did not converge");
  const CVector& vals = es.eigenvalues();
  const CMatrix& vecs = es.eigenvectors();
  const double scale = std::max(1.0, m.norm());
  const double residual = (m * vecs - vecs * vals.asDiagonal()).norm() / scale;
  if (residual > 1e-9) {
    throw NumericalError("eigenvalues: residual " + std::to_string(residual) + " above 1e-9");
  }
  std::vector<Complex> out(vals.data(), vals.data() + vals.size());
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    const auto ma = std::llround(std::abs(a) * 1e9);
    const auto mb = std::llround(std::abs(b) * 1e9);
    if (ma != mb) return ma > mb;
    return std::arg(a) < std::arg(b);
  });
  return out;
}

std::vector<Complex> eigenvalues(const Supermatrix& s) { return eigenvalues(s.matrix); }

CMatrix best_unitary_approx(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("best_unitary_approx: matrix is not square");
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  std::vector<double> deficient;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= 1e-8 * sv(0)) deficient.push_back(sv(i));
  }
  if (sv.size() == 0 || sv(0) == 0.0 || !deficient.empty()) {
    throw RankDeficientError("best_unitary_approx", deficient);
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace nmrqpt
