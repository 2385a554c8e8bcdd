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

#include "nmrqpt/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "nmrqpt/optimize.hpp"
#include "nmrqpt/parallel.hpp"
#include "nmrqpt/spinsys.hpp"

namespace nmrqpt {

namespace {

int spin_count(Index dim) {
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  if ((Index{1} << n) != dim || n < 1) throw DimensionError("operator dimension is not a power of two");
  return n;
}

Complex frob(const CMatrix& a, const CMatrix& b) { return a.conjugate().cwiseProduct(b).sum(); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

// 2x2 partial trace of u over every spin except `spin`.
CMatrix reduced_operator(const CMatrix& u, int spin, int n) {
  CMatrix out = CMatrix::Zero(2, 2);
  const Index dim = hilbert_dim(n);
  const int shift = n - 1 - spin;
  for (Index x = 0; x < dim; ++x) {
    for (int b = 0; b < 2; ++b) {
      const Index y = (x & ~(Index{1} << shift)) | (Index{b} << shift);
      out((x >> shift) & 1, b) += u(x, y);
    }
  }
  return out;
}

SpinRotation canonical(double theta, double phi, double alpha) {
  SpinRotation r;
  r.axis = {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
  alpha = std::fmod(alpha, 4 * kPi);
  if (alpha < 0) alpha += 4 * kPi;
  if (alpha >= 2 * kPi) alpha -= 2 * kPi;  // costs a global sign only
  if (alpha > kPi) {
    alpha = 2 * kPi - alpha;
    for (auto& c : r.axis) c = -c;
  }
  r.angle_deg = alpha * 180.0 / kPi;
  return r;
}

// Spherical axis angles and rotation angle of the SU(2) part of m.
std::array<double, 3> warm_start(const CMatrix& m) {
  CMatrix w;
  try {
    w = best_unitary_approx(m);
  } catch (const NumericalError&) {
    return {kPi / 2, 0.0, 0.0};
  }
  w /= std::sqrt(w.determinant());
  const double c = 0.5 * w.trace().real();
  std::array<double, 3> v{};
  const char axes[3] = {'X', 'Y', 'Z'};
  for (int k = 0; k < 3; ++k) v[k] = -(0.5 * (pauli(axes[k]) * w).trace()).imag();
  const double s = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (s < 1e-12) return {kPi / 2, 0.0, 2 * std::atan2(s, c)};
  return {std::acos(std::clamp(v[2] / s, -1.0, 1.0)), std::atan2(v[1], v[0]), 2 * std::atan2(s, c)};
}

}  // namespace

ErrorReport decompose(const Supermatrix& observed, const CMatrix& u_theory,
                      const std::vector<LabeledSupermatrix>& references) {
  const Supermatrix obs = change_basis(observed, Basis::zeeman);
  const Index n_dim = obs.hilbert_dim();
  if (u_theory.rows() != n_dim) throw DimensionError("decompose: theory size");
  const int n = spin_count(n_dim);

  ErrorReport rep;
  const ChoiMatrix choi = choi_of(obs);
  const KrausSet kraus = kraus_of_choi(choi);
  rep.kraus_amplitudes = kraus.amplitudes;
  std::string diag;
  rep.positivity = positivity(choi, &diag);
  rep.choi_min_max_ratio = choi.eigenvalues(choi.eigenvalues.size() - 1) / choi.eigenvalues(0);
  if (kraus.operators.empty()) throw NumericalError("decompose: no positive Choi eigenvalue");
  rep.largest_kraus = kraus.operators.front();
  rep.largest_kraus_unitary = best_unitary_approx(rep.largest_kraus);
  const CMatrix aligned = phase_aligned(u_theory, rep.largest_kraus);
  rep.kraus1_theory_correlation = frob(u_theory, aligned).real() / (u_theory.norm() * aligned.norm());
  rep.unitary1_theory_overlap = unitary_overlap(u_theory, rep.largest_kraus_unitary);

  std::vector<LabeledSupermatrix> all{{"observed", obs}, {"theory", unitary_superop(u_theory, 1e-8)}};
  for (const auto& r : references) all.push_back({r.label, change_basis(r.matrix, Basis::zeeman)});
  for (const auto& a : all) {
    for (const auto& b : all) {
      if (&a == &b) continue;
      CorrelationEntry e;
      e.row = a.label;
      e.col = b.label;
      e.correlation = super_correlation(a.matrix, b.matrix);
      e.attenuated = gate_fidelity(a.matrix, b.matrix);
      rep.correlations.push_back(e);
    }
  }

  if (n >= 2) {
    std::string xz(n, '1'), x1(n, '1'), z3(n, '1');
    xz.front() = 'X';
    xz.back() = 'Z';
    x1.front() = 'X';
    z3.back() = 'Z';
    const CMatrix p_xz = po_product(xz).matrix();
    const CMatrix p_sum = 0.5 * (po_product(x1).matrix() + po_product(z3).matrix());
    rep.fixed_points.push_back({xz, fixed_point_check(obs, p_xz), fixed_point_attenuated(obs, p_xz)});
    rep.fixed_points.push_back({"(" + x1 + "+" + z3 + ")/2", fixed_point_check(obs, p_sum),
                                fixed_point_attenuated(obs, p_sum)});
  }
  return rep;
}

std::string to_string(CorrectionSide side) { return side == CorrectionSide::left ? "left" : "right"; }

Supermatrix coherent_correction(const Supermatrix& m, const CMatrix& u1, const CMatrix& u_theory, CorrectionSide side) {
  const Supermatrix mz = change_basis(m, Basis::zeeman);
  const CMatrix s1 = unitary_superop(u1, 1e-8).matrix;
  const CMatrix sth = unitary_superop(u_theory, 1e-8).matrix;
  if (s1.rows() != mz.matrix.rows()) throw DimensionError("coherent_correction: size mismatch");
  Supermatrix out;
  out.basis = Basis::zeeman;
  out.matrix = side == CorrectionSide::left ? CMatrix(sth * s1.adjoint() * mz.matrix)
                                            : CMatrix(mz.matrix * s1.adjoint() * sth);
  return change_basis(out, m.basis);
}

CMatrix delta_unitary(const CMatrix& u1, const CMatrix& u_theory, CorrectionSide side) {
  return side == CorrectionSide::left ? CMatrix(u1 * u_theory.adjoint()) : CMatrix(u_theory.adjoint() * u1);
}

CMatrix spin_rotation_matrix(const SpinRotation& r) {
  const double a = r.angle_deg * kPi / 180.0;
  const CMatrix ns = r.axis[0] * pauli('X') + r.axis[1] * pauli('Y') + r.axis[2] * pauli('Z');
  return std::cos(a / 2) * CMatrix::Identity(2, 2) - kI * std::sin(a / 2) * ns;
}

CMatrix rotation_product(const std::vector<SpinRotation>& rotations) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (const auto& r : rotations) out = kron(out, spin_rotation_matrix(r));
  return out;
}

RotationFit fit_single_spin_rotations(const CMatrix& u_delta, CorrectionSide side, std::uint64_t seed) {
  if (u_delta.rows() != u_delta.cols()) throw DimensionError("fit_single_spin_rotations: not square");
  const int n = spin_count(u_delta.rows());
  const double norm = static_cast<double>(u_delta.rows());

  auto build = [n](const std::vector<double>& p) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (int s = 0; s < n; ++s) {
      const double th = p[3 * s], ph = p[3 * s + 1], al = p[3 * s + 2];
      const CMatrix ns = std::sin(th) * std::cos(ph) * pauli('X') + std::sin(th) * std::sin(ph) * pauli('Y') +
                         std::cos(th) * pauli('Z');
      const CMatrix r = std::cos(al / 2) * CMatrix::Identity(2, 2) - kI * std::sin(al / 2) * ns;
      out = kron(out, r);
    }
    return out;
  };
  Objective f = [&](const std::vector<double>& p) { return -std::abs(frob(build(p), u_delta)) / norm; };

  std::vector<double> x0, step;
  for (int s = 0; s < n; ++s) {
    const auto w = warm_start(reduced_operator(u_delta, s, n));
    x0.insert(x0.end(), w.begin(), w.end());
    step.insert(step.end(), {0.3, 0.3, 0.3});
  }
  MultiStartOptions ms;
  ms.restarts = 8;
  ms.seed = seed;
  ms.jitter = 1.0;
  ms.max_evals_total = 4000 * n;
  ms.stop_below = -1.0 + 1e-13;
  ms.local.max_evals = 1500 * n;
  ms.local.f_tol = 1e-15;
  const OptimizeResult r = multi_start_minimize(f, x0, step, ms);

  RotationFit fit;
  fit.side = side;
  for (int s = 0; s < n; ++s) fit.rotations.push_back(canonical(r.x[3 * s], r.x[3 * s + 1], r.x[3 * s + 2]));
  fit.correlation = std::abs(frob(rotation_product(fit.rotations), u_delta)) / norm;
  fit.low_confidence = fit.correlation < 0.5;
  return fit;
}

double fixed_point_check(const Supermatrix& s, const CMatrix& op) {
  const Supermatrix z = change_basis(s, Basis::zeeman);
  return state_correlation(op, uncol(z.matrix * col(op)));
}

double fixed_point_attenuated(const Supermatrix& s, const CMatrix& op) {
  const Supermatrix z = change_basis(s, Basis::zeeman);
  return attenuated_state_correlation(op, uncol(z.matrix * col(op)), op);
}

std::vector<LabeledSpectrum> spectrum_report(const std::vector<LabeledSupermatrix>& maps, int threads) {
  return parallel_map<LabeledSpectrum>(maps.size(), threads, [&](std::size_t i) {
    LabeledSpectrum ls;
    ls.label = maps[i].label;
    ls.eigenvalues = eigenvalues(maps[i].matrix);
    double ms = 0.0;
    for (const auto& l : ls.eigenvalues) ms += std::norm(l);
    const double rms = std::sqrt(ms / static_cast<double>(std::max<std::size_t>(1, ls.eigenvalues.size())));
    for (const auto& l : ls.eigenvalues) ls.rms_normalized.push_back(rms > 0 ? l / rms : l);
    return ls;
  });
}

double angular_spread(const std::vector<Complex>& eigenvalues, const std::vector<double>& reference_phases) {
  if (eigenvalues.empty() || reference_phases.empty()) throw PreconditionError("angular_spread: empty input");
  double acc = 0.0;
  for (const auto& l : eigenvalues) {
    double best = INFINITY;
    for (double ref : reference_phases) {
      double d = std::remainder(std::arg(l) - ref, 2 * kPi);
      best = std::min(best, std::abs(d));
    }
    acc += best * best;
  }
  return std::sqrt(acc / static_cast<double>(eigenvalues.size()));
}

std::vector<double> qft_reference_phases() { return {0.0, kPi / 2, kPi, -kPi / 2}; }

}  // namespace nmrqpt
