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


// Reference implementations used only by the tests. They are written from
// the textbook definitions and share no code with the library beyond the
// Eigen matrix types.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

inline M sigma(char a) {
  M m(2, 2);
  switch (a) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, C(0, -1), C(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1;
  }
  return m;
}

inline M kron(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Single-spin operator on `spin` (0 = leftmost factor) of an n-spin register.
inline M on(const M& op, int spin, int n) {
  M out = M::Identity(1, 1);
  for (int s = 0; s < n; ++s) out = kron(out, s == spin ? op : M::Identity(2, 2));
  return out;
}

// Product operator from a label such as "X1Z".
inline M product(const std::string& label) {
  M out = M::Identity(1, 1);
  for (char c : label) out = kron(out, sigma(c));
  return out;
}

// Matrix exponential by scaling and squaring of a Taylor series.
inline M expm(const M& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
  const M scaled = a / std::pow(2.0, squarings);
  M term = M::Identity(a.rows(), a.cols());
  M sum = term;
  for (int k = 1; k < 30; ++k) {
    term = (term * scaled / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = (sum * sum).eval();
  return sum;
}

// Rotating-frame Hamiltonian of the interval model at time t.
inline M rf_hamiltonian(const M& h_int, double t, double half_rabi, double nu_hz, double phase, int n) {
  M h = h_int;
  const double arg = 2.0 * M_PI * nu_hz * t + phase;
  for (int s = 0; s < n; ++s) h += half_rabi * on(std::cos(arg) * sigma('X') + std::sin(arg) * sigma('Y'), s, n);
  return h;
}

// Time-ordered propagator by `steps` fourth-order Magnus steps (two-point
// Gauss-Legendre nodes). Independent of any rotating-frame algebra.
inline M magnus_propagator(const M& h_int, double duration, double half_rabi, double nu_hz, double phase, int n,
                           int steps) {
  const double dt = duration / steps;
  const double c = std::sqrt(3.0) / 6.0;
  M u = M::Identity(h_int.rows(), h_int.cols());
  for (int k = 0; k < steps; ++k) {
    const double t0 = k * dt;
    const M a1 = C(0, -1) * rf_hamiltonian(h_int, t0 + (0.5 - c) * dt, half_rabi, nu_hz, phase, n);
    const M a2 = C(0, -1) * rf_hamiltonian(h_int, t0 + (0.5 + c) * dt, half_rabi, nu_hz, phase, n);
    const M omega = 0.5 * dt * (a1 + a2) + (std::sqrt(3.0) / 12.0) * dt * dt * (a2 * a1 - a1 * a2);
    u = (expm(omega) * u).eval();
  }
  return u;
}

// Column stacking: entry (i, j) goes to i + N j.
inline V col(const M& m) {
  V v(m.size());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) v(i + m.rows() * j) = m(i, j);
  return v;
}

inline M uncol(const V& v) {
  const auto n = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(v.size()))));
  M m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = v(i + n * j);
  return m;
}

// Supermatrix of rho -> sum_k A rho A^dag built column by column from the
// action on matrix units.
inline M super_from_kraus(const std::vector<M>& kraus) {
  const Eigen::Index n = kraus.front().rows();
  M s(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      M e = M::Zero(n, n);
      e(i, j) = 1.0;
      M out = M::Zero(n, n);
      for (const M& a : kraus) out += a * e * a.adjoint();
      s.col(i + n * j) = col(out);
    }
  return s;
}

// Choi matrix sum_ij E_ij (x) Phi(E_ij) with Phi given by its supermatrix.
inline M choi(const M& s) {
  const auto n = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(s.rows()))));
  M t = M::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const M img = uncol(s.col(i + n * j));
      M e = M::Zero(n, n);
      e(i, j) = 1.0;
      t += kron(e, img);
    }
  return t;
}

inline M random_complex(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  M m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = C(g(rng), g(rng));
  return m;
}

inline M random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<M> qr(random_complex(rng, n, n));
  M q = qr.householderQ();
  const M r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) q.col(i) *= std::polar(1.0, std::arg(r(i, i)));
  return q;
}

// Random CPTP channel with `k` Kraus operators from a random isometry.
inline std::vector<M> random_kraus(std::mt19937_64& rng, Eigen::Index n, int k) {
  const M w = random_unitary(rng, n * k).leftCols(n);
  std::vector<M> out;
  for (int i = 0; i < k; ++i) out.push_back(w.block(i * n, 0, n, n));
  return out;
}

inline M random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  const M a = random_complex(rng, n, n);
  return (a + a.adjoint()) / 2.0;
}

inline M random_density(std::mt19937_64& rng, Eigen::Index n) {
  const M a = random_complex(rng, n, n);
  M rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace oracle
