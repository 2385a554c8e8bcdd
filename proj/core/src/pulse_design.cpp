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

#include "nmrqpt/pulse_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <random>

#include <Eigen/SVD>

#include "nmrqpt/optimize.hpp"
#include "nmrqpt/parallel.hpp"

namespace nmrqpt {

namespace {

struct PreparedMember {
  double weight;
  double scale;
  CMatrix h_int;
};

std::vector<PreparedMember> prepare(const SpinSystem& sys, const RfHistogram& hist, bool spectators) {
  std::vector<PreparedMember> out;
  for (const auto& m : ensemble_members(sys, hist, spectators)) {
    out.push_back({m.weight, m.scale, internal_hamiltonian(m.system)});
  }
  return out;
}

double fidelity_on(const CMatrix& u_target, const PulseSchedule& sched, const std::vector<PreparedMember>& members,
                   int n_spins, int threads) {
  const Index dim = hilbert_dim(n_spins);
  const auto parts = parallel_map<double>(members.size(), threads, [&](std::size_t i) {
    const auto& m = members[i];
    CMatrix u = CMatrix::Identity(dim, dim);
    for (const auto& item : sched.items) {
      if (const auto* iv = std::get_if<PulseInterval>(&item)) {
        u = interval_propagator(m.h_int, *iv, m.scale, sched.nominal_rf_rad_s, n_spins) * u;
      } else if (const auto* d = std::get_if<Delay>(&item)) {
        u = delay_propagator(m.h_int, *d, n_spins) * u;
      } else {
        u = ideal_gate_unitary(std::get<IdealGate>(item).label, n_spins) * u;
      }
    }
    return m.weight * std::norm(u_target.conjugate().cwiseProduct(u).sum());
  });
  double f = 0.0;
  for (double p : parts) f += p;
  return f / static_cast<double>(dim * dim);
}

constexpr double kMinDurationS = 1e-7;

PulseSchedule decode(const std::vector<double>& p, double nominal) {
  PulseSchedule s;
  s.nominal_rf_rad_s = nominal;
  for (std::size_t i = 0; i + 3 < p.size(); i += 4) {
    PulseInterval iv;
    iv.duration_s = std::max(std::abs(p[i]) * 1e-6, kMinDurationS);
    iv.amplitude = std::abs(p[i + 1]);
    iv.rf_frequency_hz = p[i + 2] * 1e3;
    iv.rf_phase_rad = p[i + 3];
    s.items.emplace_back(iv);
  }
  return s;
}

}  // namespace

double schedule_fidelity(const CMatrix& u_target, const PulseSchedule& sched, const SpinSystem& sys,
                         const RfHistogram& hist, bool spectators, int threads) {
  sched.validate(sys.n_spins);
  return fidelity_on(u_target, sched, prepare(sys, hist, spectators), sys.n_spins, threads);
}

std::optional<std::vector<CMatrix>> single_spin_factors(const CMatrix& u, int n_spins) {
  const Index dim = hilbert_dim(n_spins);
  if (u.rows() != dim || u.cols() != dim) throw DimensionError("single_spin_factors: matrix size");
  const Index rest = dim / 2;
  std::vector<CMatrix> out;
  for (int s = 0; s < n_spins; ++s) {
    const int shift = n_spins - 1 - s;
    const Index low = (Index{1} << shift) - 1;
    auto split = [&](Index x, Index& bit, Index& other) {
      bit = (x >> shift) & 1;
      other = ((x >> (shift + 1)) << shift) | (x & low);
    };
    // Realignment: U = A (x) B  <=>  R = vec(A) vec(B)^T has rank one.
    CMatrix r = CMatrix::Zero(4, rest * rest);
    for (Index row = 0; row < dim; ++row) {
      for (Index col = 0; col < dim; ++col) {
        Index a, ra, b, rb;
        split(row, a, ra);
        split(col, b, rb);
        r(2 * a + b, ra * rest + rb) = u(row, col);
      }
    }
    Eigen::JacobiSVD<CMatrix> svd(r, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv(0) == 0.0 || sv(1) > 1e-9 * sv(0)) return std::nullopt;
    CMatrix f(2, 2);
    for (int k = 0; k < 4; ++k) f(k / 2, k % 2) = svd.matrixU()(k, 0) * std::sqrt(2.0);
    out.push_back(f);
  }
  return out;
}

namespace {

// exp(-i t (bx X + by Y + bz Z))
Eigen::Matrix2cd su2(double bx, double by, double bz, double t) {
  const double n = std::sqrt(bx * bx + by * by + bz * bz);
  const double c = std::cos(n * t);
  const double sn = n > 0.0 ? std::sin(n * t) / n : t;
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd m;
  m << c - i * sn * bz, -i * sn * Complex(bx, -by), -i * sn * Complex(bx, by), c + i * sn * bz;
  return m;
}

// Without couplings every spin evolves alone, so the ensemble only needs one
// two-level simulation per distinct (RF scale, spin, offset) triple; members
// then multiply the single-spin fidelities they index.
struct UncoupledModel {
  struct Case {
    double scale;
    double offset_hz;
    std::size_t spin;
  };
  std::vector<Case> cases;
  std::vector<double> weights;
  std::vector<std::vector<std::size_t>> member_cases;

  UncoupledModel(const std::vector<EnsembleMember>& members, int n_spins) {
    std::map<std::tuple<double, double, std::size_t>, std::size_t> seen;
    for (const auto& m : members) {
      weights.push_back(m.weight);
      std::vector<std::size_t> idx;
      for (int s = 0; s < n_spins; ++s) {
        const auto key = std::make_tuple(m.scale, m.system.offsets_hz[s], static_cast<std::size_t>(s));
        auto it = seen.find(key);
        if (it == seen.end()) {
          it = seen.emplace(key, cases.size()).first;
          cases.push_back({m.scale, m.system.offsets_hz[s], static_cast<std::size_t>(s)});
        }
        idx.push_back(it->second);
      }
      member_cases.push_back(std::move(idx));
    }
  }

  double fidelity(const std::vector<double>& p, const std::vector<CMatrix>& factors, double nominal) const {
    std::vector<double> per_case(cases.size());
    for (std::size_t c = 0; c < cases.size(); ++c) {
      Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
      for (std::size_t i = 0; i + 3 < p.size(); i += 4) {
        const double d = std::max(std::abs(p[i]) * 1e-6, kMinDurationS);
        const double h = 0.5 * cases[c].scale * std::abs(p[i + 1]) * nominal;
        const double nu = p[i + 2] * 1e3;
        Eigen::Matrix2cd frame = Eigen::Matrix2cd::Zero();
        frame(0, 0) = std::polar(1.0, -kPi * nu * d);
        frame(1, 1) = std::polar(1.0, kPi * nu * d);
        u = frame * su2(h * std::cos(p[i + 3]), h * std::sin(p[i + 3]), kPi * (cases[c].offset_hz - nu), d) * u;
      }
      per_case[c] = std::norm(factors[cases[c].spin].conjugate().cwiseProduct(u).sum()) / 4.0;
    }
    double f = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
      double prod = weights[m];
      for (std::size_t c : member_cases[m]) prod *= per_case[c];
      f += prod;
    }
    return f;
  }
};

std::vector<double> encode(const PulseSchedule& sched) {
  std::vector<double> x;
  for (const auto& item : sched.items) {
    const auto* iv = std::get_if<PulseInterval>(&item);
    if (!iv || !iv->targets.empty()) {
      throw PreconditionError("design_pulse: the initial schedule must hold untargeted RF intervals only");
    }
    x.insert(x.end(), {iv->duration_s * 1e6, iv->amplitude, iv->rf_frequency_hz * 1e-3, iv->rf_phase_rad});
  }
  return x;
}

std::vector<double> random_start(std::mt19937_64& rng, int k, const SpinSystem& sys) {
  const auto [lo, hi] = std::minmax_element(sys.offsets_hz.begin(), sys.offsets_hz.end());
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> x;
  for (int i = 0; i < k; ++i) {
    x.push_back(5.0 + 145.0 * u01(rng));
    x.push_back(0.2 + 2.5 * u01(rng));
    x.push_back((*lo - 3e3 + (*hi - *lo + 6e3) * u01(rng)) * 1e-3);
    x.push_back(2.0 * kPi * u01(rng));
  }
  return x;
}

std::vector<double> coarse_step(std::size_t n) {
  std::vector<double> st;
  for (std::size_t i = 0; i < n; i += 4) st.insert(st.end(), {10.0, 0.3, 1.0, 0.5});
  return st;
}

}  // namespace

DesignResult design_pulse(const CMatrix& u_target, const SpinSystem& sys, const RfHistogram& hist,
                          const DesignOptions& opts, const std::optional<PulseSchedule>& initial) {
  sys.validate();
  hist.validate();
  if (opts.k_max < 1) throw PreconditionError("design_pulse: k_max must be >= 1");
  if (opts.budget < 1) throw PreconditionError("design_pulse: budget must be >= 1");
  if (opts.restarts < 1) throw PreconditionError("design_pulse: restarts must be >= 1");
  const Index dim = hilbert_dim(sys.n_spins);
  if (u_target.rows() != dim || u_target.cols() != dim) throw DimensionError("design_pulse: target size");

  const double nominal = initial ? initial->nominal_rf_rad_s : opts.nominal_rf_rad_s;
  if (initial) initial->validate(sys.n_spins);

  std::vector<std::vector<double>> starts;
  if (initial) starts.push_back(encode(*initial));
  std::mt19937_64 rng(opts.seed);
  while (static_cast<int>(starts.size()) < opts.restarts) starts.push_back(random_start(rng, opts.k_max, sys));

  DesignResult out;
  std::vector<double> x = starts.front();
  std::vector<OptimizeResult> candidates;
  const auto factors = single_spin_factors(u_target, sys.n_spins);
  if (factors) {
    const UncoupledModel model(ensemble_members(sys, hist, opts.spectators), sys.n_spins);
    Objective g = [&](const std::vector<double>& p) { return 1.0 - model.fidelity(p, *factors, nominal); };
    const int per_start = std::max(200, opts.surrogate_evals);
    const auto runs = parallel_map<OptimizeResult>(starts.size(), opts.threads, [&](std::size_t i) {
      // Restarted simplex: a collapsed simplex is rebuilt around the best
      // point, alternating coarse and fine steps, until the budget is spent
      // or a restart stops paying off.
      NelderMeadOptions nm;
      nm.max_evals = per_start / 2;
      OptimizeResult r = nelder_mead(g, starts[i], coarse_step(starts[i].size()), nm);
      int used = r.evaluations;
      for (int round = 0; used < per_start; ++round) {
        std::vector<double> step = coarse_step(r.x.size());
        for (double& v : step) v *= round % 2 == 0 ? 0.3 : 0.05;
        nm.max_evals = std::min(per_start - used, per_start / 4);
        OptimizeResult next = nelder_mead(g, r.x, step, nm);
        used += next.evaluations;
        const bool stalled = next.value > r.value - 1e-7;
        if (next.value < r.value) r = next;
        if (stalled && round % 2 == 1) break;
      }
      r.evaluations = used;
      return r;
    });
    for (const auto& r : runs) candidates.push_back(r);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.value < b.value; });
    x = candidates.front().x;
    out.surrogate_fidelity = 1.0 - candidates.front().value;
  }

  const auto members = prepare(sys, hist, opts.spectators);
  Objective f = [&](const std::vector<double>& p) {
    return 1.0 - fidelity_on(u_target, decode(p, nominal), members, sys.n_spins, opts.threads);
  };
  OptimizeResult r;
  if (factors) {
    // Surrogate optima differ in how much the couplings cost them, so every
    // one is scored on the full model and the best of those is polished.
    const std::size_t screened = std::min(candidates.size(), static_cast<std::size_t>(opts.budget));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < screened; ++i) {
      const double v = f(candidates[i].x);
      if (v < best) {
        best = v;
        x = candidates[i].x;
      }
    }
    NelderMeadOptions nm;
    nm.max_evals = opts.budget - static_cast<int>(screened);
    if (nm.max_evals > 0) {
      r = nelder_mead(f, x, std::vector<double>(x.size(), 0.02), nm);
    } else {
      r.x = x;
      r.value = best;
    }
    r.evaluations += static_cast<int>(screened);
  } else {
    MultiStartOptions ms;
    ms.restarts = opts.restarts;
    ms.seed = opts.seed;
    ms.max_evals_total = opts.budget;
    ms.jitter = 0.5;
    ms.stop_below = 1e-6;
    ms.local.max_evals = std::max(200, opts.budget / opts.restarts);
    r = multi_start_minimize(f, x, coarse_step(x.size()), ms);
  }

  out.schedule = decode(r.x, nominal);
  out.fidelity = 1.0 - r.value;
  out.evaluations = r.evaluations;
  out.reached_floor = out.fidelity >= opts.fidelity_floor;
  return out;
}

}  // namespace nmrqpt
