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

#include "nmrqpt/pulsesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nmrqpt/config.hpp"
#include "nmrqpt/parallel.hpp"

namespace nmrqpt {

namespace {

CMatrix expm_hermitian(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  const RVector& w = es.eigenvalues();
  CVector phases(w.size());
  for (Index i = 0; i < w.size(); ++i) phases(i) = std::polar(1.0, -w(i) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// exp(-i theta sigma_axis / 2).
CMatrix spin_rotation(char axis, double theta) {
  return std::cos(theta / 2) * CMatrix::Identity(2, 2) - kI * std::sin(theta / 2) * pauli(axis);
}

CMatrix pi_x(int spin, int n_spins) { return embed(spin_rotation('X', kPi), spin, n_spins); }

int bit_of(Index x, int spin, int n_spins) { return static_cast<int>((x >> (n_spins - 1 - spin)) & 1); }

std::vector<int> parse_spins(const std::string& s, int n_spins, const std::string& label) {
  std::vector<int> spins;
  if (s.empty()) throw PreconditionError("gate '" + label + "': no spins given");
  for (char c : s) {
    if (c < '1' || c > '9') throw PreconditionError("gate '" + label + "': bad spin '" + c + "'");
    const int spin = c - '1';
    if (spin >= n_spins) throw PreconditionError("gate '" + label + "': spin out of range");
    if (std::find(spins.begin(), spins.end(), spin) != spins.end()) {
      throw PreconditionError("gate '" + label + "': repeated spin");
    }
    spins.push_back(spin);
  }
  return spins;
}

double parse_degrees(const std::string& s, const std::string& label) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    throw PreconditionError("gate '" + label + "': bad angle '" + s + "'");
  }
  return v * kPi / 180.0;
}

CMatrix controlled_phase(int j, int k, double theta, int n_spins) {
  const Index dim = hilbert_dim(n_spins);
  CMatrix u = CMatrix::Identity(dim, dim);
  for (Index x = 0; x < dim; ++x) {
    if (bit_of(x, j, n_spins) && bit_of(x, k, n_spins)) u(x, x) = std::polar(1.0, theta);
  }
  return u;
}

CMatrix swap_spins(int j, int k, int n_spins) {
  std::vector<int> perm(n_spins);
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[j], perm[k]);
  return relabel_unitary(perm);
}

std::string format_degrees(double rad) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", rad * 180.0 / kPi);
  return buf;
}

std::string spin_string(std::vector<int> spins) {
  std::sort(spins.begin(), spins.end());
  std::string s;
  for (int v : spins) s += static_cast<char>('1' + v);
  return s;
}

void append(PulseSchedule& dst, const PulseSchedule& src) {
  for (const auto& item : src.items) {
    if (const auto* iv = std::get_if<PulseInterval>(&item)) {
      PulseInterval copy = *iv;
      copy.amplitude *= src.nominal_rf_rad_s / dst.nominal_rf_rad_s;
      dst.items.emplace_back(std::move(copy));
    } else {
      dst.items.push_back(item);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void PulseInterval::validate(int n_spins) const {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw PreconditionError("pulse interval duration must be positive");
  }
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw PreconditionError("pulse interval amplitude must be nonnegative");
  }
  if (!std::isfinite(rf_frequency_hz) || !std::isfinite(rf_phase_rad)) {
    throw PreconditionError("pulse interval frequency and phase must be finite");
  }
  for (int t : targets) {
    if (t < 0 || t >= n_spins) throw PreconditionError("pulse interval target out of range");
  }
}

int Delay::segments() const { return walsh.empty() ? 1 : static_cast<int>(walsh.front().size()); }

void Delay::validate(int n_spins) const {
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
    throw PreconditionError("delay duration must be nonnegative");
  }
  if (walsh.empty()) return;
  if (static_cast<int>(walsh.size()) != n_spins) throw PreconditionError("delay walsh pattern needs one row per spin");
  const std::size_t segs = walsh.front().size();
  if (segs == 0) throw PreconditionError("delay walsh pattern is empty");
  for (const auto& row : walsh) {
    if (row.size() != segs) throw PreconditionError("delay walsh rows differ in length");
    if (row.front() != 1) throw PreconditionError("delay walsh rows must start at +1");
    for (int v : row) {
      if (v != 1 && v != -1) throw PreconditionError("delay walsh entries must be +1 or -1");
    }
  }
}

double PulseSchedule::duration() const {
  double t = 0.0;
  for (const auto& item : items) {
    if (const auto* iv = std::get_if<PulseInterval>(&item)) t += iv->duration_s;
    if (const auto* d = std::get_if<Delay>(&item)) t += d->duration_s;
  }
  return t;
}

void PulseSchedule::validate(int n_spins) const {
  if (items.empty()) throw PreconditionError("pulse schedule is empty");
  if (!(nominal_rf_rad_s > 0.0)) throw PreconditionError("nominal RF strength must be positive");
  for (const auto& item : items) {
    if (const auto* iv = std::get_if<PulseInterval>(&item)) iv->validate(n_spins);
    if (const auto* d = std::get_if<Delay>(&item)) d->validate(n_spins);
    if (const auto* g = std::get_if<IdealGate>(&item)) ideal_gate_unitary(g->label, n_spins);
  }
}

void RfHistogram::validate() const {
  if (bins.empty()) throw PreconditionError("RF histogram has no bins");
  double total = 0.0;
  for (const auto& b : bins) {
    if (!(b.scale > 0.0) || !std::isfinite(b.scale)) throw PreconditionError("RF histogram scales must be positive");
    if (!(b.weight >= 0.0) || !std::isfinite(b.weight)) throw PreconditionError("RF histogram weights must be nonnegative");
    total += b.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PreconditionError("RF histogram weights must sum to 1");
}

RfHistogram RfHistogram::single(double scale) { return RfHistogram{{RfBin{scale, 1.0}}}; }

// ---------------------------------------------------------------------------

CMatrix interval_propagator(const CMatrix& h_int, const PulseInterval& iv, double scale,
                            double nominal_rf_rad_s, int n_spins) {
  iv.validate(n_spins);
  const Index dim = hilbert_dim(n_spins);
  if (h_int.rows() != dim || h_int.cols() != dim) throw DimensionError("interval_propagator: H_int size");
  const double omega = 2.0 * kPi * iv.rf_frequency_hz;
  const CMatrix fz = total_spin('Z', n_spins);

  // Rotating at the carrier makes the field static:
  // U = exp(-i omega d Fz) exp(-i (H_int + H_rf(0) - omega Fz) d).
  CMatrix h_eff = h_int - omega * fz;
  const double half_rabi = 0.5 * scale * iv.amplitude * nominal_rf_rad_s;
  if (half_rabi != 0.0) {
    const CMatrix field = std::cos(iv.rf_phase_rad) * pauli('X') + std::sin(iv.rf_phase_rad) * pauli('Y');
    for (int s = 0; s < n_spins; ++s) {
      if (!iv.targets.empty() && std::find(iv.targets.begin(), iv.targets.end(), s) == iv.targets.end()) continue;
      h_eff += half_rabi * embed(field, s, n_spins);
    }
  }
  const CMatrix u_eff = expm_hermitian(h_eff, iv.duration_s);
  CVector frame(dim);
  const RVector fz_diag = fz.diagonal().real();
  for (Index x = 0; x < dim; ++x) frame(x) = std::polar(1.0, -omega * iv.duration_s * fz_diag(x));
  return frame.asDiagonal() * u_eff;
}

CMatrix delay_propagator(const CMatrix& h_int, const Delay& d, int n_spins) {
  d.validate(n_spins);
  const Index dim = hilbert_dim(n_spins);
  if (d.walsh.empty()) return expm_hermitian(h_int, d.duration_s);
  const int segs = d.segments();
  const CMatrix step = expm_hermitian(h_int, d.duration_s / segs);
  CMatrix u = CMatrix::Identity(dim, dim);
  for (int k = 0; k < segs; ++k) {
    u = step * u;
    for (int s = 0; s < n_spins; ++s) {
      const bool flip = (k + 1 < segs) ? d.walsh[s][k] != d.walsh[s][k + 1] : d.walsh[s][k] == -1;
      if (flip) u = pi_x(s, n_spins) * u;
    }
  }
  return u;
}

CMatrix ideal_gate_unitary(const std::string& label, int n_spins) {
  if (n_spins < 1 || n_spins > kMaxSpins) throw DimensionError("ideal_gate_unitary: bad spin count");
  const Index dim = hilbert_dim(n_spins);
  if (label.size() >= 4 && label[0] == 'R') {
    const char axis = static_cast<char>(std::toupper(static_cast<unsigned char>(label[1])));
    const auto at = label.find('@');
    if ((axis == 'X' || axis == 'Y' || axis == 'Z') && at != std::string::npos && at > 2) {
      const double theta = parse_degrees(label.substr(2, at - 2), label);
      CMatrix u = CMatrix::Identity(dim, dim);
      const CMatrix r = spin_rotation(axis, theta);
      for (int s : parse_spins(label.substr(at + 1), n_spins, label)) u = embed(r, s, n_spins) * u;
      return u;
    }
  }
  if (label.rfind("H@", 0) == 0) {
    const auto spins = parse_spins(label.substr(2), n_spins, label);
    if (spins.size() != 1) throw PreconditionError("gate '" + label + "': Hadamard takes one spin");
    const CMatrix h = (CMatrix(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
    return embed(h, spins[0], n_spins);
  }
  if (label.rfind("SWAP", 0) == 0) {
    const auto spins = parse_spins(label.substr(4), n_spins, label);
    if (spins.size() != 2) throw PreconditionError("gate '" + label + "': SWAP takes two spins");
    return swap_spins(spins[0], spins[1], n_spins);
  }
  if (label.size() > 4 && label[0] == 'B') {
    const auto colon = label.find(':');
    if (colon != std::string::npos) {
      const auto spins = parse_spins(label.substr(1, colon - 1), n_spins, label);
      if (spins.size() != 2) throw PreconditionError("gate '" + label + "': B takes two spins");
      return controlled_phase(spins[0], spins[1], parse_degrees(label.substr(colon + 1), label), n_spins);
    }
  }
  throw PreconditionError("unknown gate label '" + label + "'");
}

CMatrix schedule_propagator_folded(const PulseSchedule& sched, const SpinSystem& shifted, double scale) {
  const int n = shifted.n_spins;
  const CMatrix h_int = internal_hamiltonian(shifted);
  const Index dim = hilbert_dim(n);
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const auto& item : sched.items) {
    if (const auto* iv = std::get_if<PulseInterval>(&item)) {
      u = interval_propagator(h_int, *iv, scale, sched.nominal_rf_rad_s, n) * u;
    } else if (const auto* d = std::get_if<Delay>(&item)) {
      u = delay_propagator(h_int, *d, n) * u;
    } else {
      u = ideal_gate_unitary(std::get<IdealGate>(item).label, n) * u;
    }
  }
  return u;
}

CMatrix schedule_propagator(const PulseSchedule& sched, const SpinSystem& sys, double scale,
                            std::optional<std::size_t> spectator_index) {
  sys.validate();
  if (!spectator_index) return schedule_propagator_folded(sched, sys, scale);
  const auto configs = spectator_configurations(sys);
  if (*spectator_index >= configs.size()) throw PreconditionError("spectator index out of range");
  return schedule_propagator_folded(sched, configs[*spectator_index].shifted, scale);
}

// ---------------------------------------------------------------------------

std::vector<EnsembleMember> ensemble_members(const SpinSystem& sys, const RfHistogram& hist, bool spectators) {
  sys.validate();
  hist.validate();
  std::vector<SpectatorConfiguration> configs;
  if (spectators) {
    configs = spectator_configurations(sys);
  } else {
    SpectatorConfiguration c;
    c.shifted = sys;
    c.shifted.spectators.clear();
    configs.push_back(std::move(c));
  }
  std::vector<EnsembleMember> out;
  out.reserve(hist.bins.size() * configs.size());
  for (const auto& bin : hist.bins) {
    for (std::size_t c = 0; c < configs.size(); ++c) {
      out.push_back({bin.weight * configs[c].weight, bin.scale, c, configs[c].shifted});
    }
  }
  return out;
}

IncoherentChannel incoherent_superop(const PulseSchedule& sched, const SpinSystem& sys,
                                     const RfHistogram& hist, bool spectators, int threads) {
  sched.validate(sys.n_spins);
  const auto members = ensemble_members(sys, hist, spectators);
  const auto unitaries = parallel_map<CMatrix>(members.size(), threads, [&](std::size_t m) {
    return schedule_propagator_folded(sched, members[m].system, members[m].scale);
  });
  const Index n = hilbert_dim(sys.n_spins);
  IncoherentChannel ch;
  ch.super = {CMatrix::Zero(n * n, n * n), Basis::zeeman};
  std::vector<std::pair<double, CMatrix>> ops;
  for (std::size_t m = 0; m < members.size(); ++m) {
    if (members[m].weight == 0.0) continue;
    ch.super.matrix += members[m].weight * unitary_superop(unitaries[m], 1e-8).matrix;
    ops.emplace_back(std::sqrt(members[m].weight), std::sqrt(members[m].weight) * unitaries[m]);
  }
  std::stable_sort(ops.begin(), ops.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (auto& [amp, op] : ops) {
    ch.kraus.amplitudes.push_back(amp);
    ch.kraus.operators.push_back(std::move(op));
  }
  return ch;
}

double kraus_gate_fidelity(const CMatrix& u_th, const std::vector<CMatrix>& operators) {
  const double n = static_cast<double>(u_th.rows());
  double f = 0.0;
  for (const auto& a : operators) {
    if (a.rows() != u_th.rows() || a.cols() != u_th.cols()) throw DimensionError("kraus_gate_fidelity: size mismatch");
    f += std::norm(u_th.conjugate().cwiseProduct(a).sum());
  }
  return f / (n * n);
}

double kraus_gate_fidelity(const CMatrix& u_th, const KrausSet& k) {
  return kraus_gate_fidelity(u_th, k.operators);
}

// ---------------------------------------------------------------------------

CMatrix qft_unitary(int n_spins) {
  if (n_spins < 1 || n_spins > kMaxSpins) throw DimensionError("qft_unitary: bad spin count");
  const Index dim = hilbert_dim(n_spins);
  CMatrix u(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Index xp = 0; xp < dim; ++xp) {
    for (Index x = 0; x < dim; ++x) {
      const Index e = (x * xp) % dim;  // exact reduction keeps the phases exact
      u(xp, x) = norm * std::polar(1.0, 2.0 * kPi * static_cast<double>(e) / static_cast<double>(dim));
    }
  }
  return u;
}

std::string Gate::name() const {
  switch (kind) {
    case GateKind::hadamard:
      return "H" + std::to_string(j + 1);
    case GateKind::controlled_phase:
      return "B" + std::to_string(j + 1) + std::to_string(k + 1) + "(" + format_degrees(theta) + ")";
    case GateKind::relabel:
      return "SWAP" + std::to_string(j + 1) + std::to_string(k + 1);
  }
  return "?";
}

std::vector<Gate> qft_circuit(int n_spins) {
  if (n_spins < 1 || n_spins > kMaxSpins) throw DimensionError("qft_circuit: bad spin count");
  std::vector<Gate> gates;
  for (int k = 0; k < n_spins; ++k) {
    for (int j = 0; j < k; ++j) gates.push_back({GateKind::controlled_phase, j, k, kPi / std::ldexp(1.0, k - j)});
    gates.push_back({GateKind::hadamard, k, 0, 0.0});
  }
  if (n_spins > 1) gates.push_back({GateKind::relabel, 0, n_spins - 1, 0.0});
  return gates;
}

CMatrix relabel_unitary(const std::vector<int>& relabel) {
  const int n = static_cast<int>(relabel.size());
  const Index dim = hilbert_dim(n);
  CMatrix p = CMatrix::Zero(dim, dim);
  for (Index x = 0; x < dim; ++x) {
    Index y = 0;
    for (int s = 0; s < n; ++s) {
      if (bit_of(x, relabel[s], n)) y |= Index{1} << (n - 1 - s);
    }
    p(y, x) = 1.0;
  }
  return p;
}

CMatrix gate_unitary(const Gate& g, int n_spins) {
  switch (g.kind) {
    case GateKind::hadamard:
      return ideal_gate_unitary("H@" + std::to_string(g.j + 1), n_spins);
    case GateKind::controlled_phase:
      return controlled_phase(g.j, g.k, g.theta, n_spins);
    case GateKind::relabel: {
      std::vector<int> perm(n_spins);
      for (int s = 0; s < n_spins; ++s) perm[s] = n_spins - 1 - s;
      return relabel_unitary(perm);
    }
  }
  throw PreconditionError("unknown gate kind");
}

CMatrix ideal_circuit_unitary(const std::vector<Gate>& gates, int n_spins) {
  const Index dim = hilbert_dim(n_spins);
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const auto& g : gates) u = gate_unitary(g, n_spins) * u;
  return u;
}

// ---------------------------------------------------------------------------

PulseLibrary PulseLibrary::ideal() {
  PulseLibrary lib;
  lib.ideal_ = true;
  return lib;
}

PulseLibrary PulseLibrary::load(const std::string& dir) {
  PulseLibrary lib;
  for (const auto& [label, path] : load_pulse_index(dir)) lib.pulses_[label] = load_schedule(path);
  return lib;
}

bool PulseLibrary::contains(const std::string& label) const {
  return ideal_ || pulses_.count(label) > 0;
}

PulseSchedule PulseLibrary::lookup(const std::string& label) const {
  if (ideal_) {
    PulseSchedule s;
    s.items.emplace_back(IdealGate{label});
    return s;
  }
  const auto it = pulses_.find(label);
  if (it == pulses_.end()) throw ConfigError("pulse library has no entry for '" + label + "'");
  return it->second;
}

void PulseLibrary::insert(const std::string& label, PulseSchedule sched) {
  ideal_ = false;
  pulses_[label] = std::move(sched);
}

std::vector<std::string> PulseLibrary::labels() const {
  std::vector<std::string> out;
  for (const auto& kv : pulses_) out.push_back(kv.first);
  return out;
}

double CompiledCircuit::duration() const {
  double t = 0.0;
  for (const auto& g : gates) t += g.schedule.duration();
  return t;
}

Delay coupling_delay(double duration_s, int j, int k, int n_spins) {
  if (n_spins < 2 || j == k || j < 0 || k < 0 || j >= n_spins || k >= n_spins) {
    throw PreconditionError("coupling_delay: needs two distinct spins");
  }
  int levels = 1;
  while ((1 << levels) < n_spins) ++levels;
  const int segs = 1 << levels;
  // Walsh function m on segment t is (-1)^popcount(m & t). The pair shares
  // m = 1; the other spins take distinct m >= 2, so every other zz product and
  // every offset term averages to zero.
  auto walsh = [segs](int m) {
    std::vector<int> w(segs);
    for (int t = 0; t < segs; ++t) w[t] = (__builtin_popcount(static_cast<unsigned>(m & t)) % 2) ? -1 : 1;
    return w;
  };
  Delay d;
  d.duration_s = duration_s;
  d.walsh.resize(n_spins);
  int next = 2;
  for (int s = 0; s < n_spins; ++s) d.walsh[s] = (s == j || s == k) ? walsh(1) : walsh(next++);
  return d;
}

CompiledCircuit compile_to_schedule(const std::vector<Gate>& gates, const SpinSystem& sys, const PulseLibrary& lib) {
  sys.validate();
  const int n = sys.n_spins;
  CompiledCircuit out;
  out.relabel.resize(n);
  std::iota(out.relabel.begin(), out.relabel.end(), 0);
  for (const auto& g : gates) {
    if (g.kind == GateKind::relabel) {
      std::vector<int> rev(n);
      for (int s = 0; s < n; ++s) rev[s] = out.relabel[n - 1 - s];
      out.relabel = rev;
      continue;
    }
    CompiledGate cg;
    cg.gate = g;
    std::vector<std::string> labels;
    if (g.kind == GateKind::hadamard) {
      labels = {"Ry90@" + spin_string({g.j}), "Rx180@" + spin_string({g.j})};
    }
    double nominal = 0.0;
    for (const auto& l : labels) nominal = std::max(nominal, lib.lookup(l).nominal_rf_rad_s);
    if (g.kind == GateKind::controlled_phase) {
      const double jhz = sys.j_couplings_hz(g.j, g.k);
      if (jhz == 0.0) throw PreconditionError("compile_to_schedule: " + g.name() + " needs a nonzero coupling");
      const std::string pair = spin_string({g.j, g.k});
      const std::string flank = "Rx180@" + spin_string({g.j});
      std::vector<std::string> pre, post = {"Ry90@" + pair, "Rx" + format_degrees(g.theta / 2) + "@" + pair,
                                            "Ry" + format_degrees(-kPi / 2) + "@" + pair};
      if (jhz > 0) pre = {flank};
      for (const auto& l : pre) nominal = std::max(nominal, lib.lookup(l).nominal_rf_rad_s);
      for (const auto& l : post) nominal = std::max(nominal, lib.lookup(l).nominal_rf_rad_s);
      cg.schedule.nominal_rf_rad_s = nominal;
      for (const auto& l : pre) append(cg.schedule, lib.lookup(l));
      const double t = std::abs(g.theta) / (2.0 * kPi * std::abs(jhz));
      cg.schedule.items.emplace_back(coupling_delay(t, g.j, g.k, n));
      for (const auto& l : pre) append(cg.schedule, lib.lookup(l));
      for (const auto& l : post) append(cg.schedule, lib.lookup(l));
    } else {
      cg.schedule.nominal_rf_rad_s = nominal;
      for (const auto& l : labels) append(cg.schedule, lib.lookup(l));
    }
    out.gates.push_back(std::move(cg));
  }
  return out;
}

}  // namespace nmrqpt
