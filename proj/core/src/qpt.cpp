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

#include "nmrqpt/qpt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "nmrqpt/parallel.hpp"

namespace nmrqpt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string rotation_label(char choice, int spin) {
  return std::string(choice == 'X' ? "Rx90@" : "Ry90@") + static_cast<char>('1' + spin);
}

// Index of the single product operator proportional to m, or -1.
long single_product(const CMatrix& m) {
  const RVector c = po_decompose(m, 1e-8);
  long found = -1;
  for (Index i = 0; i < c.size(); ++i) {
    if (std::abs(c(i)) > 1e-8) {
      if (found >= 0) return -1;
      found = static_cast<long>(i);
    }
  }
  return found;
}

}  // namespace

std::string Readout::name() const { return per_spin; }

std::vector<std::string> Readout::pulse_labels() const {
  std::vector<std::string> out;
  for (std::size_t s = 0; s < per_spin.size(); ++s) {
    if (per_spin[s] != 'I') out.push_back(rotation_label(per_spin[s], static_cast<int>(s)));
  }
  return out;
}

CMatrix Readout::ideal_unitary() const {
  const int n = static_cast<int>(per_spin.size());
  for (char c : per_spin) {
    if (c != 'I' && c != 'X' && c != 'Y') throw PreconditionError("readout '" + per_spin + "': bad choice");
  }
  CMatrix w = CMatrix::Identity(hilbert_dim(n), hilbert_dim(n));
  for (const auto& l : pulse_labels()) w = ideal_gate_unitary(l, n) * w;
  return w;
}

std::vector<std::size_t> exposed_products(const Readout& r) {
  const int n = static_cast<int>(r.per_spin.size());
  const CMatrix w = r.ideal_unitary();
  std::vector<std::size_t> out;
  for (const auto& o : observable_set(n)) {
    const long idx = single_product(w.adjoint() * o.matrix() * w);
    if (idx <= 0) throw NumericalError("readout maps an observable outside the product basis");
    out.push_back(static_cast<std::size_t>(idx));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Readout> readout_pulses(int n_spins) {
  if (n_spins < 1 || n_spins > kMaxSpins) throw DimensionError("readout_pulses: bad spin count");
  const std::size_t total = static_cast<std::size_t>(hilbert_dim(n_spins) * hilbert_dim(n_spins));
  std::vector<Readout> candidates;
  std::vector<std::vector<bool>> covers;
  std::size_t count = 1;
  for (int s = 0; s < n_spins; ++s) count *= 3;
  for (std::size_t c = 0; c < count; ++c) {
    std::string code(n_spins, 'I');
    std::size_t v = c;
    for (int s = n_spins - 1; s >= 0; --s, v /= 3) code[s] = "IXY"[v % 3];
    candidates.push_back({code});
    std::vector<bool> mask(total, false);
    for (auto i : exposed_products(candidates.back())) mask[i] = true;
    covers.push_back(std::move(mask));
  }

  auto missing_after = [&](const std::vector<std::size_t>& chosen) {
    std::vector<bool> hit(total, false);
    hit[0] = true;
    for (auto c : chosen) {
      for (std::size_t i = 0; i < total; ++i) hit[i] = hit[i] || covers[c][i];
    }
    std::vector<std::size_t> miss;
    for (std::size_t i = 0; i < total; ++i) {
      if (!hit[i]) miss.push_back(i);
    }
    return miss;
  };

  // Depth-first search over subsets of increasing size; candidate 0 is the
  // identity readout and is always included.
  std::vector<std::size_t> chosen{0};
  std::function<bool(std::size_t, std::size_t)> search = [&](std::size_t start, std::size_t remaining) {
    if (remaining == 0) return missing_after(chosen).empty();
    for (std::size_t c = start; c < candidates.size(); ++c) {
      chosen.push_back(c);
      if (search(c + 1, remaining - 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  for (std::size_t size = 1; size <= candidates.size(); ++size) {
    chosen.assign(1, 0);
    if (search(1, size - 1)) {
      std::vector<Readout> out;
      for (auto c : chosen) out.push_back(candidates[c]);
      return out;
    }
  }
  std::ostringstream msg;
  msg << "readout_pulses: no readout set spans the product basis; unspanned:";
  std::vector<std::size_t> all(candidates.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto basis = po_basis(n_spins);
  for (auto i : missing_after(all)) msg << ' ' << basis[i].label;
  throw NumericalError(msg.str());
}

TomographyDesign tomography_design(int n_spins, const std::vector<Readout>& readouts) {
  if (readouts.empty()) throw PreconditionError("tomography_design: no readouts");
  TomographyDesign d;
  d.n_spins = n_spins;
  d.readouts = readouts;
  d.observables = observable_set(n_spins);
  const Index unknowns = hilbert_dim(n_spins) * hilbert_dim(n_spins) - 1;
  const Index n_obs = static_cast<Index>(d.observables.size());
  d.matrix = RMatrix::Zero(static_cast<Index>(readouts.size()) * n_obs, unknowns);
  for (std::size_t r = 0; r < readouts.size(); ++r) {
    if (static_cast<int>(readouts[r].per_spin.size()) != n_spins) throw DimensionError("readout size mismatch");
    const CMatrix w = readouts[r].ideal_unitary();
    for (Index o = 0; o < n_obs; ++o) {
      const RVector c = po_decompose(w.adjoint() * d.observables[o].matrix() * w, 1e-8);
      d.matrix.row(static_cast<Index>(r) * n_obs + o) = c.tail(unknowns).transpose();
    }
  }
  Eigen::JacobiSVD<RMatrix> svd(d.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  std::vector<double> deficient;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= 1e-10 * sv(0)) deficient.push_back(sv(i));
  }
  // Fewer signals than unknowns: the missing singular values are zero.
  for (Index i = sv.size(); i < unknowns; ++i) deficient.push_back(0.0);
  if (!deficient.empty()) throw RankDeficientError("tomography_design", deficient);
  d.solver = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  return d;
}

RVector observe(const CMatrix& rho, const std::vector<PauliProduct>& observables) {
  RVector out(static_cast<Index>(observables.size()));
  const double n = static_cast<double>(rho.rows());
  for (std::size_t i = 0; i < observables.size(); ++i) {
    out(static_cast<Index>(i)) = observables[i].matrix().transpose().cwiseProduct(rho).sum().real() / n;
  }
  return out;
}

CMatrix estimate_state(const TomographyDesign& d, const RVector& signals, double identity_coefficient) {
  if (signals.size() != d.matrix.rows()) throw DimensionError("estimate_state: signal count");
  RVector coeffs(d.matrix.cols() + 1);
  coeffs(0) = identity_coefficient;
  coeffs.tail(d.matrix.cols()) = d.solver * signals;
  return po_assemble(coeffs);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t state, std::uint64_t readout, std::uint64_t phase) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ state);
  h = splitmix64(h ^ readout);
  return splitmix64(h ^ phase);
}

RVector tomography_signals(const CMatrix& rho, const TomographyDesign& d, const ReadoutEnsemble& ens) {
  const Index n_obs = static_cast<Index>(d.observables.size());
  RVector out = RVector::Zero(d.matrix.rows());
  for (std::size_t r = 0; r < d.readouts.size(); ++r) {
    RVector s = RVector::Zero(n_obs);
    if (ens.unitaries.empty()) {
      const CMatrix w = d.readouts[r].ideal_unitary();
      s = observe(w * rho * w.adjoint(), d.observables);
    } else {
      for (std::size_t m = 0; m < ens.unitaries.size(); ++m) {
        const CMatrix& w = ens.unitaries[m].at(r);
        s += ens.weights.at(m) * observe(w * rho * w.adjoint(), d.observables);
      }
    }
    out.segment(static_cast<Index>(r) * n_obs, n_obs) = s;
  }
  return out;
}

CMatrix state_tomography(const CMatrix& rho, const TomographyDesign& d, const NoiseModel& noise,
                         std::uint64_t state_index, std::uint64_t phase, const ReadoutEnsemble& ens) {
  if (noise.sigma < 0) throw PreconditionError("state_tomography: sigma must be nonnegative");
  RVector signals = tomography_signals(rho, d, ens);
  const Index n_obs = static_cast<Index>(d.observables.size());
  if (noise.sigma > 0) {
    for (std::size_t r = 0; r < d.readouts.size(); ++r) {
      std::mt19937_64 rng(stream_seed(noise.seed, state_index, r, phase));
      std::normal_distribution<double> gauss(0.0, noise.sigma);
      for (Index o = 0; o < n_obs; ++o) signals(static_cast<Index>(r) * n_obs + o) += gauss(rng);
    }
  }
  return estimate_state(d, signals, rho.trace().real() / static_cast<double>(rho.rows()));
}

std::vector<DensityMatrix> prepare_input_states(int n_spins) {
  std::vector<DensityMatrix> out;
  for (const auto& p : po_basis(n_spins)) out.emplace_back(p.matrix(), true);
  return out;
}

std::vector<DensityMatrix> prepare_input_states(int n_spins, const Supermatrix& imperfection) {
  const Supermatrix s = change_basis(imperfection, Basis::zeeman);
  std::vector<DensityMatrix> out;
  for (const auto& p : po_basis(n_spins)) {
    CMatrix rho = uncol(s.matrix * col(p.matrix()));
    out.emplace_back(0.5 * (rho + rho.adjoint()), true);
  }
  return out;
}

Supermatrix reconstruct_supermatrix(const CMatrix& r_in, const CMatrix& r_out, double condition_bound,
                                    double* condition) {
  if (r_in.rows() != r_in.cols() || r_out.rows() != r_in.rows() || r_out.cols() != r_in.cols()) {
    throw DimensionError("reconstruct_supermatrix: R_in and R_out must be square and equal in size");
  }
  Eigen::JacobiSVD<CMatrix> svd(r_in);
  const RVector& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (condition) *condition = cond;
  if (!(cond <= condition_bound)) throw IllConditionedError("reconstruct_supermatrix", cond);
  const CMatrix mt = r_in.transpose().partialPivLu().solve(r_out.transpose());
  return {mt.transpose(), Basis::zeeman};
}

// ---------------------------------------------------------------------------

namespace {

struct Accumulator {
  std::vector<RVector> in;   // per non-identity state, readout-major signals
  std::vector<RVector> out;
  RVector out_identity;      // tr(S(P_a)) / N per state, identity included
  CMatrix channel;           // weighted sum of member supermatrices
};

}  // namespace

QptRun run_qpt(const QptSettings& st) {
  const SpinSystem& sys = st.system;
  sys.validate();
  const int n = sys.n_spins;
  const Index dim = hilbert_dim(n);
  const Index dim2 = dim * dim;
  const std::vector<Gate> circuit = st.circuit.empty() ? qft_circuit(n) : st.circuit;
  const RfHistogram hist = st.incoherence ? st.histogram : RfHistogram::single();
  const auto members = ensemble_members(sys, hist, st.spectators);
  const CompiledCircuit compiled = compile_to_schedule(circuit, sys, st.library);
  const CMatrix relabel = relabel_unitary(compiled.relabel);
  const TomographyDesign design = tomography_design(n, readout_pulses(n));
  const auto basis = po_basis(n);
  const Index n_obs = static_cast<Index>(design.observables.size());
  const Index n_sig = design.matrix.rows();
  const std::size_t n_states = basis.size();

  const bool po_relax = st.relaxation && st.relaxation->variant == RelaxationModel::Variant::po_rates;
  const bool uniform_relax = st.relaxation && st.relaxation->variant == RelaxationModel::Variant::uniform;
  if (st.relaxation && st.relaxation->n_spins != n) throw PreconditionError("run_qpt: relaxation model size");
  std::vector<CMatrix> relax_ops;
  if (po_relax) {
    for (const auto& g : compiled.gates) relax_ops.push_back(relax_superop_zeeman(*st.relaxation, g.schedule.duration()).matrix);
  }

  std::vector<std::string> prep_labels;
  for (int s = 0; s < n; ++s) {
    prep_labels.push_back(rotation_label('Y', s));
    prep_labels.push_back(rotation_label('X', s));
  }
  std::vector<CMatrix> ideal_readouts;
  for (const auto& r : design.readouts) ideal_readouts.push_back(r.ideal_unitary());

  constexpr std::size_t kChunk = 8;  // fixed so results do not depend on the worker count
  const std::size_t n_chunks = (members.size() + kChunk - 1) / kChunk;

  auto run_chunk = [&](std::size_t chunk) {
    Accumulator acc;
    acc.in.assign(n_states, RVector::Zero(n_sig));
    acc.out.assign(n_states, RVector::Zero(n_sig));
    acc.out_identity = RVector::Zero(static_cast<Index>(n_states));
    acc.channel = CMatrix::Zero(dim2, dim2);
    const std::size_t end = std::min(members.size(), (chunk + 1) * kChunk);
    for (std::size_t mi = chunk * kChunk; mi < end; ++mi) {
      const EnsembleMember& m = members[mi];
      std::map<std::string, CMatrix> pulse_cache;
      auto pulse = [&](const std::string& label) -> const CMatrix& {
        auto it = pulse_cache.find(label);
        if (it == pulse_cache.end()) {
          it = pulse_cache.emplace(label, schedule_propagator_folded(st.library.lookup(label), m.system, m.scale)).first;
        }
        return it->second;
      };

      std::vector<CMatrix> readouts;
      for (std::size_t r = 0; r < design.readouts.size(); ++r) {
        if (!st.readout_imperfection) {
          readouts.push_back(ideal_readouts[r]);
          continue;
        }
        CMatrix w = CMatrix::Identity(dim, dim);
        for (const auto& l : design.readouts[r].pulse_labels()) w = pulse(l) * w;
        readouts.push_back(std::move(w));
      }
      CMatrix prep = CMatrix::Identity(dim, dim);
      if (st.preparation_imperfection) {
        for (const auto& l : prep_labels) prep = ideal_gate_unitary(l, n).adjoint() * pulse(l) * prep;
      }

      CMatrix u_total = CMatrix::Identity(dim, dim);
      CMatrix s_total;
      if (po_relax) s_total = CMatrix::Identity(dim2, dim2);
      for (std::size_t g = 0; g < compiled.gates.size(); ++g) {
        const CMatrix ug = schedule_propagator_folded(compiled.gates[g].schedule, m.system, m.scale);
        if (po_relax) {
          s_total = relax_ops[g] * unitary_superop(ug, 1e-8).matrix * s_total;
        } else {
          u_total = ug * u_total;
        }
      }
      if (!po_relax) s_total = unitary_superop(u_total, 1e-8).matrix;
      if (uniform_relax) s_total = apply_uniform_attenuation(Supermatrix{s_total, Basis::zeeman}, st.relaxation->eta).matrix;
      acc.channel += m.weight * s_total;

      for (std::size_t a = 0; a < n_states; ++a) {
        const CMatrix rho_in = prep * basis[a].matrix() * prep.adjoint();
        const CMatrix rho_out = uncol(s_total * col(rho_in));
        acc.out_identity(static_cast<Index>(a)) += m.weight * rho_out.trace().real() / static_cast<double>(dim);
        if (a == 0) continue;
        for (std::size_t r = 0; r < readouts.size(); ++r) {
          const CMatrix& w = readouts[r];
          const Index off = static_cast<Index>(r) * n_obs;
          acc.in[a].segment(off, n_obs) += m.weight * observe(w * rho_in * w.adjoint(), design.observables);
          acc.out[a].segment(off, n_obs) += m.weight * observe(w * rho_out * w.adjoint(), design.observables);
        }
      }
    }
    return acc;
  };
  const auto chunks = parallel_map<Accumulator>(n_chunks, st.threads, run_chunk);

  Accumulator total = chunks.front();
  for (std::size_t c = 1; c < chunks.size(); ++c) {
    for (std::size_t a = 0; a < n_states; ++a) {
      total.in[a] += chunks[c].in[a];
      total.out[a] += chunks[c].out[a];
    }
    total.out_identity += chunks[c].out_identity;
    total.channel += chunks[c].channel;
  }

  QptRun run;
  run.seed = st.seed;
  run.readouts = design.readouts;
  run.circuit_duration_s = compiled.duration();
  run.u_theory = ideal_circuit_unitary(circuit, n);
  const CMatrix relabel_super = unitary_superop(relabel).matrix;
  run.simulated = {relabel_super * total.channel, Basis::zeeman};

  CMatrix r_in(dim2, dim2), r_out(dim2, dim2);
  const CMatrix identity = CMatrix::Identity(dim, dim);
  r_in.col(0) = col(identity);
  // The identity input is propagated exactly rather than tomographed.
  r_out.col(0) = run.simulated.matrix * col(identity);
  run.inputs_estimated.push_back(identity);
  run.outputs_estimated.push_back(uncol(r_out.col(0)));
  for (const auto& p : basis) run.input_labels.push_back(p.label);

  for (std::size_t a = 1; a < n_states; ++a) {
    for (int phase = 0; phase < 2; ++phase) {
      RVector& sig = phase == 0 ? total.in[a] : total.out[a];
      for (std::size_t r = 0; r < design.readouts.size(); ++r) {
        TomographyRecord rec;
        rec.phase = phase;
        rec.state = a;
        rec.readout = r;
        rec.noise_seed = stream_seed(st.seed, a, r, static_cast<std::uint64_t>(phase));
        const Index off = static_cast<Index>(r) * n_obs;
        if (st.noise_sigma > 0) {
          std::mt19937_64 rng(rec.noise_seed);
          std::normal_distribution<double> gauss(0.0, st.noise_sigma);
          for (Index o = 0; o < n_obs; ++o) sig(off + o) += gauss(rng);
        }
        rec.signals = sig.segment(off, n_obs);
        run.records.push_back(std::move(rec));
      }
    }
    const CMatrix est_in = estimate_state(design, total.in[a], 0.0);
    const CMatrix est_out_raw = estimate_state(design, total.out[a], total.out_identity(static_cast<Index>(a)));
    const CMatrix est_out = relabel * est_out_raw * relabel.adjoint();
    run.inputs_estimated.push_back(est_in);
    run.outputs_estimated.push_back(est_out);
    r_in.col(static_cast<Index>(a)) = col(est_in);
    r_out.col(static_cast<Index>(a)) = col(est_out);

    const CMatrix ideal_in = basis[a].matrix();
    const CMatrix ideal_out = run.u_theory * ideal_in * run.u_theory.adjoint();
    run.input_correlations.push_back(state_correlation(ideal_in, est_in));
    run.output_correlations.push_back(state_correlation(ideal_out, est_out));
    run.attenuated_output_correlations.push_back(attenuated_state_correlation(ideal_out, est_out, ideal_in));
  }
  run.r_in = {r_in, Basis::zeeman};
  run.r_out = {r_out, Basis::zeeman};
  run.m_obs = reconstruct_supermatrix(r_in, r_out, st.condition_bound, &run.condition_number);
  return run;
}

}  // namespace nmrqpt
