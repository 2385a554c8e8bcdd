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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "nmrqpt/analysis.hpp"
#include "nmrqpt/config.hpp"
#include "nmrqpt/matrix_io.hpp"
#include "nmrqpt/pulse_design.hpp"
#include "nmrqpt/qpt.hpp"
#include "nmrqpt/relax.hpp"
#include "oracles.hpp"

using namespace nmrqpt;
namespace fs = std::filesystem;

namespace {

const std::string kData = NMRQPT_DATA_DIR;
const std::string kCli = NMRQPT_CLI;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double mean_magnitude(const std::vector<Complex>& ev) {
  double s = 0.0;
  for (const auto& z : ev) s += std::abs(z);
  return s / static_cast<double>(ev.size());
}

// The regime run is shared by criteria 8 and 10; its cost is charged to 10.
double g_regime_seconds = 0.0;

const QptRun& regime_run() {
  static const QptRun run = [] {
    const auto t0 = std::chrono::steady_clock::now();
    QptRun r = run_qpt(settings_from_config(load_run_config(kData + "/configs/regime.json")));
    g_regime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }();
  return run;
}

Verdict c1() {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const Index dim = hilbert_dim(n);
    const CMatrix s = oracle::super_from_kraus(oracle::random_kraus(rng, dim, 1 + trial % 4));
    const ChoiMatrix t = choi_of(Supermatrix{s, Basis::zeeman});
    worst = std::max(worst, (t.matrix - oracle::choi(s)).norm());
    worst = std::max(worst, (super_of_choi(t).matrix - s).norm());
    worst = std::max(worst, (super_of_kraus(kraus_of_choi(t)).matrix - s).norm());
    worst = std::max(worst, (choi_of(super_of_kraus(kraus_of_choi(t))).matrix - t.matrix).norm());
  }
  return {worst < 1e-10, "max round-trip error " + fmt("%.3g", worst)};
}

Verdict c2() {
  const QptRun run = run_qpt(settings_from_config(load_run_config(kData + "/configs/noiseless_secular.json")));
  const double c = super_correlation(unitary_superop(qft_unitary(3)), run.m_obs);
  return {c >= 1.0 - 1e-8, "correlation " + fmt("%.15f", c)};
}

Verdict c3() {
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const CMatrix q = qft_unitary(n);
    worst = std::max(worst, (q - phase_aligned(q, ideal_circuit_unitary(qft_circuit(n), n))).norm());
  }
  // Pulse-level compilation with ideal pulses and Walsh-toggled delays.
  const SpinSystem sys = load_spin_system(kData + "/alanine_secular.json");
  const CompiledCircuit c = compile_to_schedule(qft_circuit(3), sys, PulseLibrary::ideal());
  CMatrix u = CMatrix::Identity(8, 8);
  for (const auto& g : c.gates) u = schedule_propagator(g.schedule, sys, 1.0) * u;
  u = relabel_unitary(c.relabel) * u;
  const double compiled = (qft_unitary(3) - phase_aligned(qft_unitary(3), u)).norm();
  const auto names = [] {
    std::string s;
    for (const auto& g : qft_circuit(3)) s += g.name() + " ";
    return s;
  }();
  const bool order = names == "H1 B12(90) H2 B13(45) B23(90) H3 SWAP13 ";
  return {worst < 1e-10 && compiled < 1e-10 && order,
          "gate list [" + names + "] circuit error " + fmt("%.3g", worst) + ", compiled schedule error " +
              fmt("%.3g", compiled)};
}

Verdict c4() {
  const Supermatrix q = change_basis(unitary_superop(qft_unitary(3)), Basis::product_operator);
  const CMatrix p1 = po_product("X1Z").matrix();
  const CMatrix p2 = 0.5 * (po_product("X11").matrix() + po_product("11Z").matrix());
  const double f1 = fixed_point_check(q, p1), f2 = fixed_point_check(q, p2);
  const Supermatrix a = apply_uniform_attenuation(q, 0.82);
  const double g1 = fixed_point_check(a, p1), g2 = fixed_point_check(a, p2);
  const double h1 = fixed_point_attenuated(a, p1), h2 = fixed_point_attenuated(a, p2);
  const bool ok = std::abs(f1 - 1) < 1e-12 && std::abs(f2 - 1) < 1e-12 && std::abs(g1 - 1) < 1e-12 &&
                  std::abs(g2 - 1) < 1e-12 && std::abs(h1 - 0.82) < 1e-10 && std::abs(h2 - 0.82) < 1e-10;
  return {ok, "ideal " + fmt("%.15f", f1) + "/" + fmt("%.15f", f2) + ", attenuated corr " + fmt("%.15f", g1) +
                  "/" + fmt("%.15f", g2) + ", attenuated " + fmt("%.12f", h1) + "/" + fmt("%.12f", h2)};
}

Verdict c5() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3;
    const Index dim = hilbert_dim(n);
    const CMatrix u = oracle::random_unitary(rng, dim);
    const auto k = oracle::random_kraus(rng, dim, 1 + trial % 5);
    worst = std::max(worst, std::abs(kraus_gate_fidelity(u, k) - gate_fidelity(unitary_superop(u), super_of_kraus(k))));
  }
  return {worst < 1e-12, "max |F_kraus - F_super| " + fmt("%.3g", worst)};
}

Verdict c6() {
  const SpinSystem sys = load_spin_system(kData + "/alanine.json");
  const PulseLibrary lib = PulseLibrary::load(kData + "/pulses");
  const PulseSchedule p1 = lib.lookup("Ry-90@1"), p2 = lib.lookup("Rx180@12");
  PulseSchedule both = p1;
  both.items.insert(both.items.end(), p2.items.begin(), p2.items.end());
  if (p1.nominal_rf_rad_s != p2.nominal_rf_rad_s) return {false, "library pulses use different nominal RF"};
  auto eval = [&](const RfHistogram& h, double* reduction) {
    const Supermatrix s1 = incoherent_superop(p1, sys, h, false).super;
    const Supermatrix s2 = incoherent_superop(p2, sys, h, false).super;
    const Supermatrix sb = incoherent_superop(both, sys, h, false).super;
    if (reduction) *reduction = 1.0 - mean_magnitude(eigenvalues(sb));
    return (sb.matrix - s2.matrix * s1.matrix).norm();
  };
  double reduction = 0.0;
  const double d2 = eval(load_histogram(kData + "/rf_two_bin.json"), &reduction);
  const double d1 = eval(RfHistogram::single(), nullptr);
  return {d2 > 0.0 && reduction > 0.0 && reduction < 0.05 && d1 < 1e-10,
          "two-bin ||S_both - S2 S1|| " + fmt("%.4g", d2) + ", mean |lambda| reduction " +
              fmt("%.3f%%", 100 * reduction) + ", single-bin difference " + fmt("%.3g", d1)};
}

Verdict c7() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const CMatrix h = internal_hamiltonian(load_spin_system(kData + "/alanine.json"));
  const double nominal = 2.0 * kPi * 10e3;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    PulseInterval iv;
    iv.duration_s = 2e-6 + 18e-6 * u01(rng);
    iv.amplitude = 2.0 * u01(rng);
    iv.rf_frequency_hz = -3e3 + 18e3 * u01(rng);
    iv.rf_phase_rad = 2.0 * kPi * u01(rng);
    const double scale = 0.7 + 0.5 * u01(rng);
    const CMatrix u = interval_propagator(h, iv, scale, nominal, 3);
    const CMatrix ref = oracle::magnus_propagator(h, iv.duration_s, scale * iv.amplitude * nominal / 2.0,
                                                  iv.rf_frequency_hz, iv.rf_phase_rad, 3, 1000);
    worst = std::max(worst, (u - ref).norm());
  }
  return {worst < 1e-8, "max ||U - U_oracle||_F " + fmt("%.3g", worst)};
}

Verdict c8() {
  std::mt19937_64 rng(8);
  double worst_eig = 0.0, worst_tp = 0.0, worst_fixed = 0.0;
  bool all_converged = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 2;
    const Index dim = hilbert_dim(n);
    const CMatrix s = oracle::super_from_kraus(oracle::random_kraus(rng, dim, 1 + trial % 3));
    const CMatrix t = oracle::choi(s) + 0.1 * oracle::random_hermitian(rng, dim * dim);
    const CptpResult r = project_cptp(super_of_choi(t));
    all_converged = all_converged && r.converged;
    worst_eig = std::min(worst_eig, r.min_eigenvalue);
    worst_tp = std::max(worst_tp, r.tp_defect);
    const CptpResult f = project_cptp(Supermatrix{s, Basis::zeeman});
    worst_fixed = std::max(worst_fixed, (f.projected.matrix - s).norm());
  }
  const QptRun& run = regime_run();
  const Supermatrix th = unitary_superop(run.u_theory);
  const double before = super_correlation(th, run.m_obs);
  const double after = super_correlation(th, project_cptp(run.m_obs).projected);
  const bool ok = all_converged && worst_eig >= -1e-9 && worst_tp < 1e-6 && worst_fixed < 1e-9 && after > before;
  return {ok, "min eigenvalue " + fmt("%.3g", worst_eig) + ", TP defect " + fmt("%.3g", worst_tp) +
                  ", fixed-point drift " + fmt("%.3g", worst_fixed) + ", pipeline correlation " +
                  fmt("%.4f", before) + " -> " + fmt("%.4f", after)};
}

Verdict c9() {
  double worst_axis = 0.0, worst_angle = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> ang(20.0, 160.0);
    std::vector<SpinRotation> planted(3);
    for (auto& r : planted) {
      const double x = g(rng), y = g(rng), z = g(rng), nn = std::sqrt(x * x + y * y + z * z);
      r.axis = {x / nn, y / nn, z / nn};
      r.angle_deg = ang(rng);
    }
    CMatrix u = rotation_product(planted);
    const CMatrix e = oracle::random_complex(rng, 8, 8);
    u += 0.01 * u.norm() * e / e.norm();
    const RotationFit fit = fit_single_spin_rotations(u, CorrectionSide::left, seed);
    for (int s = 0; s < 3; ++s) {
      const auto& a = fit.rotations[s].axis;
      const auto& b = planted[s].axis;
      const double dot = std::clamp(a[0] * b[0] + a[1] * b[1] + a[2] * b[2], -1.0, 1.0);
      worst_axis = std::max(worst_axis, std::acos(dot) * 180.0 / kPi);
      worst_angle = std::max(worst_angle, std::abs(fit.rotations[s].angle_deg - planted[s].angle_deg));
    }
  }
  return {worst_axis < 5.0 && worst_angle < 1.0,
          "worst axis error " + fmt("%.3f deg", worst_axis) + ", worst angle error " + fmt("%.3f deg", worst_angle)};
}

Verdict c10() {
  const RunConfig cfg = load_run_config(kData + "/configs/regime.json");
  const QptSettings st = settings_from_config(cfg);
  // Every designed pulse must clear the fidelity floor over the RF histogram,
  // the ensemble the library was designed against.
  double min_fid = 1.0;
  std::string worst_label;
  for (const auto& label : st.library.labels()) {
    const double f = schedule_fidelity(ideal_gate_unitary(label, 3), st.library.lookup(label), st.system,
                                       st.histogram, false, st.threads);
    if (f < min_fid) {
      min_fid = f;
      worst_label = label;
    }
  }
  const QptRun& run = regime_run();
  const ErrorReport rep = decompose(run.m_obs, run.u_theory);
  const Supermatrix th = unitary_superop(run.u_theory);
  const double before = super_correlation(th, run.m_obs);
  const double after =
      super_correlation(th, coherent_correction(run.m_obs, rep.largest_kraus_unitary, run.u_theory));
  const double a1 = rep.kraus_amplitudes.front();
  const bool ok = min_fid > 0.99 && rep.positivity < 1.0 && a1 > 0.7 && a1 < 1.0 && after > before;
  return {ok, "min pulse fidelity " + fmt("%.4f", min_fid) + " (" + worst_label + "), positivity " +
                  fmt("%.4f", rep.positivity) + ", a1 " + fmt("%.4f", a1) + ", correlation " + fmt("%.4f", before) +
                  " -> " + fmt("%.4f", after) + " after correction"};
}

Verdict c11() {
  const auto phases = qft_reference_phases();
  const RunConfig coherent_cfg = load_run_config(kData + "/configs/coherent_only.json");
  const RunConfig incoherent_cfg = load_run_config(kData + "/configs/incoherent.json");
  const Supermatrix coherent = run_qpt(settings_from_config(coherent_cfg)).simulated;
  const Supermatrix incoherent = run_qpt(settings_from_config(incoherent_cfg)).simulated;
  const Supermatrix relaxed = apply_uniform_attenuation(unitary_superop(qft_unitary(3)), 0.82);

  const auto ev_c = eigenvalues(coherent), ev_i = eigenvalues(incoherent), ev_r = eigenvalues(relaxed);
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 1; i < ev_r.size(); ++i) {
    lo = std::min(lo, std::abs(ev_r[i]));
    hi = std::max(hi, std::abs(ev_r[i]));
  }
  double max_mag = 0.0;
  for (const auto* ev : {&ev_c, &ev_i, &ev_r})
    for (const auto& z : *ev) max_mag = std::max(max_mag, std::abs(z));
  const double sc = angular_spread(ev_c, phases), si = angular_spread(ev_i, phases);
  return {hi - lo < 1e-10 && si > sc && max_mag <= 1.0 + 1e-9,
          "uniform-relaxation magnitude spread " + fmt("%.3g", hi - lo) + ", angular spread " + fmt("%.4f", sc) +
              " -> " + fmt("%.4f", si) + " rad with incoherence, max |lambda| " + fmt("%.12f", max_mag)};
}

int sh(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_text_file(e.path().string());
  }
  return out;
}

Verdict c12() {
  const fs::path base = fs::temp_directory_path() / "nmrqpt_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  // A cheap configuration with noise on so the seed matters.
  const fs::path cfg = base / "noisy.json";
  write_text_file(cfg.string(), R"({"schema_version": 1, "system": ")" + kData + R"(/alanine_secular.json",
    "noise_sigma": 0.01, "seed": 17, "toggles": {"noise": true}})");
  const fs::path one = base / "one.json";
  save_spin_system(SpinSystem::uncoupled(1), one.string());

  auto commands = [&](const fs::path& out) {
    fs::create_directories(out);
    const std::string o = out.string();
    return std::vector<std::string>{
        "run-qpt --config " + cfg.string() + " --out " + o + "/run",
        "analyze --run " + o + "/run --out " + o + "/analysis",
        "project-cptp --in " + o + "/run/m_obs.txt --out " + o + "/projected.txt",
        "spectrum --in obs=" + o + "/run/m_obs.txt --out " + o + "/spectra.csv",
        "simulate-pulse --system " + kData + "/alanine.json --schedule " + kData +
            "/pulses/Ry90_1.json --histogram " + kData + "/rf_two_bin.json --target Ry90@1 --out " + o + "/sim.txt",
        "design-pulse --target Rx90@1 --system " + one.string() +
            " --kmax 1 --budget 200 --restarts 2 --surrogate-evals 200 --seed 4 --out " + o + "/designed.json",
        "demo-incoherence --system " + kData + "/alanine.json --library " + kData + "/pulses --histogram " + kData +
            "/rf_two_bin.json --out " + o + "/demo",
    };
  };
  std::vector<std::map<std::string, std::string>> trees;
  for (const char* name : {"a", "b"}) {
    const fs::path out = base / name;
    for (const auto& c : commands(out)) {
      if (sh(c) != 0) return {false, "command failed: " + c};
    }
    trees.push_back(tree(out));
  }
  // Outputs that embed their own directory are compared with that path removed.
  auto normalize = [&](std::map<std::string, std::string> t, const std::string& dir) {
    for (auto& [k, v] : t) {
      std::string::size_type p;
      while ((p = v.find(dir)) != std::string::npos) v.replace(p, dir.size(), "<out>");
    }
    return t;
  };
  const auto a = normalize(trees[0], (base / "a").string());
  const auto b = normalize(trees[1], (base / "b").string());
  std::size_t differing = 0;
  std::string first;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end() || it->second != v) {
      ++differing;
      if (first.empty()) first = k;
    }
  }
  return {differing == 0 && a.size() == b.size(),
          std::to_string(a.size()) + " files compared across 7 subcommands, " + std::to_string(differing) +
              " differ" + (first.empty() ? "" : " (first: " + first + ")")};
}

}  // namespace

// Usage: acceptance [--known-failures N[,N...]]
// Known failures still print FAIL. They only stop counting against the exit
// status, and one that starts passing is reported so the list gets pruned.
int main(int argc, char** argv) {
  std::set<std::size_t> known;
  for (int a = 1; a + 1 < argc; ++a) {
    if (std::string(argv[a]) != "--known-failures") continue;
    std::stringstream ss(argv[a + 1]);
    for (std::string tok; std::getline(ss, tok, ',');) known.insert(std::stoul(tok));
  }
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"channel-algebra round trips", c1},       {"noiseless QPT identity", c2},
      {"QFT construction", c3},                  {"fixed points", c4},
      {"fidelity identity", c5},                 {"incoherence non-composability", c6},
      {"propagator oracle", c7},                 {"CPTP projection", c8},
      {"rotation-fit plant and recover", c9},    {"pipeline regime", c10},
      {"spectrum signatures", c11},              {"determinism", c12},
  };
  // Wall-clock limits in seconds, where one is stated.
  const std::map<std::size_t, double> limits{{1, 60.0}, {2, 30.0}, {7, 120.0}, {10, 600.0}};
  int failures = 0, unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (i + 1 == 8) secs -= g_regime_seconds;
    if (i + 1 == 10) secs += g_regime_seconds;
    if (const auto it = limits.find(i + 1); it != limits.end() && secs > it->second) {
      v.pass = false;
      v.detail += " (over the " + fmt("%.0f", it->second) + " s limit)";
    }
    const bool listed = known.count(i + 1) > 0;
    if (!v.pass) ++failures;
    if (v.pass == listed) ++unexpected;
    std::printf("criterion %2zu %s  %-32s %s  [%.1f s]%s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str(), secs, listed ? (v.pass ? "  (listed as known failure)" : "  (known failure)") : "");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return unexpected == 0 ? 0 : 1;
}
