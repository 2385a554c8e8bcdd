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


#include <filesystem>
#include <memory>

#include "commands.hpp"
#include "manifest.hpp"
#include "nmrqpt/analysis.hpp"
#include "nmrqpt/config.hpp"
#include "nmrqpt/matrix_io.hpp"

namespace nmrqpt::cli {

namespace fs = std::filesystem;

namespace {

// "label=path", or a bare path labeled by its stem.
std::pair<std::string, std::string> split_labeled(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) return {fs::path(arg).stem().string(), arg};
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

json rotations_json(const RotationFit& fit) {
  json spins = json::array();
  for (const auto& r : fit.rotations) {
    spins.push_back({{"axis", {r.axis[0], r.axis[1], r.axis[2]}}, {"angle_deg", r.angle_deg}});
  }
  return {{"side", to_string(fit.side)},
          {"correlation", fit.correlation},
          {"low_confidence", fit.low_confidence},
          {"spins", spins}};
}

std::string kraus_rows(const std::string& label, const std::vector<double>& amplitudes) {
  std::string out;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    out += label + "," + std::to_string(k + 1) + "," + format_double(amplitudes[k]) + "\n";
  }
  return out;
}

}  // namespace

void add_analyze(CLI::App& app) {
  struct Opts {
    std::string run, out;
    std::vector<std::string> references;
    std::uint64_t seed = 7;
    int threads = 1;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("analyze", "Error analysis of a run-qpt output directory");
  cmd->add_option("--run", o->run, "run-qpt output directory")->required();
  cmd->add_option("--references", o->references, "Extra reference supermatrices as label=path");
  cmd->add_option("--seed", o->seed, "Seed of the rotation fits");
  cmd->add_option("--threads", o->threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->callback([o] {
    const json run_manifest = verify_manifest(o->run, "run-qpt");
    ensure_directory(o->out);
    const Supermatrix observed = load_supermatrix(join_path(o->run, "m_obs.txt"));
    const Supermatrix simulated = load_supermatrix(join_path(o->run, "simulated.txt"));
    const CMatrix u_th = load_matrix(join_path(o->run, "u_theory.txt")).data;
    const Supermatrix theory = unitary_superop(u_th);

    std::vector<LabeledSupermatrix> refs = {{"simulated", simulated}};
    for (const auto& arg : o->references) {
      const auto [label, path] = split_labeled(arg);
      refs.push_back({label, load_supermatrix(path)});
    }
    const ErrorReport rep = decompose(observed, u_th, refs);

    const CptpResult proj = project_cptp(observed);
    const ErrorReport proj_rep = decompose(proj.projected, u_th);

    // Coherent correction of the observed and simulated maps from both sides.
    json corrections = json::array();
    json fits = json::array();
    std::vector<LabeledSupermatrix> maps = {{"observed", observed},
                                            {"projected", proj.projected},
                                            {"simulated", simulated},
                                            {"theory", theory}};
    for (const auto& [label, map, u1] :
         {std::tuple{std::string("observed"), observed, rep.largest_kraus_unitary},
          std::tuple{std::string("simulated"), simulated, decompose(simulated, u_th).largest_kraus_unitary}}) {
      for (CorrectionSide side : {CorrectionSide::left, CorrectionSide::right}) {
        const Supermatrix corrected = coherent_correction(map, u1, u_th, side);
        const std::string name = label + "_corrected_" + to_string(side);
        save_supermatrix(join_path(o->out, name + ".txt"), corrected);
        corrections.push_back({{"map", label},
                               {"side", to_string(side)},
                               {"correlation_before", super_correlation(theory, map)},
                               {"correlation_after", super_correlation(theory, corrected)},
                               {"attenuated_before", gate_fidelity(theory, map)},
                               {"attenuated_after", gate_fidelity(theory, corrected)}});
        const RotationFit fit = fit_single_spin_rotations(delta_unitary(u1, u_th, side), side, o->seed);
        json f = rotations_json(fit);
        f["map"] = label;
        fits.push_back(f);
        if (side == CorrectionSide::left) maps.push_back({name, corrected});
      }
    }
    for (std::size_t i = 1; i < refs.size(); ++i) maps.push_back(refs[i]);

    const auto spectra = spectrum_report(maps, o->threads);
    write_spectra_csv(join_path(o->out, "spectra.csv"), spectra);
    json spreads = json::object();
    for (const auto& sp : spectra) {
      spreads[sp.label] = {{"mean_magnitude", mean_magnitude(sp.eigenvalues)},
                           {"qft_angular_spread_rad", angular_spread(sp.eigenvalues, qft_reference_phases())}};
    }
    write_text_file(join_path(o->out, "kraus.csv"), "map,index,amplitude\n" +
                                                        kraus_rows("observed", rep.kraus_amplitudes) +
                                                        kraus_rows("projected", proj_rep.kraus_amplitudes));
    save_supermatrix(join_path(o->out, "projected.txt"), proj.projected);
    std::string log = "iteration,psd_defect,tp_defect,distance\n";
    for (const auto& it : proj.log) {
      log += std::to_string(it.iteration) + "," + format_double(it.psd_defect) + "," + format_double(it.tp_defect) +
             "," + format_double(it.distance) + "\n";
    }
    write_text_file(join_path(o->out, "cptp_log.csv"), log);
    write_text_file(join_path(o->out, "rotation_fit.json"), json{{"fits", fits}}.dump(2) + "\n");

    json corr = json::array();
    for (const auto& c : rep.correlations) {
      corr.push_back({{"row", c.row}, {"col", c.col}, {"correlation", c.correlation}, {"attenuated", c.attenuated}});
    }
    json fixed = json::array();
    for (const auto& fp : rep.fixed_points) {
      fixed.push_back({{"operator", fp.label}, {"correlation", fp.correlation}, {"attenuated", fp.attenuated}});
    }
    const json report = {
        {"correlations", corr},
        {"fixed_points", fixed},
        {"kraus",
         {{"amplitudes", rep.kraus_amplitudes},
          {"positivity", rep.positivity},
          {"choi_min_max_ratio", rep.choi_min_max_ratio},
          {"largest_kraus_theory_correlation", rep.kraus1_theory_correlation},
          {"largest_unitary_theory_overlap", rep.unitary1_theory_overlap}}},
        {"projection",
         {{"converged", proj.converged},
          {"iterations", proj.iterations},
          {"min_eigenvalue", proj.min_eigenvalue},
          {"tp_defect", proj.tp_defect},
          {"correlation_before", super_correlation(theory, observed)},
          {"correlation_after", super_correlation(theory, proj.projected)},
          {"attenuated_before", gate_fidelity(theory, observed)},
          {"attenuated_after", gate_fidelity(theory, proj.projected)}}},
        {"corrections", corrections},
        {"spectra", spreads}};
    write_text_file(join_path(o->out, "report.json"), report.dump(2) + "\n");

    Manifest m("analyze");
    m.arguments() = {{"run", o->run}, {"references", o->references}};
    m.locations({"run", "references"});
    m.seed(o->seed);
    m.arguments()["run_config_hash"] = run_manifest.at("config_hash");
    for (const char* f : {"m_obs.txt", "simulated.txt", "u_theory.txt"}) m.input(join_path(o->run, f));
    for (const auto& arg : o->references) m.input(split_labeled(arg).second);
    for (const char* f :
         {"report.json", "spectra.csv", "kraus.csv", "rotation_fit.json", "projected.txt", "cptp_log.csv",
          "observed_corrected_left.txt", "observed_corrected_right.txt", "simulated_corrected_left.txt",
          "simulated_corrected_right.txt"}) {
      m.output(o->out, f);
    }
    m.results() = {{"positivity", rep.positivity},
                   {"largest_kraus_amplitude", rep.kraus_amplitudes.empty() ? 0.0 : rep.kraus_amplitudes[0]},
                   {"correlation_with_theory", super_correlation(theory, observed)},
                   {"projected_correlation_with_theory", super_correlation(theory, proj.projected)}};
    m.write(join_path(o->out, "manifest.json"));
  });
}

void add_project_cptp(CLI::App& app) {
  struct Opts {
    std::string in, out, log;
    CptpOptions cptp;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("project-cptp", "Nearest CPTP map to a supermatrix");
  cmd->add_option("--in", o->in, "Input supermatrix file")->required();
  cmd->add_option("--out", o->out, "Output supermatrix file")->required();
  cmd->add_option("--log", o->log, "Iteration log CSV (default: <out>.log.csv)");
  cmd->add_option("--tol", o->cptp.tol, "Defect tolerance");
  cmd->add_option("--max-iter", o->cptp.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  cmd->callback([o] {
    const Supermatrix s = load_supermatrix(o->in);
    const CptpResult r = project_cptp(s, o->cptp);
    save_supermatrix(o->out, change_basis(r.projected, s.basis));
    const std::string log_path = o->log.empty() ? o->out + ".log.csv" : o->log;
    std::string log = "iteration,psd_defect,tp_defect,distance\n";
    for (const auto& it : r.log) {
      log += std::to_string(it.iteration) + "," + format_double(it.psd_defect) + "," + format_double(it.tp_defect) +
             "," + format_double(it.distance) + "\n";
    }
    write_text_file(log_path, log);

    const ChoiMatrix before = choi_of(change_basis(s, Basis::zeeman));
    Manifest m("project-cptp");
    m.arguments() = {{"in", o->in}, {"tol", o->cptp.tol}, {"max_iter", o->cptp.max_iter}};
    m.locations({"in"});
    m.input(o->in);
    const fs::path out(o->out), lp(log_path);
    m.output(out.parent_path().string(), out.filename().string());
    m.output(lp.parent_path().string(), lp.filename().string());
    m.results() = {{"converged", r.converged},
                   {"iterations", r.iterations},
                   {"input_min_eigenvalue", before.eigenvalues(before.eigenvalues.size() - 1)},
                   {"input_tp_defect", tp_defect(before.matrix)},
                   {"min_eigenvalue", r.min_eigenvalue},
                   {"tp_defect", r.tp_defect},
                   {"distance", r.log.empty() ? 0.0 : r.log.back().distance}};
    m.write(o->out + ".manifest.json");
    if (!r.converged) throw NumericalError("project-cptp: no convergence within " + std::to_string(r.iterations) +
                                           " iterations");
  });
}

void add_spectrum(CLI::App& app) {
  struct Opts {
    std::vector<std::string> in;
    std::string out;
    int threads = 1;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("spectrum", "Eigenvalue spectra of supermatrices");
  cmd->add_option("--in", o->in, "Supermatrix files as label=path")->required();
  cmd->add_option("--threads", o->threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o->out, "Output CSV file")->required();
  cmd->callback([o] {
    std::vector<LabeledSupermatrix> maps;
    for (const auto& arg : o->in) {
      const auto [label, path] = split_labeled(arg);
      maps.push_back({label, load_supermatrix(path)});
    }
    const auto spectra = spectrum_report(maps, o->threads);
    write_spectra_csv(o->out, spectra);

    Manifest m("spectrum");
    m.arguments() = {{"in", o->in}};
    m.locations({"in"});
    for (const auto& arg : o->in) m.input(split_labeled(arg).second);
    const fs::path out(o->out);
    m.output(out.parent_path().string(), out.filename().string());
    for (const auto& sp : spectra) {
      m.results()[sp.label] = {{"mean_magnitude", mean_magnitude(sp.eigenvalues)},
                               {"qft_angular_spread_rad", angular_spread(sp.eigenvalues, qft_reference_phases())}};
    }
    m.write(o->out + ".manifest.json");
  });
}

}  // namespace nmrqpt::cli
