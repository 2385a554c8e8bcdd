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
#include <iostream>
#include <map>
#include <memory>

#include "commands.hpp"
#include "manifest.hpp"
#include "nmrqpt/config.hpp"
#include "nmrqpt/matrix_io.hpp"
#include "nmrqpt/pulse_design.hpp"

namespace nmrqpt::cli {

namespace fs = std::filesystem;

namespace {

RfHistogram histogram_or_single(const std::string& path) {
  return path.empty() ? RfHistogram::single() : load_histogram(path);
}

// File name for a label inside a pulse library directory.
std::string library_file_name(const std::string& label) {
  std::string out;
  for (char c : label) {
    switch (c) {
      case '@': out += '_'; break;
      case '-': out += 'm'; break;
      case '.': out += 'p'; break;
      case ':': out += '_'; break;
      default: out += c;
    }
  }
  return out + ".json";
}

void register_in_library(const std::string& dir, const std::string& label, const std::string& file) {
  std::map<std::string, std::string> entries;
  const std::string index = join_path(dir, "index.json");
  if (fs::exists(index)) {
    const json j = json::parse(read_text_file(index));
    for (const auto& [k, v] : j.at("pulses").items()) entries[k] = v.get<std::string>();
  }
  entries[label] = file;
  save_pulse_index(dir, {entries.begin(), entries.end()});
}

}  // namespace

void add_simulate_pulse(CLI::App& app) {
  struct Opts {
    std::string system, schedule, histogram, target, out, basis = "zeeman";
    bool spectators = false;
    int threads = 1;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("simulate-pulse", "Incoherent supermatrix of a pulse schedule");
  cmd->add_option("--system", o->system, "Spin system file")->required();
  cmd->add_option("--schedule", o->schedule, "Pulse schedule file")->required();
  cmd->add_option("--histogram", o->histogram, "RF histogram file (default: single bin at 1)");
  cmd->add_option("--target", o->target, "Gate label or matrix file; adds the gate fidelity to the manifest");
  cmd->add_option("--basis", o->basis, "Output basis")->check(CLI::IsMember({"zeeman", "product_operator"}));
  cmd->add_flag("--spectators", o->spectators, "Average over spectator configurations");
  cmd->add_option("--threads", o->threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o->out, "Output supermatrix file")->required();
  cmd->callback([o] {
    const SpinSystem sys = load_spin_system(o->system);
    const PulseSchedule sched = load_schedule(o->schedule);
    const RfHistogram hist = histogram_or_single(o->histogram);
    const IncoherentChannel ch = incoherent_superop(sched, sys, hist, o->spectators, o->threads);
    save_supermatrix(o->out, change_basis(ch.super, basis_from_string(o->basis)));

    Manifest m("simulate-pulse");
    m.arguments() = {{"system", o->system}, {"schedule", o->schedule}, {"histogram", o->histogram},
                     {"target", o->target}, {"basis", o->basis}, {"spectators", o->spectators}};
    m.locations(fs::is_regular_file(o->target) ? std::vector<std::string>{"system", "schedule", "histogram", "target"}
                                               : std::vector<std::string>{"system", "schedule", "histogram"});
    m.input(o->system);
    m.input(o->schedule);
    if (!o->histogram.empty()) m.input(o->histogram);
    const fs::path out(o->out);
    m.output(out.parent_path().string(), out.filename().string());
    m.results()["members"] = ch.kraus.operators.size();
    m.results()["duration_s"] = sched.duration();
    m.results()["mean_eigenvalue_magnitude"] = mean_magnitude(eigenvalues(ch.super));
    if (!o->target.empty()) {
      const CMatrix u = target_unitary(o->target, sys.n_spins);
      m.results()["gate_fidelity"] = kraus_gate_fidelity(u, ch.kraus);
    }
    m.write(o->out + ".manifest.json");
  });
}

void add_design_pulse(CLI::App& app) {
  struct Opts {
    std::string target, system, histogram, out, library_dir, label;
    DesignOptions design;
    double nominal_rf_hz = 10e3;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("design-pulse", "Optimize a piecewise-constant RF schedule for a target gate");
  cmd->add_option("--target", o->target, "Gate label (e.g. Ry90@1) or target matrix file")->required();
  cmd->add_option("--system", o->system, "Spin system file")->required();
  cmd->add_option("--histogram", o->histogram, "RF histogram file (default: single bin at 1)");
  cmd->add_option("--kmax", o->design.k_max, "RF intervals")->check(CLI::PositiveNumber);
  cmd->add_option("--budget", o->design.budget, "Full-model objective evaluations")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o->design.seed, "Seed of the random restarts");
  cmd->add_option("--restarts", o->design.restarts, "Random starts")->check(CLI::PositiveNumber);
  cmd->add_option("--surrogate-evals", o->design.surrogate_evals, "Uncoupled-model evaluations per start");
  cmd->add_option("--floor", o->design.fidelity_floor, "Fidelity the result is flagged against");
  cmd->add_option("--nominal-rf-hz", o->nominal_rf_hz, "Nominal RF field strength gammaB1/2pi");
  cmd->add_flag("--spectators", o->design.spectators, "Average over spectator configurations");
  cmd->add_option("--threads", o->design.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o->out, "Output schedule file (default inside --library-dir)");
  cmd->add_option("--library-dir", o->library_dir, "Also register the schedule in this pulse library");
  cmd->add_option("--label", o->label, "Library label (default: the target)");
  cmd->callback([o] {
    if (o->out.empty() && o->library_dir.empty()) throw ConfigError("design-pulse: give --out or --library-dir");
    const std::string label = o->label.empty() ? o->target : o->label;
    std::string out = o->out;
    if (!o->library_dir.empty()) {
      ensure_directory(o->library_dir);
      if (out.empty()) out = join_path(o->library_dir, library_file_name(label));
    }
    const SpinSystem sys = load_spin_system(o->system);
    const RfHistogram hist = histogram_or_single(o->histogram);
    const CMatrix u = target_unitary(o->target, sys.n_spins);
    o->design.nominal_rf_rad_s = 2.0 * kPi * o->nominal_rf_hz;
    const DesignResult r = design_pulse(u, sys, hist, o->design);
    save_schedule(r.schedule, out);
    if (!o->library_dir.empty()) {
      register_in_library(o->library_dir, label, fs::relative(out, o->library_dir).string());
    }
    if (!r.reached_floor) {
      std::cerr << "design-pulse: fidelity " << r.fidelity << " below the floor " << o->design.fidelity_floor << "\n";
    }

    Manifest m("design-pulse");
    m.arguments() = {{"target", o->target}, {"system", o->system}, {"histogram", o->histogram},
                     {"kmax", o->design.k_max}, {"budget", o->design.budget}, {"restarts", o->design.restarts},
                     {"surrogate_evals", o->design.surrogate_evals}, {"floor", o->design.fidelity_floor},
                     {"nominal_rf_hz", o->nominal_rf_hz}, {"spectators", o->design.spectators}, {"label", label}};
    m.locations(fs::is_regular_file(o->target) ? std::vector<std::string>{"system", "histogram", "target"}
                                               : std::vector<std::string>{"system", "histogram"});
    m.seed(o->design.seed);
    m.input(o->system);
    if (!o->histogram.empty()) m.input(o->histogram);
    if (fs::is_regular_file(o->target)) m.input(o->target);
    const fs::path p(out);
    m.output(p.parent_path().string(), p.filename().string());
    m.results() = {{"fidelity", r.fidelity},
                   {"surrogate_fidelity", r.surrogate_fidelity},
                   {"evaluations", r.evaluations},
                   {"reached_floor", r.reached_floor},
                   {"duration_s", r.schedule.duration()}};
    m.write(out + ".manifest.json");
  });
}

void add_demo_incoherence(CLI::App& app) {
  struct Opts {
    std::string system, library, histogram, out, first = "Ry-90@1", second = "Rx180@12";
    bool spectators = false;
    int threads = 1;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("demo-incoherence",
                                 "Compare the concatenated two-pulse channel with the product of its parts");
  cmd->add_option("--system", o->system, "Spin system file")->required();
  cmd->add_option("--library", o->library, "Pulse library directory")->required();
  cmd->add_option("--histogram", o->histogram, "RF histogram file")->required();
  cmd->add_option("--first", o->first, "Label of the pulse applied first");
  cmd->add_option("--second", o->second, "Label of the pulse applied second");
  cmd->add_flag("--spectators", o->spectators, "Average over spectator configurations");
  cmd->add_option("--threads", o->threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->callback([o] {
    ensure_directory(o->out);
    const SpinSystem sys = load_spin_system(o->system);
    const PulseLibrary lib = PulseLibrary::load(o->library);
    const RfHistogram hist = load_histogram(o->histogram);
    const PulseSchedule p1 = lib.lookup(o->first);
    const PulseSchedule p2 = lib.lookup(o->second);
    const Supermatrix s1 = incoherent_superop(p1, sys, hist, o->spectators, o->threads).super;
    const Supermatrix s2 = incoherent_superop(p2, sys, hist, o->spectators, o->threads).super;
    const Supermatrix both = incoherent_superop(concatenate(p1, p2), sys, hist, o->spectators, o->threads).super;
    const Supermatrix product{s2.matrix * s1.matrix, Basis::zeeman};
    save_supermatrix(join_path(o->out, "s_both.txt"), both);
    save_supermatrix(join_path(o->out, "s_product.txt"), product);
    const auto spectra = spectrum_report({{"both", both}, {"product", product}}, o->threads);
    write_spectra_csv(join_path(o->out, "spectra.csv"), spectra);

    const double diff = (both.matrix - product.matrix).norm();
    json report = {{"frobenius_difference", diff},
                   {"mean_magnitude_reduction_both", 1.0 - mean_magnitude(spectra[0].eigenvalues)},
                   {"mean_magnitude_reduction_product", 1.0 - mean_magnitude(spectra[1].eigenvalues)},
                   {"first", o->first},
                   {"second", o->second}};
    write_text_file(join_path(o->out, "report.json"), report.dump(2) + "\n");

    Manifest m("demo-incoherence");
    m.arguments() = {{"system", o->system}, {"library", o->library}, {"histogram", o->histogram},
                     {"first", o->first}, {"second", o->second}, {"spectators", o->spectators}};
    m.locations({"system", "library", "histogram"});
    m.input(o->system);
    m.input(o->histogram);
    for (const auto& [label, path] : load_pulse_index(o->library)) {
      if (label == o->first || label == o->second) m.input(path);
    }
    for (const char* f : {"s_both.txt", "s_product.txt", "spectra.csv", "report.json"}) m.output(o->out, f);
    m.results() = report;
    m.write(join_path(o->out, "manifest.json"));
  });
}

}  // namespace nmrqpt::cli
