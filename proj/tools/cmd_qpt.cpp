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
#include <numeric>
#include <optional>

#include "commands.hpp"
#include "manifest.hpp"
#include "nmrqpt/config.hpp"
#include "nmrqpt/matrix_io.hpp"

namespace nmrqpt::cli {

namespace {

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string signals_csv(const QptRun& run) {
  std::string out = "phase,state,readout,noise_seed,observable,signal\n";
  for (const auto& rec : run.records) {
    for (Index o = 0; o < rec.signals.size(); ++o) {
      out += std::string(rec.phase == 0 ? "in" : "out") + "," + run.input_labels[rec.state] + "," +
             run.readouts[rec.readout].name() + "," + hex64(rec.noise_seed) + "," + std::to_string(o) + "," +
             format_double(rec.signals(o)) + "\n";
    }
  }
  return out;
}

}  // namespace

void add_run_qpt(CLI::App& app) {
  struct Opts {
    std::string config, out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("run-qpt", "Simulated process tomography of the compiled QFT");
  cmd->add_option("--config", o->config, "Run configuration file")->required();
  cmd->add_option("--seed", o->seed, "Override the configured noise seed");
  cmd->add_option("--threads", o->threads, "Override the configured worker count")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->callback([o] {
    RunConfig cfg = load_run_config(o->config);
    if (o->seed) cfg.seed = *o->seed;
    if (o->threads) cfg.threads = *o->threads;
    const QptSettings settings = settings_from_config(cfg);
    const QptRun run = run_qpt(settings);

    ensure_directory(o->out);
    const Supermatrix theory = unitary_superop(run.u_theory);
    save_supermatrix(join_path(o->out, "r_in.txt"), run.r_in);
    save_supermatrix(join_path(o->out, "r_out.txt"), run.r_out);
    save_supermatrix(join_path(o->out, "m_obs.txt"), run.m_obs);
    save_supermatrix(join_path(o->out, "simulated.txt"), run.simulated);
    save_supermatrix(join_path(o->out, "theory.txt"), theory);
    save_matrix(join_path(o->out, "u_theory.txt"), MatrixFile{run.u_theory, "zeeman"});
    write_text_file(join_path(o->out, "signals.csv"), signals_csv(run));

    Manifest m("run-qpt");
    m.arguments() = {{"config", o->config}, {"threads", cfg.threads}};
    m.locations({"config"});
    m.seed(cfg.seed);
    m.input(o->config);
    m.input(cfg.system);
    if (cfg.toggles.incoherence) m.input(cfg.histogram);
    if (cfg.toggles.relaxation && cfg.relaxation_variant == "po_rates") m.input(cfg.relaxation_file);
    if (cfg.toggles.designed_pulses) {
      m.input(join_path(cfg.pulse_library, "index.json"));
      for (const auto& entry : load_pulse_index(cfg.pulse_library)) m.input(entry.second);
    }
    for (const char* f : {"r_in.txt", "r_out.txt", "m_obs.txt", "simulated.txt", "theory.txt", "u_theory.txt",
                          "signals.csv"}) {
      m.output(o->out, f);
    }

    json states = json::array();
    for (std::size_t a = 1; a < run.input_labels.size(); ++a) {
      states.push_back({{"label", run.input_labels[a]},
                        {"input_correlation", run.input_correlations[a - 1]},
                        {"output_correlation", run.output_correlations[a - 1]},
                        {"attenuated_output_correlation", run.attenuated_output_correlations[a - 1]}});
    }
    json readouts = json::array();
    for (const auto& r : run.readouts) readouts.push_back(r.name());
    m.results() = {{"correlation_with_theory", super_correlation(theory, run.m_obs)},
                   {"gate_fidelity", gate_fidelity(theory, run.m_obs)},
                   {"simulated_correlation_with_theory", super_correlation(theory, run.simulated)},
                   {"simulated_gate_fidelity", gate_fidelity(theory, run.simulated)},
                   {"observed_simulated_correlation", super_correlation(run.simulated, run.m_obs)},
                   {"condition_number", run.condition_number},
                   {"circuit_duration_s", run.circuit_duration_s},
                   {"mean_input_correlation", mean(run.input_correlations)},
                   {"mean_output_correlation", mean(run.output_correlations)},
                   {"mean_attenuated_output_correlation", mean(run.attenuated_output_correlations)},
                   {"readouts", readouts},
                   {"toggles",
                    {{"designed_pulses", cfg.toggles.designed_pulses},
                     {"incoherence", cfg.toggles.incoherence},
                     {"spectators", cfg.toggles.spectators},
                     {"relaxation", cfg.toggles.relaxation},
                     {"noise", cfg.toggles.noise},
                     {"preparation_imperfection", cfg.toggles.preparation_imperfection}}},
                   {"states", states}};
    m.write(join_path(o->out, "manifest.json"));
  });
}

}  // namespace nmrqpt::cli
