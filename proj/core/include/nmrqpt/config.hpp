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

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nmrqpt/pulsesim.hpp"
#include "nmrqpt/qpt.hpp"
#include "nmrqpt/relax.hpp"
#include "nmrqpt/spinsys.hpp"

namespace nmrqpt {

// Every structured file is JSON with a "schema_version" of 1. Unknown keys are
// errors; messages name the offending field path.
inline constexpr int kSchemaVersion = 1;

SpinSystem load_spin_system(const std::string& path);
SpinSystem spin_system_from_json_text(const std::string& text, const std::string& origin = "<text>");
void save_spin_system(const SpinSystem& sys, const std::string& path);

PulseSchedule load_schedule(const std::string& path);
void save_schedule(const PulseSchedule& sched, const std::string& path);

RfHistogram load_histogram(const std::string& path);
void save_histogram(const RfHistogram& hist, const std::string& path);

// Rate table keyed by product-operator label; every non-identity label of the
// register must be present.
RelaxationModel load_relaxation_rates(const std::string& path);

// (label, absolute schedule path) pairs from <dir>/index.json.
std::vector<std::pair<std::string, std::string>> load_pulse_index(const std::string& dir);
void save_pulse_index(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& entries);

struct RunToggles {
  bool designed_pulses = false;
  bool incoherence = false;
  bool spectators = false;
  bool relaxation = false;
  bool noise = false;
  bool preparation_imperfection = false;
};

struct RunConfig {
  std::string system;                    // spin system file
  std::string pulse_library = "ideal";   // "ideal" or a directory with index.json
  std::string histogram;                 // RF histogram file (needed with incoherence)
  std::string relaxation_file;           // rate table (po_rates variant)
  std::string relaxation_variant = "po_rates";  // or "uniform"
  double eta = 0.82;                     // uniform variant
  double noise_sigma = 0.01;
  std::uint64_t seed = 1;
  int threads = 1;
  RunToggles toggles;
};

// Relative paths are resolved against the directory of the config file.
RunConfig load_run_config(const std::string& path);
QptSettings settings_from_config(const RunConfig& cfg);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace nmrqpt
