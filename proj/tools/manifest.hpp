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
#include <vector>

#include "json.hpp"
#include "nmrqpt/analysis.hpp"
#include "nmrqpt/pulsesim.hpp"

namespace nmrqpt::cli {

using nlohmann::json;

// Run record written next to every subcommand's outputs. Everything in it is
// a function of the arguments and input bytes, so reruns reproduce it exactly.
class Manifest {
 public:
  explicit Manifest(const std::string& subcommand);

  json& arguments() { return doc_["arguments"]; }
  // Arguments that only say where files live. Their contents are covered by
  // the input hashes, so they stay out of the config hash.
  void locations(std::vector<std::string> keys) { locations_ = std::move(keys); }
  json& results() { return doc_["results"]; }
  void seed(std::uint64_t s) { doc_["seed"] = s; }

  // Records the FNV-1a hash of an input file.
  void input(const std::string& path);
  // Records the hash of a file the command wrote; `name` is relative to `dir`.
  void output(const std::string& dir, const std::string& name);

  // Hash over the non-location arguments and the input hashes; written under
  // "config_hash".
  std::string config_hash() const;
  void write(const std::string& path);

 private:
  json doc_;
  std::vector<std::string> locations_;
};

// Throws ConfigError unless every output listed in `dir`/manifest.json still
// hashes to the recorded value and the manifest came from `subcommand`.
json verify_manifest(const std::string& dir, const std::string& subcommand);

// label,index,re,im,abs,rms_re,rms_im rows.
void write_spectra_csv(const std::string& path, const std::vector<LabeledSpectrum>& spectra);

// Mean eigenvalue magnitude of a spectrum.
double mean_magnitude(const std::vector<Complex>& eigenvalues);

// Items of `b` after those of `a`, with RF amplitudes rescaled to the larger
// of the two nominal field strengths.
PulseSchedule concatenate(const PulseSchedule& a, const PulseSchedule& b);

// A gate label of the ideal grammar or the path of a saved matrix file.
CMatrix target_unitary(const std::string& target, int n_spins);

std::string format_double(double v);

std::string join_path(const std::string& dir, const std::string& name);
void ensure_directory(const std::string& dir);

}  // namespace nmrqpt::cli
