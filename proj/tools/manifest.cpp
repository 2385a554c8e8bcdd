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


#include "manifest.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "nmrqpt/config.hpp"
#include "nmrqpt/errors.hpp"
#include "nmrqpt/matrix_io.hpp"

#ifndef NMRQPT_VERSION
#define NMRQPT_VERSION "unknown"
#endif

namespace nmrqpt::cli {

namespace fs = std::filesystem;

Manifest::Manifest(const std::string& subcommand) {
  doc_["schema_version"] = kSchemaVersion;
  doc_["tool"] = "nmrqpt";
  doc_["subcommand"] = subcommand;
  doc_["versions"] = {{"nmrqpt", NMRQPT_VERSION},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION)},
                      {"compiler", __VERSION__}};
  doc_["arguments"] = json::object();
  doc_["inputs"] = json::array();
  doc_["outputs"] = json::array();
  doc_["results"] = json::object();
}

void Manifest::input(const std::string& path) {
  doc_["inputs"].push_back({{"path", path}, {"fnv1a64", hex64(fnv1a64_file(path))}});
}

void Manifest::output(const std::string& dir, const std::string& name) {
  doc_["outputs"].push_back({{"file", name}, {"fnv1a64", hex64(fnv1a64_file(join_path(dir, name)))}});
}

std::string Manifest::config_hash() const {
  json args = doc_["arguments"];
  for (const auto& k : locations_) args.erase(k);
  std::string key = args.dump();
  for (const auto& in : doc_["inputs"]) key += "\n" + in["fnv1a64"].get<std::string>();
  return hex64(fnv1a64(key));
}

void Manifest::write(const std::string& path) {
  doc_["config_hash"] = config_hash();
  write_text_file(path, doc_.dump(2) + "\n");
}

json verify_manifest(const std::string& dir, const std::string& subcommand) {
  const std::string path = join_path(dir, "manifest.json");
  json m;
  try {
    m = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!m.contains("subcommand") || m["subcommand"] != subcommand) {
    throw ConfigError(path + ": not a " + subcommand + " manifest");
  }
  for (const auto& out : m.at("outputs")) {
    const std::string file = out.at("file").get<std::string>();
    const std::string expected = out.at("fnv1a64").get<std::string>();
    const std::string actual = hex64(fnv1a64_file(join_path(dir, file)));
    if (actual != expected) {
      throw ConfigError(path + ": hash mismatch for " + file + " (manifest " + expected + ", file " + actual + ")");
    }
  }
  return m;
}

void write_spectra_csv(const std::string& path, const std::vector<LabeledSpectrum>& spectra) {
  std::string out = "label,index,re,im,abs,rms_re,rms_im\n";
  for (const auto& sp : spectra) {
    for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i) {
      const Complex z = sp.eigenvalues[i];
      const Complex r = sp.rms_normalized[i];
      out += sp.label + "," + std::to_string(i) + "," + format_double(z.real()) + "," + format_double(z.imag()) + "," +
             format_double(std::abs(z)) + "," + format_double(r.real()) + "," + format_double(r.imag()) + "\n";
    }
  }
  write_text_file(path, out);
}

double mean_magnitude(const std::vector<Complex>& eigenvalues) {
  double sum = 0.0;
  for (const Complex& z : eigenvalues) sum += std::abs(z);
  return eigenvalues.empty() ? 0.0 : sum / static_cast<double>(eigenvalues.size());
}

PulseSchedule concatenate(const PulseSchedule& a, const PulseSchedule& b) {
  PulseSchedule out;
  out.nominal_rf_rad_s = std::max(a.nominal_rf_rad_s, b.nominal_rf_rad_s);
  for (const PulseSchedule* s : {&a, &b}) {
    for (auto item : s->items) {
      if (auto* iv = std::get_if<PulseInterval>(&item)) iv->amplitude *= s->nominal_rf_rad_s / out.nominal_rf_rad_s;
      out.items.push_back(std::move(item));
    }
  }
  return out;
}

CMatrix target_unitary(const std::string& target, int n_spins) {
  if (fs::is_regular_file(target)) {
    const CMatrix u = load_matrix(target).data;
    if (u.rows() != hilbert_dim(n_spins) || u.cols() != u.rows()) {
      throw DimensionError(target + ": target matrix does not match the spin system");
    }
    return u;
  }
  return ideal_gate_unitary(target, n_spins);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

}  // namespace nmrqpt::cli
