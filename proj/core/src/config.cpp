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

#include "nmrqpt/config.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"

namespace nmrqpt {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

json parse_file(const std::string& path) { return parse_text(read_text_file(path), path); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

void check_schema(const json& j, const std::string& where) {
  if (!j.contains("schema_version")) throw ConfigError(where + ": missing 'schema_version'");
  if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion) {
    throw ConfigError(where + ".schema_version: unsupported version");
  }
}

template <typename T>
T field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T field_or(const json& j, const std::string& key, T fallback, const std::string& where) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

template <typename Fn>
auto wrap_precondition(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const PreconditionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

SpinSystem spin_system_from_json(const json& j, const std::string& where) {
  check_keys(j, {"schema_version", "n_spins", "offsets_hz", "j_couplings_hz", "coupling_form", "spectators"}, where);
  check_schema(j, where);
  SpinSystem sys;
  sys.n_spins = field<int>(j, "n_spins", where);
  sys.offsets_hz = field<std::vector<double>>(j, "offsets_hz", where);
  sys.j_couplings_hz = RMatrix::Zero(std::max(sys.n_spins, 0), std::max(sys.n_spins, 0));
  const auto upper = field<std::vector<std::vector<double>>>(j, "j_couplings_hz", where);
  if (static_cast<int>(upper.size()) != std::max(sys.n_spins - 1, 0)) {
    throw ConfigError(where + ".j_couplings_hz: expected n_spins - 1 rows of the upper triangle");
  }
  for (int i = 0; i + 1 < sys.n_spins; ++i) {
    if (static_cast<int>(upper[i].size()) != sys.n_spins - 1 - i) {
      throw ConfigError(where + ".j_couplings_hz[" + std::to_string(i) + "]: expected " +
                        std::to_string(sys.n_spins - 1 - i) + " entries");
    }
    for (int k = i + 1; k < sys.n_spins; ++k) {
      sys.j_couplings_hz(i, k) = sys.j_couplings_hz(k, i) = upper[i][k - i - 1];
    }
  }
  const auto form = field_or<std::string>(j, "coupling_form", "isotropic", where);
  if (form == "isotropic") {
    sys.coupling_form = CouplingForm::isotropic;
  } else if (form == "secular") {
    sys.coupling_form = CouplingForm::secular;
  } else {
    throw ConfigError(where + ".coupling_form: expected 'isotropic' or 'secular'");
  }
  if (j.contains("spectators")) {
    if (!j["spectators"].is_array()) throw ConfigError(where + ".spectators: expected an array");
    for (std::size_t i = 0; i < j["spectators"].size(); ++i) {
      const std::string w = where + ".spectators[" + std::to_string(i) + "]";
      const json& s = j["spectators"][i];
      check_keys(s, {"label", "couplings_hz"}, w);
      sys.spectators.push_back({field<std::string>(s, "label", w), field<std::vector<double>>(s, "couplings_hz", w)});
    }
  }
  wrap_precondition(where, [&] {
    sys.validate();
    return 0;
  });
  return sys;
}

json schedule_to_json(const PulseSchedule& s) {
  json items = json::array();
  for (const auto& item : s.items) {
    if (const auto* iv = std::get_if<PulseInterval>(&item)) {
      json t = json::array();
      for (int v : iv->targets) t.push_back(v + 1);
      json e = {{"type", "pulse"},
                {"duration_s", iv->duration_s},
                {"amplitude", iv->amplitude},
                {"rf_frequency_hz", iv->rf_frequency_hz},
                {"rf_phase_rad", iv->rf_phase_rad}};
      if (!iv->targets.empty()) e["targets"] = t;
      items.push_back(e);
    } else if (const auto* d = std::get_if<Delay>(&item)) {
      json e = {{"type", "delay"}, {"duration_s", d->duration_s}};
      if (!d->walsh.empty()) e["walsh"] = d->walsh;
      items.push_back(e);
    } else {
      items.push_back({{"type", "gate"}, {"label", std::get<IdealGate>(item).label}});
    }
  }
  return {{"schema_version", kSchemaVersion}, {"nominal_rf_hz", s.nominal_rf_rad_s / (2 * kPi)}, {"items", items}};
}

PulseSchedule schedule_from_json(const json& j, const std::string& where) {
  check_keys(j, {"schema_version", "nominal_rf_hz", "items"}, where);
  check_schema(j, where);
  PulseSchedule s;
  s.nominal_rf_rad_s = 2 * kPi * field<double>(j, "nominal_rf_hz", where);
  if (!j.contains("items") || !j["items"].is_array()) throw ConfigError(where + ": 'items' must be an array");
  for (std::size_t i = 0; i < j["items"].size(); ++i) {
    const std::string w = where + ".items[" + std::to_string(i) + "]";
    const json& e = j["items"][i];
    const auto type = field<std::string>(e, "type", w);
    if (type == "pulse") {
      check_keys(e, {"type", "duration_s", "amplitude", "rf_frequency_hz", "rf_phase_rad", "targets"}, w);
      PulseInterval iv;
      iv.duration_s = field<double>(e, "duration_s", w);
      iv.amplitude = field<double>(e, "amplitude", w);
      iv.rf_frequency_hz = field<double>(e, "rf_frequency_hz", w);
      iv.rf_phase_rad = field<double>(e, "rf_phase_rad", w);
      for (int t : field_or<std::vector<int>>(e, "targets", {}, w)) iv.targets.push_back(t - 1);
      s.items.emplace_back(iv);
    } else if (type == "delay") {
      check_keys(e, {"type", "duration_s", "walsh"}, w);
      Delay d;
      d.duration_s = field<double>(e, "duration_s", w);
      d.walsh = field_or<std::vector<std::vector<int>>>(e, "walsh", {}, w);
      s.items.emplace_back(d);
    } else if (type == "gate") {
      check_keys(e, {"type", "label"}, w);
      s.items.emplace_back(IdealGate{field<std::string>(e, "label", w)});
    } else {
      throw ConfigError(w + ".type: expected 'pulse', 'delay' or 'gate'");
    }
  }
  if (s.items.empty()) throw ConfigError(where + ": schedule has no items");
  return s;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

SpinSystem load_spin_system(const std::string& path) { return spin_system_from_json(parse_file(path), path); }

SpinSystem spin_system_from_json_text(const std::string& text, const std::string& origin) {
  return spin_system_from_json(parse_text(text, origin), origin);
}

void save_spin_system(const SpinSystem& sys, const std::string& path) {
  sys.validate();
  json upper = json::array();
  for (int i = 0; i + 1 < sys.n_spins; ++i) {
    json row = json::array();
    for (int k = i + 1; k < sys.n_spins; ++k) row.push_back(sys.j_couplings_hz(i, k));
    upper.push_back(row);
  }
  json j = {{"schema_version", kSchemaVersion},
            {"n_spins", sys.n_spins},
            {"offsets_hz", sys.offsets_hz},
            {"j_couplings_hz", upper},
            {"coupling_form", sys.coupling_form == CouplingForm::secular ? "secular" : "isotropic"}};
  if (!sys.spectators.empty()) {
    json sp = json::array();
    for (const auto& s : sys.spectators) sp.push_back({{"label", s.label}, {"couplings_hz", s.couplings_hz}});
    j["spectators"] = sp;
  }
  write_text_file(path, j.dump(2) + "\n");
}

PulseSchedule load_schedule(const std::string& path) { return schedule_from_json(parse_file(path), path); }

void save_schedule(const PulseSchedule& sched, const std::string& path) {
  write_text_file(path, schedule_to_json(sched).dump(2) + "\n");
}

RfHistogram load_histogram(const std::string& path) {
  const json j = parse_file(path);
  check_keys(j, {"schema_version", "bins", "description"}, path);
  check_schema(j, path);
  RfHistogram h;
  if (!j.contains("bins") || !j["bins"].is_array()) throw ConfigError(path + ": 'bins' must be an array");
  for (std::size_t i = 0; i < j["bins"].size(); ++i) {
    const std::string w = path + ".bins[" + std::to_string(i) + "]";
    check_keys(j["bins"][i], {"scale", "weight"}, w);
    h.bins.push_back({field<double>(j["bins"][i], "scale", w), field<double>(j["bins"][i], "weight", w)});
  }
  wrap_precondition(path, [&] {
    h.validate();
    return 0;
  });
  return h;
}

void save_histogram(const RfHistogram& hist, const std::string& path) {
  json bins = json::array();
  for (const auto& b : hist.bins) bins.push_back({{"scale", b.scale}, {"weight", b.weight}});
  write_text_file(path, json{{"schema_version", kSchemaVersion}, {"bins", bins}}.dump(2) + "\n");
}

RelaxationModel load_relaxation_rates(const std::string& path) {
  const json j = parse_file(path);
  check_keys(j, {"schema_version", "n_spins", "rates_per_s", "description"}, path);
  check_schema(j, path);
  const int n = field<int>(j, "n_spins", path);
  if (n < 1 || n > kMaxSpins) throw ConfigError(path + ".n_spins: out of range");
  const auto rates = field<std::map<std::string, double>>(j, "rates_per_s", path);
  const Index count = hilbert_dim(n) * hilbert_dim(n);
  RVector r = RVector::Constant(count, -1.0);
  r(0) = 0.0;
  for (const auto& [label, rate] : rates) {
    if (static_cast<int>(label.size()) != n) throw ConfigError(path + ".rates_per_s." + label + ": label length");
    std::size_t idx = 0;
    try {
      idx = po_index(label);
    } catch (const Error& e) {
      throw ConfigError(path + ".rates_per_s." + label + ": unknown product operator");
    }
    if (idx == 0) throw ConfigError(path + ".rates_per_s: the identity has no rate");
    r(static_cast<Index>(idx)) = rate;
  }
  const auto basis = po_basis(n);
  for (Index i = 1; i < count; ++i) {
    if (r(i) < 0) throw ConfigError(path + ".rates_per_s: missing or negative rate for " + basis[i].label);
  }
  return wrap_precondition(path, [&] { return RelaxationModel::po_rates(n, r); });
}

std::vector<std::pair<std::string, std::string>> load_pulse_index(const std::string& dir) {
  const std::string path = (fs::path(dir) / "index.json").string();
  const json j = parse_file(path);
  check_keys(j, {"schema_version", "pulses", "description"}, path);
  check_schema(j, path);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [label, file] : field<std::map<std::string, std::string>>(j, "pulses", path)) {
    out.emplace_back(label, resolve(dir, file));
  }
  return out;
}

void save_pulse_index(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& entries) {
  json pulses = json::object();
  for (const auto& [label, file] : entries) pulses[label] = file;
  write_text_file((fs::path(dir) / "index.json").string(),
                  json{{"schema_version", kSchemaVersion}, {"pulses", pulses}}.dump(2) + "\n");
}

RunConfig load_run_config(const std::string& path) {
  const json j = parse_file(path);
  check_keys(j, {"schema_version", "system", "pulse_library", "histogram", "relaxation", "noise_sigma", "seed",
                 "threads", "toggles", "description"},
             path);
  check_schema(j, path);
  const std::string base = fs::path(path).parent_path().string();
  RunConfig c;
  c.system = resolve(base, field<std::string>(j, "system", path));
  c.pulse_library = field_or<std::string>(j, "pulse_library", "ideal", path);
  if (c.pulse_library != "ideal") c.pulse_library = resolve(base, c.pulse_library);
  c.histogram = resolve(base, field_or<std::string>(j, "histogram", "", path));
  if (j.contains("relaxation")) {
    const json& r = j["relaxation"];
    const std::string w = path + ".relaxation";
    check_keys(r, {"file", "variant", "eta"}, w);
    c.relaxation_file = resolve(base, field_or<std::string>(r, "file", "", w));
    c.relaxation_variant = field_or<std::string>(r, "variant", "po_rates", w);
    c.eta = field_or<double>(r, "eta", 0.82, w);
    if (c.relaxation_variant != "po_rates" && c.relaxation_variant != "uniform") {
      throw ConfigError(w + ".variant: expected 'po_rates' or 'uniform'");
    }
  }
  c.noise_sigma = field_or<double>(j, "noise_sigma", 0.01, path);
  if (!(c.noise_sigma >= 0)) throw ConfigError(path + ".noise_sigma: must be nonnegative");
  c.seed = field_or<std::uint64_t>(j, "seed", 1, path);
  c.threads = field_or<int>(j, "threads", 1, path);
  if (j.contains("toggles")) {
    const json& t = j["toggles"];
    const std::string w = path + ".toggles";
    check_keys(t, {"designed_pulses", "incoherence", "spectators", "relaxation", "noise", "preparation_imperfection"}, w);
    c.toggles.designed_pulses = field_or<bool>(t, "designed_pulses", false, w);
    c.toggles.incoherence = field_or<bool>(t, "incoherence", false, w);
    c.toggles.spectators = field_or<bool>(t, "spectators", false, w);
    c.toggles.relaxation = field_or<bool>(t, "relaxation", false, w);
    c.toggles.noise = field_or<bool>(t, "noise", false, w);
    c.toggles.preparation_imperfection = field_or<bool>(t, "preparation_imperfection", false, w);
  }
  if (c.toggles.designed_pulses && c.pulse_library == "ideal") {
    throw ConfigError(path + ": designed_pulses needs a pulse_library directory");
  }
  if (c.toggles.incoherence && c.histogram.empty()) throw ConfigError(path + ": incoherence needs a histogram");
  if (c.toggles.relaxation && c.relaxation_variant == "po_rates" && c.relaxation_file.empty()) {
    throw ConfigError(path + ": po_rates relaxation needs relaxation.file");
  }
  return c;
}

QptSettings settings_from_config(const RunConfig& c) {
  QptSettings s;
  s.system = load_spin_system(c.system);
  s.library = c.toggles.designed_pulses ? PulseLibrary::load(c.pulse_library) : PulseLibrary::ideal();
  if (c.toggles.incoherence) s.histogram = load_histogram(c.histogram);
  s.incoherence = c.toggles.incoherence;
  s.spectators = c.toggles.spectators;
  if (s.spectators && s.system.spectators.empty()) throw ConfigError("spectators toggle set but the system has none");
  s.preparation_imperfection = c.toggles.preparation_imperfection;
  if (c.toggles.relaxation) {
    s.relaxation = c.relaxation_variant == "uniform" ? RelaxationModel::uniform(s.system.n_spins, c.eta)
                                                     : load_relaxation_rates(c.relaxation_file);
    if (s.relaxation->n_spins != s.system.n_spins) throw ConfigError("relaxation table size differs from the system");
  }
  s.noise_sigma = c.toggles.noise ? c.noise_sigma : 0.0;
  s.seed = c.seed;
  s.threads = c.threads;
  return s;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) { return fnv1a64(read_text_file(path)); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace nmrqpt
