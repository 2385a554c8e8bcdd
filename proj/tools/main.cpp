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


#include <cstdio>
#include <iostream>

#include "commands.hpp"
#include "json.hpp"
#include "nmrqpt/errors.hpp"

namespace {

// Exit status per failure class: 2 configuration or input, 3 numerical, 4 I/O.
int exit_code(nmrqpt::ErrorCategory c) {
  switch (c) {
    case nmrqpt::ErrorCategory::numerical: return 3;
    case nmrqpt::ErrorCategory::io: return 4;
    default: return 2;
  }
}

const char* category_name(nmrqpt::ErrorCategory c) {
  switch (c) {
    case nmrqpt::ErrorCategory::config: return "config";
    case nmrqpt::ErrorCategory::numerical: return "numerical";
    case nmrqpt::ErrorCategory::io: return "io";
    case nmrqpt::ErrorCategory::precondition: return "precondition";
  }
  return "unknown";
}

int fail(const std::string& category, const std::string& message, int code) {
  const nlohmann::json j = {{"error", {{"category", category}, {"message", message}, {"exit_code", code}}}};
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nmrqpt: NMR quantum process tomography simulator"};
  app.require_subcommand(1);
  nmrqpt::cli::add_simulate_pulse(app);
  nmrqpt::cli::add_design_pulse(app);
  nmrqpt::cli::add_demo_incoherence(app);
  nmrqpt::cli::add_run_qpt(app);
  nmrqpt::cli::add_analyze(app);
  nmrqpt::cli::add_project_cptp(app);
  nmrqpt::cli::add_spectrum(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), 2);
  } catch (const nmrqpt::Error& e) {
    return fail(category_name(e.category()), e.what(), exit_code(e.category()));
  } catch (const nlohmann::json::exception& e) {
    return fail("config", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("numerical", e.what(), 3);
  }
  return 0;
}
