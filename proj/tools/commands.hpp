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

#include "CLI11.hpp"

namespace nmrqpt::cli {

// Each function adds one subcommand whose callback does the work.
void add_simulate_pulse(CLI::App& app);
void add_design_pulse(CLI::App& app);
void add_demo_incoherence(CLI::App& app);
void add_run_qpt(CLI::App& app);
void add_analyze(CLI::App& app);
void add_project_cptp(CLI::App& app);
void add_spectrum(CLI::App& app);

}  // namespace nmrqpt::cli
