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
#include <functional>
#include <vector>

namespace nmrqpt {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
  int max_evals = 10000;
  double f_tol = 1e-12;  // spread of simplex values
  double x_tol = 1e-10;  // simplex diameter
};

struct OptimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Downhill simplex minimization from x0 with per-coordinate initial steps.
OptimizeResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                           const std::vector<double>& step, const NelderMeadOptions& opts = {});

struct MultiStartOptions {
  int restarts = 8;          // the first start is x0 itself
  std::uint64_t seed = 1;
  double jitter = 1.0;       // restart offsets are jitter * step * U(-1, 1)
  int max_evals_total = 40000;
  double stop_below = -1e300;  // stop as soon as a start reaches this value
  NelderMeadOptions local;
};

// Best of several simplex runs; restarts are drawn from a seeded stream, so
// the result depends only on the inputs.
OptimizeResult multi_start_minimize(const Objective& f, const std::vector<double>& x0,
                                    const std::vector<double>& step, const MultiStartOptions& opts = {});

}  // namespace nmrqpt
