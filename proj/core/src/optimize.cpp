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

#include "nmrqpt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nmrqpt/errors.hpp"

namespace nmrqpt {

OptimizeResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                           const std::vector<double>& step, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0 || step.size() != n) throw PreconditionError("nelder_mead: bad dimensions");
  OptimizeResult res;
  // The budget is a hard cap: once spent, points score as infinitely bad so
  // no move is accepted and the loop exits.
  auto eval = [&](const std::vector<double>& x) {
    if (res.evaluations >= opts.max_evals) return 1e300;
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : 1e300;
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto point = [&](double t, std::vector<double>& out, std::size_t worst) {
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (pts[worst][k] - centroid[k]);
  };

  while (res.evaluations < opts.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      double d = 0.0;
      for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(pts[i][k] - pts[best][k]));
      diameter = std::max(diameter, d);
    }
    if (vals[worst] - vals[best] <= opts.f_tol || diameter <= opts.x_tol) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
    }

    point(-1.0, trial, worst);
    const double fr = eval(trial);
    if (fr < vals[best]) {
      point(-2.0, trial2, worst);
      const double fe = eval(trial2);
      if (fe < fr) {
        pts[worst] = trial2;
        vals[worst] = fe;
      } else {
        pts[worst] = trial;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = trial;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      point(outside ? -0.5 : 0.5, trial2, worst);
      const double fc = eval(trial2);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = trial2;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
          vals[i] = eval(pts[i]);
        }
      }
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  res.x = pts[static_cast<std::size_t>(it - vals.begin())];
  res.value = *it;
  return res;
}

OptimizeResult multi_start_minimize(const Objective& f, const std::vector<double>& x0,
                                    const std::vector<double>& step, const MultiStartOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  OptimizeResult best;
  best.value = 1e300;
  best.x = x0;
  int used = 0;
  for (int r = 0; r < std::max(1, opts.restarts) && used < opts.max_evals_total; ++r) {
    std::vector<double> start = x0;
    if (r > 0) {
      for (std::size_t k = 0; k < start.size(); ++k) start[k] += opts.jitter * step[k] * unit(rng);
    }
    NelderMeadOptions local = opts.local;
    local.max_evals = std::min(local.max_evals, opts.max_evals_total - used);
    // Restarting the simplex around its own optimum escapes premature collapse.
    OptimizeResult run = nelder_mead(f, start, step, local);
    used += run.evaluations;
    if (used < opts.max_evals_total) {
      local.max_evals = std::min(opts.local.max_evals / 2, opts.max_evals_total - used);
      std::vector<double> small(step.size());
      for (std::size_t k = 0; k < step.size(); ++k) small[k] = 0.1 * step[k];
      if (local.max_evals > static_cast<int>(2 * step.size() + 2)) {
        OptimizeResult polish = nelder_mead(f, run.x, small, local);
        used += polish.evaluations;
        if (polish.value <= run.value) {
          polish.evaluations += run.evaluations;
          run = polish;
        }
      }
    }
    if (run.value < best.value) best = run;
    if (best.value <= opts.stop_below) break;
  }
  best.evaluations = used;
  return best;
}

}  // namespace nmrqpt
