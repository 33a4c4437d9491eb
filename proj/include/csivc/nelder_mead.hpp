#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace csivc {

struct NelderMeadOptions {
  int max_iterations = 200;
  double f_tolerance = 1e-10;  // spread of objective values across the simplex
  double x_tolerance = 1e-7;   // largest vertex distance from the best vertex
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Unconstrained Nelder-Mead with the standard coefficients (reflection 1,
// expansion 2, contraction 1/2, shrink 1/2). The best vertex never gets
// worse, so the result is never worse than `start`.
template <class Objective>
NelderMeadResult nelder_mead(Objective&& objective, std::vector<double> start, const NelderMeadOptions& opt) {
  const std::size_t dim = start.size();
  NelderMeadResult res;
  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (std::size_t k = 0; k < dim; ++k) simplex[k + 1][k] += opt.initial_step;
  std::vector<double> f(dim + 1);
  for (std::size_t k = 0; k <= dim; ++k) f[k] = objective(simplex[k]);
  res.evaluations = static_cast<int>(dim + 1);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), second(dim);
  const auto along = [&](double coeff, const std::vector<double>& from, std::vector<double>& out) {
    for (std::size_t j = 0; j < dim; ++j) out[j] = centroid[j] + coeff * (from[j] - centroid[j]);
  };

  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    // Stable ordering keeps ties deterministic.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t next_worst = order[dim - (dim > 0 ? 1 : 0)];

    double diameter = 0.0;
    for (std::size_t k = 0; k <= dim; ++k) {
      double dist = 0.0;
      for (std::size_t j = 0; j < dim; ++j) dist = std::hypot(dist, simplex[k][j] - simplex[best][j]);
      diameter = std::max(diameter, dist);
    }
    if (f[worst] - f[best] <= opt.f_tolerance && diameter <= opt.x_tolerance) {
      res.converged = true;
      break;
    }
    if (res.iterations >= opt.max_iterations) break;
    ++res.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k <= dim; ++k) {
      if (k == worst) continue;
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[k][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    along(-1.0, simplex[worst], trial);
    const double f_reflect = objective(trial);
    ++res.evaluations;
    if (f_reflect < f[best]) {
      along(-2.0, simplex[worst], second);
      const double f_expand = objective(second);
      ++res.evaluations;
      if (f_expand < f_reflect) {
        simplex[worst] = second;
        f[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        f[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < f[next_worst]) {
      simplex[worst] = trial;
      f[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < f[worst];
    along(outside ? -0.5 : 0.5, simplex[worst], second);
    const double f_contract = objective(second);
    ++res.evaluations;
    if (f_contract < (outside ? f_reflect : f[worst])) {
      simplex[worst] = second;
      f[worst] = f_contract;
      continue;
    }
    for (std::size_t k = 0; k <= dim; ++k) {
      if (k == best) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        simplex[k][j] = simplex[best][j] + 0.5 * (simplex[k][j] - simplex[best][j]);
      }
      f[k] = objective(simplex[k]);
      ++res.evaluations;
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  res.x = simplex[best];
  res.f = f[best];
  return res;
}

}  // namespace csivc
