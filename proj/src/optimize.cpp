#include "forecastability/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace forecastability::optimize {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  NelderMeadResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double f = objective(x);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };

  if (dim == 0) {
    result.x = std::move(start);
    result.f = eval(result.x);
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> idx(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto along = [&](double t, std::vector<double>& out) {
    // centroid + t * (centroid - worst)
    const auto& worst = simplex[idx[dim]];
    for (std::size_t j = 0; j < dim; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
  };

  while (result.evaluations < options.max_evaluations) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const double f_best = values[idx[0]];
    const double f_worst = values[idx[dim]];

    double x_spread = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        x_spread = std::max(x_spread, std::abs(simplex[idx[i]][j] - simplex[idx[0]][j]));
      }
    }
    if (std::isfinite(f_worst) &&
        std::abs(f_worst - f_best) <= options.f_tolerance * (1.0 + std::abs(f_best))) {
      result.converged = true;
      break;
    }
    if (x_spread <= options.x_tolerance) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[idx[i]][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    along(1.0, trial);
    const double f_reflect = eval(trial);
    const double f_second = values[idx[dim - 1]];
    if (f_reflect < f_best) {
      along(2.0, trial2);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[idx[dim]] = trial2;
        values[idx[dim]] = f_expand;
      } else {
        simplex[idx[dim]] = trial;
        values[idx[dim]] = f_reflect;
      }
      continue;
    }
    if (f_reflect < f_second) {
      simplex[idx[dim]] = trial;
      values[idx[dim]] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < f_worst;
    along(outside ? 0.5 : -0.5, trial2);
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : f_worst)) {
      simplex[idx[dim]] = trial2;
      values[idx[dim]] = f_contract;
      continue;
    }
    const auto& best = simplex[idx[0]];
    for (std::size_t i = 1; i <= dim; ++i) {
      auto& p = simplex[idx[i]];
      for (std::size_t j = 0; j < dim; ++j) p[j] = best[j] + 0.5 * (p[j] - best[j]);
      values[idx[i]] = eval(p);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.f = values[best];
  return result;
}

}  // namespace forecastability::optimize
