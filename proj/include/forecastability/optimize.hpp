#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace forecastability::optimize {

struct NelderMeadOptions {
  double initial_step = 0.5;
  double f_tolerance = 1e-10;
  double x_tolerance = 1e-8;
  std::size_t max_evaluations = 600;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Unconstrained derivative-free simplex minimization (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2). Non-finite objective values are
/// treated as +infinity.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace forecastability::optimize
