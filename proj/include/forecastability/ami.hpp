#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "forecastability/core.hpp"

namespace forecastability::ami {

/// Z-scored copy of a window (sample standard deviation, n - 1).
struct StandardizedWindow {
  std::vector<double> values;
  std::size_t original_len = 0;
};

/// Throws DegenerateSeries for constant or non-finite windows and
/// TooFewPoints for windows shorter than 2.
StandardizedWindow standardize(std::span<const double> window);

/// Digamma at a positive integer, psi(n) = -gamma + H(n - 1).
double digamma_int(std::size_t n);

/// Kraskov-Stoegbauer-Grassberger estimator (first variant) of I(X; Y) in
/// nats, max-norm in the joint space and strict marginal counts. Small-sample
/// estimates can be slightly negative and are returned unclipped.
double ksg_mi(std::span<const double> x, std::span<const double> y, int k);

struct AmiEntry {
  double ami_nats = 0.0;
  int n_eff = 0;

  friend bool operator==(const AmiEntry&, const AmiEntry&) = default;
};

/// Horizon-indexed AMI computed once on the standardized base window.
struct AmiProfile {
  std::string series_id;
  std::map<int, AmiEntry> entries;
  int k_used = 0;
  std::size_t base_len = 0;

  friend bool operator==(const AmiProfile&, const AmiProfile&) = default;
};

/// AMI(h) for every h in 1..h_max with t_base - h >= n_eff_min. Throws
/// GateIvFailure when h_max itself is not estimable and DegenerateSeries when
/// the base window cannot be standardized.
AmiProfile ami_profile(const TimeSeries& series, const WindowLayout& layout,
                       const FrequencyProfile& profile, const RunConfig& config);

}  // namespace forecastability::ami
