#include "forecastability/ami.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "forecastability/knn.hpp"
#include "forecastability/synth.hpp"

namespace forecastability::ami {

StandardizedWindow standardize(std::span<const double> window) {
  const std::size_t n = window.size();
  if (n < 2) throw Error(ErrorCode::TooFewPoints, "standardization needs at least 2 values");
  double mean = 0.0;
  for (double v : window) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : window) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!std::isfinite(sd) || sd == 0.0) {
    throw Error(ErrorCode::DegenerateSeries, "window has zero or undefined variance");
  }
  StandardizedWindow out;
  out.original_len = n;
  out.values.reserve(n);
  for (double v : window) out.values.push_back((v - mean) / sd);
  return out;
}

double digamma_int(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "digamma is undefined at 0");
  double harmonic = 0.0;
  // Summing the small terms first keeps the result accurate for large n.
  for (std::size_t i = n - 1; i >= 1; --i) harmonic += 1.0 / static_cast<double>(i);
  return harmonic - std::numbers::egamma;
}

namespace {

// psi(1..n) in one pass; ksg_mi looks up n_x + 1 and n_y + 1 for every point.
std::vector<double> digamma_table(std::size_t n) {
  std::vector<double> table(n + 1, 0.0);
  table[1] = -std::numbers::egamma;
  for (std::size_t i = 2; i <= n; ++i) table[i] = table[i - 1] + 1.0 / static_cast<double>(i - 1);
  return table;
}

}  // namespace

double ksg_mi(std::span<const double> x, std::span<const double> y, int k) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
  const std::size_t n = x.size();
  if (k < 1 || static_cast<std::size_t>(k) >= n) {
    throw Error(ErrorCode::TooFewPoints,
                "KSG needs k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::NonFinite, "non-finite input to KSG estimator");
    }
  }

  const knn::MaxNormTree2d tree(x, y);
  std::vector<double> sx(x.begin(), x.end());
  std::vector<double> sy(y.begin(), y.end());
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  const std::vector<double> psi = digamma_table(n);

  double marginal = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double eps = tree.kth_distance(i, static_cast<std::size_t>(k));
    const std::size_t nx = knn::count_strictly_within(sx, x[i], eps);
    const std::size_t ny = knn::count_strictly_within(sy, y[i], eps);
    marginal += psi[nx + 1] + psi[ny + 1];
  }
  return psi[static_cast<std::size_t>(k)] + psi[n] - marginal / static_cast<double>(n);
}

AmiProfile ami_profile(const TimeSeries& series, const WindowLayout& layout,
                       const FrequencyProfile& profile, const RunConfig& config) {
  const auto base = series.values().first(layout.t_base);
  StandardizedWindow z = standardize(base);

  if (config.ksg_jitter > 0.0) {
    std::mt19937_64 rng(synth::stream_seed(config.seed, synth::hash_id(series.id())));
    for (double& v : z.values) v += config.ksg_jitter * synth::standard_normal(rng);
  }

  AmiProfile out;
  out.series_id = series.id();
  out.k_used = config.k_neighbors;
  out.base_len = layout.t_base;
  const std::span<const double> zs(z.values);
  for (int h = 1; h <= profile.h_max; ++h) {
    if (static_cast<std::size_t>(h) >= layout.t_base) break;
    const auto n_eff = static_cast<int>(layout.t_base) - h;
    if (n_eff < profile.n_eff_min || n_eff <= config.k_neighbors) continue;
    const auto past = zs.first(static_cast<std::size_t>(n_eff));
    const auto future = zs.subspan(static_cast<std::size_t>(h));
    out.entries.emplace(h, AmiEntry{ksg_mi(past, future, config.k_neighbors), n_eff});
  }
  if (!out.entries.contains(profile.h_max)) {
    throw Error(ErrorCode::GateIvFailure,
                "AMI undefined at h_max=" + std::to_string(profile.h_max) + " (t_base=" +
                    std::to_string(layout.t_base) + ", n_eff_min=" +
                    std::to_string(profile.n_eff_min) + ")");
  }
  return out;
}

}  // namespace forecastability::ami
