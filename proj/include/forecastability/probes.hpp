#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forecastability/core.hpp"

namespace forecastability::probes {

/// A forecaster used to test whether measured dependence is exploitable.
/// Implementations see only the supplied history and are deterministic.
class ProbeModel {
 public:
  virtual ~ProbeModel() = default;
  virtual std::string_view name() const = 0;
  /// Point forecasts for h = 1..h_max.
  virtual std::vector<double> fit_and_forecast(std::span<const double> history, int m,
                                               int h_max) const = 0;
};

/// y(T + h) = y(T + h - k m), k = ceil(h / m). Throws HistoryTooShort when
/// the history is shorter than one season.
std::vector<double> seasonal_naive(std::span<const double> history, int m, int h_max);

enum class TrendType { None, Additive, AdditiveDamped };
enum class SeasonType { None, Additive, Multiplicative };

std::string_view to_string(TrendType t);
std::string_view to_string(SeasonType s);

struct EtsParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double phi = 1.0;
  double level0 = 0.0;
  double trend0 = 0.0;
  std::vector<double> season0;  // m values, position j applies at t = j
};

struct EtsCandidate {
  TrendType trend = TrendType::None;
  SeasonType seasonal = SeasonType::None;
  EtsParams params;
  double sse = 0.0;
  double aic = 0.0;
  int n_params = 0;  // smoothing parameters plus initial states
};

struct EtsFit {
  EtsCandidate selected;
  std::vector<EtsCandidate> candidates;  // converged candidates, fixed order
  std::vector<double> forecasts;
  bool fell_back = false;
};

/// Fits every admissible (trend, seasonal) pair from {N, A, Ad} x {N, A, M}
/// on one-step in-sample SSE and returns the converged ones. Seasonal pairs
/// need m >= 2 and a history of at least max(2m, 10); multiplicative
/// seasonality needs every observation > 0.
std::vector<EtsCandidate> ets_fit_candidates(std::span<const double> history, int m);

/// Point forecasts of a fitted candidate after filtering `history`.
std::vector<double> ets_forecast(const EtsCandidate& model, std::span<const double> history,
                                 int m, int h_max);

/// AIC-selected ETS forecasts; falls back to seasonal_naive (with a logged
/// warning) when no candidate converges.
EtsFit ets_fit_forecast(std::span<const double> history, int m, int h_max);

class SeasonalNaiveProbe final : public ProbeModel {
 public:
  std::string_view name() const override { return "seasonal-naive"; }
  std::vector<double> fit_and_forecast(std::span<const double> history, int m,
                                       int h_max) const override {
    return seasonal_naive(history, m, h_max);
  }
};

class EtsProbe final : public ProbeModel {
 public:
  std::string_view name() const override { return "ets"; }
  std::vector<double> fit_and_forecast(std::span<const double> history, int m,
                                       int h_max) const override {
    return ets_fit_forecast(history, m, h_max).forecasts;
  }
};

/// "seasonal-naive" or "ets"; throws UsageError otherwise.
std::unique_ptr<ProbeModel> make_probe(std::string_view name);

}  // namespace forecastability::probes
