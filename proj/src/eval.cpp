#include "forecastability/eval.hpp"

#include <cmath>

#include "forecastability/log.hpp"

namespace forecastability::eval {

double smape(std::span<const double> actual, std::span<const double> forecast) {
  if (actual.size() != forecast.size()) {
    throw Error(ErrorCode::LengthMismatch, "actual and forecast differ in length");
  }
  if (actual.empty()) throw Error(ErrorCode::EmptyInput, "sMAPE of an empty window");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double denom = std::abs(actual[i]) + std::abs(forecast[i]);
    if (denom > 0.0) sum += std::abs(forecast[i] - actual[i]) / denom;
  }
  return 200.0 * sum / static_cast<double>(actual.size());
}

EvalOutcome rolling_eval(const TimeSeries& series, const WindowLayout& layout,
                         const probes::ProbeModel& probe, const FrequencyProfile& profile) {
  const auto values = series.values();
  const auto h_max = static_cast<std::size_t>(profile.h_max);
  const std::size_t rolls = layout.origins.size();
  std::vector<std::vector<double>> per_h(h_max);
  std::vector<bool> complete(h_max, true);
  EvalOutcome outcome;

  for (std::size_t j = 0; j < rolls; ++j) {
    const std::size_t origin = layout.origins[j];
    if (origin + h_max > values.size()) {
      throw Error(ErrorCode::InfeasibleLength, "origin " + std::to_string(j) + " of '" +
                                                   series.id() + "' has no full evaluation window");
    }
    std::vector<double> forecasts;
    try {
      forecasts = probe.fit_and_forecast(values.first(origin), profile.m, profile.h_max);
    } catch (const Error& e) {
      ++outcome.failed_origins;
      log::warn(std::string(probe.name()) + " failed on '" + series.id() + "' at origin " +
                std::to_string(j) + ": " + e.what());
      outcome.records.clear();
      return outcome;
    }
    if (forecasts.size() != h_max) {
      throw Error(ErrorCode::ProbeFailure, std::string(probe.name()) + " returned " +
                                               std::to_string(forecasts.size()) + " forecasts");
    }
    for (std::size_t h = 0; h < h_max; ++h) {
      if (!std::isfinite(forecasts[h])) {
        complete[h] = false;
        continue;
      }
      const double actual = values[origin + h];
      per_h[h].push_back(smape(std::span(&actual, 1), std::span(&forecasts[h], 1)));
    }
  }

  for (std::size_t h = 0; h < h_max; ++h) {
    if (!complete[h] || per_h[h].size() != rolls) continue;
    EvalRecord record;
    record.series_id = series.id();
    record.model = std::string(probe.name());
    record.h = static_cast<int>(h + 1);
    double sum = 0.0;
    for (double v : per_h[h]) sum += v;
    record.mean_smape = sum / static_cast<double>(rolls);
    record.per_origin_smape = std::move(per_h[h]);
    outcome.records.push_back(std::move(record));
  }
  return outcome;
}

}  // namespace forecastability::eval
