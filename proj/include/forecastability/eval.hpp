#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forecastability/core.hpp"
#include "forecastability/probes.hpp"

namespace forecastability::eval {

/// (200 / H) * sum |F - A| / (|A| + |F|), in percent; a term with
/// |A| + |F| = 0 counts as 0. Throws EmptyInput or LengthMismatch.
double smape(std::span<const double> actual, std::span<const double> forecast);

/// Realized error of one probe at one horizon across all origins.
struct EvalRecord {
  std::string series_id;
  std::string model;
  int h = 0;
  std::vector<double> per_origin_smape;  // one per origin, in origin order
  double mean_smape = 0.0;
};

struct EvalOutcome {
  std::vector<EvalRecord> records;  // complete records only, ordered by h
  int failed_origins = 0;
};

/// Expanding-window evaluation: at every origin the probe sees only the
/// training prefix and is scored per horizon (single-term sMAPE) against the
/// next h_max observations. A probe exception at any origin voids every
/// record for the series; a non-finite forecast voids that horizon.
EvalOutcome rolling_eval(const TimeSeries& series, const WindowLayout& layout,
                         const probes::ProbeModel& probe, const FrequencyProfile& profile);

}  // namespace forecastability::eval
