#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forecastability/core.hpp"
#include "forecastability/gates.hpp"
#include "forecastability/io.hpp"

namespace forecastability::pipeline {

/// One loaded panel per frequency.
struct FrequencyInput {
  Frequency frequency;
  io::LoadedPanel panel;
};

struct Options {
  RunConfig config;
  std::vector<std::string> models = {"seasonal-naive", "ets"};
  unsigned threads = 0;
};

/// Issues that do not stop a stage but make the run partial (exit status 2):
/// probe failures that voided records, frequencies without survivors,
/// (frequency, model) cells without a usable horizon.
struct StageReport {
  std::vector<std::string> issues;
  bool partial() const { return !issues.empty(); }
  void merge(const StageReport& other) {
    issues.insert(issues.end(), other.issues.begin(), other.issues.end());
  }
};

using GateResults = std::map<Frequency, gates::GateResult>;

/// survivors.csv, rejects.csv, coverage.csv.
StageReport stage_gates(const std::vector<FrequencyInput>& inputs, const Options& options,
                        const io::ResultStore& store, GateResults* results = nullptr);

/// ami_profiles.csv. Reuses the profiles held in `gated` when given,
/// otherwise recomputes them for the series listed in survivors.csv.
StageReport stage_ami(const std::vector<FrequencyInput>& inputs, const Options& options,
                      const io::ResultStore& store, const GateResults* gated = nullptr);

/// smape.csv, smape_mean.csv for the survivors listed in survivors.csv.
StageReport stage_evaluate(const std::vector<FrequencyInput>& inputs, const Options& options,
                           const io::ResultStore& store);

/// validation.csv, validation_summary.csv, heatmap.csv, terciles.csv,
/// strata.csv from ami_profiles.csv, smape_mean.csv and survivors.csv.
StageReport stage_validate(const Options& options, const io::ResultStore& store);

/// triage.csv from ami_profiles.csv.
StageReport stage_triage(const Options& options, const io::ResultStore& store);

/// report.md: coverage, validation, tercile and strata tables.
StageReport stage_report(const io::ResultStore& store);

/// Every stage in order.
StageReport run_all(const std::vector<FrequencyInput>& inputs, const Options& options,
                    const io::ResultStore& store);

}  // namespace forecastability::pipeline
