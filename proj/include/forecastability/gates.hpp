#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forecastability/ami.hpp"
#include "forecastability/core.hpp"

namespace forecastability::gates {

/// Feasibility conditions, evaluated in this order.
enum class Gate { RollingFeasibility, ScaleDefined, ScaleFloor, AmiAtHmax };

std::string_view to_string(Gate gate);

struct GateReport {
  std::string series_id;
  bool passed = false;
  std::optional<Gate> failed_gate;
  std::optional<double> scale0;
  std::string reason;
};

struct Survivor {
  TimeSeries series;
  WindowLayout layout;
  ami::AmiProfile ami;
  double scale0 = 0.0;
};

struct SurvivorPanel {
  Frequency frequency = Frequency::Yearly;
  std::vector<Survivor> survivors;  // sorted by series id
  double scale_floor = 0.0;
};

struct GateResult {
  SurvivorPanel panel;
  std::vector<GateReport> reports;  // one per input series, sorted by id
};

/// Mean |x_t - x_{t-m}| over the window. Throws ScaleUndefined when the
/// window has no lag-m difference or the mean is not finite.
double scale_proxy(std::span<const double> base_window, int m);

/// Empirical q-quantile. Linear is interpolation between order statistics
/// (h = (n - 1) q); NearestRank is the ceil(n q)-th order statistic.
double scale_floor(std::span<const double> scales, double q,
                   QuantileMethod method = QuantileMethod::Linear);

/// Applies all four gates to every series of one frequency. Gates run once
/// per series; the AMI profile computed for gate (iv) is kept on the
/// survivor. `threads` = 0 uses every available core.
GateResult run_gates(std::span<const TimeSeries> panel, const FrequencyProfile& profile,
                     const RunConfig& config, unsigned threads = 0);

}  // namespace forecastability::gates
