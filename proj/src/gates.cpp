#include "forecastability/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "forecastability/parallel.hpp"

namespace forecastability::gates {

std::string_view to_string(Gate gate) {
  switch (gate) {
    case Gate::RollingFeasibility: return "RollingFeasibility";
    case Gate::ScaleDefined: return "ScaleDefined";
    case Gate::ScaleFloor: return "ScaleFloor";
    case Gate::AmiAtHmax: return "AmiAtHmax";
  }
  return "Unknown";
}

double scale_proxy(std::span<const double> base_window, int m) {
  if (m < 1) throw Error(ErrorCode::InvalidConfig, "seasonal period must be positive");
  const auto lag = static_cast<std::size_t>(m);
  if (base_window.size() <= lag) {
    throw Error(ErrorCode::ScaleUndefined, "window of length " + std::to_string(base_window.size()) +
                                               " has no lag-" + std::to_string(m) + " difference");
  }
  double sum = 0.0;
  for (std::size_t t = lag; t < base_window.size(); ++t) {
    sum += std::abs(base_window[t] - base_window[t - lag]);
  }
  const double scale = sum / static_cast<double>(base_window.size() - lag);
  if (!std::isfinite(scale)) throw Error(ErrorCode::ScaleUndefined, "scale proxy is not finite");
  return scale;
}

double scale_floor(std::span<const double> scales, double q, QuantileMethod method) {
  if (scales.empty()) throw Error(ErrorCode::EmptyInput, "no scales to take a quantile of");
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::InvalidConfig, "quantile must lie in (0, 1)");
  std::vector<double> sorted(scales.begin(), scales.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (method == QuantileMethod::NearestRank) {
    auto rank = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * q));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
  }
  const double h = static_cast<double>(n - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

namespace {

struct Candidate {
  std::optional<WindowLayout> layout;
  std::optional<ami::AmiProfile> ami;
};

bool is_constant(std::span<const double> window) {
  return std::all_of(window.begin(), window.end(), [&](double v) { return v == window.front(); });
}

}  // namespace

GateResult run_gates(std::span<const TimeSeries> panel, const FrequencyProfile& profile,
                     const RunConfig& config, unsigned threads) {
  config.validate();
  std::vector<std::size_t> order(panel.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return panel[a].id() < panel[b].id(); });

  const std::size_t n = order.size();
  std::vector<GateReport> reports(n);
  std::vector<Candidate> candidates(n);

  // Gates (i) and (ii).
  parallel_for(n, threads, [&](std::size_t slot) {
    const TimeSeries& s = panel[order[slot]];
    GateReport& report = reports[slot];
    report.series_id = s.id();
    try {
      candidates[slot].layout = layout(s.size(), profile, config);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleLength) throw;
      report.failed_gate = Gate::RollingFeasibility;
      report.reason = e.what();
      return;
    }
    const auto base = s.values().first(candidates[slot].layout->t_base);
    if (is_constant(base)) {
      report.failed_gate = Gate::ScaleDefined;
      report.reason = "constant base window";
      return;
    }
    try {
      report.scale0 = scale_proxy(base, profile.m);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ScaleUndefined) throw;
      report.failed_gate = Gate::ScaleDefined;
      report.reason = e.what();
    }
  });

  std::vector<double> scales;
  for (const GateReport& r : reports) {
    if (!r.failed_gate) scales.push_back(*r.scale0);
  }
  GateResult result;
  result.panel.frequency = profile.frequency;
  if (!scales.empty()) {
    result.panel.scale_floor =
        scale_floor(scales, config.scale_floor_quantile, config.quantile_method);
  }
  const double floor = result.panel.scale_floor;

  // Gates (iii) and (iv).
  parallel_for(n, threads, [&](std::size_t slot) {
    GateReport& report = reports[slot];
    if (report.failed_gate) return;
    if (*report.scale0 < floor) {
      report.failed_gate = Gate::ScaleFloor;
      report.reason = "scale0 below floor";
      return;
    }
    try {
      candidates[slot].ami =
          ami::ami_profile(panel[order[slot]], *candidates[slot].layout, profile, config);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GateIvFailure && e.code() != ErrorCode::DegenerateSeries &&
          e.code() != ErrorCode::TooFewPoints) {
        throw;
      }
      report.failed_gate = Gate::AmiAtHmax;
      report.reason = e.what();
    }
  });

  for (std::size_t slot = 0; slot < n; ++slot) {
    GateReport& report = reports[slot];
    report.passed = !report.failed_gate.has_value();
    if (report.passed) {
      result.panel.survivors.push_back(Survivor{panel[order[slot]], *candidates[slot].layout,
                                                std::move(*candidates[slot].ami), *report.scale0});
    }
  }
  result.reports = std::move(reports);
  return result;
}

}  // namespace forecastability::gates
