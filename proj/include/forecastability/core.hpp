#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forecastability/error.hpp"

namespace forecastability {

enum class Frequency { Yearly, Quarterly, Monthly, Weekly, Daily, Hourly };

inline constexpr std::array<Frequency, 6> kAllFrequencies = {
    Frequency::Yearly, Frequency::Quarterly, Frequency::Monthly,
    Frequency::Weekly, Frequency::Daily,     Frequency::Hourly};

std::string_view to_string(Frequency f);

/// Case-insensitive; accepts "monthly", "Monthly", "M".
Frequency parse_frequency(std::string_view text);

/// Per-frequency horizon, seasonal period and minimum AMI sample size.
struct FrequencyProfile {
  Frequency frequency;
  int h_max;
  int m;
  int n_eff_min;
};

const FrequencyProfile& profile_for(Frequency f);

/// A univariate series in observation order. Values are finite and non-empty;
/// horizons are counted in observation steps.
class TimeSeries {
 public:
  TimeSeries(std::string id, std::vector<double> values, Frequency frequency);

  const std::string& id() const noexcept { return id_; }
  std::span<const double> values() const noexcept { return values_; }
  Frequency frequency() const noexcept { return frequency_; }
  std::size_t size() const noexcept { return values_.size(); }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::string id_;
  std::vector<double> values_;
  Frequency frequency_;
};

enum class QuantileMethod { Linear, NearestRank };
enum class TriageStat { Mean, AtHorizon };

struct RunConfig {
  int rolls = 10;
  int roll_step = 1;
  int k_neighbors = 8;
  double scale_floor_quantile = 0.05;
  std::uint64_t seed = 42;
  QuantileMethod quantile_method = QuantileMethod::Linear;
  // Standard deviation of deterministic noise added to the standardized
  // window before KSG estimation; 0 disables it.
  double ksg_jitter = 0.0;
  TriageStat triage_stat = TriageStat::Mean;
  int triage_h = 1;

  void validate() const;
};

/// Placement of the base training window and the rolling origins inside a
/// series of length `t_total`. `origins[j]` is the length of the training
/// prefix used at origin j.
struct WindowLayout {
  std::size_t t_total = 0;
  std::size_t pool_len = 0;
  std::size_t t_base = 0;
  std::vector<std::size_t> origins;

  friend bool operator==(const WindowLayout&, const WindowLayout&) = default;
};

/// Throws Error{InfeasibleLength} when the series cannot host every origin
/// with a full h_max evaluation window on top of a non-empty base window.
WindowLayout layout(std::size_t series_len, const FrequencyProfile& profile,
                    const RunConfig& config);

}  // namespace forecastability
