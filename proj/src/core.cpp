#include "forecastability/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace forecastability {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InfeasibleLength: return "InfeasibleLength";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::FileError: return "FileError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::EmptyPanel: return "EmptyPanel";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::GateIvFailure: return "GateIvFailure";
    case ErrorCode::ScaleUndefined: return "ScaleUndefined";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::HistoryTooShort: return "HistoryTooShort";
    case ErrorCode::FitFailure: return "FitFailure";
    case ErrorCode::AllCandidatesFailed: return "AllCandidatesFailed";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ProbeFailure: return "ProbeFailure";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

std::string_view to_string(Frequency f) {
  switch (f) {
    case Frequency::Yearly: return "Yearly";
    case Frequency::Quarterly: return "Quarterly";
    case Frequency::Monthly: return "Monthly";
    case Frequency::Weekly: return "Weekly";
    case Frequency::Daily: return "Daily";
    case Frequency::Hourly: return "Hourly";
  }
  return "Unknown";
}

Frequency parse_frequency(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Frequency f : kAllFrequencies) {
    std::string name(to_string(f));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == name || (lower.size() == 1 && lower[0] == name[0])) return f;
  }
  throw Error(ErrorCode::UsageError, "unknown frequency '" + std::string(text) + "'");
}

const FrequencyProfile& profile_for(Frequency f) {
  // M4 horizons and seasonal periods, with the minimum effective sample size
  // required for the AMI estimate at every horizon.
  static const std::array<FrequencyProfile, 6> profiles = {{
      {Frequency::Yearly, 6, 1, 30},
      {Frequency::Quarterly, 8, 4, 80},
      {Frequency::Monthly, 18, 12, 100},
      {Frequency::Weekly, 13, 52, 120},
      {Frequency::Daily, 14, 7, 250},
      {Frequency::Hourly, 48, 24, 400},
  }};
  return profiles[static_cast<std::size_t>(f)];
}

TimeSeries::TimeSeries(std::string id, std::vector<double> values, Frequency frequency)
    : id_(std::move(id)), values_(std::move(values)), frequency_(frequency) {
  if (values_.empty()) {
    throw Error(ErrorCode::EmptyInput, "series '" + id_ + "' has no observations");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::NonFinite,
                  "series '" + id_ + "' has a non-finite value at step " + std::to_string(i + 1));
    }
  }
}

void RunConfig::validate() const {
  if (rolls < 1) throw Error(ErrorCode::InvalidConfig, "rolls must be positive");
  if (roll_step < 1) throw Error(ErrorCode::InvalidConfig, "roll_step must be positive");
  if (k_neighbors < 1) throw Error(ErrorCode::InvalidConfig, "k must be positive");
  if (!(scale_floor_quantile > 0.0 && scale_floor_quantile < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "scale floor quantile must lie in (0, 1)");
  }
  if (!(ksg_jitter >= 0.0) || !std::isfinite(ksg_jitter)) {
    throw Error(ErrorCode::InvalidConfig, "ksg jitter must be a finite non-negative number");
  }
  if (triage_h < 1) throw Error(ErrorCode::InvalidConfig, "triage horizon must be positive");
}

WindowLayout layout(std::size_t series_len, const FrequencyProfile& profile,
                    const RunConfig& config) {
  config.validate();
  if (series_len < 1) throw Error(ErrorCode::InfeasibleLength, "empty series");
  const auto rolls = static_cast<std::size_t>(config.rolls);
  const auto step = static_cast<std::size_t>(config.roll_step);
  WindowLayout out;
  out.t_total = series_len;
  out.pool_len = static_cast<std::size_t>(profile.h_max) + (rolls - 1) * step;
  if (series_len <= out.pool_len) {
    throw Error(ErrorCode::InfeasibleLength,
                "length " + std::to_string(series_len) + " cannot host " + std::to_string(rolls) +
                    " origins with pool length " + std::to_string(out.pool_len));
  }
  out.t_base = series_len - out.pool_len;
  out.origins.reserve(rolls);
  for (std::size_t j = 0; j < rolls; ++j) out.origins.push_back(out.t_base + j * step);
  return out;
}

}  // namespace forecastability
