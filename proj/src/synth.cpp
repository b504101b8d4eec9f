#include "forecastability/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace forecastability::synth {

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::WhiteNoise: return "white-noise";
    case SynthKind::AR1: return "ar1";
    case SynthKind::SeasonalSine: return "seasonal-sine";
    case SynthKind::TrendPlusNoise: return "trend";
  }
  return "unknown";
}

SynthKind parse_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::replace(lower.begin(), lower.end(), '_', '-');
  if (lower == "white-noise" || lower == "wn" || lower == "whitenoise") return SynthKind::WhiteNoise;
  if (lower == "ar1") return SynthKind::AR1;
  if (lower == "seasonal-sine" || lower == "sine" || lower == "seasonalsine") {
    return SynthKind::SeasonalSine;
  }
  if (lower == "trend" || lower == "trend-plus-noise" || lower == "trendplusnoise") {
    return SynthKind::TrendPlusNoise;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown synthetic kind '" + std::string(text) + "'");
}

void SynthSpec::validate() const {
  if (length < 1) throw Error(ErrorCode::InvalidSpec, "length must be positive");
  if (count < 1) throw Error(ErrorCode::InvalidSpec, "count must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidSpec, "sigma must be positive");
  if (!std::isfinite(level)) throw Error(ErrorCode::InvalidSpec, "level must be finite");
  switch (kind) {
    case SynthKind::AR1:
      if (phis.empty()) throw Error(ErrorCode::InvalidSpec, "AR1 needs at least one phi");
      for (double phi : phis) {
        if (!(phi > -1.0 && phi < 1.0)) throw Error(ErrorCode::InvalidSpec, "phi must lie in (-1, 1)");
      }
      break;
    case SynthKind::SeasonalSine:
      if (m < 2) throw Error(ErrorCode::InvalidSpec, "seasonal period must be at least 2");
      [[fallthrough]];
    case SynthKind::TrendPlusNoise:
      if (!(snr > 0.0) || !std::isfinite(snr)) throw Error(ErrorCode::InvalidSpec, "snr must be positive");
      if (kind == SynthKind::TrendPlusNoise && (slope == 0.0 || length < 2)) {
        throw Error(ErrorCode::InvalidSpec, "trend needs a non-zero slope and length >= 2");
      }
      break;
    case SynthKind::WhiteNoise:
      break;
  }
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_id(std::string_view id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::string padded_id(const std::string& prefix, std::size_t index, std::size_t count) {
  const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  std::string digits = std::to_string(index);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

}  // namespace

TimeSeries generate_one(const SynthSpec& spec, std::size_t index) {
  spec.validate();
  std::mt19937_64 rng(stream_seed(spec.seed, index));
  const std::size_t n = spec.length;
  std::vector<double> values(n);

  switch (spec.kind) {
    case SynthKind::WhiteNoise:
      for (double& v : values) v = spec.level + spec.sigma * standard_normal(rng);
      break;
    case SynthKind::AR1: {
      const double phi = spec.phis[index % spec.phis.size()];
      const double innov =
          spec.dependence_scaled_noise ? spec.sigma * (1.0 - phi * phi) : spec.sigma;
      // Stationary start: Var(x_0) = innov^2 / (1 - phi^2).
      double x = innov / std::sqrt(1.0 - phi * phi) * standard_normal(rng);
      values[0] = spec.level + x;
      for (std::size_t t = 1; t < n; ++t) {
        x = phi * x + innov * standard_normal(rng);
        values[t] = spec.level + x;
      }
      break;
    }
    case SynthKind::SeasonalSine: {
      // A unit-amplitude sine has variance 1/2.
      const double noise_sd = std::sqrt(0.5 / spec.snr);
      for (std::size_t t = 0; t < n; ++t) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(t % static_cast<std::size_t>(spec.m)) /
                             static_cast<double>(spec.m);
        values[t] = spec.level + std::sin(angle) + noise_sd * standard_normal(rng);
      }
      break;
    }
    case SynthKind::TrendPlusNoise: {
      const double nn = static_cast<double>(n);
      const double signal_var = spec.slope * spec.slope * (nn * nn - 1.0) / 12.0;
      const double noise_sd = std::sqrt(signal_var / spec.snr);
      for (std::size_t t = 0; t < n; ++t) {
        values[t] = spec.level + spec.slope * static_cast<double>(t) + noise_sd * standard_normal(rng);
      }
      break;
    }
  }
  return TimeSeries(padded_id(spec.id_prefix, index, spec.count), std::move(values), spec.frequency);
}

std::vector<TimeSeries> generate(const SynthSpec& spec) {
  spec.validate();
  std::vector<TimeSeries> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) out.push_back(generate_one(spec, i));
  return out;
}

}  // namespace forecastability::synth
