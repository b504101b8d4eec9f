#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "forecastability/core.hpp"

namespace forecastability::synth {

enum class SynthKind { WhiteNoise, AR1, SeasonalSine, TrendPlusNoise };

std::string_view to_string(SynthKind kind);
SynthKind parse_kind(std::string_view text);

/// Description of a reproducible synthetic panel.
///
/// Noise is Gaussian throughout. For AR1 the innovation standard deviation is
/// `sigma`, multiplied by (1 - phi^2) when `dependence_scaled_noise` is set so
/// that stronger dependence comes with a smaller unpredictable component. For
/// SeasonalSine and TrendPlusNoise, `snr` is the ratio of signal variance to
/// noise variance over the generated span. `level` is added to every value.
/// When `phis` holds more than one value, series i uses phis[i % phis.size()].
struct SynthSpec {
  SynthKind kind = SynthKind::WhiteNoise;
  std::vector<double> phis = {0.0};
  int m = 12;
  double snr = 1.0;
  double slope = 1.0;
  double sigma = 1.0;
  double level = 0.0;
  bool dependence_scaled_noise = false;
  std::size_t length = 100;
  std::uint64_t seed = 0;
  std::size_t count = 1;
  Frequency frequency = Frequency::Monthly;
  std::string id_prefix = "S";

  void validate() const;
};

/// Ids are `<prefix><index>` zero-padded to the width of count - 1, so the
/// lexicographic order matches the generation order.
std::vector<TimeSeries> generate(const SynthSpec& spec);

/// One series of the panel; generate() is the concatenation over indices.
TimeSeries generate_one(const SynthSpec& spec, std::size_t index);

/// SplitMix64 finalizer over (seed, stream); the per-series stream seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// FNV-1a over the bytes of an id.
std::uint64_t hash_id(std::string_view id);

/// Uniform in [0, 1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);

/// Standard normal via Box-Muller on uniform01; one draw pair per call so the
/// sequence is independent of any library distribution implementation.
double standard_normal(std::mt19937_64& rng);

}  // namespace forecastability::synth
