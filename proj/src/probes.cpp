#include "forecastability/probes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "forecastability/log.hpp"
#include "forecastability/optimize.hpp"

namespace forecastability::probes {

std::vector<double> seasonal_naive(std::span<const double> history, int m, int h_max) {
  if (m < 1) throw Error(ErrorCode::InvalidConfig, "seasonal period must be positive");
  if (h_max < 1) throw Error(ErrorCode::InvalidConfig, "h_max must be positive");
  if (history.size() < static_cast<std::size_t>(m)) {
    throw Error(ErrorCode::HistoryTooShort, "history of length " + std::to_string(history.size()) +
                                                " is shorter than m=" + std::to_string(m));
  }
  const auto t = static_cast<long>(history.size());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(h_max));
  for (int h = 1; h <= h_max; ++h) {
    const long k = (h + m - 1) / m;
    out.push_back(history[static_cast<std::size_t>(t + h - k * m - 1)]);
  }
  return out;
}

std::string_view to_string(TrendType t) {
  switch (t) {
    case TrendType::None: return "N";
    case TrendType::Additive: return "A";
    case TrendType::AdditiveDamped: return "Ad";
  }
  return "?";
}

std::string_view to_string(SeasonType s) {
  switch (s) {
    case SeasonType::None: return "N";
    case SeasonType::Additive: return "A";
    case SeasonType::Multiplicative: return "M";
  }
  return "?";
}

namespace {

constexpr double kPhiLow = 0.8;
constexpr double kPhiHigh = 0.98;

struct FilterState {
  double level = 0.0;
  double trend = 0.0;
  std::vector<double> season;  // ring buffer indexed by t mod m
};

bool has_trend(TrendType t) { return t != TrendType::None; }
bool has_season(SeasonType s) { return s != SeasonType::None; }

// Runs the Holt-Winters error-correction recursions over the history and
// returns the one-step SSE; the final state is left in `state`.
double filter(const EtsCandidate& c, std::span<const double> y, std::size_t m, FilterState& state) {
  const EtsParams& p = c.params;
  const double phi = c.trend == TrendType::AdditiveDamped ? p.phi : 1.0;
  const bool trend = has_trend(c.trend);
  const bool mult = c.seasonal == SeasonType::Multiplicative;
  const bool season = has_season(c.seasonal);

  state.level = p.level0;
  state.trend = trend ? p.trend0 : 0.0;
  state.season = season ? p.season0 : std::vector<double>{};

  double sse = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double base = state.level + phi * state.trend;
    double s = 0.0;
    double fitted = base;
    if (season) {
      s = state.season[t % m];
      fitted = mult ? base * s : base + s;
    }
    const double err = y[t] - fitted;
    sse += err * err;

    double level;
    if (!season) {
      level = p.alpha * y[t] + (1.0 - p.alpha) * base;
    } else if (mult) {
      if (s == 0.0 || base == 0.0) return std::numeric_limits<double>::infinity();
      level = p.alpha * (y[t] / s) + (1.0 - p.alpha) * base;
      state.season[t % m] = p.gamma * (y[t] / base) + (1.0 - p.gamma) * s;
    } else {
      level = p.alpha * (y[t] - s) + (1.0 - p.alpha) * base;
      state.season[t % m] = p.gamma * (y[t] - base) + (1.0 - p.gamma) * s;
    }
    if (trend) state.trend = p.beta * (level - state.level) + (1.0 - p.beta) * phi * state.trend;
    state.level = level;
    if (!std::isfinite(sse)) return std::numeric_limits<double>::infinity();
  }
  return sse;
}

// Initial states from the first one or two cycles: level from the first-cycle
// mean, trend from the change between cycle means, seasonal indices from the
// detrended first cycle (normalized to sum 0 or mean 1).
bool initialize(EtsCandidate& c, std::span<const double> y, std::size_t m) {
  EtsParams& p = c.params;
  const bool trend = has_trend(c.trend);
  if (!has_season(c.seasonal)) {
    p.season0.clear();
    if (trend) {
      const std::size_t k = std::min<std::size_t>(y.size() - 1, 10);
      p.trend0 = k > 0 ? (y[k] - y[0]) / static_cast<double>(k) : 0.0;
    } else {
      p.trend0 = 0.0;
    }
    p.level0 = y[0] - p.trend0;
    return true;
  }

  const double md = static_cast<double>(m);
  const double mean1 = std::accumulate(y.begin(), y.begin() + static_cast<long>(m), 0.0) / md;
  const double mean2 =
      std::accumulate(y.begin() + static_cast<long>(m), y.begin() + static_cast<long>(2 * m), 0.0) / md;
  p.trend0 = trend ? (mean2 - mean1) / md : 0.0;
  const double centre = (md - 1.0) / 2.0;
  p.level0 = mean1 - p.trend0 * (centre + 1.0);
  p.season0.assign(m, 0.0);
  const bool mult = c.seasonal == SeasonType::Multiplicative;
  for (std::size_t j = 0; j < m; ++j) {
    const double line = mean1 + p.trend0 * (static_cast<double>(j) - centre);
    if (mult) {
      if (!(line > 0.0)) return false;
      p.season0[j] = y[j] / line;
    } else {
      p.season0[j] = y[j] - line;
    }
  }
  const double norm = std::accumulate(p.season0.begin(), p.season0.end(), 0.0) / md;
  for (double& s : p.season0) {
    if (mult) {
      s /= norm;
    } else {
      s -= norm;
    }
  }
  return true;
}

double squash(double u, double lo, double hi) { return lo + (hi - lo) / (1.0 + std::exp(-u)); }
double unsquash(double x, double lo, double hi) {
  const double t = (x - lo) / (hi - lo);
  return std::log(t / (1.0 - t));
}

// Smoothing parameters in a fixed order: alpha, beta, phi, gamma.
void set_params(EtsCandidate& c, const std::vector<double>& u) {
  std::size_t i = 0;
  c.params.alpha = squash(u[i++], 0.0, 1.0);
  if (has_trend(c.trend)) c.params.beta = squash(u[i++], 0.0, 1.0);
  if (c.trend == TrendType::AdditiveDamped) c.params.phi = squash(u[i++], kPhiLow, kPhiHigh);
  if (has_season(c.seasonal)) c.params.gamma = squash(u[i++], 0.0, 1.0);
}

std::size_t n_smoothing(const EtsCandidate& c) {
  return 1 + (has_trend(c.trend) ? 1 : 0) + (c.trend == TrendType::AdditiveDamped ? 1 : 0) +
         (has_season(c.seasonal) ? 1 : 0);
}

// Three fixed starting points (alpha, beta, phi, gamma).
constexpr std::array<std::array<double, 4>, 3> kStarts = {{
    {0.2, 0.05, 0.90, 0.05},
    {0.5, 0.10, 0.95, 0.10},
    {0.8, 0.30, 0.85, 0.30},
}};

std::vector<double> start_vector(const EtsCandidate& c, const std::array<double, 4>& s) {
  std::vector<double> u;
  u.push_back(unsquash(s[0], 0.0, 1.0));
  if (has_trend(c.trend)) u.push_back(unsquash(s[1], 0.0, 1.0));
  if (c.trend == TrendType::AdditiveDamped) u.push_back(unsquash(s[2], kPhiLow, kPhiHigh));
  if (has_season(c.seasonal)) u.push_back(unsquash(s[3], 0.0, 1.0));
  return u;
}

}  // namespace

std::vector<EtsCandidate> ets_fit_candidates(std::span<const double> history, int m) {
  if (history.empty()) throw Error(ErrorCode::HistoryTooShort, "empty history");
  const auto period = static_cast<std::size_t>(std::max(m, 1));
  const std::size_t n = history.size();
  const bool seasonal_ok = m >= 2 && n >= std::max<std::size_t>(2 * period, 10);
  const bool positive = std::all_of(history.begin(), history.end(), [](double v) { return v > 0.0; });

  double mean_abs = 0.0;
  for (double v : history) mean_abs += std::abs(v);
  mean_abs /= static_cast<double>(n);
  // SSE floor so that numerically exact fits tie and the AIC penalty decides.
  const double mse_floor = std::max(1e-20 * mean_abs * mean_abs, 1e-300);

  std::vector<EtsCandidate> out;
  for (SeasonType season : {SeasonType::None, SeasonType::Additive, SeasonType::Multiplicative}) {
    if (has_season(season) && !seasonal_ok) continue;
    if (season == SeasonType::Multiplicative && !positive) continue;
    for (TrendType trend : {TrendType::None, TrendType::Additive, TrendType::AdditiveDamped}) {
      if (has_trend(trend) && n < 3) continue;
      EtsCandidate c;
      c.trend = trend;
      c.seasonal = season;
      if (!initialize(c, history, period)) continue;

      FilterState state;
      auto objective = [&](const std::vector<double>& u) {
        set_params(c, u);
        return filter(c, history, period, state);
      };
      optimize::NelderMeadResult best;
      best.f = std::numeric_limits<double>::infinity();
      for (const auto& s : kStarts) {
        optimize::NelderMeadOptions options;
        options.max_evaluations = 150 * (n_smoothing(c) + 1);
        auto r = optimize::nelder_mead(objective, start_vector(c, s), options);
        if (r.f < best.f) best = std::move(r);
      }
      if (!std::isfinite(best.f)) continue;  // FitFailure: excluded from selection
      set_params(c, best.x);
      c.sse = best.f;
      const std::size_t states = 1 + (has_trend(trend) ? 1 : 0) + (has_season(season) ? period - 1 : 0);
      c.n_params = static_cast<int>(n_smoothing(c) + states);
      const double nn = static_cast<double>(n);
      c.aic = nn * std::log(std::max(c.sse / nn, mse_floor)) + 2.0 * c.n_params;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<double> ets_forecast(const EtsCandidate& model, std::span<const double> history, int m,
                                 int h_max) {
  const auto period = static_cast<std::size_t>(std::max(m, 1));
  FilterState state;
  filter(model, history, period, state);
  const double phi = model.trend == TrendType::AdditiveDamped ? model.params.phi : 1.0;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(h_max));
  double damp_sum = 0.0;
  double damp_pow = 1.0;
  for (int h = 1; h <= h_max; ++h) {
    damp_pow *= phi;
    damp_sum += damp_pow;
    double f = state.level + (has_trend(model.trend) ? damp_sum * state.trend : 0.0);
    if (has_season(model.seasonal)) {
      const double s = state.season[(history.size() + static_cast<std::size_t>(h) - 1) % period];
      f = model.seasonal == SeasonType::Multiplicative ? f * s : f + s;
    }
    out.push_back(f);
  }
  return out;
}

EtsFit ets_fit_forecast(std::span<const double> history, int m, int h_max) {
  if (h_max < 1) throw Error(ErrorCode::InvalidConfig, "h_max must be positive");
  EtsFit fit;
  fit.candidates = ets_fit_candidates(history, m);
  for (const EtsCandidate& c : fit.candidates) {
    std::vector<double> f = ets_forecast(c, history, m, h_max);
    if (!std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); })) continue;
    if (fit.forecasts.empty() || c.aic < fit.selected.aic) {
      fit.selected = c;
      fit.forecasts = std::move(f);
    }
  }
  if (fit.forecasts.empty()) {
    log::warn("ETS: no candidate converged on a history of length " +
              std::to_string(history.size()) + "; using seasonal naive");
    fit.fell_back = true;
    fit.forecasts = seasonal_naive(history, std::max(m, 1), h_max);
  }
  return fit;
}

std::unique_ptr<ProbeModel> make_probe(std::string_view name) {
  if (name == "seasonal-naive" || name == "sn" || name == "snaive") {
    return std::make_unique<SeasonalNaiveProbe>();
  }
  if (name == "ets") return std::make_unique<EtsProbe>();
  throw Error(ErrorCode::UsageError, "unknown probe model '" + std::string(name) + "'");
}

}  // namespace forecastability::probes
