#include "forecastability/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "forecastability/log.hpp"

namespace forecastability::analytics {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean(i+1..j).
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t p = i; p < j; ++p) ranks[order[p]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
  if (x.size() < 3) throw Error(ErrorCode::InsufficientData, "Spearman needs at least 3 pairs");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::DegenerateInput, "Spearman of a constant vector is undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ValidationSummary validate(Frequency frequency, std::string_view model,
                           std::span<const SeriesOutcome> outcomes) {
  ValidationSummary summary;
  summary.frequency = frequency;
  summary.model = std::string(model);

  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_h;
  std::vector<double> pooled_ami, pooled_err;
  for (const SeriesOutcome& s : outcomes) {
    for (const auto& [h, err] : s.mean_smape) {
      const auto it = s.ami.find(h);
      if (it == s.ami.end()) continue;
      by_h[h].first.push_back(it->second);
      by_h[h].second.push_back(err);
      pooled_ami.push_back(it->second);
      pooled_err.push_back(err);
    }
  }

  std::vector<double> rhos;
  for (const auto& [h, pairs] : by_h) {
    try {
      const double rho = spearman(pairs.first, pairs.second);
      summary.per_h.push_back(HorizonRho{h, rho, pairs.first.size()});
      rhos.push_back(rho);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData && e.code() != ErrorCode::DegenerateInput) throw;
      log::info(std::string(to_string(frequency)) + "/" + summary.model + " h=" +
                std::to_string(h) + " skipped: " + e.what());
    }
  }
  if (rhos.empty()) {
    throw Error(ErrorCode::InsufficientData,
                std::string(to_string(frequency)) + "/" + summary.model + ": no horizon has 3 valid pairs");
  }
  summary.mean_rho = std::accumulate(rhos.begin(), rhos.end(), 0.0) / static_cast<double>(rhos.size());
  summary.median_rho = median(rhos);
  try {
    summary.pooled_rho = spearman(pooled_ami, pooled_err);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData && e.code() != ErrorCode::DegenerateInput) throw;
  }
  return summary;
}

std::string_view to_string(Tercile t) {
  switch (t) {
    case Tercile::Low: return "Low";
    case Tercile::Mid: return "Mid";
    case Tercile::High: return "High";
  }
  return "?";
}

std::string_view length_label(Tercile t) {
  switch (t) {
    case Tercile::Low: return "Short";
    case Tercile::Mid: return "Medium";
    case Tercile::High: return "Long";
  }
  return "?";
}

std::vector<Tercile> assign_terciles(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<Tercile> out(n, Tercile::Low);
  if (n == 0) return out;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t r1 = (n + 2) / 3;          // ceil(n / 3)
  const std::size_t r2 = (2 * n + 2) / 3;      // ceil(2n / 3)
  const double b1 = sorted[r1 - 1];
  const double b2 = sorted[r2 - 1];
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] <= b1) {
      out[i] = Tercile::Low;
    } else if (values[i] <= b2) {
      out[i] = Tercile::Mid;
    } else {
      out[i] = Tercile::High;
    }
  }
  return out;
}

std::vector<TercileRow> tercile_analysis(std::span<const SeriesOutcome> outcomes) {
  std::vector<double> ami_values, errors;
  for (const SeriesOutcome& s : outcomes) {
    for (const auto& [h, err] : s.mean_smape) {
      const auto it = s.ami.find(h);
      if (it == s.ami.end()) continue;
      ami_values.push_back(it->second);
      errors.push_back(err);
    }
  }
  if (ami_values.size() < 3) {
    throw Error(ErrorCode::InsufficientData, "tercile analysis needs at least 3 (series, h) pairs");
  }
  const std::vector<Tercile> classes = assign_terciles(ami_values);
  std::array<std::vector<double>, 3> groups;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    groups[static_cast<std::size_t>(classes[i])].push_back(errors[i]);
  }
  std::vector<TercileRow> rows;
  for (std::size_t t = 0; t < 3; ++t) {
    if (groups[t].empty()) continue;
    rows.push_back(TercileRow{static_cast<Tercile>(t), median(groups[t]), groups[t].size()});
  }
  if (rows.size() < 3) log::warn("AMI terciles are degenerate (tied values); fewer than 3 classes");
  return rows;
}

std::vector<StratumRow> length_strata(Frequency frequency, std::string_view model,
                                      std::span<const SeriesOutcome> outcomes) {
  std::vector<double> lengths;
  lengths.reserve(outcomes.size());
  for (const SeriesOutcome& s : outcomes) lengths.push_back(static_cast<double>(s.t_base));
  const std::vector<Tercile> classes = assign_terciles(lengths);
  std::vector<StratumRow> rows;
  for (Tercile t : {Tercile::Low, Tercile::Mid, Tercile::High}) {
    std::vector<SeriesOutcome> members;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (classes[i] == t) members.push_back(outcomes[i]);
    }
    if (members.empty()) continue;
    StratumRow row;
    row.length_tercile = t;
    row.n_series = members.size();
    try {
      row.rho = validate(frequency, model, members).mean_rho;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData) throw;
      log::info(std::string(length_label(t)) + " stratum: " + e.what());
    }
    rows.push_back(row);
  }
  if (rows.size() < 3) log::warn("training-length strata are degenerate (tied lengths)");
  return rows;
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::InvestInModelling: return "InvestInModelling";
    case Action::ModelCautiously: return "ModelCautiously";
    case Action::ManageUncertainty: return "ManageUncertainty";
  }
  return "?";
}

Action action_for(Tercile t) {
  switch (t) {
    case Tercile::High: return Action::InvestInModelling;
    case Tercile::Mid: return Action::ModelCautiously;
    case Tercile::Low: return Action::ManageUncertainty;
  }
  return Action::ManageUncertainty;
}

std::vector<TriageLabel> triage(std::span<const ami::AmiProfile> profiles, TriageStat stat,
                                int at_h) {
  std::vector<TriageLabel> labels;
  std::vector<double> scores;
  for (const ami::AmiProfile& p : profiles) {
    if (p.entries.empty()) continue;
    double score = 0.0;
    if (stat == TriageStat::AtHorizon) {
      const auto it = p.entries.find(at_h);
      if (it == p.entries.end()) continue;
      score = it->second.ami_nats;
    } else {
      for (const auto& [h, e] : p.entries) score += e.ami_nats;
      score /= static_cast<double>(p.entries.size());
    }
    labels.push_back(TriageLabel{p.series_id, Tercile::Low, Action::ManageUncertainty, score});
    scores.push_back(score);
  }
  const std::vector<Tercile> classes = assign_terciles(scores);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i].ami_tercile = classes[i];
    labels[i].action = action_for(classes[i]);
  }
  std::sort(labels.begin(), labels.end(),
            [](const TriageLabel& a, const TriageLabel& b) { return a.series_id < b.series_id; });
  return labels;
}

}  // namespace forecastability::analytics
