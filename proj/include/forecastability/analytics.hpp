#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forecastability/ami.hpp"
#include "forecastability/core.hpp"

namespace forecastability::analytics {

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws LengthMismatch,
/// InsufficientData (fewer than 3 pairs) or DegenerateInput (a constant
/// input).
double spearman(std::span<const double> x, std::span<const double> y);

/// What validation needs to know about one surviving series under one probe.
struct SeriesOutcome {
  std::string series_id;
  std::size_t t_base = 0;
  std::map<int, double> ami;         // h -> AMI(h)
  std::map<int, double> mean_smape;  // h -> mean sMAPE(h) over all origins
};

struct HorizonRho {
  int h = 0;
  double rho = 0.0;
  std::size_t n_series = 0;
};

struct ValidationSummary {
  Frequency frequency = Frequency::Yearly;
  std::string model;
  std::vector<HorizonRho> per_h;  // defined horizons only, ascending h
  double mean_rho = 0.0;
  double median_rho = 0.0;
  std::optional<double> pooled_rho;
};

/// Two-stage validation: Spearman across series per horizon, then the mean
/// and median over horizons; pooled_rho ranks every (series, h) pair at once.
/// Horizons with fewer than 3 pairs or constant inputs are skipped. Throws
/// InsufficientData when no horizon is usable.
ValidationSummary validate(Frequency frequency, std::string_view model,
                           std::span<const SeriesOutcome> outcomes);

enum class Tercile { Low, Mid, High };
std::string_view to_string(Tercile t);
/// Length strata use Short / Medium / Long for the same three classes.
std::string_view length_label(Tercile t);

/// Equal-frequency partition. Boundaries are the order statistics at ranks
/// ceil(n/3) and ceil(2n/3); values equal to a boundary go to the lower class.
std::vector<Tercile> assign_terciles(std::span<const double> values);

struct TercileRow {
  Tercile tercile = Tercile::Low;
  double median_smape = 0.0;
  std::size_t n_pairs = 0;
};

/// Median of mean sMAPE(h) per AMI tercile, terciles taken over all valid
/// (series, h) pairs. Empty terciles are omitted. Throws InsufficientData for
/// fewer than 3 pairs.
std::vector<TercileRow> tercile_analysis(std::span<const SeriesOutcome> outcomes);

struct StratumRow {
  Tercile length_tercile = Tercile::Low;
  std::optional<double> rho;  // two-stage mean rho; empty when undefined
  std::size_t n_series = 0;
};

/// Series split into terciles by base-window length; two-stage mean rho in
/// each. Strata that end up empty are omitted.
std::vector<StratumRow> length_strata(Frequency frequency, std::string_view model,
                                      std::span<const SeriesOutcome> outcomes);

enum class Action { InvestInModelling, ModelCautiously, ManageUncertainty };
std::string_view to_string(Action a);
Action action_for(Tercile t);

struct TriageLabel {
  std::string series_id;
  Tercile ami_tercile = Tercile::Low;
  Action action = Action::ManageUncertainty;
  double score = 0.0;
};

/// Per-series AMI summary (mean over defined horizons, or AMI at one
/// horizon), terciled within the panel and mapped to an action. Series
/// without the requested horizon are skipped. Output is sorted by id.
std::vector<TriageLabel> triage(std::span<const ami::AmiProfile> profiles,
                                TriageStat stat = TriageStat::Mean, int at_h = 1);

double median(std::vector<double> values);

}  // namespace forecastability::analytics
