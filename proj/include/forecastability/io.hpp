#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forecastability/ami.hpp"
#include "forecastability/core.hpp"

namespace forecastability::io {

enum class PanelFormat { M4Wide, Long };

/// "m4" / "m4wide" / "wide" or "long".
PanelFormat parse_format(std::string_view text);
std::string_view to_string(PanelFormat format);

struct PanelSource {
  std::filesystem::path path;
  PanelFormat format = PanelFormat::M4Wide;
  Frequency frequency = Frequency::Yearly;
};

/// A series dropped while parsing, with the reason.
struct ParseReject {
  std::string series_id;
  std::string reason;
};

struct LoadedPanel {
  std::vector<TimeSeries> series;  // sorted by id
  std::vector<ParseReject> rejects;
};

/// M4Wide: one series per row, first cell the id, remaining non-empty cells
/// the observations; a header row is detected by a non-numeric second cell.
/// Long: rows (series_id, step, value) with steps dense from 1 per series.
/// Cells that are non-numeric or non-finite drop their series into
/// `rejects`. Throws FileError, FormatError (structurally broken rows) or
/// EmptyPanel (no data rows).
LoadedPanel load_panel(const PanelSource& source);

/// Appends the observations of `tail` to the series of `head` with the same
/// id (train + test concatenation). Series without a counterpart are kept
/// unchanged.
LoadedPanel concatenate(const LoadedPanel& head, const LoadedPanel& tail);

/// Writes series as Long CSV (series_id,step,value), lexicographic by id.
void write_long(const std::filesystem::path& path, std::span<const TimeSeries> series);

/// CSV cells split on commas with double-quote escaping; trailing CR removed.
std::vector<std::string> split_csv_line(std::string_view line);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);

// Result tables. Each writer sorts its rows into the canonical order and
// overwrites the file with a fixed header.

struct SurvivorRow {
  std::string series_id;
  Frequency frequency;
  std::size_t t_base;
  double scale0;
};

struct RejectRow {
  std::string series_id;
  std::string gate;
  std::string reason;
};

struct AmiRow {
  std::string series_id;
  Frequency frequency;
  int h;
  int n_eff;
  double ami_nats;
};

struct SmapeRow {
  std::string series_id;
  Frequency frequency;
  std::string model;
  int h;
  int origin;
  double smape_pct;
};

struct SmapeMeanRow {
  std::string series_id;
  Frequency frequency;
  std::string model;
  int h;
  double mean_smape_pct;
};

struct ValidationRow {
  Frequency frequency;
  std::string model;
  int h;
  double rho;
  std::size_t n_series;
};

struct SummaryRow {
  Frequency frequency;
  std::string model;
  double mean_rho;
  double median_rho;
  std::optional<double> pooled_rho;
};

struct TercileTableRow {
  Frequency frequency;
  std::string model;
  std::string tercile;
  double median_smape_pct;
};

struct StrataTableRow {
  Frequency frequency;
  std::string model;
  std::string tercile_by_length;
  std::optional<double> rho;
};

/// Per-frequency panel coverage: series loaded, dropped while parsing,
/// surviving all gates, and the scale floor used by gate (iii).
struct CoverageRow {
  Frequency frequency;
  std::size_t series;
  std::size_t parse_rejects;
  std::size_t survivors;
  double scale_floor;
};

struct TriageRow {
  std::string series_id;
  Frequency frequency;
  std::string tercile;
  std::string action;
};

/// Output directory holding every result table of a run.
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path file(std::string_view name) const { return dir_ / name; }

  void write_survivors(std::vector<SurvivorRow> rows) const;
  void write_rejects(std::vector<RejectRow> rows) const;
  void write_ami_profiles(std::vector<AmiRow> rows) const;
  void write_smape(std::vector<SmapeRow> rows) const;
  void write_smape_mean(std::vector<SmapeMeanRow> rows) const;
  void write_validation(std::vector<ValidationRow> rows) const;
  void write_heatmap(std::vector<ValidationRow> rows) const;
  void write_validation_summary(std::vector<SummaryRow> rows) const;
  void write_terciles(std::vector<TercileTableRow> rows) const;
  void write_strata(std::vector<StrataTableRow> rows) const;
  void write_triage(std::vector<TriageRow> rows) const;
  void write_coverage(std::vector<CoverageRow> rows) const;

  /// Readers for the intermediate tables; throw UsageError naming the file
  /// when it does not exist and FormatError on a header mismatch.
  std::vector<SurvivorRow> read_survivors() const;
  std::vector<RejectRow> read_rejects() const;
  std::vector<AmiRow> read_ami_profiles() const;
  std::vector<SmapeMeanRow> read_smape_mean() const;
  std::vector<SummaryRow> read_validation_summary() const;
  std::vector<TercileTableRow> read_terciles() const;
  std::vector<StrataTableRow> read_strata() const;
  std::vector<TriageRow> read_triage() const;
  std::vector<CoverageRow> read_coverage() const;

 private:
  std::filesystem::path dir_;
};

/// Groups AMI rows back into per-series profiles (k and base length are not
/// stored in the table and are left at 0).
std::vector<std::pair<Frequency, ami::AmiProfile>> profiles_from_rows(std::span<const AmiRow> rows);

}  // namespace forecastability::io
