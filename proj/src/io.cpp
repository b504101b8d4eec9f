#include "forecastability/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace forecastability::io {

namespace fs = std::filesystem;

PanelFormat parse_format(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "m4" || lower == "m4wide" || lower == "m4-wide" || lower == "wide") {
    return PanelFormat::M4Wide;
  }
  if (lower == "long") return PanelFormat::Long;
  throw Error(ErrorCode::UsageError, "unknown panel format '" + std::string(text) + "'");
}

std::string_view to_string(PanelFormat format) {
  return format == PanelFormat::M4Wide ? "m4" : "long";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::FormatError, "unterminated quote in CSV row");
  cells.push_back(std::move(cell));
  return cells;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileError, "cannot open '" + path.string() + "'");
  return in;
}

bool looks_numeric(const std::string& cell) { return parse_double(cell).has_value(); }

void sort_by_id(LoadedPanel& panel) {
  std::sort(panel.series.begin(), panel.series.end(),
            [](const TimeSeries& a, const TimeSeries& b) { return a.id() < b.id(); });
  std::stable_sort(panel.rejects.begin(), panel.rejects.end(),
                   [](const ParseReject& a, const ParseReject& b) { return a.series_id < b.series_id; });
}

LoadedPanel load_wide(const PanelSource& source) {
  std::ifstream in = open_input(source.path);
  LoadedPanel panel;
  std::map<std::string, bool> seen;
  std::string line;
  std::size_t line_no = 0;
  bool any_rows = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    try {
      cells = split_csv_line(line);
    } catch (const Error&) {
      throw Error(ErrorCode::FormatError, source.path.string() + ":" + std::to_string(line_no) +
                                              ": unterminated quote");
    }
    if (line_no == 1 && cells.size() >= 2 && !looks_numeric(cells[1])) continue;  // header
    any_rows = true;
    const std::string& id = cells[0];
    if (id.empty()) {
      throw Error(ErrorCode::FormatError,
                  source.path.string() + ":" + std::to_string(line_no) + ": empty series id");
    }
    if (seen.contains(id)) {
      panel.rejects.push_back({id, "duplicate id (line " + std::to_string(line_no) + ")"});
      continue;
    }
    seen[id] = true;
    std::size_t last = cells.size();
    while (last > 1 && cells[last - 1].empty()) --last;
    std::vector<double> values;
    std::string problem;
    for (std::size_t c = 1; c < last; ++c) {
      const auto v = parse_double(cells[c]);
      if (!v) {
        problem = cells[c].empty() ? "gap at column " + std::to_string(c + 1)
                                   : "non-numeric cell '" + cells[c] + "'";
        break;
      }
      if (!std::isfinite(*v)) {
        problem = "non-finite value at column " + std::to_string(c + 1);
        break;
      }
      values.push_back(*v);
    }
    if (problem.empty() && values.empty()) problem = "no observations";
    if (!problem.empty()) {
      panel.rejects.push_back({id, problem});
      continue;
    }
    panel.series.emplace_back(id, std::move(values), source.frequency);
  }
  if (!any_rows) throw Error(ErrorCode::EmptyPanel, "'" + source.path.string() + "' has no series");
  sort_by_id(panel);
  return panel;
}

LoadedPanel load_long(const PanelSource& source) {
  std::ifstream in = open_input(source.path);
  struct Pending {
    std::vector<std::pair<long, double>> points;
    std::string problem;
  };
  std::map<std::string, Pending> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    try {
      cells = split_csv_line(line);
    } catch (const Error&) {
      throw Error(ErrorCode::FormatError, source.path.string() + ":" + std::to_string(line_no) +
                                              ": unterminated quote");
    }
    if (line_no == 1 && cells.size() >= 2 && !looks_numeric(cells[1])) continue;  // header
    if (cells.size() != 3 || cells[0].empty()) {
      throw Error(ErrorCode::FormatError, source.path.string() + ":" + std::to_string(line_no) +
                                              ": expected series_id,step,value");
    }
    Pending& p = by_id[cells[0]];
    if (!p.problem.empty()) continue;
    const auto step = parse_double(cells[1]);
    const auto value = parse_double(cells[2]);
    if (!step || *step != std::floor(*step)) {
      p.problem = "bad step '" + cells[1] + "'";
    } else if (!value) {
      p.problem = "non-numeric value '" + cells[2] + "'";
    } else if (!std::isfinite(*value)) {
      p.problem = "non-finite value at step " + cells[1];
    } else {
      p.points.emplace_back(static_cast<long>(*step), *value);
    }
  }
  if (by_id.empty()) throw Error(ErrorCode::EmptyPanel, "'" + source.path.string() + "' has no series");

  LoadedPanel panel;
  for (auto& [id, p] : by_id) {
    if (p.problem.empty()) {
      std::stable_sort(p.points.begin(), p.points.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t i = 0; i < p.points.size(); ++i) {
        if (p.points[i].first != static_cast<long>(i + 1)) {
          p.problem = "steps are not dense from 1 (found " + std::to_string(p.points[i].first) +
                      " at position " + std::to_string(i + 1) + ")";
          break;
        }
      }
    }
    if (!p.problem.empty()) {
      panel.rejects.push_back({id, p.problem});
      continue;
    }
    std::vector<double> values;
    values.reserve(p.points.size());
    for (const auto& pt : p.points) values.push_back(pt.second);
    panel.series.emplace_back(id, std::move(values), source.frequency);
  }
  sort_by_id(panel);
  return panel;
}

std::string csv_cell(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, std::string_view header) : path_(path), out_(path, std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out_ << header << '\n';
  }
  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cells, first = false), ...);
    out_ << '\n';
  }
  ~CsvWriter() = default;
  void close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::IoError, "failed writing '" + path_.string() + "'");
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

// Rows of a table file after the header, which must match exactly.
std::vector<std::vector<std::string>> read_table(const fs::path& path, std::string_view header) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::UsageError,
                "missing '" + path.filename().string() + "' in " + path.parent_path().string() +
                    " (run the stage that produces it first)");
  }
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::FormatError, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw Error(ErrorCode::FormatError, path.string() + ": unexpected header '" + line + "'");
  }
  const std::size_t columns = split_csv_line(header).size();
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != columns) {
      throw Error(ErrorCode::FormatError, path.string() + ":" + std::to_string(line_no) +
                                              ": expected " + std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

double number(const std::string& cell, const fs::path& path) {
  const auto v = parse_double(cell);
  if (!v) throw Error(ErrorCode::FormatError, path.string() + ": bad number '" + cell + "'");
  return *v;
}

std::optional<double> opt_number(const std::string& cell, const fs::path& path) {
  if (cell == "NA") return std::nullopt;
  return number(cell, path);
}

int freq_rank(Frequency f) { return static_cast<int>(f); }

constexpr std::string_view kSurvivorsHeader = "series_id,frequency,t_base,scale0";
constexpr std::string_view kRejectsHeader = "series_id,gate,reason";
constexpr std::string_view kAmiHeader = "series_id,frequency,h,n_eff,ami_nats";
constexpr std::string_view kSmapeHeader = "series_id,frequency,model,h,origin,smape_pct";
constexpr std::string_view kSmapeMeanHeader = "series_id,frequency,model,h,mean_smape_pct";
constexpr std::string_view kValidationHeader = "frequency,model,h,rho,n_series";
constexpr std::string_view kHeatmapHeader = "frequency,model,h,rho";
constexpr std::string_view kSummaryHeader = "frequency,model,mean_rho,median_rho,pooled_rho";
constexpr std::string_view kTercilesHeader = "frequency,model,tercile,median_smape_pct";
constexpr std::string_view kStrataHeader = "frequency,model,tercile_by_length,rho";
constexpr std::string_view kTriageHeader = "series_id,frequency,tercile,action";
constexpr std::string_view kCoverageHeader = "frequency,series,parse_rejects,survivors,scale_floor";

int tercile_rank(std::string_view t) {
  if (t == "Low" || t == "Short") return 0;
  if (t == "Mid" || t == "Medium") return 1;
  return 2;
}

}  // namespace

LoadedPanel load_panel(const PanelSource& source) {
  if (!fs::exists(source.path)) {
    throw Error(ErrorCode::FileError, "'" + source.path.string() + "' does not exist");
  }
  return source.format == PanelFormat::M4Wide ? load_wide(source) : load_long(source);
}

LoadedPanel concatenate(const LoadedPanel& head, const LoadedPanel& tail) {
  std::map<std::string, const TimeSeries*> tails;
  for (const TimeSeries& s : tail.series) tails[s.id()] = &s;
  LoadedPanel out;
  out.rejects = head.rejects;
  for (const TimeSeries& s : head.series) {
    const auto it = tails.find(s.id());
    if (it == tails.end()) {
      out.series.push_back(s);
      continue;
    }
    std::vector<double> values(s.values().begin(), s.values().end());
    values.insert(values.end(), it->second->values().begin(), it->second->values().end());
    out.series.emplace_back(s.id(), std::move(values), s.frequency());
  }
  return out;
}

void write_long(const fs::path& path, std::span<const TimeSeries> series) {
  std::vector<const TimeSeries*> sorted;
  for (const TimeSeries& s : series) sorted.push_back(&s);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TimeSeries* a, const TimeSeries* b) { return a->id() < b->id(); });
  CsvWriter w(path, "series_id,step,value");
  for (const TimeSeries* s : sorted) {
    const auto values = s->values();
    for (std::size_t t = 0; t < values.size(); ++t) {
      w.row(csv_cell(s->id()), t + 1, format_double(values[t]));
    }
  }
  w.close();
}

ResultStore::ResultStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir_.string() + "': " + ec.message());
}

void ResultStore::write_survivors(std::vector<SurvivorRow> rows) const {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(freq_rank(a.frequency), a.series_id) < std::tuple(freq_rank(b.frequency), b.series_id);
  });
  CsvWriter w(file("survivors.csv"), kSurvivorsHeader);
  for (const auto& r : rows) {
    w.row(csv_cell(r.series_id), to_string(r.frequency), r.t_base, format_double(r.scale0));
  }
  w.close();
}

void ResultStore::write_rejects(std::vector<RejectRow> rows) const {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.series_id < b.series_id; });
  CsvWriter w(file("rejects.csv"), kRejectsHeader);
  for (const auto& r : rows) w.row(csv_cell(r.series_id), csv_cell(r.gate), csv_cell(r.reason));
  w.close();
}

void ResultStore::write_ami_profiles(std::vector<AmiRow> rows) const {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(freq_rank(a.frequency), a.series_id, a.h) <
           std::tuple(freq_rank(b.frequency), b.series_id, b.h);
  });
  CsvWriter w(file("ami_profiles.csv"), kAmiHeader);
  for (const auto& r : rows) {
    w.row(csv_cell(r.series_id), to_string(r.frequency), r.h, r.n_eff, format_double(r.ami_nats));
  }
  w.close();
}

void ResultStore::write_smape(std::vector<SmapeRow> rows) const {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(freq_rank(a.frequency), a.series_id, a.model, a.h, a.origin) <
           std::tuple(freq_rank(b.frequency), b.series_id, b.model, b.h, b.origin);
  });
  CsvWriter w(file("smape.csv"), kSmapeHeader);
  for (const auto& r : rows) {
    w.row(csv_cell(r.series_id), to_string(r.frequency), r.model, r.h, r.origin,
          format_double(r.smape_pct));
  }
  w.close();
}

void ResultStore::write_smape_mean(std::vector<SmapeMeanRow> rows) const {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(freq_rank(a.frequency), a.series_id, a.model, a.h) <
           std::tuple(freq_rank(b.frequency), b.series_id, b.model, b.h);
  });
  CsvWriter w(file("smape_mean.csv"), kSmapeMeanHeader);
  for (const auto& r : rows) {
    w.row(csv_cell(r.series_id), to_string(r.frequency), r.model, r.h, format_double(r.mean_smape_pct));
  }
  w.close();
}

namespace {
void sort_cells(std::vector<ValidationRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(freq_rank(a.frequency), a.model, a.h) < std::tuple(freq_rank(b.frequency), b.model, b.h);
  });
}
}  // namespace

void ResultStore::write_validation(std::vector<ValidationRow> rows) const {
  sort_cells(rows);
  CsvWriter w(file("validation.csv"), kValidationHeader);
  for (const auto& r : rows) w.row(to_string(r.frequency), r.model, r.h, format_double(r.rho), r.n_series);
  w.close();
}

void ResultStore::write_heatmap(std::vector<ValidationRow> rows) const {
  sort_cells(rows);
  CsvWriter w(file("heatmap.csv"), kHeatmapHeader);
  for (const auto& r : rows) w.row(to_string(r.frequency), r.model, r.h, format_double(r.rho));
  w.close();
}

void ResultStore::write_validation_summary(std::vector<SummaryRow> rows) const {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(freq_rank(a.frequency), a.model) < std::tuple(freq_rank(b.frequency), b.model);
  });
  CsvWriter w(file("validation_summary.csv"), kSummaryHeader);
  for (const auto& r : rows) {
    w.row(to_string(r.frequency), r.model, format_double(r.mean_rho), format_double(r.median_rho),
          opt_cell(r.pooled_rho));
  }
  w.close();
}

void ResultStore::write_terciles(std::vector<TercileTableRow> rows) const {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(freq_rank(a.frequency), a.model, tercile_rank(a.tercile)) <
           std::tuple(freq_rank(b.frequency), b.model, tercile_rank(b.tercile));
  });
  CsvWriter w(file("terciles.csv"), kTercilesHeader);
  for (const auto& r : rows) {
    w.row(to_string(r.frequency), r.model, r.tercile, format_double(r.median_smape_pct));
  }
  w.close();
}

void ResultStore::write_strata(std::vector<StrataTableRow> rows) const {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(freq_rank(a.frequency), a.model, tercile_rank(a.tercile_by_length)) <
           std::tuple(freq_rank(b.frequency), b.model, tercile_rank(b.tercile_by_length));
  });
  CsvWriter w(file("strata.csv"), kStrataHeader);
  for (const auto& r : rows) w.row(to_string(r.frequency), r.model, r.tercile_by_length, opt_cell(r.rho));
  w.close();
}

void ResultStore::write_triage(std::vector<TriageRow> rows) const {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(freq_rank(a.frequency), a.series_id) < std::tuple(freq_rank(b.frequency), b.series_id);
  });
  CsvWriter w(file("triage.csv"), kTriageHeader);
  for (const auto& r : rows) w.row(csv_cell(r.series_id), to_string(r.frequency), r.tercile, r.action);
  w.close();
}

void ResultStore::write_coverage(std::vector<CoverageRow> rows) const {
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return freq_rank(a.frequency) < freq_rank(b.frequency); });
  CsvWriter w(file("coverage.csv"), kCoverageHeader);
  for (const auto& r : rows) {
    w.row(to_string(r.frequency), r.series, r.parse_rejects, r.survivors, format_double(r.scale_floor));
  }
  w.close();
}

std::vector<SurvivorRow> ResultStore::read_survivors() const {
  const auto path = file("survivors.csv");
  std::vector<SurvivorRow> out;
  for (const auto& c : read_table(path, kSurvivorsHeader)) {
    out.push_back({c[0], parse_frequency(c[1]), static_cast<std::size_t>(number(c[2], path)),
                   number(c[3], path)});
  }
  return out;
}

std::vector<RejectRow> ResultStore::read_rejects() const {
  std::vector<RejectRow> out;
  for (const auto& c : read_table(file("rejects.csv"), kRejectsHeader)) out.push_back({c[0], c[1], c[2]});
  return out;
}

std::vector<AmiRow> ResultStore::read_ami_profiles() const {
  const auto path = file("ami_profiles.csv");
  std::vector<AmiRow> out;
  for (const auto& c : read_table(path, kAmiHeader)) {
    out.push_back({c[0], parse_frequency(c[1]), static_cast<int>(number(c[2], path)),
                   static_cast<int>(number(c[3], path)), number(c[4], path)});
  }
  return out;
}

std::vector<SmapeMeanRow> ResultStore::read_smape_mean() const {
  const auto path = file("smape_mean.csv");
  std::vector<SmapeMeanRow> out;
  for (const auto& c : read_table(path, kSmapeMeanHeader)) {
    out.push_back({c[0], parse_frequency(c[1]), c[2], static_cast<int>(number(c[3], path)),
                   number(c[4], path)});
  }
  return out;
}

std::vector<SummaryRow> ResultStore::read_validation_summary() const {
  const auto path = file("validation_summary.csv");
  std::vector<SummaryRow> out;
  for (const auto& c : read_table(path, kSummaryHeader)) {
    out.push_back({parse_frequency(c[0]), c[1], number(c[2], path), number(c[3], path),
                   opt_number(c[4], path)});
  }
  return out;
}

std::vector<TercileTableRow> ResultStore::read_terciles() const {
  const auto path = file("terciles.csv");
  std::vector<TercileTableRow> out;
  for (const auto& c : read_table(path, kTercilesHeader)) {
    out.push_back({parse_frequency(c[0]), c[1], c[2], number(c[3], path)});
  }
  return out;
}

std::vector<StrataTableRow> ResultStore::read_strata() const {
  const auto path = file("strata.csv");
  std::vector<StrataTableRow> out;
  for (const auto& c : read_table(path, kStrataHeader)) {
    out.push_back({parse_frequency(c[0]), c[1], c[2], opt_number(c[3], path)});
  }
  return out;
}

std::vector<TriageRow> ResultStore::read_triage() const {
  std::vector<TriageRow> out;
  for (const auto& c : read_table(file("triage.csv"), kTriageHeader)) {
    out.push_back({c[0], parse_frequency(c[1]), c[2], c[3]});
  }
  return out;
}

std::vector<CoverageRow> ResultStore::read_coverage() const {
  const auto path = file("coverage.csv");
  std::vector<CoverageRow> out;
  for (const auto& c : read_table(path, kCoverageHeader)) {
    out.push_back({parse_frequency(c[0]), static_cast<std::size_t>(number(c[1], path)),
                   static_cast<std::size_t>(number(c[2], path)),
                   static_cast<std::size_t>(number(c[3], path)), number(c[4], path)});
  }
  return out;
}

std::vector<std::pair<Frequency, ami::AmiProfile>> profiles_from_rows(std::span<const AmiRow> rows) {
  std::map<std::pair<int, std::string>, std::pair<Frequency, ami::AmiProfile>> grouped;
  for (const AmiRow& r : rows) {
    auto& [freq, profile] = grouped[{freq_rank(r.frequency), r.series_id}];
    freq = r.frequency;
    profile.series_id = r.series_id;
    profile.entries[r.h] = ami::AmiEntry{r.ami_nats, r.n_eff};
  }
  std::vector<std::pair<Frequency, ami::AmiProfile>> out;
  out.reserve(grouped.size());
  for (auto& [key, value] : grouped) out.push_back(std::move(value));
  return out;
}

}  // namespace forecastability::io
