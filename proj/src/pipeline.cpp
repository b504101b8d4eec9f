#include "forecastability/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "forecastability/analytics.hpp"
#include "forecastability/eval.hpp"
#include "forecastability/log.hpp"
#include "forecastability/parallel.hpp"
#include "forecastability/probes.hpp"

namespace forecastability::pipeline {

namespace {

std::map<std::string, const TimeSeries*> index_by_id(const io::LoadedPanel& panel) {
  std::map<std::string, const TimeSeries*> out;
  for (const TimeSeries& s : panel.series) out[s.id()] = &s;
  return out;
}

// Survivors listed in survivors.csv, resolved against the loaded panels.
struct SurvivorRef {
  const TimeSeries* series;
  WindowLayout layout;
};

std::map<Frequency, std::vector<SurvivorRef>> resolve_survivors(
    const std::vector<FrequencyInput>& inputs, const Options& options, const io::ResultStore& store) {
  std::map<Frequency, std::map<std::string, const TimeSeries*>> lookup;
  for (const auto& in : inputs) lookup[in.frequency] = index_by_id(in.panel);
  std::map<Frequency, std::vector<SurvivorRef>> out;
  for (const io::SurvivorRow& row : store.read_survivors()) {
    const auto f = lookup.find(row.frequency);
    if (f == lookup.end()) continue;
    const auto it = f->second.find(row.series_id);
    if (it == f->second.end()) {
      throw Error(ErrorCode::UsageError, "survivor '" + row.series_id +
                                             "' is not in the input panel; rerun the gates stage");
    }
    WindowLayout w = layout(it->second->size(), profile_for(row.frequency), options.config);
    if (w.t_base != row.t_base) {
      throw Error(ErrorCode::UsageError, "survivor '" + row.series_id +
                                             "' has a different base length than the input; rerun gates");
    }
    out[row.frequency].push_back(SurvivorRef{it->second, std::move(w)});
  }
  return out;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

StageReport stage_gates(const std::vector<FrequencyInput>& inputs, const Options& options,
                        const io::ResultStore& store, GateResults* results) {
  StageReport report;
  std::vector<io::SurvivorRow> survivors;
  std::vector<io::RejectRow> rejects;
  std::vector<io::CoverageRow> coverage;
  for (const FrequencyInput& in : inputs) {
    const FrequencyProfile& profile = profile_for(in.frequency);
    gates::GateResult result =
        gates::run_gates(in.panel.series, profile, options.config, options.threads);
    for (const auto& r : in.panel.rejects) rejects.push_back({r.series_id, "Parse", r.reason});
    for (const auto& r : result.reports) {
      if (!r.passed) rejects.push_back({r.series_id, std::string(gates::to_string(*r.failed_gate)), r.reason});
    }
    for (const auto& s : result.panel.survivors) {
      survivors.push_back({s.series.id(), in.frequency, s.layout.t_base, s.scale0});
    }
    coverage.push_back({in.frequency, in.panel.series.size() + in.panel.rejects.size(),
                        in.panel.rejects.size(), result.panel.survivors.size(), result.panel.scale_floor});
    log::info(std::string(to_string(in.frequency)) + ": " +
              std::to_string(result.panel.survivors.size()) + " of " +
              std::to_string(in.panel.series.size()) + " series survive the gates");
    if (result.panel.survivors.empty()) {
      report.issues.push_back(std::string(to_string(in.frequency)) + ": no series survive the gates");
    }
    if (results) (*results)[in.frequency] = std::move(result);
  }
  store.write_survivors(std::move(survivors));
  store.write_rejects(std::move(rejects));
  store.write_coverage(std::move(coverage));
  return report;
}

StageReport stage_ami(const std::vector<FrequencyInput>& inputs, const Options& options,
                      const io::ResultStore& store, const GateResults* gated) {
  std::vector<io::AmiRow> rows;
  auto emit = [&](Frequency f, const ami::AmiProfile& p) {
    for (const auto& [h, e] : p.entries) rows.push_back({p.series_id, f, h, e.n_eff, e.ami_nats});
  };
  if (gated) {
    for (const auto& [f, result] : *gated) {
      for (const auto& s : result.panel.survivors) emit(f, s.ami);
    }
  } else {
    for (const auto& [f, refs] : resolve_survivors(inputs, options, store)) {
      std::vector<ami::AmiProfile> profiles(refs.size());
      parallel_for(refs.size(), options.threads, [&](std::size_t i) {
        profiles[i] = ami::ami_profile(*refs[i].series, refs[i].layout, profile_for(f), options.config);
      });
      for (const auto& p : profiles) emit(f, p);
    }
  }
  store.write_ami_profiles(std::move(rows));
  return {};
}

StageReport stage_evaluate(const std::vector<FrequencyInput>& inputs, const Options& options,
                           const io::ResultStore& store) {
  StageReport report;
  std::vector<std::unique_ptr<probes::ProbeModel>> models;
  for (const auto& name : options.models) models.push_back(probes::make_probe(name));

  std::vector<io::SmapeRow> rows;
  std::vector<io::SmapeMeanRow> mean_rows;
  for (const auto& [f, refs] : resolve_survivors(inputs, options, store)) {
    const FrequencyProfile& profile = profile_for(f);
    const std::size_t tasks = refs.size() * models.size();
    std::vector<eval::EvalOutcome> outcomes(tasks);
    parallel_for(tasks, options.threads, [&](std::size_t t) {
      const SurvivorRef& ref = refs[t / models.size()];
      outcomes[t] = eval::rolling_eval(*ref.series, ref.layout, *models[t % models.size()], profile);
    });
    for (std::size_t t = 0; t < tasks; ++t) {
      if (outcomes[t].failed_origins > 0) {
        report.issues.push_back(std::string(to_string(f)) + "/" +
                                std::string(models[t % models.size()]->name()) + ": '" +
                                refs[t / models.size()].series->id() + "' voided by a probe failure");
      }
      for (const auto& rec : outcomes[t].records) {
        for (std::size_t j = 0; j < rec.per_origin_smape.size(); ++j) {
          rows.push_back({rec.series_id, f, rec.model, rec.h, static_cast<int>(j + 1), rec.per_origin_smape[j]});
        }
        mean_rows.push_back({rec.series_id, f, rec.model, rec.h, rec.mean_smape});
      }
    }
  }
  store.write_smape(std::move(rows));
  store.write_smape_mean(std::move(mean_rows));
  return report;
}

StageReport stage_validate(const Options& options, const io::ResultStore& store) {
  (void)options;
  StageReport report;
  const auto survivors = store.read_survivors();
  const auto ami_rows = store.read_ami_profiles();
  const auto smape_rows = store.read_smape_mean();

  // (frequency, id) -> outcome skeleton with t_base and AMI.
  std::map<std::pair<Frequency, std::string>, analytics::SeriesOutcome> base;
  for (const auto& s : survivors) {
    auto& o = base[{s.frequency, s.series_id}];
    o.series_id = s.series_id;
    o.t_base = s.t_base;
  }
  for (const auto& a : ami_rows) {
    const auto it = base.find({a.frequency, a.series_id});
    if (it != base.end()) it->second.ami[a.h] = a.ami_nats;
  }
  std::map<std::pair<Frequency, std::string>, std::map<std::string, std::map<int, double>>> errors;
  std::set<std::pair<Frequency, std::string>> cells;
  for (const auto& r : smape_rows) {
    errors[{r.frequency, r.series_id}][r.model][r.h] = r.mean_smape_pct;
    cells.insert({r.frequency, r.model});
  }

  std::vector<io::ValidationRow> per_h;
  std::vector<io::SummaryRow> summaries;
  std::vector<io::TercileTableRow> terciles;
  std::vector<io::StrataTableRow> strata;
  for (const auto& [f, model] : cells) {
    std::vector<analytics::SeriesOutcome> outcomes;
    for (const auto& [key, skeleton] : base) {
      if (key.first != f) continue;
      analytics::SeriesOutcome o = skeleton;
      const auto e = errors.find(key);
      if (e != errors.end()) {
        const auto m = e->second.find(model);
        if (m != e->second.end()) o.mean_smape = m->second;
      }
      outcomes.push_back(std::move(o));
    }
    const std::string cell = std::string(to_string(f)) + "/" + model;
    try {
      const auto summary = analytics::validate(f, model, outcomes);
      for (const auto& r : summary.per_h) per_h.push_back({f, model, r.h, r.rho, r.n_series});
      summaries.push_back({f, model, summary.mean_rho, summary.median_rho, summary.pooled_rho});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData) throw;
      report.issues.push_back(cell + ": " + e.what());
      continue;
    }
    try {
      for (const auto& t : analytics::tercile_analysis(outcomes)) {
        terciles.push_back({f, model, std::string(analytics::to_string(t.tercile)), t.median_smape});
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData) throw;
      report.issues.push_back(cell + " terciles: " + e.what());
    }
    for (const auto& s : analytics::length_strata(f, model, outcomes)) {
      strata.push_back({f, model, std::string(analytics::length_label(s.length_tercile)), s.rho});
    }
  }
  store.write_validation(per_h);
  store.write_heatmap(per_h);
  store.write_validation_summary(std::move(summaries));
  store.write_terciles(std::move(terciles));
  store.write_strata(std::move(strata));
  return report;
}

StageReport stage_triage(const Options& options, const io::ResultStore& store) {
  const auto rows = store.read_ami_profiles();
  const auto grouped = io::profiles_from_rows(rows);
  std::map<Frequency, std::vector<ami::AmiProfile>> by_freq;
  for (const auto& [f, p] : grouped) by_freq[f].push_back(p);
  std::vector<io::TriageRow> out;
  for (const auto& [f, profiles] : by_freq) {
    for (const auto& label :
         analytics::triage(profiles, options.config.triage_stat, options.config.triage_h)) {
      out.push_back({label.series_id, f, std::string(analytics::to_string(label.ami_tercile)),
                     std::string(analytics::to_string(label.action))});
    }
  }
  store.write_triage(std::move(out));
  return {};
}

StageReport stage_report(const io::ResultStore& store) {
  const auto coverage = store.read_coverage();
  const auto summaries = store.read_validation_summary();
  const auto terciles = store.read_terciles();
  const auto strata = store.read_strata();

  std::set<std::string> model_set;
  for (const auto& s : summaries) model_set.insert(s.model);
  const std::vector<std::string> models(model_set.begin(), model_set.end());

  std::ostringstream md;
  md << "# Forecastability report\n\n";
  md << "## Panel coverage\n\n";
  md << "| Frequency | Series | H_max | m | n_eff min | Parse rejects | Survivors | Scale floor |\n";
  md << "|---|---:|---:|---:|---:|---:|---:|---:|\n";
  std::size_t total_series = 0, total_survivors = 0;
  for (const auto& c : coverage) {
    const auto& p = profile_for(c.frequency);
    md << "| " << to_string(c.frequency) << " | " << c.series << " | " << p.h_max << " | " << p.m << " | "
       << p.n_eff_min << " | " << c.parse_rejects << " | " << c.survivors << " | "
       << io::format_double(c.scale_floor) << " |\n";
    total_series += c.series;
    total_survivors += c.survivors;
  }
  md << "| **Total** | " << total_series << " | | | | | " << total_survivors << " | |\n\n";

  auto find_summary = [&](Frequency f, const std::string& m) -> const io::SummaryRow* {
    for (const auto& s : summaries) {
      if (s.frequency == f && s.model == m) return &s;
    }
    return nullptr;
  };
  md << "## Mean Spearman rho (AMI vs mean sMAPE, per horizon then averaged)\n\n| Frequency |";
  for (const auto& m : models) md << " " << m << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < models.size(); ++i) md << "---:|";
  md << "\n";
  for (Frequency f : kAllFrequencies) {
    bool any = false;
    for (const auto& m : models) any = any || find_summary(f, m);
    if (!any) continue;
    md << "| " << to_string(f) << " |";
    for (const auto& m : models) {
      const auto* s = find_summary(f, m);
      md << " " << (s ? fixed(s->mean_rho) : "") << " |";
    }
    md << "\n";
  }
  md << "\n## Robustness: median over horizons / pooled over (series, h)\n\n";
  md << "| Frequency | Model | Mean | Median | Pooled |\n|---|---|---:|---:|---:|\n";
  for (const auto& s : summaries) {
    md << "| " << to_string(s.frequency) << " | " << s.model << " | " << fixed(s.mean_rho) << " | "
       << fixed(s.median_rho) << " | " << (s.pooled_rho ? fixed(*s.pooled_rho) : "NA") << " |\n";
  }

  md << "\n## Median sMAPE (%) by AMI tercile\n\n| Frequency |";
  for (const auto& m : models) md << " " << m << " Low | " << m << " Mid | " << m << " High |";
  md << "\n|---|";
  for (std::size_t i = 0; i < 3 * models.size(); ++i) md << "---:|";
  md << "\n";
  for (Frequency f : kAllFrequencies) {
    bool any = false;
    for (const auto& t : terciles) any = any || t.frequency == f;
    if (!any) continue;
    md << "| " << to_string(f) << " |";
    for (const auto& m : models) {
      for (const char* label : {"Low", "Mid", "High"}) {
        std::string cell;
        for (const auto& t : terciles) {
          if (t.frequency == f && t.model == m && t.tercile == label) cell = fixed(t.median_smape_pct);
        }
        md << " " << cell << " |";
      }
    }
    md << "\n";
  }

  md << "\n## Mean rho by training-length tercile\n\n";
  md << "| Frequency | Model | Short | Medium | Long |\n|---|---|---:|---:|---:|\n";
  for (Frequency f : kAllFrequencies) {
    for (const auto& m : models) {
      bool any = false;
      std::map<std::string, std::string> cells;
      for (const auto& s : strata) {
        if (s.frequency == f && s.model == m) {
          any = true;
          cells[s.tercile_by_length] = s.rho ? fixed(*s.rho) : "NA";
        }
      }
      if (!any) continue;
      md << "| " << to_string(f) << " | " << m << " | " << cells["Short"] << " | " << cells["Medium"]
         << " | " << cells["Long"] << " |\n";
    }
  }

  std::ofstream out(store.file("report.md"), std::ios::trunc);
  out << md.str();
  if (!out) throw Error(ErrorCode::IoError, "cannot write report.md");
  return {};
}

StageReport run_all(const std::vector<FrequencyInput>& inputs, const Options& options,
                    const io::ResultStore& store) {
  StageReport report;
  GateResults gated;
  report.merge(stage_gates(inputs, options, store, &gated));
  report.merge(stage_ami(inputs, options, store, &gated));
  gated.clear();
  report.merge(stage_evaluate(inputs, options, store));
  report.merge(stage_validate(options, store));
  report.merge(stage_triage(options, store));
  report.merge(stage_report(store));
  return report;
}

}  // namespace forecastability::pipeline
