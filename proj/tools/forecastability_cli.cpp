#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "forecastability/error.hpp"
#include "forecastability/io.hpp"
#include "forecastability/log.hpp"
#include "forecastability/pipeline.hpp"
#include "forecastability/synth.hpp"

namespace fs = std::filesystem;
using namespace forecastability;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kFailure = 1, kPartial = 2 };

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileError, "cannot open '" + path.string() + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof(byte), "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

struct InputArgs {
  std::string format = "m4";
  std::vector<std::string> frequencies;
  std::vector<std::string> inputs;
  std::vector<std::string> test_inputs;
};

struct ConfigArgs {
  RunConfig config;
  std::string quantile_method = "linear";
  std::string triage_stat = "mean";
  std::vector<std::string> models = {"seasonal-naive", "ets"};
  unsigned threads = 0;
};

void add_input_options(CLI::App& cmd, InputArgs& in) {
  cmd.add_option("--format", in.format, "Panel format: m4 (wide) or long")->capture_default_str();
  cmd.add_option("--frequency", in.frequencies, "Frequency of each --input (repeat in the same order)")
      ->required();
  cmd.add_option("--input", in.inputs, "Training panel CSV (repeatable)")->required();
  cmd.add_option("--test-input", in.test_inputs,
                 "Test panel appended to the matching --input series (train + test concatenation)");
}

void add_config_options(CLI::App& cmd, ConfigArgs& c) {
  cmd.add_option("--rolls", c.config.rolls, "Rolling origins")->capture_default_str();
  cmd.add_option("--roll-step", c.config.roll_step, "Step between origins")->capture_default_str();
  cmd.add_option("--k", c.config.k_neighbors, "KSG neighbours")->capture_default_str();
  cmd.add_option("--scale-q", c.config.scale_floor_quantile, "Scale floor quantile")->capture_default_str();
  cmd.add_option("--quantile-method", c.quantile_method, "linear or nearest-rank")
      ->check(CLI::IsMember({"linear", "nearest-rank"}))
      ->capture_default_str();
  cmd.add_option("--seed", c.config.seed, "Seed for randomized components")->capture_default_str();
  cmd.add_option("--ksg-jitter", c.config.ksg_jitter,
                 "Std. dev. of deterministic noise added before KSG (0 = off)")
      ->capture_default_str();
  cmd.add_option("--threads", c.threads, "Worker threads (0 = all cores)")
      ->envname("FORECASTABILITY_THREADS");
}

void add_model_options(CLI::App& cmd, ConfigArgs& c) {
  cmd.add_option("--models", c.models, "Probe models")
      ->delimiter(',')
      ->check(CLI::IsMember({"seasonal-naive", "ets"}))
      ->capture_default_str();
}

void add_triage_options(CLI::App& cmd, ConfigArgs& c) {
  cmd.add_option("--triage-stat", c.triage_stat, "Per-series AMI summary: mean or at-h")
      ->check(CLI::IsMember({"mean", "at-h"}))
      ->capture_default_str();
  cmd.add_option("--triage-h", c.config.triage_h, "Horizon used by --triage-stat at-h")->capture_default_str();
}

pipeline::Options resolve_options(const ConfigArgs& c) {
  pipeline::Options opt;
  opt.config = c.config;
  opt.config.quantile_method = c.quantile_method == "nearest-rank" ? QuantileMethod::NearestRank
                                                                  : QuantileMethod::Linear;
  opt.config.triage_stat = c.triage_stat == "at-h" ? TriageStat::AtHorizon : TriageStat::Mean;
  opt.config.validate();
  opt.models = c.models;
  opt.threads = c.threads;
  return opt;
}

std::vector<pipeline::FrequencyInput> load_inputs(const InputArgs& in, json& manifest_inputs) {
  if (in.frequencies.size() != in.inputs.size()) {
    throw Error(ErrorCode::UsageError, "give one --frequency per --input");
  }
  if (!in.test_inputs.empty() && in.test_inputs.size() != in.inputs.size()) {
    throw Error(ErrorCode::UsageError, "give one --test-input per --input or none");
  }
  const io::PanelFormat format = io::parse_format(in.format);
  std::vector<pipeline::FrequencyInput> out;
  for (std::size_t i = 0; i < in.inputs.size(); ++i) {
    const Frequency f = parse_frequency(in.frequencies[i]);
    for (const auto& prior : out) {
      if (prior.frequency == f) {
        throw Error(ErrorCode::UsageError, "frequency " + std::string(to_string(f)) + " given twice");
      }
    }
    io::LoadedPanel panel = io::load_panel({in.inputs[i], format, f});
    json entry = {{"frequency", to_string(f)},
                  {"format", io::to_string(format)},
                  {"path", in.inputs[i]},
                  {"sha256", sha256_file(in.inputs[i])}};
    if (!in.test_inputs.empty()) {
      const io::LoadedPanel test = io::load_panel({in.test_inputs[i], format, f});
      panel = io::concatenate(panel, test);
      entry["test_path"] = in.test_inputs[i];
      entry["test_sha256"] = sha256_file(in.test_inputs[i]);
    }
    log::info(std::string(to_string(f)) + ": loaded " + std::to_string(panel.series.size()) + " series, " +
              std::to_string(panel.rejects.size()) + " rejected while parsing");
    for (const auto& r : panel.rejects) log::warn("dropped '" + r.series_id + "': " + r.reason);
    manifest_inputs.push_back(std::move(entry));
    out.push_back({f, std::move(panel)});
  }
  return out;
}

json config_json(const pipeline::Options& opt) {
  const RunConfig& c = opt.config;
  return {{"rolls", c.rolls},
          {"roll_step", c.roll_step},
          {"k_neighbors", c.k_neighbors},
          {"scale_floor_quantile", c.scale_floor_quantile},
          {"quantile_method", c.quantile_method == QuantileMethod::Linear ? "linear" : "nearest-rank"},
          {"seed", c.seed},
          {"ksg_jitter", c.ksg_jitter},
          {"triage_stat", c.triage_stat == TriageStat::Mean ? "mean" : "at-h"},
          {"triage_h", c.triage_h},
          {"models", opt.models}};
}

void write_manifest(const fs::path& path, const std::string& subcommand, json config, json inputs) {
  json m = {{"tool", "forecastability"},
            {"version", kVersion},
            {"subcommand", subcommand},
            {"config", std::move(config)},
            {"inputs", inputs.is_null() ? json::array() : std::move(inputs)}};
  std::ofstream out(path, std::ios::trunc);
  out << m.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Horizon-specific forecastability diagnostics from auto-mutual information"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Progress messages on standard error");
  app.add_flag("-q,--quiet", quiet, "Errors only");

  InputArgs in;
  ConfigArgs cfg;
  std::string out_dir;

  struct Stage {
    std::string name;
    bool inputs;
    bool models;
    bool triage;
  };
  const std::vector<Stage> stages = {
      {"gates", true, false, false},     {"ami", true, false, false},
      {"evaluate", true, true, false},   {"validate", false, false, false},
      {"triage", false, false, true},    {"report", false, false, false},
      {"run-all", true, true, true},
  };
  const std::map<std::string, std::string> help = {
      {"gates", "Apply the feasibility gates; writes survivors, rejects and coverage"},
      {"ami", "AMI profiles of the gate survivors"},
      {"evaluate", "Rolling-origin sMAPE of the probe models on the survivors"},
      {"validate", "Spearman validation, terciles, length strata and heatmap"},
      {"triage", "AMI-tercile triage labels"},
      {"report", "Markdown summary of the result tables"},
      {"run-all", "gates, ami, evaluate, validate, triage and report in order"},
  };
  std::map<std::string, CLI::App*> commands;
  for (const Stage& s : stages) {
    CLI::App* cmd = app.add_subcommand(s.name, help.at(s.name));
    if (s.inputs) add_input_options(*cmd, in);
    add_config_options(*cmd, cfg);
    if (s.models) add_model_options(*cmd, cfg);
    if (s.triage) add_triage_options(*cmd, cfg);
    cmd->add_option("--out", out_dir, "Output directory")->required();
    commands[s.name] = cmd;
  }

  synth::SynthSpec spec;
  std::string kind = "white-noise", freq = "monthly", synth_out;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a reproducible synthetic panel as long CSV");
  synth_cmd->add_option("--kind", kind, "white-noise, ar1, seasonal-sine or trend")
      ->check(CLI::IsMember({"white-noise", "ar1", "seasonal-sine", "trend"}))
      ->capture_default_str();
  synth_cmd->add_option("--phi", spec.phis, "AR(1) coefficient; repeat to cycle over several");
  synth_cmd->add_option("--len", spec.length, "Series length")->capture_default_str();
  synth_cmd->add_option("--count", spec.count, "Number of series")->capture_default_str();
  synth_cmd->add_option("--seed", spec.seed, "Panel seed")->capture_default_str();
  synth_cmd->add_option("--m", spec.m, "Seasonal period of seasonal-sine")->capture_default_str();
  synth_cmd->add_option("--snr", spec.snr, "Signal-to-noise variance ratio")->capture_default_str();
  synth_cmd->add_option("--slope", spec.slope, "Slope of trend")->capture_default_str();
  synth_cmd->add_option("--sigma", spec.sigma, "Innovation standard deviation of ar1")->capture_default_str();
  synth_cmd->add_option("--level", spec.level, "Constant added to every value")->capture_default_str();
  synth_cmd->add_flag("--dependence-scaled-noise", spec.dependence_scaled_noise,
                      "Scale ar1 innovations by (1 - phi^2)");
  synth_cmd->add_option("--frequency", freq, "Frequency tag (ids only; the CSV carries no tag)")
      ->capture_default_str();
  synth_cmd->add_option("--id-prefix", spec.id_prefix, "Series id prefix")->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFailure;
  }
  log::set_level(quiet ? log::Level::Error : verbose ? log::Level::Info : log::Level::Warning);

  try {
    if (synth_cmd->parsed()) {
      spec.kind = synth::parse_kind(kind);
      spec.frequency = parse_frequency(freq);
      const auto panel = synth::generate(spec);
      const fs::path path(synth_out);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      io::write_long(path, panel);
      json config = {{"kind", kind},           {"phis", spec.phis},
                     {"m", spec.m},            {"snr", spec.snr},
                     {"slope", spec.slope},    {"sigma", spec.sigma},
                     {"level", spec.level},    {"dependence_scaled_noise", spec.dependence_scaled_noise},
                     {"length", spec.length},  {"count", spec.count},
                     {"seed", spec.seed},      {"frequency", to_string(spec.frequency)},
                     {"id_prefix", spec.id_prefix}};
      json outputs = json::array({{{"path", synth_out}, {"sha256", sha256_file(path)}}});
      write_manifest(fs::path(synth_out + ".manifest.json"), "synth", config, outputs);
      return kOk;
    }

    std::string name;
    for (const auto& [n, cmd] : commands) {
      if (cmd->parsed()) name = n;
    }
    const pipeline::Options opt = resolve_options(cfg);
    const io::ResultStore store(out_dir);
    json inputs = json::array();
    std::vector<pipeline::FrequencyInput> panels;
    if (commands[name]->get_option_no_throw("--input") != nullptr) panels = load_inputs(in, inputs);

    pipeline::StageReport report;
    if (name == "gates") report = pipeline::stage_gates(panels, opt, store);
    if (name == "ami") report = pipeline::stage_ami(panels, opt, store);
    if (name == "evaluate") report = pipeline::stage_evaluate(panels, opt, store);
    if (name == "validate") report = pipeline::stage_validate(opt, store);
    if (name == "triage") report = pipeline::stage_triage(opt, store);
    if (name == "report") report = pipeline::stage_report(store);
    if (name == "run-all") report = pipeline::run_all(panels, opt, store);
    write_manifest(store.file("run_manifest.json"), name, config_json(opt), inputs);

    for (const auto& issue : report.issues) log::warn(issue);
    return report.partial() ? kPartial : kOk;
  } catch (const Error& e) {
    log::error(e.what());
    return kFailure;
  } catch (const std::exception& e) {
    log::error(std::string("unexpected failure: ") + e.what());
    return kFailure;
  }
}
