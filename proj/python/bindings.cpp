#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "forecastability/ami.hpp"
#include "forecastability/analytics.hpp"
#include "forecastability/error.hpp"
#include "forecastability/eval.hpp"
#include "forecastability/gates.hpp"
#include "forecastability/io.hpp"
#include "forecastability/pipeline.hpp"
#include "forecastability/probes.hpp"
#include "forecastability/synth.hpp"

namespace py = pybind11;
using namespace forecastability;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Horizon-specific forecastability from auto-mutual information";

  py::register_exception<Error>(m, "ForecastabilityError", PyExc_RuntimeError);

  py::enum_<Frequency>(m, "Frequency")
      .value("Yearly", Frequency::Yearly)
      .value("Quarterly", Frequency::Quarterly)
      .value("Monthly", Frequency::Monthly)
      .value("Weekly", Frequency::Weekly)
      .value("Daily", Frequency::Daily)
      .value("Hourly", Frequency::Hourly);
  m.def("parse_frequency", &parse_frequency);

  py::class_<FrequencyProfile>(m, "FrequencyProfile")
      .def_readonly("frequency", &FrequencyProfile::frequency)
      .def_readonly("h_max", &FrequencyProfile::h_max)
      .def_readonly("m", &FrequencyProfile::m)
      .def_readonly("n_eff_min", &FrequencyProfile::n_eff_min);
  m.def("profile_for", &profile_for, py::return_value_policy::copy);

  py::enum_<QuantileMethod>(m, "QuantileMethod")
      .value("Linear", QuantileMethod::Linear)
      .value("NearestRank", QuantileMethod::NearestRank);
  py::enum_<TriageStat>(m, "TriageStat").value("Mean", TriageStat::Mean).value("AtHorizon", TriageStat::AtHorizon);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("rolls", &RunConfig::rolls)
      .def_readwrite("roll_step", &RunConfig::roll_step)
      .def_readwrite("k_neighbors", &RunConfig::k_neighbors)
      .def_readwrite("scale_floor_quantile", &RunConfig::scale_floor_quantile)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("quantile_method", &RunConfig::quantile_method)
      .def_readwrite("ksg_jitter", &RunConfig::ksg_jitter)
      .def_readwrite("triage_stat", &RunConfig::triage_stat)
      .def_readwrite("triage_h", &RunConfig::triage_h)
      .def("validate", &RunConfig::validate);

  py::class_<TimeSeries>(m, "TimeSeries")
      .def(py::init<std::string, std::vector<double>, Frequency>(), py::arg("id"), py::arg("values"),
           py::arg("frequency"))
      .def_property_readonly("id", &TimeSeries::id)
      .def_property_readonly("values",
                             [](const TimeSeries& s) { return std::vector<double>(s.values().begin(), s.values().end()); })
      .def_property_readonly("frequency", &TimeSeries::frequency)
      .def("__len__", &TimeSeries::size)
      .def("__eq__", [](const TimeSeries& a, const TimeSeries& b) { return a == b; });

  py::class_<WindowLayout>(m, "WindowLayout")
      .def_readonly("t_total", &WindowLayout::t_total)
      .def_readonly("pool_len", &WindowLayout::pool_len)
      .def_readonly("t_base", &WindowLayout::t_base)
      .def_readonly("origins", &WindowLayout::origins);
  m.def("layout", &layout, py::arg("series_len"), py::arg("profile"), py::arg("config") = RunConfig{});

  m.def("standardize", [](const std::vector<double>& w) { return ami::standardize(w).values; });
  m.def("ksg_mi", [](const std::vector<double>& x, const std::vector<double>& y, int k) { return ami::ksg_mi(x, y, k); },
        py::arg("x"), py::arg("y"), py::arg("k") = 8, py::call_guard<py::gil_scoped_release>());

  py::class_<ami::AmiEntry>(m, "AmiEntry")
      .def_readonly("ami_nats", &ami::AmiEntry::ami_nats)
      .def_readonly("n_eff", &ami::AmiEntry::n_eff);
  py::class_<ami::AmiProfile>(m, "AmiProfile")
      .def_readonly("series_id", &ami::AmiProfile::series_id)
      .def_readonly("entries", &ami::AmiProfile::entries)
      .def_readonly("k_used", &ami::AmiProfile::k_used)
      .def_readonly("base_len", &ami::AmiProfile::base_len)
      .def("__eq__", [](const ami::AmiProfile& a, const ami::AmiProfile& b) { return a == b; });
  m.def("ami_profile", &ami::ami_profile, py::arg("series"), py::arg("layout"), py::arg("profile"),
        py::arg("config") = RunConfig{}, py::call_guard<py::gil_scoped_release>());

  m.def("scale_proxy", [](const std::vector<double>& w, int period) { return gates::scale_proxy(w, period); });
  m.def("scale_floor",
        [](const std::vector<double>& s, double q, QuantileMethod method) { return gates::scale_floor(s, q, method); },
        py::arg("scales"), py::arg("q"), py::arg("method") = QuantileMethod::Linear);

  py::class_<gates::GateReport>(m, "GateReport")
      .def_readonly("series_id", &gates::GateReport::series_id)
      .def_readonly("passed", &gates::GateReport::passed)
      .def_property_readonly("failed_gate",
                             [](const gates::GateReport& r) -> std::optional<std::string> {
                               if (!r.failed_gate) return std::nullopt;
                               return std::string(gates::to_string(*r.failed_gate));
                             })
      .def_readonly("scale0", &gates::GateReport::scale0)
      .def_readonly("reason", &gates::GateReport::reason);
  py::class_<gates::Survivor>(m, "Survivor")
      .def_readonly("series", &gates::Survivor::series)
      .def_readonly("layout", &gates::Survivor::layout)
      .def_readonly("ami", &gates::Survivor::ami)
      .def_readonly("scale0", &gates::Survivor::scale0);
  py::class_<gates::GateResult>(m, "GateResult")
      .def_property_readonly("survivors", [](const gates::GateResult& r) { return r.panel.survivors; })
      .def_property_readonly("scale_floor", [](const gates::GateResult& r) { return r.panel.scale_floor; })
      .def_readonly("reports", &gates::GateResult::reports);
  m.def("run_gates",
        [](const std::vector<TimeSeries>& panel, const FrequencyProfile& profile, const RunConfig& config,
           unsigned threads) { return gates::run_gates(panel, profile, config, threads); },
        py::arg("panel"), py::arg("profile"), py::arg("config") = RunConfig{}, py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  m.def("seasonal_naive",
        [](const std::vector<double>& h, int period, int h_max) { return probes::seasonal_naive(h, period, h_max); });
  m.def(
      "ets_forecast",
      [](const std::vector<double>& history, int period, int h_max) {
        const auto fit = probes::ets_fit_forecast(history, period, h_max);
        py::gil_scoped_acquire gil;
        py::dict d;
        d["forecasts"] = fit.forecasts;
        d["trend"] = std::string(probes::to_string(fit.selected.trend));
        d["seasonal"] = std::string(probes::to_string(fit.selected.seasonal));
        d["aic"] = fit.selected.aic;
        d["fell_back"] = fit.fell_back;
        return d;
      },
      py::arg("history"), py::arg("m"), py::arg("h_max"), py::call_guard<py::gil_scoped_release>());

  m.def("smape", [](const std::vector<double>& a, const std::vector<double>& f) { return eval::smape(a, f); });
  py::class_<eval::EvalRecord>(m, "EvalRecord")
      .def_readonly("series_id", &eval::EvalRecord::series_id)
      .def_readonly("model", &eval::EvalRecord::model)
      .def_readonly("h", &eval::EvalRecord::h)
      .def_readonly("per_origin_smape", &eval::EvalRecord::per_origin_smape)
      .def_readonly("mean_smape", &eval::EvalRecord::mean_smape);
  m.def(
      "rolling_eval",
      [](const TimeSeries& s, const WindowLayout& w, const std::string& model, const FrequencyProfile& p) {
        return eval::rolling_eval(s, w, *probes::make_probe(model), p).records;
      },
      py::arg("series"), py::arg("layout"), py::arg("model"), py::arg("profile"),
      py::call_guard<py::gil_scoped_release>());

  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return analytics::spearman(x, y); });
  m.def("assign_terciles", [](const std::vector<double>& v) {
    std::vector<std::string> out;
    for (auto t : analytics::assign_terciles(v)) out.emplace_back(analytics::to_string(t));
    return out;
  });

  py::enum_<synth::SynthKind>(m, "SynthKind")
      .value("WhiteNoise", synth::SynthKind::WhiteNoise)
      .value("AR1", synth::SynthKind::AR1)
      .value("SeasonalSine", synth::SynthKind::SeasonalSine)
      .value("TrendPlusNoise", synth::SynthKind::TrendPlusNoise);
  py::class_<synth::SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_readwrite("kind", &synth::SynthSpec::kind)
      .def_readwrite("phis", &synth::SynthSpec::phis)
      .def_readwrite("m", &synth::SynthSpec::m)
      .def_readwrite("snr", &synth::SynthSpec::snr)
      .def_readwrite("slope", &synth::SynthSpec::slope)
      .def_readwrite("sigma", &synth::SynthSpec::sigma)
      .def_readwrite("level", &synth::SynthSpec::level)
      .def_readwrite("dependence_scaled_noise", &synth::SynthSpec::dependence_scaled_noise)
      .def_readwrite("length", &synth::SynthSpec::length)
      .def_readwrite("seed", &synth::SynthSpec::seed)
      .def_readwrite("count", &synth::SynthSpec::count)
      .def_readwrite("frequency", &synth::SynthSpec::frequency)
      .def_readwrite("id_prefix", &synth::SynthSpec::id_prefix);
  m.def("generate", &synth::generate);

  m.def(
      "run_all",
      [](const std::vector<std::pair<Frequency, std::vector<TimeSeries>>>& panels, const std::filesystem::path& out,
         const RunConfig& config, const std::vector<std::string>& models, unsigned threads) {
        std::vector<pipeline::FrequencyInput> inputs;
        for (const auto& [f, series] : panels) {
          pipeline::FrequencyInput in{f, {}};
          in.panel.series = series;
          std::sort(in.panel.series.begin(), in.panel.series.end(),
                    [](const TimeSeries& a, const TimeSeries& b) { return a.id() < b.id(); });
          inputs.push_back(std::move(in));
        }
        pipeline::Options opt;
        opt.config = config;
        opt.models = models;
        opt.threads = threads;
        return pipeline::run_all(inputs, opt, io::ResultStore(out)).issues;
      },
      py::arg("panels"), py::arg("out_dir"), py::arg("config") = RunConfig{},
      py::arg("models") = std::vector<std::string>{"seasonal-naive", "ets"}, py::arg("threads") = 0,
      py::call_guard<py::gil_scoped_release>());
}
