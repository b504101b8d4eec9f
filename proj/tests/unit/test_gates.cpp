#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "forecastability/error.hpp"
#include "forecastability/gates.hpp"
#include "forecastability/synth.hpp"

using namespace forecastability;

namespace {

// Order-statistic interpolation written out independently of the library.
double type7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<TimeSeries> ar_panel(std::size_t count, std::size_t length, Frequency f, std::uint64_t seed) {
  synth::SynthSpec spec;
  spec.kind = synth::SynthKind::AR1;
  spec.phis = {0.3, 0.6};
  spec.length = length;
  spec.count = count;
  spec.seed = seed;
  spec.frequency = f;
  return synth::generate(spec);
}

}  // namespace

TEST(ScaleProxy, Examples) {
  EXPECT_DOUBLE_EQ(gates::scale_proxy(std::vector<double>{1, 2, 3, 4}, 1), 1.0);
  EXPECT_DOUBLE_EQ(gates::scale_proxy(std::vector<double>{5, 5, 5, 5}, 1), 0.0);
  const std::vector<double> alt = {1, 0, 1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(gates::scale_proxy(alt, 2), 0.0);
  EXPECT_DOUBLE_EQ(gates::scale_proxy(alt, 1), 1.0);
  try {
    gates::scale_proxy(std::vector<double>{1, 2}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScaleUndefined);
  }
}

TEST(ScaleFloor, Examples) {
  std::vector<double> s(100);
  for (int i = 0; i < 100; ++i) s[i] = i + 1;
  EXPECT_NEAR(gates::scale_floor(s, 0.05), 5.95, 1e-12);
  EXPECT_EQ(gates::scale_floor(std::vector<double>{3.25}, 0.3), 3.25);
  EXPECT_EQ(gates::scale_floor(std::vector<double>(7, 2.0), 0.05), 2.0);
  EXPECT_THROW(gates::scale_floor(std::vector<double>{}, 0.05), Error);
}

TEST(ScaleFloor, MatchesOracleOnRandomInputs) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(1 + rng() % 60);
    for (auto& x : v) x = synth::uniform01(rng) * 10;
    const double q = 0.01 + 0.98 * synth::uniform01(rng);
    EXPECT_NEAR(gates::scale_floor(v, q), type7(v, q), 1e-12);
  }
}

TEST(ScaleFloor, NearestRank) {
  std::vector<double> s(100);
  for (int i = 0; i < 100; ++i) s[i] = i + 1;
  EXPECT_EQ(gates::scale_floor(s, 0.05, QuantileMethod::NearestRank), 5.0);
  EXPECT_EQ(gates::scale_floor(std::vector<double>{4, 1, 3}, 0.5, QuantileMethod::NearestRank), 3.0);
}

TEST(RunGates, ConstantSeriesAllFail) {
  std::vector<TimeSeries> panel;
  for (int i = 0; i < 10; ++i) {
    panel.emplace_back("c" + std::to_string(i), std::vector<double>(120, 3.0 + i), Frequency::Yearly);
  }
  const auto r = gates::run_gates(panel, profile_for(Frequency::Yearly), RunConfig{}, 2);
  EXPECT_TRUE(r.panel.survivors.empty());
  ASSERT_EQ(r.reports.size(), 10u);
  for (const auto& rep : r.reports) {
    EXPECT_FALSE(rep.passed);
    ASSERT_TRUE(rep.failed_gate);
    EXPECT_TRUE(*rep.failed_gate == gates::Gate::ScaleDefined || *rep.failed_gate == gates::Gate::ScaleFloor);
  }
}

TEST(RunGates, LongArPanelFullySurvives) {
  // t_base = 800 - 27 = 773 clears n_eff_min = 100 at h = 18; all scales equal
  // in distribution so only series strictly below the 5% floor drop out.
  const auto panel = ar_panel(40, 800, Frequency::Monthly, 9);
  RunConfig cfg;
  cfg.scale_floor_quantile = 0.05;
  const auto r = gates::run_gates(panel, profile_for(Frequency::Monthly), cfg, 3);
  std::size_t below = 0;
  for (const auto& rep : r.reports) below += rep.scale0 && *rep.scale0 < r.panel.scale_floor;
  EXPECT_EQ(r.panel.survivors.size() + below, panel.size());
  // A nearest-rank floor at the smallest rank is the minimum scale itself.
  cfg.scale_floor_quantile = 1e-9;
  cfg.quantile_method = QuantileMethod::NearestRank;
  const auto all = gates::run_gates(panel, profile_for(Frequency::Monthly), cfg, 3);
  EXPECT_EQ(all.panel.survivors.size(), panel.size());
  for (const auto& s : all.panel.survivors) EXPECT_EQ(s.ami.entries.count(18), 1u);
}

TEST(RunGates, GateOrderAndReasons) {
  std::vector<TimeSeries> panel = ar_panel(20, 120, Frequency::Yearly, 1);
  panel.emplace_back("short", std::vector<double>(15, 1.0), Frequency::Yearly);
  panel.emplace_back("tiny-scale", std::vector<double>(120, 0.0), Frequency::Yearly);
  {
    std::vector<double> v(120);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1e-9 * static_cast<double>(i % 2);
    panel.emplace_back("small", v, Frequency::Yearly);
  }
  {
    const auto one = ar_panel(1, 35 + 15, Frequency::Yearly, 2);
    const auto src = one[0].values();
    panel.emplace_back("gate4", std::vector<double>(src.begin(), src.end()), Frequency::Yearly);
  }
  const auto r = gates::run_gates(panel, profile_for(Frequency::Yearly), RunConfig{}, 1);
  auto find = [&](const std::string& id) {
    return *std::find_if(r.reports.begin(), r.reports.end(), [&](const auto& x) { return x.series_id == id; });
  };
  EXPECT_EQ(*find("short").failed_gate, gates::Gate::RollingFeasibility);
  EXPECT_FALSE(find("short").scale0.has_value());
  EXPECT_EQ(*find("tiny-scale").failed_gate, gates::Gate::ScaleDefined);
  EXPECT_EQ(*find("small").failed_gate, gates::Gate::ScaleFloor);
  EXPECT_EQ(*find("gate4").failed_gate, gates::Gate::AmiAtHmax);
  EXPECT_TRUE(std::is_sorted(r.reports.begin(), r.reports.end(),
                             [](const auto& a, const auto& b) { return a.series_id < b.series_id; }));
}

TEST(RunGates, FloorIgnoresInfeasibleSeries) {
  std::vector<TimeSeries> panel = ar_panel(30, 120, Frequency::Yearly, 5);
  panel.emplace_back("zz-short", std::vector<double>{1, 2, 3}, Frequency::Yearly);
  const auto a = gates::run_gates(panel, profile_for(Frequency::Yearly), RunConfig{}, 2);
  panel.back() = TimeSeries("zz-short", std::vector<double>{1000, -4000, 9}, Frequency::Yearly);
  const auto b = gates::run_gates(panel, profile_for(Frequency::Yearly), RunConfig{}, 2);
  EXPECT_EQ(a.panel.scale_floor, b.panel.scale_floor);
}

TEST(RunGates, InvariantToInputOrderAndThreads) {
  std::vector<TimeSeries> panel = ar_panel(50, 140, Frequency::Yearly, 8);
  const auto a = gates::run_gates(panel, profile_for(Frequency::Yearly), RunConfig{}, 1);
  std::mt19937_64 rng(1);
  std::shuffle(panel.begin(), panel.end(), rng);
  const auto b = gates::run_gates(panel, profile_for(Frequency::Yearly), RunConfig{}, 4);
  ASSERT_EQ(a.panel.survivors.size(), b.panel.survivors.size());
  EXPECT_EQ(a.panel.scale_floor, b.panel.scale_floor);
  for (std::size_t i = 0; i < a.panel.survivors.size(); ++i) {
    EXPECT_EQ(a.panel.survivors[i].series.id(), b.panel.survivors[i].series.id());
    EXPECT_EQ(a.panel.survivors[i].ami, b.panel.survivors[i].ami);
  }
}
