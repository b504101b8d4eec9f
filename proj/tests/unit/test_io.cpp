#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "forecastability/error.hpp"
#include "forecastability/io.hpp"
#include "forecastability/synth.hpp"

using namespace forecastability;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("forecastability_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::UsageError;
}

}  // namespace

TEST(LoadPanel, WideRowWithTrailingEmpties) {
  const auto dir = scratch("wide");
  const auto p = write_file(dir, "a.csv", "V1,V2,V3,V4,V5\nY1,5.0,6.0,7.0,,\n\"Y2\",1,2,3,4\n");
  const auto panel = io::load_panel({p, io::PanelFormat::M4Wide, Frequency::Yearly});
  ASSERT_EQ(panel.series.size(), 2u);
  EXPECT_EQ(panel.series[0].id(), "Y1");
  EXPECT_EQ(std::vector<double>(panel.series[0].values().begin(), panel.series[0].values().end()),
            (std::vector<double>{5, 6, 7}));
  EXPECT_EQ(panel.series[1].size(), 4u);
  EXPECT_TRUE(panel.rejects.empty());
}

TEST(LoadPanel, WideWithoutHeaderAndRejects) {
  const auto dir = scratch("wide2");
  const auto p = write_file(dir, "a.csv", "A,1,2\nB,1,,3\nC,1,x\nD,1,inf\nE,4\n");
  const auto panel = io::load_panel({p, io::PanelFormat::M4Wide, Frequency::Daily});
  ASSERT_EQ(panel.series.size(), 2u);
  EXPECT_EQ(panel.series[0].id(), "A");
  EXPECT_EQ(panel.series[1].id(), "E");
  EXPECT_EQ(panel.series[1].frequency(), Frequency::Daily);
  ASSERT_EQ(panel.rejects.size(), 3u);
  EXPECT_EQ(panel.rejects[0].series_id, "B");
}

TEST(LoadPanel, Long) {
  const auto dir = scratch("long");
  const auto p = write_file(dir, "a.csv", "series_id,step,value\ns1,1,2.0\ns1,2,3.0\ns0,1,9\n");
  const auto panel = io::load_panel({p, io::PanelFormat::Long, Frequency::Monthly});
  ASSERT_EQ(panel.series.size(), 2u);
  EXPECT_EQ(panel.series[0].id(), "s0");
  EXPECT_EQ(std::vector<double>(panel.series[1].values().begin(), panel.series[1].values().end()),
            (std::vector<double>{2, 3}));
  const auto gap = write_file(dir, "b.csv", "s1,1,2.0\ns1,3,3.0\ns2,1,1\n");
  const auto g = io::load_panel({gap, io::PanelFormat::Long, Frequency::Monthly});
  EXPECT_EQ(g.series.size(), 1u);
  EXPECT_EQ(g.rejects.size(), 1u);
}

TEST(LoadPanel, Errors) {
  const auto dir = scratch("errors");
  EXPECT_EQ(code_of([&] { io::load_panel({dir / "missing.csv", io::PanelFormat::Long, Frequency::Yearly}); }),
            ErrorCode::FileError);
  const auto empty = write_file(dir, "e.csv", "series_id,step,value\n");
  EXPECT_EQ(code_of([&] { io::load_panel({empty, io::PanelFormat::Long, Frequency::Yearly}); }),
            ErrorCode::EmptyPanel);
  const auto bad = write_file(dir, "b.csv", "s1,1\n");
  EXPECT_EQ(code_of([&] { io::load_panel({bad, io::PanelFormat::Long, Frequency::Yearly}); }),
            ErrorCode::FormatError);
}

TEST(LoadPanel, LongRoundTrip) {
  synth::SynthSpec spec;
  spec.kind = synth::SynthKind::AR1;
  spec.phis = {0.3, 0.9};
  spec.length = 37;
  spec.count = 11;
  spec.frequency = Frequency::Quarterly;
  const auto panel = synth::generate(spec);
  const auto dir = scratch("roundtrip");
  io::write_long(dir / "p.csv", panel);
  const auto back = io::load_panel({dir / "p.csv", io::PanelFormat::Long, Frequency::Quarterly});
  EXPECT_EQ(back.series, panel);
}

TEST(Concatenate, AppendsMatchingIds) {
  io::LoadedPanel head, tail;
  head.series = {TimeSeries("a", {1, 2}, Frequency::Yearly), TimeSeries("b", {5}, Frequency::Yearly)};
  tail.series = {TimeSeries("a", {3}, Frequency::Yearly)};
  const auto out = io::concatenate(head, tail);
  ASSERT_EQ(out.series.size(), 2u);
  EXPECT_EQ(out.series[0], TimeSeries("a", {1, 2, 3}, Frequency::Yearly));
  EXPECT_EQ(out.series[1], TimeSeries("b", {5}, Frequency::Yearly));
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e21, 66.66666666666667}) {
    EXPECT_EQ(*io::parse_double(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(NAN), "NA");
  EXPECT_FALSE(io::parse_double("abc"));
}

TEST(ResultStore, HeadersAndRows) {
  const auto dir = scratch("store");
  io::ResultStore store(dir / "out");
  store.write_validation_summary({});
  EXPECT_EQ(slurp(dir / "out" / "validation_summary.csv"), "frequency,model,mean_rho,median_rho,pooled_rho\n");

  std::vector<io::AmiRow> rows;
  for (int h = 6; h >= 1; --h) rows.push_back({"Y1", Frequency::Yearly, h, 40 - h, 0.1 * h});
  store.write_ami_profiles(rows);
  const std::string text = slurp(dir / "out" / "ami_profiles.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  EXPECT_EQ(text.substr(0, text.find('\n')), "series_id,frequency,h,n_eff,ami_nats");
  EXPECT_NE(text.find("Y1,Yearly,1,39,0.1\n"), std::string::npos);
  const auto back = store.read_ami_profiles();
  ASSERT_EQ(back.size(), 6u);
  EXPECT_EQ(back[0].h, 1);
  EXPECT_EQ(back[5].ami_nats, 0.1 * 6);

  store.write_survivors({{"b", Frequency::Monthly, 100, 2.5}, {"a", Frequency::Yearly, 20, 1.0}});
  EXPECT_EQ(slurp(dir / "out" / "survivors.csv"),
            "series_id,frequency,t_base,scale0\na,Yearly,20,1\nb,Monthly,100,2.5\n");

  store.write_strata({{Frequency::Weekly, "ets", "Long", std::nullopt}});
  const auto strata = store.read_strata();
  ASSERT_EQ(strata.size(), 1u);
  EXPECT_FALSE(strata[0].rho.has_value());
}

TEST(ResultStore, MissingFileNamesIt) {
  const auto dir = scratch("missing");
  io::ResultStore store(dir);
  try {
    store.read_smape_mean();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UsageError);
    EXPECT_NE(std::string(e.what()).find("smape_mean.csv"), std::string::npos);
  }
}

TEST(ResultStore, HeaderMismatch) {
  const auto dir = scratch("mismatch");
  write_file(dir, "triage.csv", "id,tercile\n");
  io::ResultStore store(dir);
  EXPECT_EQ(code_of([&] { store.read_triage(); }), ErrorCode::FormatError);
}
