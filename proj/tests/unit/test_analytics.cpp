#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "forecastability/analytics.hpp"
#include "forecastability/error.hpp"

using namespace forecastability;
using analytics::Tercile;

namespace {

// Rank of v[i] = (#less) + (#equal + 1) / 2, counted pairwise.
std::vector<double> brute_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

double brute_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = brute_ranks(x), ry = brute_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<analytics::SeriesOutcome> link_panel(std::size_t n, int h_max, auto&& error_of) {
  std::vector<analytics::SeriesOutcome> out;
  std::mt19937_64 rng(n);
  for (std::size_t i = 0; i < n; ++i) {
    analytics::SeriesOutcome o;
    o.series_id = "s" + std::to_string(1000 + i);
    o.t_base = 100 + (i % 3) * 50;
    for (int h = 1; h <= h_max; ++h) {
      const double a = static_cast<double>(rng() % 100000) / 1000.0 / h;
      o.ami[h] = a;
      o.mean_smape[h] = error_of(a, h);
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(analytics::spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(analytics::spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0);
  // Average ranks [1, 2.5, 2.5, 4] against [1, 3, 2, 4]: 4.5 / sqrt(4.5 * 5).
  const std::vector<double> x = {1, 2, 2, 4}, y = {1, 3, 2, 4};
  EXPECT_NEAR(analytics::spearman(x, y), 3.0 / std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(analytics::spearman(x, y), brute_spearman(x, y), 1e-12);
}

TEST(Spearman, Errors) {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::UsageError;
  };
  EXPECT_EQ(code([] { analytics::spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}); }),
            ErrorCode::LengthMismatch);
  EXPECT_EQ(code([] { analytics::spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}); }),
            ErrorCode::InsufficientData);
  EXPECT_EQ(code([] { analytics::spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}); }),
            ErrorCode::DegenerateInput);
}

TEST(Spearman, MatchesBruteForceWithTies) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  while (checked < 1000) {
    const std::size_t n = 3 + rng() % 10;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(rng() % 5);
    for (auto& v : y) v = static_cast<double>(rng() % 6) * 0.5;
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) continue;
    EXPECT_NEAR(analytics::spearman(x, y), brute_spearman(x, y), 1e-12);
    EXPECT_EQ(analytics::average_ranks(x), brute_ranks(x));
    ++checked;
  }
}

TEST(Validate, StrictlyDecreasingLinkGivesMinusOne) {
  const auto panel = link_panel(60, 6, [](double a, int h) { return 100.0 - a + h; });
  const auto s = analytics::validate(Frequency::Yearly, "m", panel);
  ASSERT_EQ(s.per_h.size(), 6u);
  for (const auto& r : s.per_h) {
    EXPECT_DOUBLE_EQ(r.rho, -1.0);
    EXPECT_EQ(r.n_series, 60u);
  }
  EXPECT_DOUBLE_EQ(s.mean_rho, -1.0);
  EXPECT_DOUBLE_EQ(s.median_rho, -1.0);
  ASSERT_TRUE(s.pooled_rho);
  EXPECT_LT(*s.pooled_rho, 0.0);
}

TEST(Validate, SkipsThinHorizonsAndThrowsWhenNoneUsable) {
  auto panel = link_panel(5, 3, [](double a, int) { return 50.0 - a; });
  for (std::size_t i = 0; i < 3; ++i) panel[i].mean_smape.erase(2);
  const auto s = analytics::validate(Frequency::Yearly, "m", panel);
  ASSERT_EQ(s.per_h.size(), 2u);
  EXPECT_EQ(s.per_h[0].h, 1);
  EXPECT_EQ(s.per_h[1].h, 3);
  panel.resize(2);
  EXPECT_THROW(analytics::validate(Frequency::Yearly, "m", panel), Error);
}

TEST(Validate, HomogeneousPanelSignsAgree) {
  std::mt19937_64 rng(8);
  const auto panel = link_panel(200, 8, [&](double a, int) {
    return 80.0 - a + 30.0 * static_cast<double>(rng() % 1000) / 1000.0;
  });
  const auto s = analytics::validate(Frequency::Quarterly, "m", panel);
  ASSERT_TRUE(s.pooled_rho);
  EXPECT_LT(s.mean_rho, 0.0);
  EXPECT_LT(*s.pooled_rho, 0.0);
}

TEST(Terciles, CountsAndBoundaryTies) {
  std::mt19937_64 rng(3);
  for (std::size_t n = 1; n < 80; ++n) {
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(rng() % 1000003);
    const auto t = analytics::assign_terciles(v);
    std::array<std::size_t, 3> c{};
    for (auto x : t) c[static_cast<std::size_t>(x)]++;
    EXPECT_LE(*std::max_element(c.begin(), c.end()) - *std::min_element(c.begin(), c.end()), 1u) << n;
  }
  // Ties at a boundary go to the lower class: both boundaries equal 2 here.
  const auto t = analytics::assign_terciles(std::vector<double>{1, 2, 2, 2, 5, 6});
  EXPECT_EQ(t, (std::vector<Tercile>{Tercile::Low, Tercile::Low, Tercile::Low, Tercile::Low, Tercile::High, Tercile::High}));
}

TEST(Terciles, DecreasingMedians) {
  const auto panel = link_panel(90, 4, [](double a, int) { return 100.0 - a; });
  const auto rows = analytics::tercile_analysis(panel);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0].median_smape, rows[1].median_smape);
  EXPECT_GT(rows[1].median_smape, rows[2].median_smape);
}

TEST(Terciles, IdenticalAmiIsSingleRow) {
  auto panel = link_panel(9, 2, [](double, int h) { return 10.0 * h; });
  for (auto& o : panel) {
    for (auto& [h, a] : o.ami) a = 0.5;
  }
  const auto rows = analytics::tercile_analysis(panel);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].tercile, Tercile::Low);
  EXPECT_EQ(rows[0].n_pairs, 18u);
}

TEST(Strata, LengthIndependentLinkIsFlat) {
  std::mt19937_64 rng(12);
  const auto panel = link_panel(300, 6, [&](double a, int) {
    return 80.0 - a + 40.0 * static_cast<double>(rng() % 1000) / 1000.0;
  });
  const auto rows = analytics::length_strata(Frequency::Yearly, "m", panel);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(analytics::length_label(rows[0].length_tercile), "Short");
  double lo = 1, hi = -1;
  for (const auto& r : rows) {
    ASSERT_TRUE(r.rho);
    lo = std::min(lo, *r.rho);
    hi = std::max(hi, *r.rho);
    EXPECT_EQ(r.n_series, 100u);
  }
  EXPECT_LE(hi - lo, 0.2);
}

TEST(Strata, SingleLengthCollapses) {
  auto panel = link_panel(12, 2, [](double a, int) { return 10.0 - a; });
  for (auto& o : panel) o.t_base = 77;
  const auto rows = analytics::length_strata(Frequency::Yearly, "m", panel);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].n_series, 12u);
}

TEST(Triage, ThreeSeriesOneOfEach) {
  std::vector<ami::AmiProfile> profiles(3);
  const std::array<double, 3> means = {0.5, 0.1, 0.9};
  for (int i = 0; i < 3; ++i) {
    profiles[i].series_id = std::string(1, static_cast<char>('a' + i));
    profiles[i].entries[1] = {means[i] + 0.1, 50};
    profiles[i].entries[2] = {means[i] - 0.1, 49};
  }
  const auto labels = analytics::triage(profiles);
  ASSERT_EQ(labels.size(), 3u);
  EXPECT_EQ(labels[0].action, analytics::Action::ModelCautiously);
  EXPECT_EQ(labels[1].action, analytics::Action::ManageUncertainty);
  EXPECT_EQ(labels[2].action, analytics::Action::InvestInModelling);
  EXPECT_NEAR(labels[2].score, 0.9, 1e-12);
  EXPECT_EQ(analytics::action_for(Tercile::High), analytics::Action::InvestInModelling);
  EXPECT_EQ(analytics::action_for(Tercile::Low), analytics::Action::ManageUncertainty);
}

TEST(Triage, AtHorizonSkipsMissing) {
  std::vector<ami::AmiProfile> profiles(4);
  for (int i = 0; i < 4; ++i) {
    profiles[i].series_id = "s" + std::to_string(i);
    profiles[i].entries[1] = {0.1 * i, 50};
    if (i != 2) profiles[i].entries[3] = {1.0 - 0.1 * i, 48};
  }
  const auto labels = analytics::triage(profiles, TriageStat::AtHorizon, 3);
  ASSERT_EQ(labels.size(), 3u);
  EXPECT_EQ(labels[0].series_id, "s0");
  EXPECT_EQ(labels[0].ami_tercile, Tercile::High);
  EXPECT_EQ(labels[2].series_id, "s3");
  EXPECT_EQ(labels[2].ami_tercile, Tercile::Low);
}

TEST(RankInvariance, MonotoneTransformChangesNothing) {
  std::mt19937_64 rng(77);
  const auto panel = link_panel(120, 5, [&](double a, int h) {
    return 90.0 - a + h + 25.0 * static_cast<double>(rng() % 1000) / 1000.0;
  });
  auto transformed = panel;
  for (auto& o : transformed) {
    for (auto& [h, a] : o.ami) a = std::exp(0.3 * a) - 4.0;
  }
  const auto a = analytics::validate(Frequency::Monthly, "m", panel);
  const auto b = analytics::validate(Frequency::Monthly, "m", transformed);
  ASSERT_EQ(a.per_h.size(), b.per_h.size());
  for (std::size_t i = 0; i < a.per_h.size(); ++i) EXPECT_EQ(a.per_h[i].rho, b.per_h[i].rho);
  EXPECT_EQ(a.mean_rho, b.mean_rho);
  EXPECT_EQ(a.pooled_rho, b.pooled_rho);
  const auto ta = analytics::tercile_analysis(panel);
  const auto tb = analytics::tercile_analysis(transformed);
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) EXPECT_EQ(ta[i].median_smape, tb[i].median_smape);

  std::vector<ami::AmiProfile> pa, pb;
  for (const auto& o : panel) {
    ami::AmiProfile p;
    p.series_id = o.series_id;
    p.entries[1] = {o.ami.at(1), 10};
    pa.push_back(p);
    p.entries[1].ami_nats = std::exp(0.3 * o.ami.at(1)) - 4.0;
    pb.push_back(p);
  }
  const auto la = analytics::triage(pa, TriageStat::AtHorizon, 1);
  const auto lb = analytics::triage(pb, TriageStat::AtHorizon, 1);
  for (std::size_t i = 0; i < la.size(); ++i) EXPECT_EQ(la[i].action, lb[i].action);
}
