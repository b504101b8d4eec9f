#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <random>

#include "forecastability/ami.hpp"
#include "forecastability/analytics.hpp"
#include "forecastability/error.hpp"
#include "forecastability/knn.hpp"
#include "forecastability/synth.hpp"

using namespace forecastability;

namespace {

// Direct transcription of the estimator with O(N^2) neighbour search.
double brute_force_ksg(const std::vector<double>& x, const std::vector<double>& y, int k) {
  const std::size_t n = x.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d.push_back(std::max(std::abs(x[i] - x[j]), std::abs(y[i] - y[j])));
    }
    std::sort(d.begin(), d.end());
    const double eps = d[static_cast<std::size_t>(k) - 1];
    int nx = 0, ny = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (std::abs(x[i] - x[j]) < eps) ++nx;
      if (std::abs(y[i] - y[j]) < eps) ++ny;
    }
    sum += boost::math::digamma(nx + 1.0) + boost::math::digamma(ny + 1.0);
  }
  return boost::math::digamma(static_cast<double>(k)) + boost::math::digamma(static_cast<double>(n)) -
         sum / static_cast<double>(n);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::UsageError;
}

}  // namespace

TEST(Digamma, MatchesBoost) {
  for (std::size_t n = 1; n < 5000; n += (n < 50 ? 1 : 37)) {
    EXPECT_NEAR(ami::digamma_int(n), boost::math::digamma(static_cast<double>(n)), 1e-12) << n;
  }
}

TEST(Standardize, Examples) {
  const std::vector<double> w = {1, 2, 3};
  const auto z = ami::standardize(w);
  ASSERT_EQ(z.values.size(), 3u);
  EXPECT_NEAR(z.values[0], -1.0, 1e-15);
  EXPECT_NEAR(z.values[1], 0.0, 1e-15);
  EXPECT_NEAR(z.values[2], 1.0, 1e-15);
  EXPECT_EQ(z.original_len, 3u);
  const std::vector<double> c = {5, 5, 5};
  EXPECT_EQ(code_of([&] { ami::standardize(c); }), ErrorCode::DegenerateSeries);
  const std::vector<double> one = {5};
  EXPECT_EQ(code_of([&] { ami::standardize(one); }), ErrorCode::TooFewPoints);
}

TEST(Standardize, MomentsAndAffineInvariance) {
  std::mt19937_64 rng(3);
  std::vector<double> x(257);
  for (auto& v : x) v = synth::standard_normal(rng) * 3.0 + 7.0;
  const auto z = ami::standardize(x);
  double mean = 0.0, var = 0.0;
  for (double v : z.values) mean += v;
  mean /= static_cast<double>(z.values.size());
  for (double v : z.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(z.values.size() - 1);
  EXPECT_LT(std::abs(mean), 1e-9);
  EXPECT_LT(std::abs(var - 1.0), 1e-6);

  std::vector<double> ax(x.size());
  std::transform(x.begin(), x.end(), ax.begin(), [](double v) { return 2.5 * v - 40.0; });
  const auto az = ami::standardize(ax);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(az.values[i], z.values[i], 1e-12);
}

TEST(Knn, CountStrictlyWithinMatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng() % 40);
    for (auto& x : v) x = static_cast<double>(rng() % 7) * 0.5;  // many ties
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double r = static_cast<double>(rng() % 5) * 0.5;
      std::size_t brute = 0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (j != i && std::abs(v[j] - v[i]) < r) ++brute;
      }
      EXPECT_EQ(knn::count_strictly_within(sorted, v[i], r), brute);
    }
  }
}

TEST(Knn, TreeMatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 20 + rng() % 300;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Half the trials on a coarse grid to force distance ties.
      x[i] = trial % 2 ? std::round(synth::standard_normal(rng) * 3) : synth::standard_normal(rng);
      y[i] = trial % 2 ? std::round(synth::standard_normal(rng) * 3) : synth::standard_normal(rng);
    }
    const knn::MaxNormTree2d tree(x, y);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> d;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) d.push_back(std::max(std::abs(x[i] - x[j]), std::abs(y[i] - y[j])));
      }
      std::sort(d.begin(), d.end());
      for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{8}}) {
        EXPECT_EQ(tree.kth_distance(i, k), d[k - 1]);
      }
    }
  }
}

TEST(Ksg, MatchesBruteForceOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 30 + rng() % 250;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = synth::standard_normal(rng);
      y[i] = 0.6 * x[i] + synth::standard_normal(rng);
      if (trial % 3 == 0) {
        x[i] = std::round(x[i] * 2);
        y[i] = std::round(y[i] * 2);
      }
    }
    for (int k : {1, 4, 8}) {
      EXPECT_NEAR(ami::ksg_mi(x, y, k), brute_force_ksg(x, y, k), 1e-10) << trial << " k=" << k;
    }
  }
}

TEST(Ksg, IndependentUniformNearZero) {
  std::mt19937_64 rng(99);
  std::vector<double> x(2000), y(2000);
  for (auto& v : x) v = synth::uniform01(rng);
  for (auto& v : y) v = synth::uniform01(rng);
  EXPECT_LT(std::abs(ami::ksg_mi(x, y, 8)), 0.03);
}

TEST(Ksg, Errors) {
  const std::vector<double> a = {1, 2, 3}, b = {1, 2};
  EXPECT_EQ(code_of([&] { ami::ksg_mi(a, b, 1); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([&] { ami::ksg_mi(a, a, 3); }), ErrorCode::TooFewPoints);
  const std::vector<double> bad = {1, NAN, 3};
  EXPECT_EQ(code_of([&] { ami::ksg_mi(bad, a, 1); }), ErrorCode::NonFinite);
}

TEST(Ksg, ConsistencyErrorShrinks) {
  const double r = 0.7;
  const double truth = -0.5 * std::log(1 - r * r);
  auto mean_abs_error = [&](std::size_t n) {
    double err = 0.0;
    for (int rep = 0; rep < 8; ++rep) {
      std::mt19937_64 rng(1000 + rep);
      std::vector<double> x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = synth::standard_normal(rng);
        y[i] = r * x[i] + std::sqrt(1 - r * r) * synth::standard_normal(rng);
      }
      err += std::abs(ami::ksg_mi(x, y, 8) - truth);
    }
    return err / 8.0;
  };
  EXPECT_LT(mean_abs_error(8000), 0.75 * mean_abs_error(500));
}

TEST(AmiProfile, YearlyThresholdFailsGateIv) {
  synth::SynthSpec spec;
  spec.kind = synth::SynthKind::AR1;
  spec.phis = {0.5};
  spec.length = 35 + 15;
  spec.frequency = Frequency::Yearly;
  const TimeSeries s = synth::generate_one(spec, 0);
  const RunConfig cfg;
  const auto& p = profile_for(Frequency::Yearly);
  const WindowLayout w = layout(s.size(), p, cfg);
  ASSERT_EQ(w.t_base, 35u);
  EXPECT_EQ(code_of([&] { ami::ami_profile(s, w, p, cfg); }), ErrorCode::GateIvFailure);
}

TEST(AmiProfile, EntriesFollowThreshold) {
  synth::SynthSpec spec;
  spec.kind = synth::SynthKind::AR1;
  spec.phis = {0.5};
  spec.length = 36 + 15;
  spec.frequency = Frequency::Yearly;
  const TimeSeries s = synth::generate_one(spec, 0);
  const RunConfig cfg;
  const auto& p = profile_for(Frequency::Yearly);
  const auto prof = ami::ami_profile(s, layout(s.size(), p, cfg), p, cfg);
  ASSERT_EQ(prof.entries.size(), 6u);
  for (const auto& [h, e] : prof.entries) EXPECT_EQ(e.n_eff, 36 - h);
  EXPECT_EQ(prof.base_len, 36u);
  EXPECT_EQ(prof.k_used, 8);

  // Monthly needs t_base - h >= 100 up to h = 18.
  spec.frequency = Frequency::Monthly;
  const auto& pm = profile_for(Frequency::Monthly);
  spec.length = 118 + 27;
  const TimeSeries m = synth::generate_one(spec, 0);
  const auto mp = ami::ami_profile(m, layout(m.size(), pm, cfg), pm, cfg);
  EXPECT_EQ(mp.entries.size(), 18u);
  EXPECT_EQ(mp.entries.at(18).n_eff, 100);
  spec.length = 117 + 27;
  const TimeSeries m2 = synth::generate_one(spec, 0);
  EXPECT_THROW(ami::ami_profile(m2, layout(m2.size(), pm, cfg), pm, cfg), Error);
}

TEST(AmiProfile, UsesBaseWindowOnlyAndIsDeterministic) {
  synth::SynthSpec spec;
  spec.kind = synth::SynthKind::AR1;
  spec.phis = {0.7};
  spec.length = 400;
  const TimeSeries s = synth::generate_one(spec, 3);
  const RunConfig cfg;
  const auto& p = profile_for(Frequency::Monthly);
  const WindowLayout w = layout(s.size(), p, cfg);
  const auto a = ami::ami_profile(s, w, p, cfg);
  EXPECT_EQ(a, ami::ami_profile(s, w, p, cfg));

  std::vector<double> v(s.values().begin(), s.values().end());
  for (std::size_t i = w.t_base; i < v.size(); ++i) v[i] = 1e6 * static_cast<double>(i);
  EXPECT_EQ(a, ami::ami_profile(TimeSeries(s.id(), v, s.frequency()), w, p, cfg));
}

TEST(AmiProfile, AffineInvariance) {
  synth::SynthSpec spec;
  spec.kind = synth::SynthKind::AR1;
  spec.phis = {0.6};
  spec.length = 500;
  const TimeSeries s = synth::generate_one(spec, 1);
  const RunConfig cfg;
  const auto& p = profile_for(Frequency::Monthly);
  const WindowLayout w = layout(s.size(), p, cfg);
  const auto base = ami::ami_profile(s, w, p, cfg);

  // Power-of-two scaling commutes exactly with standardization.
  std::vector<double> v(s.values().begin(), s.values().end());
  for (auto& x : v) x *= 8.0;
  EXPECT_EQ(base, ami::ami_profile(TimeSeries(s.id(), v, s.frequency()), w, p, cfg));

  // General affine maps reproduce the profile up to rounding.
  for (auto [a, b] : {std::pair{3.7, -12.0}, std::pair{0.013, 5e3}}) {
    std::vector<double> t(s.values().begin(), s.values().end());
    for (auto& x : t) x = a * x + b;
    const auto other = ami::ami_profile(TimeSeries(s.id(), t, s.frequency()), w, p, cfg);
    ASSERT_EQ(other.entries.size(), base.entries.size());
    for (const auto& [h, e] : base.entries) {
      EXPECT_NEAR(other.entries.at(h).ami_nats, e.ami_nats, 1e-9);
    }
  }
}

TEST(AmiProfile, JitterIsDeterministic) {
  synth::SynthSpec spec;
  spec.kind = synth::SynthKind::AR1;
  spec.phis = {0.6};
  spec.length = 500;
  const TimeSeries s = synth::generate_one(spec, 1);
  RunConfig cfg;
  cfg.ksg_jitter = 1e-6;
  const auto& p = profile_for(Frequency::Monthly);
  const WindowLayout w = layout(s.size(), p, cfg);
  EXPECT_EQ(ami::ami_profile(s, w, p, cfg), ami::ami_profile(s, w, p, cfg));
}

TEST(AmiProfile, DecaysWithLagOnAr1Panel) {
  synth::SynthSpec spec;
  spec.kind = synth::SynthKind::AR1;
  spec.phis = {0.8};
  spec.length = 600;
  spec.count = 30;
  const auto panel = synth::generate(spec);
  const RunConfig cfg;
  const auto& p = profile_for(Frequency::Monthly);
  std::vector<double> medians;
  for (int h = 1; h <= p.h_max; ++h) {
    std::vector<double> vals;
    for (const auto& s : panel) {
      vals.push_back(ami::ami_profile(s, layout(s.size(), p, cfg), p, cfg).entries.at(h).ami_nats);
    }
    std::sort(vals.begin(), vals.end());
    medians.push_back(vals[vals.size() / 2]);
  }
  std::vector<double> lags(medians.size());
  for (std::size_t i = 0; i < lags.size(); ++i) lags[i] = static_cast<double>(i + 1);
  EXPECT_LT(analytics::spearman(lags, medians), 0.0);
}
