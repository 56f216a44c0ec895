#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "nvthermo/noise/noise_floor.hpp"
#include "nvthermo/noise/normality.hpp"
#include "nvthermo/noise/rng.hpp"
#include "nvthermo/noise/synthetic.hpp"
#include "nvthermo/noise/timeseries.hpp"
#include "nvthermo/thermo/dwf.hpp"

using namespace nvthermo;
using namespace nvthermo::noise;

namespace {

struct Moments {
  double mean = 0, var = 0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x / double(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean) / double(v.size() - 1);
  return m;
}

// Chi-square p-value of Poisson draws against the exact pmf. Bins are pooled
// left to right until each expects at least 20 draws; the upper tail joins the
// last bin.
double poisson_gof_pvalue(double mean, int draws, std::uint64_t seed) {
  Rng rng(seed);
  std::map<std::int64_t, int> hist;
  for (int i = 0; i < draws; ++i) ++hist[rng.poisson(mean)];
  boost::math::poisson_distribution<> law(mean);
  const auto top = std::int64_t(std::ceil(mean + 10.0 * std::sqrt(mean) + 10.0));
  std::vector<double> expected, observed;
  double e = 0, o = 0;
  for (std::int64_t k = 0; k <= top; ++k) {
    e += draws * (k < top ? boost::math::pdf(law, double(k)) : boost::math::cdf(boost::math::complement(law, double(k - 1))));
    if (k < top) {
      o += hist.count(k) ? hist[k] : 0;
    } else {
      for (auto it = hist.lower_bound(k); it != hist.end(); ++it) o += it->second;
    }
    if (e >= 20.0) {
      expected.push_back(e);
      observed.push_back(o);
      e = o = 0;
    }
  }
  expected.back() += e;
  observed.back() += o;
  double chi2 = 0;
  for (std::size_t i = 0; i < expected.size(); ++i)
    chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  boost::math::chi_squared_distribution<> ref(double(expected.size() - 1));
  return boost::math::cdf(boost::math::complement(ref, chi2));
}

}  // namespace

TEST(Rng, ZeroMeanGivesZero) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(rng.poisson(0.0), 0);
}

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  Rng a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int i = 0; i < 50; ++i) {
    const auto x = a.poisson(1e3);
    EXPECT_EQ(x, b.poisson(1e3));
    differs |= x != c.poisson(1e3);
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(8);
  std::vector<double> u, z;
  for (int i = 0; i < 200000; ++i) {
    u.push_back(rng.uniform());
    z.push_back(rng.normal());
  }
  const auto mu = moments(u), mz = moments(z);
  EXPECT_NEAR(mu.mean, 0.5, 0.005);
  EXPECT_NEAR(mu.var, 1.0 / 12.0, 0.001);
  EXPECT_NEAR(mz.mean, 0.0, 0.01);
  EXPECT_NEAR(mz.var, 1.0, 0.01);
}

TEST(Rng, PoissonMatchesExactLaw) {
  // Both the inversion and the rejection branch.
  for (double mean : {0.7, 4.0, 29.0, 31.0, 250.0, 5000.0}) {
    EXPECT_GT(poisson_gof_pvalue(mean, 100000, 77), 1e-3) << mean;
  }
}

TEST(Rng, PoissonLargeMeanMoments) {
  Rng rng(6);
  std::vector<double> v;
  for (int i = 0; i < 10000; ++i) v.push_back(double(rng.poisson(1e6)));
  const auto m = moments(v);
  // Standard errors: sqrt(1e6 / 1e4) = 10 on the mean, ~1.4% on the variance.
  EXPECT_NEAR(m.mean, 1e6, 40.0);
  EXPECT_NEAR(m.var / 1e6, 1.0, 0.06);
}

TEST(Synthetic, ZeroRatesGiveZeroCounts) {
  SyntheticSource src;
  src.axis = {1, 2, 3};
  src.rate = {0, 0, 0};
  for (double c : synthesize_spectrum(src, 10.0).counts) EXPECT_EQ(c, 0.0);
}

TEST(Synthetic, SourceCarriesRequestedDwf) {
  PlSourceConfig c;
  c.dwf_value = 0.02;
  c.background_ratio = 0.0;
  const auto src = make_pl_source(c);
  double side = 0;
  for (double v : src.sideband_rate) side += v;
  EXPECT_NEAR(src.zpl_area_rate / (src.zpl_area_rate + side), 0.02, 1e-12);
  EXPECT_EQ(src.background_rate_per_bin, 0.0);
}

TEST(Synthetic, SameSeedAndStreamReproduce) {
  PlSourceConfig c;
  c.seed = 9;
  const auto src = make_pl_source(c);
  EXPECT_EQ(synthesize_spectrum(src, 1.0, 5).counts, synthesize_spectrum(src, 1.0, 5).counts);
  EXPECT_NE(synthesize_spectrum(src, 1.0, 5).counts, synthesize_spectrum(src, 1.0, 6).counts);
}

TEST(Synthetic, Validation) {
  PlSourceConfig c;
  c.background_ratio = -1;
  EXPECT_THROW(make_pl_source(c), InvalidParameter);
  c = {};
  c.dwf_value = 1.5;
  EXPECT_THROW(make_pl_source(c), InvalidParameter);
  EXPECT_THROW(expected_spectrum(make_pl_source({}), 0.0), InvalidInput);
}

TEST(Normality, ShotNoiseGivesUnitSpread) {
  PlSourceConfig c;
  c.zpl_rate = 2e5;
  const auto src = make_pl_source(c);
  const auto ref = expected_spectrum(src, 1.0);
  std::vector<Spectrum> spectra;
  for (std::uint64_t k = 0; k < 10; ++k) spectra.push_back(synthesize_spectrum(src, 1.0, k));
  EXPECT_NEAR(poisson_normality_check(spectra, ref), 1.0, 0.02);
}

TEST(Normality, DoubledVarianceGivesSqrtTwo) {
  const auto src = make_pl_source({});
  auto ref = expected_spectrum(src, 1.0);
  std::vector<Spectrum> spectra;
  for (std::uint64_t k = 0; k < 10; ++k) {
    Rng rng(31, k);
    Spectrum s = ref;
    for (double& v : s.counts) v = std::max(0.0, v + std::sqrt(2.0 * v) * rng.normal());
    spectra.push_back(s);
  }
  EXPECT_NEAR(poisson_normality_check(spectra, ref), std::sqrt(2.0), 0.03);
}

TEST(Normality, NoiselessGivesZero) {
  const auto ref = expected_spectrum(make_pl_source({}), 1.0);
  EXPECT_EQ(poisson_normality_check({ref, ref}, ref), 0.0);
}

TEST(Normality, RejectsMismatchedAxes) {
  const auto ref = expected_spectrum(make_pl_source({}), 1.0);
  auto other = ref;
  other.axis.pop_back();
  other.counts.pop_back();
  EXPECT_THROW(poisson_normality_check({other}, ref), InvalidInput);
}

TEST(Detrend, ExactCubicIsRemoved) {
  TimeSeries ts;
  for (int i = 0; i < 40; ++i) {
    const double t = 100.0 + i;
    ts.times.push_back(t);
    ts.values.push_back(294 + 0.3 * t - 2e-3 * t * t + 4e-6 * t * t * t);
  }
  const auto tr = detrend_cubic(ts);
  for (double r : tr.residuals) EXPECT_NEAR(r, 0.0, 1e-9);
  EXPECT_NEAR(tr(120.0), 294 + 0.3 * 120 - 2e-3 * 120 * 120 + 4e-6 * 120 * 120 * 120, 1e-8);
  EXPECT_NEAR(tr.coeffs[3], 4e-6, 1e-12);
}

TEST(Detrend, WhiteNoiseLevelIsPreserved) {
  StepSeriesConfig c;
  c.n_points = 2000;
  c.step_size = 0;
  c.noise_std = 3.0;
  c.drift = {1.0, 0.01, -1e-5, 2e-9};
  const auto tr = detrend_cubic(make_step_series(c));
  EXPECT_NEAR(tr.residual_std, 3.0, 0.3);
}

TEST(Detrend, ConstantSeriesHasNoResidual) {
  TimeSeries ts;
  for (int i = 0; i < 10; ++i) {
    ts.times.push_back(i);
    ts.values.push_back(5.0);
  }
  const auto tr = detrend_cubic(ts);
  EXPECT_NEAR(tr.coeffs[0], 5.0, 1e-12);
  EXPECT_NEAR(tr.residual_std, 0.0, 1e-12);
  ts.times.resize(5);
  ts.values.resize(5);
  EXPECT_THROW(detrend_cubic(ts), InvalidInput);
}

TEST(StepDetection, ConstantSeriesHasNoStep) {
  TimeSeries ts;
  for (int i = 0; i < 20; ++i) {
    ts.times.push_back(i);
    ts.values.push_back(294.0);
  }
  EXPECT_FALSE(detect_step(ts).found);
}

TEST(StepDetection, NoiselessStepIsExact) {
  StepSeriesConfig c;
  c.noise_std = 0.0;
  const auto r = detect_step(make_step_series(c));
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.index, 23u);
  EXPECT_NEAR(r.step_size, 17.0, 1e-12);
  EXPECT_NEAR(r.level_before, 294.0, 1e-12);
}

TEST(StepDetection, EdgeChangepointsAreNotSteps) {
  for (std::size_t at : {1u, 39u}) {
    StepSeriesConfig c;
    c.noise_std = 0.0;
    c.step_at = at;
    EXPECT_FALSE(detect_step(make_step_series(c)).found) << at;
  }
}

TEST(StepDetection, NoisyStepWithinUncertainty) {
  StepSeriesConfig c;
  c.seed = 4;
  const auto r = detect_step(make_step_series(c));
  ASSERT_TRUE(r.found);
  EXPECT_NEAR(double(r.index), 23.0, 2.0);
  EXPECT_LE(std::abs(r.step_size - 17.0), 3.0 * r.uncertainty);
}

TEST(StepDetection, ShortSeriesRejected) {
  StepSeriesConfig c;
  c.n_points = 9;
  c.step_at = 4;
  EXPECT_THROW(detect_step(make_step_series(c)), InvalidInput);
}

TEST(NoiseFloor, SmallMonteCarloTracksPrediction) {
  PlSourceConfig c;
  c.zpl_rate = 5e4;
  const auto src = make_pl_source(c);
  const auto rep = monte_carlo_noise_floor(src, {}, 200, 1.0);
  EXPECT_EQ(rep.failures, 0u);
  // 200 trials resolve the spread to about 5%.
  EXPECT_NEAR(rep.ratio, 1.0, 0.2);
  EXPECT_NEAR(rep.mean_temperature, 294.0, 5.0 * rep.empirical_std / std::sqrt(200.0));
}

TEST(NoiseFloor, ThreadCountDoesNotChangeResult) {
  PlSourceConfig c;
  c.zpl_rate = 5e4;
  const auto src = make_pl_source(c);
  MonteCarloOptions one, many;
  one.threads = 1;
  many.threads = 4;
  EXPECT_EQ(monte_carlo_noise_floor(src, {}, 100, 1.0, one).empirical_std,
            monte_carlo_noise_floor(src, {}, 100, 1.0, many).empirical_std);
  EXPECT_THROW(monte_carlo_noise_floor(src, {}, 50, 1.0), InvalidInput);
}
