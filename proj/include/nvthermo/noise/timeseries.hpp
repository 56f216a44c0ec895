#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "nvthermo/errors.hpp"
#include "nvthermo/fit/least_squares.hpp"
#include "nvthermo/noise/rng.hpp"

namespace nvthermo::noise {

struct TimeSeries {
  std::vector<double> times;   // s
  std::vector<double> values;  // K or dimensionless

  std::size_t size() const { return times.size(); }

  void validate() const {
    if (times.size() != values.size()) throw InvalidInput("time series columns differ in length");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i]) || !std::isfinite(values[i])) throw InvalidInput("time series holds non-finite values");
      if (i > 0 && !(times[i] > times[i - 1])) throw InvalidInput("time series times must be strictly increasing");
    }
  }

  /// Mean spacing between samples.
  double cadence() const { return size() > 1 ? (times.back() - times.front()) / double(size() - 1) : 0.0; }
};

struct CubicTrend {
  std::array<double, 4> coeffs{};  // value = sum_k coeffs[k] t^k
  double residual_std = 0.0;      // sqrt(RSS / (n - 4))
  std::vector<double> residuals;

  double operator()(double t) const { return coeffs[0] + t * (coeffs[1] + t * (coeffs[2] + t * coeffs[3])); }
};

/// Ordinary least-squares cubic. The fit runs on time rescaled to [-1, 1] and
/// the coefficients are mapped back to powers of t.
inline CubicTrend detrend_cubic(const TimeSeries& ts) {
  ts.validate();
  const std::size_t n = ts.size();
  if (n < 8) throw InvalidInput("cubic detrend needs at least 8 points");
  const double mid = 0.5 * (ts.times.front() + ts.times.back());
  const double half = 0.5 * (ts.times.back() - ts.times.front());
  fit::MatrixXd design(n, 4);
  fit::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (ts.times[i] - mid) / half;
    design.row(i) << 1.0, u, u * u, u * u * u;
    y[i] = ts.values[i];
  }
  const auto lf = fit::linear_least_squares(design, y);

  // Expand sum_k c_k ((t - mid) / half)^k in powers of t.
  CubicTrend out;
  static constexpr double binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  for (int k = 0; k < 4; ++k) {
    const double ck = lf.coef[k] / std::pow(half, k);
    for (int j = 0; j <= k; ++j) out.coeffs[j] += ck * binom[k][j] * std::pow(-mid, k - j);
  }
  out.residuals.resize(n);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    const double u = (ts.times[i] - mid) / half;
    for (int k = 3; k >= 0; --k) v = v * u + lf.coef[k];
    out.residuals[i] = ts.values[i] - v;
    rss += out.residuals[i] * out.residuals[i];
  }
  out.residual_std = std::sqrt(rss / double(n - 4));
  return out;
}

struct StepResult {
  bool found = false;
  std::size_t index = 0;  // first sample of the second plateau
  double step_size = 0.0;
  double uncertainty = 0.0;
  double level_before = 0.0;
  double level_after = 0.0;
  /// 1 - |r_step| / |r_const| for the best changepoint.
  double improvement = 0.0;
};

/// Best two-plateau piecewise-constant fit over every changepoint. The result
/// is a no-step when the best split leaves a plateau shorter than 3 samples or
/// improves the residual norm of a constant fit by 5% or less.
inline StepResult detect_step(const TimeSeries& ts) {
  ts.validate();
  const std::size_t n = ts.size();
  if (n < 10) throw InvalidInput("step detection needs at least 10 points");
  const auto& y = ts.values;

  // Prefix sums of centered values keep the sums of squares accurate.
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= double(n);
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = y[i] - mean;
    s1[i + 1] = s1[i] + d;
    s2[i + 1] = s2[i] + d * d;
  }
  auto sse = [&](std::size_t a, std::size_t b) {
    const double m = double(b - a);
    const double sum = s1[b] - s1[a];
    return std::max(0.0, (s2[b] - s2[a]) - sum * sum / m);
  };

  const double rss0 = sse(0, n);
  StepResult out;
  if (!(rss0 > 0.0)) return out;
  std::size_t best_k = 1;
  double best = sse(0, 1) + sse(1, n);
  for (std::size_t k = 2; k < n; ++k) {
    const double r = sse(0, k) + sse(k, n);
    if (r < best) {
      best = r;
      best_k = k;
    }
  }
  out.improvement = 1.0 - std::sqrt(best / rss0);
  out.index = best_k;
  const std::size_t nl = best_k, nr = n - best_k;
  if (nl < 3 || nr < 3 || out.improvement <= 0.05) return out;

  out.found = true;
  out.level_before = mean + s1[best_k] / double(nl);
  out.level_after = mean + (s1[n] - s1[best_k]) / double(nr);
  out.step_size = out.level_after - out.level_before;
  const double s2_pooled = best / double(n - 2);
  out.uncertainty = std::sqrt(s2_pooled * (1.0 / double(nl) + 1.0 / double(nr)));
  return out;
}

struct StepSeriesConfig {
  std::size_t n_points = 40;
  double cadence_s = 1.0;
  double level = 294.0;
  std::size_t step_at = 23;
  double step_size = 17.0;
  double noise_std = 4.0;
  /// Cubic drift coefficients in powers of t (added to the level).
  std::array<double, 4> drift{0.0, 0.0, 0.0, 0.0};
  std::uint64_t seed = 1;
};

/// Piecewise-constant series with an optional cubic drift and Gaussian noise.
inline TimeSeries make_step_series(const StepSeriesConfig& c, std::uint64_t stream = 0) {
  if (c.n_points < 2) throw InvalidParameter("series needs at least 2 points");
  if (!(c.cadence_s > 0.0)) throw InvalidParameter("cadence must be > 0");
  if (!(c.noise_std >= 0.0)) throw InvalidParameter("noise std must be >= 0");
  Rng rng(c.seed, stream);
  TimeSeries ts;
  for (std::size_t i = 0; i < c.n_points; ++i) {
    const double t = double(i) * c.cadence_s;
    double v = c.level + (i >= c.step_at ? c.step_size : 0.0);
    v += c.drift[0] + t * (c.drift[1] + t * (c.drift[2] + t * c.drift[3]));
    v += c.noise_std * rng.normal();
    ts.times.push_back(t);
    ts.values.push_back(v);
  }
  return ts;
}

}  // namespace nvthermo::noise
