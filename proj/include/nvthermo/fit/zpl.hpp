#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "nvthermo/constants.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/fit/least_squares.hpp"
#include "nvthermo/fit/models.hpp"
#include "nvthermo/spectrum.hpp"

namespace nvthermo::fit {

struct ZplComponent {
  double center = 0.0;  // nm
  double fwhm = 0.0;    // nm
  double area = 0.0;    // counts
  double center_err = 0.0;
  double fwhm_err = 0.0;
  double area_err = 0.0;
};

/// Two Lorentzian components plus a linear baseline (counts per bin).
struct ZplFit {
  std::array<ZplComponent, 2> components;  // ascending center
  double intercept = 0.0;  // counts per bin at x_ref
  double slope = 0.0;      // counts per bin per nm
  double x_ref = 0.0;
  double bin_width = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  /// Parameter order: (center, fwhm, area) x 2, intercept, slope.
  MatrixXd covariance;
  FitResult fit;

  double total_area() const { return components[0].area + components[1].area; }

  double total_area_err() const {
    const double v = covariance(2, 2) + covariance(5, 5) + 2.0 * covariance(2, 5);
    return std::sqrt(std::max(0.0, v));
  }

  double baseline_at(double x) const { return intercept + slope * (x - x_ref); }

  /// Fitted counts per bin.
  double model_at(double x) const {
    LorentzianSumModel m{2, bin_width, x_ref};
    return m.value(x, fit.params);
  }
};

struct ZplOptions {
  double window_lo_nm = 630.0;
  double window_hi_nm = 645.0;
  /// Reweighting passes with weights 1/max(model, floor) after the
  /// count-weighted first pass.
  int reweight_passes = 2;
  double weight_floor = 0.5;
  FitOptions fit;
};

namespace detail {

inline double uniform_bin_width(const std::vector<double>& x) {
  const double bw = (x.back() - x.front()) / double(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs((x[i] - x[i - 1]) - bw) > 1e-6 * bw) throw InvalidInput("ZPL fit needs uniformly spaced bins");
  }
  return bw;
}

/// Full width at half maximum above a baseline, by outward scan from the peak.
inline double fwhm_estimate(const std::vector<double>& x, const std::vector<double>& y, std::size_t peak,
                            double base) {
  const double half = base + 0.5 * (y[peak] - base);
  std::size_t l = peak;
  while (l > 0 && y[l] > half) --l;
  std::size_t r = peak;
  while (r + 1 < y.size() && y[r] > half) ++r;
  return std::max(x[r] - x[l], x[1] - x[0]);
}

/// The Lorentzian-sum model with each area written as q^2 and each width taken
/// by magnitude, which keeps the components from trading large opposite-sign
/// contributions.
struct SquaredAreaModel {
  LorentzianSumModel base;

  std::size_t arity() const { return base.arity(); }

  VectorXd natural(const VectorXd& q) const {
    VectorXd p = q;
    for (std::size_t k = 0; k < base.n_components; ++k) {
      p[3 * k + 1] = std::abs(q[3 * k + 1]);
      p[3 * k + 2] = q[3 * k + 2] * q[3 * k + 2];
    }
    return p;
  }

  double value(double x, const VectorXd& q) const { return base.value(x, natural(q)); }

  void gradient(double x, const VectorXd& q, VectorXd& g) const {
    base.gradient(x, natural(q), g);
    for (std::size_t k = 0; k < base.n_components; ++k) {
      if (q[3 * k + 1] < 0.0) g[3 * k + 1] = -g[3 * k + 1];
      g[3 * k + 2] *= 2.0 * q[3 * k + 2];
    }
  }
};

}  // namespace detail

/// Two-Lorentzian plus linear-baseline fit of the NV- zero-phonon line.
///
/// The first pass uses Poisson weights 1/max(counts, 1); further passes reweight
/// by 1/max(model, weight_floor), which converges to the Poisson likelihood
/// optimum and removes the low-count bias of count-based weights.
/// Areas are constrained to be non-negative. Components that collapse onto each
/// other leave the total area well defined, so rank-deficient covariances are
/// accepted and flagged in fit.rank_deficient.
inline ZplFit fit_zpl(const Spectrum& s, const ZplOptions& opt = {}) {
  s.validate();
  const double lo = opt.window_lo_nm;
  const double hi = opt.window_hi_nm;
  if (!(hi > lo)) throw InvalidWindow("ZPL window is empty");
  if (lo < s.axis.front() || hi > s.axis.back()) throw InvalidWindow("ZPL window exceeds the spectrum axis");
  if (!(lo < constants::zpl_nv_minus_nm && hi > constants::zpl_nv_minus_nm)) {
    throw InvalidWindow("ZPL window does not contain the NV- zero-phonon line");
  }
  const auto [first, last] = s.index_range(lo, hi);
  const std::size_t n = last - first;
  if (n < 12) throw InvalidWindow("ZPL window holds fewer than 12 bins");
  std::vector<double> x(s.axis.begin() + first, s.axis.begin() + last);
  std::vector<double> y(s.counts.begin() + first, s.counts.begin() + last);
  const double bw = detail::uniform_bin_width(x);
  const double x_ref = 0.5 * (x.front() + x.back());

  // Baseline guess: straight line through the outer quarter of the window on
  // each side.
  const std::size_t edge = n / 4;
  double yl = 0.0, yr = 0.0, xl = 0.0, xr = 0.0;
  for (std::size_t i = 0; i < edge; ++i) {
    yl += y[i];
    xl += x[i];
    yr += y[n - 1 - i];
    xr += x[n - 1 - i];
  }
  yl /= double(edge);
  yr /= double(edge);
  xl /= double(edge);
  xr /= double(edge);
  const double slope0 = (yr - yl) / (xr - xl);
  const double intercept0 = yl + slope0 * (x_ref - xl);

  // Peak and width from a 5-bin moving average; leftmost maximum on ties.
  const std::vector<double> sm = moving_average(y, 5);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (sm[i] > sm[peak]) peak = i;
  const double base_at_peak = intercept0 + slope0 * (x[peak] - x_ref);
  double excess = 0.0;
  for (std::size_t i = 0; i < n; ++i) excess += y[i] - (intercept0 + slope0 * (x[i] - x_ref));
  const bool has_peak = sm[peak] - base_at_peak > 0.0 && excess > 0.0;

  double width0 = 0.5;
  if (has_peak) {
    width0 = detail::fwhm_estimate(x, sm, peak, base_at_peak);
    if (hi - lo < 3.0 * width0) {
      throw InvalidWindow("ZPL window is narrower than 3x the estimated linewidth (" + std::to_string(width0) +
                          " nm)");
    }
  }
  // Counts per bin sum to the area.
  const double area0 = has_peak ? excess : 0.0;

  LorentzianSumModel model{2, bw, x_ref};
  detail::SquaredAreaModel search{model};
  FitOptions fo = opt.fit;
  fo.allow_rank_deficient = true;
  const std::span<const double> xs(x), ys(y);
  const double max_width = (hi - lo) / 3.0;

  // Returns the search-space optimum and its final weights, or nothing when the
  // fit fails or leaves the admissible region.
  auto attempt = [&](const VectorXd& q0) -> std::optional<std::pair<FitResult, std::vector<double>>> {
    std::vector<double> w = poisson_weights(y);
    FitResult r = fit_least_squares(search, xs, ys, q0, w, fo);
    for (int pass = 0; pass < opt.reweight_passes && r.converged; ++pass) {
      for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::max(search.value(x[i], r.params), opt.weight_floor);
      r = fit_least_squares(search, xs, ys, r.params, w, fo);
    }
    if (!r.converged) return std::nullopt;
    const VectorXd p = search.natural(r.params);
    if (has_peak) {
      for (int k = 0; k < 2; ++k) {
        if (p[3 * k] < lo || p[3 * k] > hi || p[3 * k + 1] > max_width) return std::nullopt;
      }
    }
    return std::make_pair(std::move(r), std::move(w));
  };

  const double q_area = std::sqrt(0.5 * area0);
  std::vector<VectorXd> starts;
  VectorXd q0(8);
  q0 << x[peak] - 0.5, width0, q_area, x[peak] + 0.5, width0, q_area, intercept0, slope0;
  starts.push_back(q0);
  q0 << x[peak] - 0.25 * width0, 0.5 * width0, q_area, x[peak] + 0.25 * width0, 0.5 * width0, q_area, intercept0,
      slope0;
  starts.push_back(q0);

  std::optional<std::pair<FitResult, std::vector<double>>> best;
  for (const auto& start : starts) {
    auto r = attempt(start);
    if (r && (!best || r->first.residual_norm < best->first.residual_norm)) best = std::move(r);
  }
  if (!best) throw NumericalError("ZPL fit did not converge to an admissible two-component solution");
  const int iterations = best->first.n_iterations;
  FitResult res = evaluate_at(model, xs, ys, search.natural(best->first.params), best->second, fo);
  res.n_iterations = iterations;

  const VectorXd& p = res.params;
  std::array<int, 2> order{0, 1};
  if (p[3] < p[0]) order = {1, 0};

  ZplFit out;
  out.x_ref = x_ref;
  out.bin_width = bw;
  out.window_lo = lo;
  out.window_hi = hi;
  out.intercept = p[6];
  out.slope = p[7];
  MatrixXd perm = MatrixXd::Zero(8, 8);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 3; ++j) perm(3 * k + j, 3 * order[k] + j) = 1.0;
  perm(6, 6) = perm(7, 7) = 1.0;
  out.covariance = perm * res.covariance * perm.transpose();
  out.fit = res;
  out.fit.params = perm * p;
  out.fit.covariance = out.covariance;
  for (int k = 0; k < 2; ++k) {
    auto& c = out.components[k];
    c.center = out.fit.params[3 * k];
    c.fwhm = out.fit.params[3 * k + 1];
    c.area = out.fit.params[3 * k + 2];
    c.center_err = std::sqrt(std::max(0.0, out.covariance(3 * k, 3 * k)));
    c.fwhm_err = std::sqrt(std::max(0.0, out.covariance(3 * k + 1, 3 * k + 1)));
    c.area_err = std::sqrt(std::max(0.0, out.covariance(3 * k + 2, 3 * k + 2)));
    if (!(c.fwhm > 0.0)) throw NumericalError("ZPL fit returned a vanishing linewidth");
  }
  return out;
}

enum class DwfKind { dwf, dwf_star };

struct DwfMeasurement {
  double value = 0.0;
  double uncertainty = 0.0;
  DwfKind kind = DwfKind::dwf;
};

namespace detail {

inline DwfMeasurement dwf_ratio(double n_zpl, double n_total, double n_zpl_err, DwfKind kind) {
  if (!(n_total > 0.0)) throw InvalidInput("normalization band holds no counts");
  DwfMeasurement m;
  m.kind = kind;
  m.value = n_zpl / n_total;
  if (n_zpl > 0.0) {
    m.uncertainty = std::abs(m.value) * std::sqrt(1.0 / n_zpl + 1.0 / n_total);
  } else {
    m.uncertainty = std::max(n_zpl_err, 1.0) / n_total;
  }
  return m;
}

}  // namespace detail

/// DWF = ZPL area / counts in the emission band [band_lo, band_hi].
///
/// The band sum keeps the sideband under the ZPL (the fitted linear baseline) in
/// the denominator only. A known uniform background per bin can be subtracted
/// from the band sum.
inline DwfMeasurement compute_dwf(const Spectrum& s, const ZplFit& zpl, double band_lo_nm = 600.0,
                                  double band_hi_nm = 800.0, double background_per_bin = 0.0) {
  s.validate();
  if (!(band_hi_nm > band_lo_nm)) throw InvalidWindow("emission band is empty");
  if (band_lo_nm > zpl.window_lo || band_hi_nm < zpl.window_hi) {
    throw InvalidWindow("emission band must enclose the ZPL window");
  }
  const auto [first, last] = s.index_range(band_lo_nm, band_hi_nm);
  double total = 0.0;
  for (std::size_t i = first; i < last; ++i) total += s.counts[i] - background_per_bin;
  return detail::dwf_ratio(zpl.total_area(), total, zpl.total_area_err(), DwfKind::dwf);
}

/// DWF* = ZPL area / all recorded counts, background included.
inline DwfMeasurement compute_dwf_star(const Spectrum& s, const ZplFit& zpl) {
  s.validate();
  double total = 0.0;
  for (double c : s.counts) total += c;
  return detail::dwf_ratio(zpl.total_area(), total, zpl.total_area_err(), DwfKind::dwf_star);
}

}  // namespace nvthermo::fit
