#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nvthermo/errors.hpp"
#include "nvthermo/fit/least_squares.hpp"
#include "nvthermo/fit/models.hpp"
#include "nvthermo/spectrum.hpp"
#include "nvthermo/spin/spin_model.hpp"

namespace nvthermo::fit {

struct OdmrLine {
  double center = 0.0;
  double fwhm = 0.0;
  double contrast = 0.0;
  double center_err = 0.0;
  double fwhm_err = 0.0;
  double contrast_err = 0.0;
};

struct OdmrFit {
  std::vector<OdmrLine> lines;  // ascending center
  double baseline = 0.0;  // counts/s
  /// Mean of the line centers.
  double d = 0.0;
  double d_err = 0.0;
  /// Half the distance between the outermost centers; absent for one line.
  std::optional<double> splitting;
  std::optional<double> splitting_err;
  bool degenerate = false;
  std::vector<std::string> warnings;
  /// Widths are fitted independently per line.
  bool shared_width = false;
  FitResult fit;
};

namespace detail {

/// Initial guess from the lowest local minima of the 5-bin moving average.
/// Minima closer than one estimated linewidth to a chosen one are skipped.
inline spin::OdmrLineModel seed_odmr(const Spectrum& s, std::size_t n_lines) {
  const auto& x = s.axis;
  const auto sm = nvthermo::moving_average(s.counts, 5);
  const std::size_t n = sm.size();
  const double base = *std::max_element(sm.begin(), sm.end());

  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || i + 1 == n) continue;
    if (sm[i] < sm[i - 1] && sm[i] <= sm[i + 1]) minima.push_back(i);
  }
  std::stable_sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return sm[a] < sm[b]; });

  double width = 2.0 * (x[1] - x[0]);
  if (!minima.empty()) {
    const std::size_t m = minima.front();
    const double half = 0.5 * (base + sm[m]);
    std::size_t l = m, r = m;
    while (l > 0 && sm[l] < half) --l;
    while (r + 1 < n && sm[r] < half) ++r;
    width = std::max(width, x[r] - x[l]);
  }

  std::vector<std::size_t> chosen;
  for (std::size_t m : minima) {
    if (chosen.size() == n_lines) break;
    bool far = true;
    for (std::size_t c : chosen)
      if (std::abs(x[m] - x[c]) < width) far = false;
    if (far) chosen.push_back(m);
  }
  if (chosen.size() < n_lines) {
    throw InvalidInput("ODMR spectrum shows " + std::to_string(chosen.size()) + " resolvable dips, " +
                       std::to_string(n_lines) + " requested; pass an explicit initial model");
  }
  std::sort(chosen.begin(), chosen.end());

  spin::OdmrLineModel init;
  init.baseline = base / s.exposure_s;
  for (std::size_t c : chosen) {
    init.centers.push_back(x[c]);
    init.widths.push_back(width);
    init.contrasts.push_back(base > 0.0 ? std::clamp(1.0 - sm[c] / base, 1e-4, 0.9) : 0.01);
  }
  return init;
}

}  // namespace detail

/// Multi-Lorentzian ODMR fit with independent widths and Poisson weights.
///
/// Without an initial model the line centers are seeded from the lowest local
/// minima of a 5-bin moving average (leftmost first on ties).
inline OdmrFit fit_odmr(const Spectrum& s, std::size_t n_lines,
                        std::optional<spin::OdmrLineModel> init = std::nullopt, const FitOptions& opt = {}) {
  s.validate();
  if (n_lines < 1 || n_lines > 6) throw InvalidInput("ODMR fits take 1 to 6 lines");
  if (s.size() < 3 * n_lines + 2) throw InvalidInput("too few ODMR samples for the requested lines");
  spin::OdmrLineModel seed = init ? *init : detail::seed_odmr(s, n_lines);
  seed.validate();
  if (seed.centers.size() != n_lines) throw InvalidInput("initial ODMR model has the wrong number of lines");

  OdmrModel model{n_lines};
  VectorXd p0(model.arity());
  for (std::size_t k = 0; k < n_lines; ++k) {
    p0[3 * k] = seed.centers[k];
    p0[3 * k + 1] = seed.widths[k];
    p0[3 * k + 2] = seed.contrasts[k];
  }
  p0[3 * n_lines] = seed.baseline * s.exposure_s;
  const auto w = poisson_weights(s.counts);
  FitOptions fo = opt;
  fo.allow_rank_deficient = true;
  FitResult res = fit_least_squares(model, s, p0, w, fo);
  if (!res.converged) throw NumericalError("ODMR fit did not converge");

  OdmrFit out;
  out.baseline = res.params[3 * n_lines] / s.exposure_s;
  std::vector<std::size_t> order(n_lines);
  for (std::size_t k = 0; k < n_lines; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return res.params[3 * a] < res.params[3 * b]; });
  for (std::size_t k : order) {
    OdmrLine l;
    l.center = res.params[3 * k];
    l.fwhm = std::abs(res.params[3 * k + 1]);
    l.contrast = res.params[3 * k + 2];
    l.center_err = res.stderr_of(3 * k);
    l.fwhm_err = res.stderr_of(3 * k + 1);
    l.contrast_err = res.stderr_of(3 * k + 2);
    out.lines.push_back(l);
  }

  VectorXd mean_w = VectorXd::Zero(model.arity());
  for (std::size_t k = 0; k < n_lines; ++k) mean_w[3 * k] = 1.0 / double(n_lines);
  out.d = mean_w.dot(res.params);
  out.d_err = std::sqrt(std::max(0.0, double(mean_w.transpose() * res.covariance * mean_w)));
  if (n_lines >= 2) {
    VectorXd half_w = VectorXd::Zero(model.arity());
    half_w[3 * order.back()] = 0.5;
    half_w[3 * order.front()] = -0.5;
    out.splitting = half_w.dot(res.params);
    out.splitting_err = std::sqrt(std::max(0.0, double(half_w.transpose() * res.covariance * half_w)));
  }
  for (std::size_t k = 1; k < n_lines; ++k) {
    const double sep = out.lines[k].center - out.lines[k - 1].center;
    const double w_min = std::min(out.lines[k].fwhm, out.lines[k - 1].fwhm);
    if (sep < 0.1 * w_min) {
      out.degenerate = true;
      out.warnings.push_back("lines " + std::to_string(k - 1) + " and " + std::to_string(k) +
                             " overlap (separation below a tenth of the linewidth)");
    }
  }
  if (res.rank_deficient) {
    out.degenerate = true;
    out.warnings.push_back("line parameters are not separately identifiable; covariance is a pseudo-inverse");
  }
  out.fit = std::move(res);
  return out;
}

}  // namespace nvthermo::fit
