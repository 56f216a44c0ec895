#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nvthermo/constants.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/fit/least_squares.hpp"
#include "nvthermo/fit/models.hpp"
#include "nvthermo/thermo/dwf.hpp"
#include "nvthermo/thermo/expansion.hpp"
#include "nvthermo/thermo/shift.hpp"

namespace nvthermo::fit {

namespace detail {

inline void require_points(std::span<const double> x, std::span<const double> y, std::size_t min_points,
                           const char* what) {
  if (x.size() != y.size()) throw InvalidInput(std::string(what) + ": columns differ in length");
  if (x.size() < min_points) {
    throw InvalidInput(std::string(what) + " needs at least " + std::to_string(min_points) + " points");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidInput(std::string(what) + ": non-finite value");
  }
}

inline VectorXd to_vector(std::span<const double> v) {
  return Eigen::Map<const VectorXd>(v.data(), Eigen::Index(v.size()));
}

}  // namespace detail

struct DwfCalibration {
  thermo::DwfModel model;
  Eigen::Matrix2d covariance;  // (S, T_D)
  LinearFit regression;        // ln DWF = alpha + beta T^2

  double s_err() const { return std::sqrt(covariance(0, 0)); }
  double t_debye_err() const { return std::sqrt(covariance(1, 1)); }
};

/// Straight-line fit of ln DWF against T^2: intercept -S, slope
/// -(2/3) pi^2 S / T_D^2. Uncertainties follow by first-order propagation.
inline DwfCalibration fit_dwf_calibration(std::span<const double> t_k, std::span<const double> dwf_values) {
  detail::require_points(t_k, dwf_values, 3, "DWF calibration");
  const auto [tmin, tmax] = std::minmax_element(t_k.begin(), t_k.end());
  if (*tmax - *tmin < 100.0) throw IllConditioned("DWF calibration needs a temperature span of at least 100 K");
  const std::size_t n = t_k.size();
  MatrixXd design(n, 2);
  VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(dwf_values[i] > 0.0 && dwf_values[i] < 1.0)) throw InvalidInput("DWF values must lie in (0, 1)");
    design(i, 0) = 1.0;
    design(i, 1) = t_k[i] * t_k[i];
    y[i] = std::log(dwf_values[i]);
  }
  DwfCalibration out;
  out.regression = linear_least_squares(design, y);
  const double alpha = out.regression.coef[0];
  const double beta = out.regression.coef[1];
  if (!(alpha < 0.0 && beta < 0.0)) {
    throw Unidentifiable("DWF data do not decrease with temperature; S and T_D are undefined");
  }
  out.model.s = -alpha;
  out.model.t_debye = std::sqrt(detail::kDebye * alpha / beta);
  Eigen::Matrix2d jac;
  jac << -1.0, 0.0, out.model.t_debye / (2.0 * alpha), -out.model.t_debye / (2.0 * beta);
  out.covariance = jac * out.regression.covariance * jac.transpose();
  return out;
}

/// Direct nonlinear fit of DWF(T) in (S, T_D), unit weights on DWF.
inline FitResult fit_dwf_curve(std::span<const double> t_k, std::span<const double> dwf_values,
                               const thermo::DwfModel& init = {}, const FitOptions& opt = {}) {
  detail::require_points(t_k, dwf_values, 3, "DWF curve fit");
  VectorXd p0(2);
  p0 << init.s, init.t_debye;
  return fit_least_squares(DwfCurveModel{}, t_k, dwf_values, p0, {}, opt);
}

struct LaserCalibration {
  double s = 0.0;
  double b = 0.0;  // K/mW
  Eigen::Matrix2d covariance;
  FitResult fit;

  double s_err() const { return std::sqrt(covariance(0, 0)); }
  double b_err() const { return std::sqrt(covariance(1, 1)); }
};

/// DWF(t0 + b P) fitted in (S, b) with T_D held fixed.
inline LaserCalibration fit_laser_calibration(std::span<const double> power_mw, std::span<const double> dwf_values,
                                              double t0_k = constants::laser_t0_k,
                                              double t_debye_k = constants::dwf_t_debye_k,
                                              const FitOptions& opt = {}) {
  detail::require_points(power_mw, dwf_values, 3, "laser calibration");
  if (!(t0_k > 0.0) || !(t_debye_k > 0.0)) throw InvalidParameter("t0 and T_D must be > 0");
  for (double v : dwf_values)
    if (!(v > 0.0 && v < 1.0)) throw InvalidInput("DWF values must lie in (0, 1)");
  const double k = detail::kDebye / (t_debye_k * t_debye_k);

  // Seed S from the lowest-power point taken at t0, then b from the implied
  // temperatures by a regression through the origin.
  const std::size_t i0 = std::min_element(power_mw.begin(), power_mw.end()) - power_mw.begin();
  const double s0 = -std::log(dwf_values[i0]) / (1.0 + k * t0_k * t0_k);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < power_mw.size(); ++i) {
    const double u = std::max(0.0, -std::log(dwf_values[i]) / s0 - 1.0);
    const double t = std::sqrt(u / k);
    num += (t - t0_k) * power_mw[i];
    den += power_mw[i] * power_mw[i];
  }
  VectorXd p0(2);
  p0 << s0, den > 0.0 ? num / den : 0.0;

  LaserDwfModel model{t0_k, t_debye_k};
  LaserCalibration out;
  out.fit = fit_least_squares(model, power_mw, dwf_values, p0, {}, opt);
  out.s = out.fit.params[0];
  out.b = out.fit.params[1];
  out.covariance = out.fit.covariance;
  return out;
}

struct QuadraticShiftFit {
  thermo::QuadraticShift coefficients;
  Eigen::Matrix3d covariance;  // (a, b, c)
  double rss = 0.0;
  std::size_t dof = 0;

  double err(int i) const { return std::sqrt(std::max(0.0, covariance(i, i))); }
};

/// Ordinary least squares on the (1, T, T^2) basis.
inline QuadraticShiftFit fit_quadratic_shift(std::span<const double> t_k, std::span<const double> d_mhz) {
  detail::require_points(t_k, d_mhz, 4, "quadratic shift fit");
  const std::size_t n = t_k.size();
  MatrixXd design(n, 3);
  for (std::size_t i = 0; i < n; ++i) design.row(i) << 1.0, t_k[i], t_k[i] * t_k[i];
  const LinearFit lf = linear_least_squares(design, detail::to_vector(d_mhz));
  QuadraticShiftFit out;
  out.coefficients = {lf.coef[0], lf.coef[1], lf.coef[2]};
  out.covariance = lf.covariance;
  out.rss = lf.rss;
  out.dof = lf.dof;
  return out;
}

struct GammaFit {
  double gamma = 0.0;  // MHz/GPa
  double gamma_err = 0.0;
  std::size_t dof = 0;
  std::vector<double> pressure_gpa;
};

/// One-parameter regression Delta D = Gamma * P(T) through the origin.
inline GammaFit fit_expansion_shift(std::span<const double> t_k, std::span<const double> shift_mhz,
                                    const thermo::ExpansionModel& em) {
  detail::require_points(t_k, shift_mhz, 2, "expansion shift fit");
  const std::size_t n = t_k.size();
  GammaFit out;
  MatrixXd design(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    design(i, 0) = thermo::thermal_pressure(t_k[i], em);
    out.pressure_gpa.push_back(design(i, 0));
  }
  if (design.col(0).cwiseAbs().maxCoeff() == 0.0) {
    throw Unidentifiable("thermal pressure vanishes at every temperature; Gamma is undefined");
  }
  const LinearFit lf = linear_least_squares(design, detail::to_vector(shift_mhz));
  out.gamma = lf.coef[0];
  out.gamma_err = lf.stderr_of(0);
  out.dof = lf.dof;
  return out;
}

struct StrainEnergyFit {
  double strain_energy_mev = 0.0;
  double strain_energy_err = 0.0;
  FitResult fit;
};

/// One-parameter fit of the excited-state half-splitting epsilon(T) in the
/// orbital strain energy, with D_perp and A_par held fixed. The starting value
/// is the best point of a logarithmic grid over 0.05-100 meV.
inline StrainEnergyFit fit_strain_energy(std::span<const double> t_k, std::span<const double> eps_mhz,
                                         double d_perp_mhz = constants::d_perp_es_mhz,
                                         double a_par_mhz = constants::a_es_mhz, const FitOptions& opt = {}) {
  detail::require_points(t_k, eps_mhz, 2, "strain energy fit");
  if (!(d_perp_mhz > 0.0)) throw InvalidParameter("d_perp must be > 0");
  for (double t : t_k)
    if (!(t > 0.0)) throw InvalidInput("temperatures must be > 0");
  StrainSplittingModel model{d_perp_mhz, a_par_mhz};

  VectorXd p(1);
  double best = -1.0, best_cost = 0.0;
  for (int k = 0; k <= 400; ++k) {
    p[0] = 0.05 * std::pow(2000.0, k / 400.0);
    double cost = 0.0;
    for (std::size_t i = 0; i < t_k.size(); ++i) {
      const double d = eps_mhz[i] - model.value(t_k[i], p);
      cost += d * d;
    }
    if (best < 0.0 || cost < best_cost) {
      best = p[0];
      best_cost = cost;
    }
  }
  p[0] = best;
  StrainEnergyFit out;
  out.fit = fit_least_squares(model, t_k, eps_mhz, p, {}, opt);
  out.strain_energy_mev = out.fit.params[0];
  out.strain_energy_err = out.fit.stderr_of(0);
  return out;
}

}  // namespace nvthermo::fit
