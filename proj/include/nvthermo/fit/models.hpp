#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

#include "nvthermo/constants.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/thermo/expansion.hpp"

namespace nvthermo::fit {

using Eigen::VectorXd;

/// y = p0 + p1 x
struct LinearModel {
  std::size_t arity() const { return 2; }
  double value(double x, const VectorXd& p) const { return p[0] + p[1] * x; }
  void gradient(double x, const VectorXd&, VectorXd& g) const {
    g[0] = 1.0;
    g[1] = x;
  }
};

/// y = p0 + p1 x + p2 x^2
struct QuadraticModel {
  std::size_t arity() const { return 3; }
  double value(double x, const VectorXd& p) const { return p[0] + x * (p[1] + x * p[2]); }
  void gradient(double x, const VectorXd&, VectorXd& g) const {
    g[0] = 1.0;
    g[1] = x;
    g[2] = x * x;
  }
};

/// Sum of area-normalized Lorentzians on a linear baseline, evaluated as counts
/// per bin of width bin_width.
///
/// Parameters: (center, fwhm, area) per component, then intercept and slope of
/// the baseline about x_ref. Areas are total counts under each component.
struct LorentzianSumModel {
  std::size_t n_components = 2;
  double bin_width = 1.0;
  double x_ref = 0.0;

  std::size_t arity() const { return 3 * n_components + 2; }

  double value(double x, const VectorXd& p) const {
    double v = p[3 * n_components] + p[3 * n_components + 1] * (x - x_ref);
    for (std::size_t k = 0; k < n_components; ++k) {
      const double d = x - p[3 * k];
      const double h = 0.5 * p[3 * k + 1];
      v += bin_width * p[3 * k + 2] * h / (constants::pi * (d * d + h * h));
    }
    return v;
  }

  void gradient(double x, const VectorXd& p, VectorXd& g) const {
    for (std::size_t k = 0; k < n_components; ++k) {
      const double d = x - p[3 * k];
      const double h = 0.5 * p[3 * k + 1];
      const double q = d * d + h * h;
      const double scale = bin_width * p[3 * k + 2] / constants::pi;
      g[3 * k] = scale * 2.0 * d * h / (q * q);
      g[3 * k + 1] = 0.5 * scale * (d * d - h * h) / (q * q);
      g[3 * k + 2] = bin_width * h / (constants::pi * q);
    }
    g[3 * n_components] = 1.0;
    g[3 * n_components + 1] = x - x_ref;
  }
};

/// baseline * (1 - sum_k contrast_k * L_k(x)) with unit-peak Lorentzians.
///
/// Parameters: (center, fwhm, contrast) per line, then baseline.
struct OdmrModel {
  std::size_t n_lines = 2;

  std::size_t arity() const { return 3 * n_lines + 1; }

  double value(double x, const VectorXd& p) const {
    double dip = 0.0;
    for (std::size_t k = 0; k < n_lines; ++k) {
      const double d = x - p[3 * k];
      const double h = 0.5 * p[3 * k + 1];
      dip += p[3 * k + 2] * h * h / (d * d + h * h);
    }
    return p[3 * n_lines] * (1.0 - dip);
  }

  void gradient(double x, const VectorXd& p, VectorXd& g) const {
    const double base = p[3 * n_lines];
    double dip = 0.0;
    for (std::size_t k = 0; k < n_lines; ++k) {
      const double d = x - p[3 * k];
      const double h = 0.5 * p[3 * k + 1];
      const double q = d * d + h * h;
      const double shape = h * h / q;
      const double c = p[3 * k + 2];
      dip += c * shape;
      g[3 * k] = -base * c * 2.0 * d * h * h / (q * q);
      g[3 * k + 1] = -base * c * 0.5 * 2.0 * h * d * d / (q * q);
      g[3 * k + 2] = -base * shape;
    }
    g[3 * n_lines] = 1.0 - dip;
  }
};

namespace detail {
constexpr double kDebye = 2.0 / 3.0 * constants::pi * constants::pi;
}

/// DWF(T) = exp(-S (1 + (2/3) pi^2 T^2 / T_D^2)); parameters (S, T_D).
struct DwfCurveModel {
  std::size_t arity() const { return 2; }

  double value(double t, const VectorXd& p) const {
    return std::exp(-p[0] * (1.0 + detail::kDebye * t * t / (p[1] * p[1])));
  }

  void gradient(double t, const VectorXd& p, VectorXd& g) const {
    const double u = detail::kDebye * t * t / (p[1] * p[1]);
    const double f = std::exp(-p[0] * (1.0 + u));
    g[0] = -f * (1.0 + u);
    g[1] = f * p[0] * 2.0 * u / p[1];
  }
};

/// DWF at T = t0 + b P with T_D held fixed; parameters (S, b), x is laser power.
struct LaserDwfModel {
  double t0 = constants::laser_t0_k;
  double t_debye = constants::dwf_t_debye_k;

  std::size_t arity() const { return 2; }

  double value(double power, const VectorXd& p) const {
    const double t = t0 + p[1] * power;
    return std::exp(-p[0] * (1.0 + detail::kDebye * t * t / (t_debye * t_debye)));
  }

  void gradient(double power, const VectorXd& p, VectorXd& g) const {
    const double t = t0 + p[1] * power;
    const double k = detail::kDebye / (t_debye * t_debye);
    const double f = std::exp(-p[0] * (1.0 + k * t * t));
    g[0] = -f * (1.0 + k * t * t);
    g[1] = -f * p[0] * k * 2.0 * t * power;
  }
};

/// Delta D(T) = Gamma * P(T); single parameter Gamma (MHz/GPa).
struct ExpansionShiftModel {
  const thermo::ExpansionModel* expansion = nullptr;

  std::size_t arity() const { return 1; }
  double value(double t, const VectorXd& p) const { return p[0] * thermo::thermal_pressure(t, *expansion); }
  void gradient(double t, const VectorXd&, VectorXd& g) const { g[0] = thermo::thermal_pressure(t, *expansion); }
};

/// epsilon(T) = E/3 + (2/3) sqrt(A^2 + E^2), E = D_perp tanh(h xi / 2 k_B T);
/// single parameter h xi (meV).
struct StrainSplittingModel {
  double d_perp = constants::d_perp_es_mhz;
  double a_par = constants::a_es_mhz;

  std::size_t arity() const { return 1; }

  double value(double t, const VectorXd& p) const {
    const double e = d_perp * std::tanh(p[0] / (2.0 * constants::k_b_mev_per_k * t));
    return e / 3.0 + (2.0 / 3.0) * std::hypot(a_par, e);
  }

  void gradient(double t, const VectorXd& p, VectorXd& g) const {
    const double kt2 = 2.0 * constants::k_b_mev_per_k * t;
    const double th = std::tanh(p[0] / kt2);
    const double e = d_perp * th;
    const double root = std::hypot(a_par, e);
    const double de_dx = d_perp * (1.0 - th * th) / kt2;
    const double deps_de = 1.0 / 3.0 + (root > 0.0 ? (2.0 / 3.0) * e / root : 0.0);
    g[0] = deps_de * de_dx;
  }
};

}  // namespace nvthermo::fit
