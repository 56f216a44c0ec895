#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "nvthermo/constants.hpp"
#include "nvthermo/errors.hpp"

namespace nvthermo::thermo {

/// Debye model of the phonon continuum: electron-phonon coupling S and Debye
/// temperature T_D. Valid only for T well below T_D; evaluation is refused above
/// half the Debye temperature.
struct DwfModel {
  double s = constants::dwf_s;
  double t_debye = constants::dwf_t_debye_k;

  void validate() const {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidParameter("DWF coupling S must be > 0");
    if (!(t_debye > 0.0) || !std::isfinite(t_debye)) throw InvalidParameter("Debye temperature must be > 0");
  }
  double max_temperature() const { return 0.5 * t_debye; }
};

namespace detail {

inline void check_dwf_range(double t, const DwfModel& m) {
  m.validate();
  if (!(t >= 0.0) || t > m.max_temperature()) {
    throw RangeError("temperature " + std::to_string(t) + " K outside DWF model range [0, " +
                     std::to_string(m.max_temperature()) + "] K");
  }
}

inline double debye_curvature(const DwfModel& m) {
  return (2.0 / 3.0) * constants::pi * constants::pi / (m.t_debye * m.t_debye);
}

}  // namespace detail

/// exp(-S (1 + (2/3) pi^2 T^2 / T_D^2))
inline double dwf(double t, const DwfModel& m) {
  detail::check_dwf_range(t, m);
  return std::exp(-m.s * (1.0 + detail::debye_curvature(m) * t * t));
}

/// dDWF/dT = -DWF * S * (4/3) pi^2 T / T_D^2
inline double dwf_derivative(double t, const DwfModel& m) {
  const double value = dwf(t, m);
  return -value * m.s * 2.0 * detail::debye_curvature(m) * t;
}

/// Closed-form inverse of dwf().
inline double temperature_from_dwf(double dwf_value, const DwfModel& m) {
  m.validate();
  const double hi = dwf(0.0, m);
  const double lo = dwf(m.max_temperature(), m);
  if (!(dwf_value >= lo && dwf_value <= hi)) {
    throw RangeError("DWF value " + std::to_string(dwf_value) + " outside attainable range [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  const double x = std::max(0.0, -std::log(dwf_value) / m.s - 1.0);
  return std::sqrt(x / detail::debye_curvature(m));
}

/// |DWF / (dDWF/dT)| = 3 T_D^2 / (4 pi^2 S T), in K.
inline double phi(double t, const DwfModel& m) {
  m.validate();
  if (!(t > 0.0)) throw RangeError("phi is undefined at T <= 0");
  return 1.0 / (m.s * 2.0 * detail::debye_curvature(m) * t);
}

enum class ShotNoiseForm { exact, approximate };

/// Smallest detectable temperature change from N collected photons given the
/// DWF value and its temperature slope. The exact form adds the ZPL and total
/// count fluctuations linearly, the approximate form keeps the ZPL term only.
inline double delta_t_min_from(double n_photons, double r, double dwf_value, double dwf_slope,
                               ShotNoiseForm form = ShotNoiseForm::exact) {
  if (!(n_photons > 0.0)) throw InvalidInput("photon count must be > 0");
  if (!(r >= 0.0)) throw InvalidInput("background ratio must be >= 0");
  if (dwf_slope == 0.0) throw RangeError("DWF slope vanishes; temperature is not resolvable");
  const double noise = form == ShotNoiseForm::exact ? dwf_value + std::sqrt(dwf_value)
                                                    : std::sqrt(dwf_value);
  return std::sqrt(1.0 + 3.0 * r) * noise / std::sqrt(n_photons) / std::abs(dwf_slope);
}

inline double delta_t_min(double n_photons, double r, double t, const DwfModel& m,
                          ShotNoiseForm form = ShotNoiseForm::exact) {
  return delta_t_min_from(n_photons, r, dwf(t, m), dwf_derivative(t, m), form);
}

struct SensitivityInput {
  double n_centers = 1.0;
  double collection_eff = 0.021;
  double emission_rate = 40e6;  // photons/s per center
  double background_ratio = 0.0;
  double dwf = 0.005;

  void validate() const {
    if (!(n_centers >= 0.0) || !(collection_eff >= 0.0) || !(emission_rate >= 0.0) ||
        !(background_ratio >= 0.0) || !(dwf >= 0.0)) {
      throw InvalidInput("sensitivity inputs must be non-negative");
    }
    if (collection_eff > 1.0) throw InvalidInput("collection efficiency must be <= 1");
  }

  /// Detected ZPL photon rate n mu gamma DWF.
  double c_zpl() const { return n_centers * collection_eff * emission_rate * dwf; }
};

/// sqrt(1 + 3r) * phi / sqrt(C_ZPL), in K Hz^-1/2.
inline double noise_floor_from_rate(double c_zpl, double r, double phi_k) {
  if (!(c_zpl > 0.0)) throw InvalidInput("ZPL photon rate must be > 0");
  if (!(r >= 0.0)) throw InvalidInput("background ratio must be >= 0");
  return std::sqrt(1.0 + 3.0 * r) * phi_k / std::sqrt(c_zpl);
}

inline double noise_floor(const SensitivityInput& in, double phi_k) {
  in.validate();
  return noise_floor_from_rate(in.c_zpl(), in.background_ratio, phi_k);
}

inline double noise_floor(const SensitivityInput& in, double t, const DwfModel& m) {
  return noise_floor(in, phi(t, m));
}

/// Laser-heating calibration T = T0 + b P.
struct CalibrationLine {
  double t0 = constants::laser_t0_k;
  double b = constants::laser_b_k_per_mw;
};

inline double laser_to_temperature(double p_las_mw, const CalibrationLine& c) {
  if (!(p_las_mw >= 0.0)) throw InvalidInput("laser power must be >= 0");
  if (!(c.t0 > 0.0)) throw InvalidParameter("T0 must be > 0");
  return c.t0 + c.b * p_las_mw;
}

}  // namespace nvthermo::thermo
