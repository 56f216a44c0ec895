#pragma once

#include "nvthermo/constants.hpp"
#include "nvthermo/thermo/expansion.hpp"
#include "nvthermo/thermo/phonon.hpp"

namespace nvthermo::thermo {

/// Thermal-expansion contribution Gamma * P(T), MHz.
inline double shift_expansion(double t_k, double gamma_mhz_per_gpa, const ExpansionModel& em) {
  return gamma_mhz_per_gpa * thermal_pressure(t_k, em);
}

/// Total zero-field shift: expansion plus quadratic electron-phonon term.
inline double shift_total(double t_k, double gamma_mhz_per_gpa, const ExpansionModel& em,
                          const ElectronPhononSpectral& sf) {
  return shift_expansion(t_k, gamma_mhz_per_gpa, em) + shift_electron_phonon(t_k, sf);
}

/// D(T) = a + b T + c T^2 (MHz), fitted over 294-600 K.
struct QuadraticShift {
  double a = constants::dgs_a_mhz;
  double b = constants::dgs_b_mhz_per_k;
  double c = constants::dgs_c_mhz_per_k2;

  static constexpr double fit_range_lo_k = 294.0;
  static constexpr double fit_range_hi_k = 600.0;
  static bool in_fit_range(double t_k) { return t_k >= fit_range_lo_k && t_k <= fit_range_hi_k; }
};

inline double dgs_quadratic(double t_k, const QuadraticShift& q) { return q.a + q.b * t_k + q.c * t_k * t_k; }

}  // namespace nvthermo::thermo
