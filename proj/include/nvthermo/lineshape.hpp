#pragma once

#include "nvthermo/constants.hpp"

namespace nvthermo {

/// Lorentzian with unit peak height at x = center.
inline double lorentzian_unit_peak(double x, double center, double fwhm) {
  const double hw = 0.5 * fwhm;
  const double d = x - center;
  return hw * hw / (d * d + hw * hw);
}

/// Lorentzian normalized to unit area.
inline double lorentzian_unit_area(double x, double center, double fwhm) {
  const double hw = 0.5 * fwhm;
  const double d = x - center;
  return hw / (constants::pi * (d * d + hw * hw));
}

}  // namespace nvthermo
