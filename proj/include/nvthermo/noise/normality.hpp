#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "nvthermo/errors.hpp"
#include "nvthermo/spectrum.hpp"

namespace nvthermo::noise {

/// Pooled standard deviation of (N_i - M_i) / sqrt(M_i), where M_i is the
/// reference rescaled to each spectrum's exposure. Bins with M_i <= 10 are
/// skipped. Unit variance means shot-noise-limited data.
inline double poisson_normality_check(const std::vector<Spectrum>& spectra, const Spectrum& reference) {
  reference.validate();
  double sum = 0.0, sum2 = 0.0;
  std::size_t n = 0;
  for (const auto& s : spectra) {
    s.validate();
    if (s.size() != reference.size()) throw InvalidInput("spectrum and reference differ in length");
    const double scale = s.exposure_s / reference.exposure_s;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (std::abs(s.axis[i] - reference.axis[i]) > 1e-9 * (1.0 + std::abs(s.axis[i]))) {
        throw InvalidInput("spectrum and reference axes differ");
      }
      const double m = reference.counts[i] * scale;
      if (m <= 10.0) continue;
      const double z = (s.counts[i] - m) / std::sqrt(m);
      sum += z;
      sum2 += z * z;
      ++n;
    }
  }
  if (n < 2) throw InvalidInput("fewer than two bins with reference mean above 10");
  const double mean = sum / double(n);
  return std::sqrt(std::max(0.0, (sum2 - double(n) * mean * mean) / double(n - 1)));
}

}  // namespace nvthermo::noise
