#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "nvthermo/errors.hpp"

namespace nvthermo {

/// Sampled intensity record: counts per bin against a strictly increasing axis
/// (nm for photoluminescence, MHz for ODMR).
struct Spectrum {
  std::vector<double> axis;
  std::vector<double> counts;
  double exposure_s = 1.0;
  std::string axis_unit = "nm";

  std::size_t size() const noexcept { return axis.size(); }

  /// Throws InvalidInput when the record breaks its invariants.
  void validate() const {
    if (axis.size() != counts.size()) throw InvalidInput("spectrum axis and counts differ in length");
    if (axis.empty()) throw InvalidInput("spectrum is empty");
    if (!(exposure_s > 0.0) || !std::isfinite(exposure_s)) throw InvalidInput("spectrum exposure must be > 0");
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (!std::isfinite(axis[i]) || !std::isfinite(counts[i])) throw InvalidInput("spectrum holds non-finite values");
      if (counts[i] < 0.0) throw InvalidInput("spectrum counts must be non-negative");
      if (i > 0 && !(axis[i] > axis[i - 1])) throw InvalidInput("spectrum axis must be strictly increasing");
    }
  }

  /// Index range [first, last) of samples with lo <= axis <= hi.
  std::pair<std::size_t, std::size_t> index_range(double lo, double hi) const {
    std::size_t first = 0;
    while (first < axis.size() && axis[first] < lo) ++first;
    std::size_t last = first;
    while (last < axis.size() && axis[last] <= hi) ++last;
    return {first, last};
  }
};

/// Centered moving average; the window shrinks at the edges.
inline std::vector<double> moving_average(const std::vector<double>& y, std::size_t window) {
  const std::size_t n = y.size();
  const std::size_t half = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i >= half ? i - half : 0;
    const std::size_t b = n ? std::min(n - 1, i + half) : 0;
    double sum = 0.0;
    for (std::size_t j = a; j <= b; ++j) sum += y[j];
    out[i] = sum / double(b - a + 1);
  }
  return out;
}

}  // namespace nvthermo
