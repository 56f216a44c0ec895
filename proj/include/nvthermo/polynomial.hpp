#pragma once

#include <cstddef>
#include <vector>

namespace nvthermo {

/// c[0] + c[1] x + c[2] x^2 + ...
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double x) const {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
    return acc;
  }

  bool is_zero() const {
    for (double c : coeffs)
      if (c != 0.0) return false;
    return true;
  }

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

}  // namespace nvthermo
