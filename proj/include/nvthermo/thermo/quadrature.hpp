#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nvthermo/errors.hpp"

namespace nvthermo::thermo {

template <int N>
struct GaussLegendreRule {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};
};

/// N-point Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_N.
template <int N>
const GaussLegendreRule<N>& gauss_legendre_rule() {
  static const GaussLegendreRule<N> rule = [] {
    GaussLegendreRule<N> r;
    const int m = (N + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= N; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        dp = N * (z * p1 - p2) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      r.nodes[i] = -z;
      r.nodes[N - 1 - i] = z;
      r.weights[i] = r.weights[N - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
  }();
  return rule;
}

/// Fixed-order rule on [a, b]; exact for polynomials of degree <= 2N - 1.
template <int N = 10, class F>
double gauss_legendre(F&& f, double a, double b) {
  const auto& rule = gauss_legendre_rule<N>();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < N; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

struct QuadratureOptions {
  double relative_tolerance = 1e-8;
  int max_depth = 50;
  std::vector<double> breakpoints;  // interior points where f has kinks or jumps
};

namespace detail {

template <class F>
double adaptive_segment(F& f, double a, double b, double whole, double scale_density,
                        const QuadratureOptions& opt, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss_legendre(f, a, m);
  const double right = gauss_legendre(f, m, b);
  const double refined = left + right;
  const double tol = opt.relative_tolerance *
                     std::max(std::abs(refined), scale_density * (b - a));
  if (std::abs(refined - whole) <= tol) return refined;
  if (depth >= opt.max_depth) {
    throw NumericalError("adaptive quadrature failed to converge on [" + std::to_string(a) +
                         ", " + std::to_string(b) + "]");
  }
  return adaptive_segment(f, a, m, left, scale_density, opt, depth + 1) +
         adaptive_segment(f, m, b, right, scale_density, opt, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Legendre integral of f over [a, b] by interval halving.
///
/// A subinterval is accepted when the 10-point estimate and the sum over its two
/// halves agree to the relative tolerance, measured against the larger of the
/// local value and the subinterval's share of the integral of |f|. Throws
/// NumericalError when max_depth is reached without agreement.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (!(b >= a)) throw InvalidInput("integration bounds must satisfy a <= b");
  if (a == b) return 0.0;
  std::vector<double> cuts{a};
  for (double p : opt.breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double abs_total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    abs_total += gauss_legendre([&](double x) { return std::abs(f(x)); }, cuts[i], cuts[i + 1]);
  const double scale_density = abs_total / (b - a);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double whole = gauss_legendre(f, cuts[i], cuts[i + 1]);
    total += detail::adaptive_segment(f, cuts[i], cuts[i + 1], whole, scale_density, opt, 0);
  }
  return total;
}

}  // namespace nvthermo::thermo
