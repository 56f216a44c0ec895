#pragma once

// Reference implementations used only by the tests. Each one avoids the code
// path it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "nvthermo/spin/spin_model.hpp"

namespace oracle {

/// Eigenvalues of the 9x9 Hamiltonian through Eigen's tridiagonal QR solver.
inline std::array<double, 9> dense_eigenvalues(const nvthermo::spin::HamiltonianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<nvthermo::spin::Matrix9c> es(h.entries(), Eigen::EigenvaluesOnly);
  std::array<double, 9> out{};
  for (int k = 0; k < 9; ++k) out[k] = es.eigenvalues()[k];
  return out;
}

/// With a_perp = 0 each nuclear manifold is a 3x3 block in m_s: the m_s = 0
/// level sits at -2D/3 and the m_s = +-1 pair at D/3 -+ sqrt(E^2 + (A m_I)^2).
inline std::array<double, 9> block_eigenvalues(double d, double e, double a_par) {
  std::array<double, 9> out{};
  int k = 0;
  for (int m_i = -1; m_i <= 1; ++m_i) {
    const double r = std::hypot(e, a_par * m_i);
    out[k++] = -2.0 * d / 3.0;
    out[k++] = d / 3.0 - r;
    out[k++] = d / 3.0 + r;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Splitting average from the brute-force transitions: one third of the
/// m_I = 0 half-splitting plus two thirds of the mean m_I = +-1 half-splitting.
inline double brute_force_average_splitting(const nvthermo::spin::SpinParams& p) {
  const auto t = nvthermo::spin::transition_frequencies(p);
  double half[3] = {0, 0, 0};  // indexed by m_I + 1
  for (int m_i = -1; m_i <= 1; ++m_i) {
    double lo = 0, up = 0;
    for (const auto& x : t) {
      if (x.m_i != m_i) continue;
      (x.branch == nvthermo::spin::Branch::lower ? lo : up) = x.frequency_mhz;
    }
    half[m_i + 1] = 0.5 * (up - lo);
  }
  return half[1] / 3.0 + (2.0 / 3.0) * 0.5 * (half[0] + half[2]);
}

/// Central finite-difference gradient of a curve model in its parameters, with
/// one Richardson step so narrow lineshapes far from the origin stay accurate.
template <class Model>
Eigen::VectorXd fd_gradient(const Model& m, double x, const Eigen::VectorXd& p, double rel_step = 1e-5) {
  Eigen::VectorXd g(p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    auto central = [&](double h) {
      Eigen::VectorXd a = p, b = p;
      a[j] += h;
      b[j] -= h;
      return (m.value(x, a) - m.value(x, b)) / (2.0 * h);
    };
    const double h = rel_step * std::max(1.0, std::abs(p[j]));
    g[j] = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  }
  return g;
}

/// Largest |analytic - numeric| relative to the gradient scale.
template <class Model>
double gradient_mismatch(const Model& m, double x, const Eigen::VectorXd& p) {
  Eigen::VectorXd g(p.size());
  m.gradient(x, p, g);
  const Eigen::VectorXd n = fd_gradient(m, x, p);
  const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
  return (g - n).cwiseAbs().maxCoeff() / scale;
}

/// Two-sided Student-t quantile for a confidence level.
inline double t_quantile(double confidence, double dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, 0.5 + 0.5 * confidence);
}

/// Lower edge of an acceptable coverage rate: nominal minus three binomial
/// standard errors.
inline double coverage_floor(double nominal, std::size_t trials) {
  return nominal - 3.0 * std::sqrt(nominal * (1.0 - nominal) / double(trials));
}

}  // namespace oracle
