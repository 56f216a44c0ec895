#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "nvthermo/errors.hpp"

namespace nvthermo::spin {

template <int N>
using ComplexMatrix = Eigen::Matrix<std::complex<double>, N, N>;

template <int N>
struct HermitianEigenSystem {
  Eigen::Matrix<double, N, 1> values;  // ascending
  ComplexMatrix<N> vectors;            // column k belongs to values[k]
  int sweeps = 0;
};

struct JacobiOptions {
  double relative_tolerance = 1e-12;
  int max_sweeps = 100;
};

/// Frobenius norm of the strictly off-diagonal part.
template <int N>
double off_diagonal_norm(const ComplexMatrix<N>& a) {
  double sum = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each (p, q) rotation first removes the phase of a(p, q) and then applies a
/// real Givens rotation, so the combined unitary zeroes a(p, q) exactly. Only
/// the upper triangle drives the sweep; the input must already be Hermitian.
/// Rotations only touch pairs with a nonzero coupling, so exactly decoupled
/// blocks of the input remain decoupled in the eigenvectors.
template <int N>
HermitianEigenSystem<N> jacobi_eigen(ComplexMatrix<N> a, const JacobiOptions& opt = {}) {
  using cd = std::complex<double>;
  HermitianEigenSystem<N> out;
  out.vectors = ComplexMatrix<N>::Identity();

  const double scale = a.norm();
  const double target = opt.relative_tolerance * scale;

  int sweep = 0;
  for (; sweep < opt.max_sweeps; ++sweep) {
    if (off_diagonal_norm<N>(a) <= target) break;
    for (int p = 0; p < N - 1; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const cd apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const cd phase = apq / mag;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // Unitary J acting on columns p, q:
        //   J(p,p) = c,              J(p,q) = s
        //   J(q,p) = -s e^{-i phi},  J(q,q) = c e^{-i phi}
        const cd jpp = c;
        const cd jpq = s;
        const cd jqp = -s * std::conj(phase);
        const cd jqq = c * std::conj(phase);

        // A <- A J
        for (int k = 0; k < N; ++k) {
          const cd akp = a(k, p);
          const cd akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        // A <- J^H A
        for (int k = 0; k < N; ++k) {
          const cd apk = a(p, k);
          const cd aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (int k = 0; k < N; ++k) {
          const cd vkp = out.vectors(k, p);
          const cd vkq = out.vectors(k, q);
          out.vectors(k, p) = vkp * jpp + vkq * jqp;
          out.vectors(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }
  if (off_diagonal_norm<N>(a) > target) {
    throw NumericalError("Jacobi eigensolver did not converge within " +
                         std::to_string(opt.max_sweeps) + " sweeps");
  }
  out.sweeps = sweep;

  std::array<int, N> order;
  std::iota(order.begin(), order.end(), 0);
  // Stable so that exactly degenerate levels keep their basis order.
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });
  ComplexMatrix<N> sorted;
  for (int k = 0; k < N; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    sorted.col(k) = out.vectors.col(order[k]);
  }
  out.vectors = sorted;
  return out;
}

}  // namespace nvthermo::spin
