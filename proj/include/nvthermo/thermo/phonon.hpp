#pragma once

#include <cmath>
#include <vector>

#include "nvthermo/constants.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/polynomial.hpp"
#include "nvthermo/thermo/quadrature.hpp"

namespace nvthermo::thermo {

/// Bose-Einstein occupation of a mode of energy omega (meV) at temperature t (K).
inline double bose_einstein(double omega_mev, double t_k) {
  if (!(omega_mev > 0.0)) throw InvalidInput("phonon energy must be > 0");
  if (!(t_k >= 0.0)) throw InvalidInput("temperature must be >= 0");
  if (t_k == 0.0) return 0.0;
  const double x = omega_mev / (constants::k_b_mev_per_k * t_k);
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

/// Combined spectral function delta(omega) rho(omega) as a polynomial in the
/// phonon energy (meV), MHz per meV, integrated up to the cutoff omega_max.
struct ElectronPhononSpectral {
  Polynomial coeffs;
  double omega_max_mev = constants::phonon_cutoff_mev;
};

/// integral_0^Omega n(omega, T) f(omega) d omega for an arbitrary spectral function.
template <class F>
double shift_electron_phonon(double t_k, F&& spectral, double omega_max_mev,
                             const std::vector<double>& breakpoints = {}) {
  if (!(omega_max_mev > 0.0)) throw InvalidParameter("phonon cutoff must be > 0");
  if (!(t_k >= 0.0)) throw InvalidInput("temperature must be >= 0");
  if (t_k == 0.0) return 0.0;
  QuadratureOptions opt;
  opt.breakpoints = breakpoints;
  return integrate([&](double w) { return bose_einstein(w, t_k) * spectral(w); }, 0.0, omega_max_mev, opt);
}

inline double shift_electron_phonon(double t_k, const ElectronPhononSpectral& sf) {
  if (sf.coeffs.is_zero()) {
    if (!(t_k >= 0.0)) throw InvalidInput("temperature must be >= 0");
    return 0.0;
  }
  return shift_electron_phonon(t_k, sf.coeffs, sf.omega_max_mev);
}

}  // namespace nvthermo::thermo
