#pragma once

#include <cmath>

#include "nvthermo/constants.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/spin/spin_model.hpp"

namespace nvthermo::thermo {

/// Fraction of the transverse spin-spin interaction that survives thermal
/// averaging over the two excited-state orbitals split by strain_energy (meV):
/// tanh(strain_energy / 2 k_B T). Returns 1 at T = 0.
inline double reduction_factor(double t_k, double strain_energy_mev) {
  if (!(strain_energy_mev > 0.0)) throw InvalidParameter("strain energy must be > 0");
  if (!(t_k >= 0.0)) throw InvalidInput("temperature must be >= 0");
  if (t_k == 0.0) return 1.0;
  return std::tanh(strain_energy_mev / (2.0 * constants::k_b_mev_per_k * t_k));
}

struct OrbitalStrainModel {
  double d_perp_es = constants::d_perp_es_mhz;       // MHz
  double strain_energy = constants::strain_energy_mev;  // meV

  void validate() const {
    if (!(d_perp_es > 0.0)) throw InvalidParameter("d_perp_es must be > 0");
    if (!(strain_energy > 0.0)) throw InvalidParameter("strain energy must be > 0");
  }
};

/// Excited-state strain splitting parameter E(T), MHz.
inline double e_es_of_t(double t_k, const OrbitalStrainModel& osm) {
  osm.validate();
  return osm.d_perp_es * reduction_factor(t_k, osm.strain_energy);
}

/// Hyperfine-averaged excited-state half-splitting epsilon(T), MHz.
inline double epsilon_es_of_t(double t_k, const OrbitalStrainModel& osm, double a_par_mhz) {
  return spin::average_splitting(e_es_of_t(t_k, osm), a_par_mhz);
}

}  // namespace nvthermo::thermo
