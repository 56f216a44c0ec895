#pragma once

#include <numbers>

namespace nvthermo::constants {

/// Boltzmann constant in meV/K. Strain and phonon energies are carried in meV.
inline constexpr double k_b_mev_per_k = 0.08617333;

inline constexpr double pi = std::numbers::pi;

// Low-temperature zero-phonon energies of the visible and infrared transitions (eV).
// Reference values only.
inline constexpr double zpl_visible_ev = 1.946;
inline constexpr double zpl_infrared_ev = 1.19;

inline constexpr double zpl_nv_minus_nm = 637.0;
inline constexpr double zpl_nv_zero_nm = 575.0;

// Room-temperature spin-Hamiltonian parameters (MHz).
inline constexpr double d_gs_mhz = 2870.0;
inline constexpr double a_par_gs_mhz = -2.14;
inline constexpr double a_perp_gs_mhz = -2.70;
inline constexpr double d_es_mhz = 1420.0;
inline constexpr double a_es_mhz = 40.0;  // isotropic; sign not established

/// Low-temperature transverse spin-spin interaction of the excited level (MHz).
inline constexpr double d_perp_es_mhz = 775.0;
/// Excited-level orbital strain splitting (meV).
inline constexpr double strain_energy_mev = 4.7;

// Debye-Waller calibration (oven).
inline constexpr double dwf_s = 4.57;
inline constexpr double dwf_t_debye_k = 1614.0;
// Laser-heating calibration.
inline constexpr double laser_s = 4.79;
inline constexpr double laser_t0_k = 294.0;
inline constexpr double laser_b_k_per_mw = 0.51;

/// Sample-average DWF/(dDWF/dT) at room temperature (K).
inline constexpr double phi_sample_k = 154.0;

inline constexpr double bulk_modulus_gpa = 442.0;
inline constexpr double gamma_gs_mhz_per_gpa = 14.58;
inline constexpr double gamma_es_mhz_per_gpa = 11.0;
/// Highest vibrational energy of diamond (meV).
inline constexpr double phonon_cutoff_mev = 168.0;

// Quadratic D_gs(T) fit coefficients.
inline constexpr double dgs_a_mhz = 2870.0;
inline constexpr double dgs_b_mhz_per_k = 6e-2;
inline constexpr double dgs_c_mhz_per_k2 = -2.3e-4;

}  // namespace nvthermo::constants
