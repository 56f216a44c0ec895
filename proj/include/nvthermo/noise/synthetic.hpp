#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nvthermo/constants.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/lineshape.hpp"
#include "nvthermo/noise/rng.hpp"
#include "nvthermo/spectrum.hpp"
#include "nvthermo/thermo/dwf.hpp"

namespace nvthermo::noise {

/// Shape of a synthetic NV- photoluminescence source.
///
/// The ZPL is two equal Lorentzians split symmetrically about 637 nm. The
/// phonon sideband is a sin^2 bump on [sideband_lo, sideband_hi] that carries
/// the remaining NV- emission so that ZPL / (ZPL + sideband) equals the DWF.
/// A uniform background of r times the ZPL peak rate per bin covers the axis.
struct PlSourceConfig {
  double temperature_k = constants::laser_t0_k;
  thermo::DwfModel dwf_model;
  /// Overrides DWF(T) when set.
  std::optional<double> dwf_value;
  double n_centers = 1.0;
  double collection_eff = 0.021;
  double emission_rate = 40e6;  // photons/s per center
  /// Overrides n * mu * gamma * DWF when set (photons/s).
  std::optional<double> zpl_rate;
  double background_ratio = 0.0;
  double zpl_split_nm = 0.6;
  double zpl_fwhm_nm = 0.4;
  double axis_lo_nm = 560.0;
  double axis_hi_nm = 820.0;
  double bin_nm = 0.05;
  double sideband_lo_nm = 645.0;
  double sideband_hi_nm = 800.0;
  std::uint64_t seed = 1;
};

/// Per-bin photon rates (photons/s) of a synthetic source plus its construction
/// constants.
struct SyntheticSource {
  std::vector<double> axis;
  std::vector<double> rate;            // total
  std::vector<double> zpl_rate;        // NV- ZPL part
  std::vector<double> sideband_rate;   // NV- sideband part
  double background_rate_per_bin = 0.0;
  double zpl_area_rate = 0.0;  // analytic ZPL area, photons/s
  double dwf = 0.0;
  double temperature_k = 0.0;
  double background_ratio = 0.0;
  std::string axis_unit = "nm";
  std::uint64_t seed = 1;

  void validate() const {
    if (axis.size() != rate.size() || axis.empty()) throw InvalidInput("synthetic source axis and rates differ");
    for (double r : rate)
      if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidInput("synthetic rates must be finite and >= 0");
  }
};

inline SyntheticSource make_pl_source(const PlSourceConfig& c) {
  if (!(c.bin_nm > 0.0) || !(c.axis_hi_nm > c.axis_lo_nm)) throw InvalidParameter("invalid PL axis");
  if (!(c.zpl_fwhm_nm > 0.0) || !(c.zpl_split_nm >= 0.0)) throw InvalidParameter("invalid ZPL shape");
  if (!(c.sideband_hi_nm > c.sideband_lo_nm)) throw InvalidParameter("invalid sideband range");
  if (!(c.background_ratio >= 0.0)) throw InvalidParameter("background ratio must be >= 0");

  SyntheticSource s;
  s.seed = c.seed;
  s.temperature_k = c.temperature_k;
  s.background_ratio = c.background_ratio;
  s.dwf = c.dwf_value ? *c.dwf_value : thermo::dwf(c.temperature_k, c.dwf_model);
  if (!(s.dwf > 0.0 && s.dwf < 1.0)) throw InvalidParameter("DWF must lie in (0, 1)");
  s.zpl_area_rate = c.zpl_rate ? *c.zpl_rate : c.n_centers * c.collection_eff * c.emission_rate * s.dwf;
  if (!(s.zpl_area_rate >= 0.0)) throw InvalidParameter("ZPL rate must be >= 0");

  const std::size_t n = std::size_t(std::llround((c.axis_hi_nm - c.axis_lo_nm) / c.bin_nm)) + 1;
  s.axis.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.axis[i] = c.axis_lo_nm + double(i) * c.bin_nm;

  const double c1 = constants::zpl_nv_minus_nm - 0.5 * c.zpl_split_nm;
  const double c2 = constants::zpl_nv_minus_nm + 0.5 * c.zpl_split_nm;
  s.zpl_rate.resize(n);
  s.sideband_rate.assign(n, 0.0);
  double shape_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = s.axis[i];
    s.zpl_rate[i] = 0.5 * s.zpl_area_rate * c.bin_nm *
                    (lorentzian_unit_area(x, c1, c.zpl_fwhm_nm) + lorentzian_unit_area(x, c2, c.zpl_fwhm_nm));
    if (x > c.sideband_lo_nm && x < c.sideband_hi_nm) {
      const double sn = std::sin(constants::pi * (x - c.sideband_lo_nm) / (c.sideband_hi_nm - c.sideband_lo_nm));
      s.sideband_rate[i] = sn * sn;
      shape_sum += sn * sn;
    }
  }
  const double sideband_total = s.zpl_area_rate * (1.0 - s.dwf) / s.dwf;
  if (shape_sum > 0.0)
    for (double& v : s.sideband_rate) v *= sideband_total / shape_sum;

  const double zpl_peak = *std::max_element(s.zpl_rate.begin(), s.zpl_rate.end());
  s.background_rate_per_bin = c.background_ratio * zpl_peak;
  s.rate.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.rate[i] = s.zpl_rate[i] + s.sideband_rate[i] + s.background_rate_per_bin;
  return s;
}

/// Expected counts for an exposure, without noise.
inline Spectrum expected_spectrum(const SyntheticSource& src, double exposure_s) {
  src.validate();
  if (!(exposure_s > 0.0)) throw InvalidInput("exposure must be > 0");
  Spectrum s;
  s.axis = src.axis;
  s.axis_unit = src.axis_unit;
  s.exposure_s = exposure_s;
  s.counts.resize(src.rate.size());
  for (std::size_t i = 0; i < src.rate.size(); ++i) s.counts[i] = src.rate[i] * exposure_s;
  return s;
}

/// counts_i ~ Poisson(rate_i * exposure), drawn from the (seed, stream) stream.
inline Spectrum synthesize_spectrum(const SyntheticSource& src, double exposure_s, std::uint64_t stream = 0) {
  Spectrum s = expected_spectrum(src, exposure_s);
  Rng rng(src.seed, stream);
  for (double& c : s.counts) c = double(rng.poisson(c));
  return s;
}

}  // namespace nvthermo::noise
