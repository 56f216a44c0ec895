#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nvthermo/constants.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/spin/spin_model.hpp"
#include "nvthermo/thermo/dwf.hpp"
#include "nvthermo/thermo/expansion.hpp"
#include "nvthermo/thermo/strain.hpp"

#ifndef NVTHERMO_DATA_DIR
#define NVTHERMO_DATA_DIR "data"
#endif

namespace nvthermo::io {

/// Run configuration. Every key carries its unit in the name.
struct Config {
  spin::SpinParams ground = spin::SpinParams::ground_state();
  spin::SpinParams excited = spin::SpinParams::excited_state();
  thermo::OrbitalStrainModel strain;
  thermo::DwfModel dwf;
  thermo::CalibrationLine laser;
  double bulk_modulus_gpa = constants::bulk_modulus_gpa;
  double gamma_gs_mhz_per_gpa = constants::gamma_gs_mhz_per_gpa;
  double gamma_es_mhz_per_gpa = constants::gamma_es_mhz_per_gpa;
  std::string expansion_table = std::string(NVTHERMO_DATA_DIR) + "/expansion/diamond_volumetric_expansion.csv";
  double zpl_window_lo_nm = 630.0;
  double zpl_window_hi_nm = 645.0;
  double band_lo_nm = 600.0;
  double band_hi_nm = 800.0;
  thermo::SensitivityInput sensitivity;
  double phi_k = constants::phi_sample_k;
  std::uint64_t seed = 1;

  thermo::ExpansionModel expansion_model() const {
    thermo::ExpansionModel em;
    em.bulk_modulus_gpa = bulk_modulus_gpa;
    em.e = thermo::load_expansion_table(expansion_table);
    return em;
  }

  void validate() const {
    ground.validate();
    excited.validate();
    strain.validate();
    dwf.validate();
    sensitivity.validate();
    if (!(bulk_modulus_gpa > 0.0)) throw InvalidParameter("bulk_modulus_gpa must be > 0");
    if (!(zpl_window_hi_nm > zpl_window_lo_nm)) throw InvalidParameter("ZPL window is empty");
    if (!(band_hi_nm > band_lo_nm)) throw InvalidParameter("emission band is empty");
    if (!(phi_k > 0.0)) throw InvalidParameter("phi_k must be > 0");
    if (!std::filesystem::exists(expansion_table)) {
      throw InvalidInput("expansion table '" + expansion_table + "' does not exist");
    }
  }

  /// Canonical key = value listing, used for hashing and echoing.
  std::string canonical() const {
    std::ostringstream o;
    o.precision(17);
    for (const auto& [k, v] : entries()) o << k << " = " << v << '\n';
    return o.str();
  }

  std::map<std::string, std::string> entries() const {
    std::map<std::string, std::string> m;
    auto put = [&](const std::string& k, double v) {
      std::ostringstream o;
      o.precision(17);
      o << v;
      m[k] = o.str();
    };
    put("ground_state.d_mhz", ground.d);
    put("ground_state.e_mhz", ground.e);
    put("ground_state.a_par_mhz", ground.a_par);
    put("ground_state.a_perp_mhz", ground.a_perp);
    put("excited_state.d_mhz", excited.d);
    put("excited_state.e_mhz", excited.e);
    put("excited_state.a_par_mhz", excited.a_par);
    put("excited_state.a_perp_mhz", excited.a_perp);
    put("excited_state.d_perp_mhz", strain.d_perp_es);
    put("excited_state.strain_energy_mev", strain.strain_energy);
    put("dwf.s", dwf.s);
    put("dwf.t_debye_k", dwf.t_debye);
    put("dwf.laser_t0_k", laser.t0);
    put("dwf.laser_b_k_per_mw", laser.b);
    put("expansion.bulk_modulus_gpa", bulk_modulus_gpa);
    put("expansion.gamma_gs_mhz_per_gpa", gamma_gs_mhz_per_gpa);
    put("expansion.gamma_es_mhz_per_gpa", gamma_es_mhz_per_gpa);
    m["expansion.table_path"] = expansion_table;
    put("fit.zpl_window_lo_nm", zpl_window_lo_nm);
    put("fit.zpl_window_hi_nm", zpl_window_hi_nm);
    put("fit.band_lo_nm", band_lo_nm);
    put("fit.band_hi_nm", band_hi_nm);
    put("sensitivity.n_centers", sensitivity.n_centers);
    put("sensitivity.collection_eff", sensitivity.collection_eff);
    put("sensitivity.emission_rate_per_s", sensitivity.emission_rate);
    put("sensitivity.background_ratio", sensitivity.background_ratio);
    put("sensitivity.dwf", sensitivity.dwf);
    put("sensitivity.phi_k", phi_k);
    m["rng.seed"] = std::to_string(seed);
    return m;
  }
};

namespace detail {

inline double parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput("config key '" + key + "': '" + text + "' is not a number");
  }
}

}  // namespace detail

/// Reads an INI file over the defaults. Unknown sections or keys are errors so
/// that a misspelled unit suffix cannot pass silently. A relative table path is
/// resolved against the config file's directory.
inline Config load_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidInput(std::string("config parse error: ") + e.what());
  }
  Config c;
  const auto known = c.entries();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw InvalidInput("config key '" + section + "' lies outside a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!known.count(full)) throw InvalidInput("unknown config key '" + full + "'");
      const std::string text = value.get_value<std::string>();
      if (full == "expansion.table_path") {
        std::filesystem::path p(text);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        c.expansion_table = p.string();
        continue;
      }
      if (full == "rng.seed") {
        const double v = detail::parse_number(full, text);
        if (v < 0.0 || v != std::floor(v)) throw InvalidInput("rng.seed must be a non-negative integer");
        c.seed = std::uint64_t(v);
        continue;
      }
      const double v = detail::parse_number(full, text);
      static const std::map<std::string, double Config::*> top = {
          {"expansion.bulk_modulus_gpa", &Config::bulk_modulus_gpa},
          {"expansion.gamma_gs_mhz_per_gpa", &Config::gamma_gs_mhz_per_gpa},
          {"expansion.gamma_es_mhz_per_gpa", &Config::gamma_es_mhz_per_gpa},
          {"fit.zpl_window_lo_nm", &Config::zpl_window_lo_nm},
          {"fit.zpl_window_hi_nm", &Config::zpl_window_hi_nm},
          {"fit.band_lo_nm", &Config::band_lo_nm},
          {"fit.band_hi_nm", &Config::band_hi_nm},
          {"sensitivity.phi_k", &Config::phi_k}};
      if (auto it = top.find(full); it != top.end()) {
        c.*(it->second) = v;
      } else if (full == "ground_state.d_mhz") c.ground.d = v;
      else if (full == "ground_state.e_mhz") c.ground.e = v;
      else if (full == "ground_state.a_par_mhz") c.ground.a_par = v;
      else if (full == "ground_state.a_perp_mhz") c.ground.a_perp = v;
      else if (full == "excited_state.d_mhz") c.excited.d = v;
      else if (full == "excited_state.e_mhz") c.excited.e = v;
      else if (full == "excited_state.a_par_mhz") c.excited.a_par = v;
      else if (full == "excited_state.a_perp_mhz") c.excited.a_perp = v;
      else if (full == "excited_state.d_perp_mhz") c.strain.d_perp_es = v;
      else if (full == "excited_state.strain_energy_mev") c.strain.strain_energy = v;
      else if (full == "dwf.s") c.dwf.s = v;
      else if (full == "dwf.t_debye_k") c.dwf.t_debye = v;
      else if (full == "dwf.laser_t0_k") c.laser.t0 = v;
      else if (full == "dwf.laser_b_k_per_mw") c.laser.b = v;
      else if (full == "sensitivity.n_centers") c.sensitivity.n_centers = v;
      else if (full == "sensitivity.collection_eff") c.sensitivity.collection_eff = v;
      else if (full == "sensitivity.emission_rate_per_s") c.sensitivity.emission_rate = v;
      else if (full == "sensitivity.background_ratio") c.sensitivity.background_ratio = v;
      else if (full == "sensitivity.dwf") c.sensitivity.dwf = v;
    }
  }
  c.validate();
  return c;
}

inline Config load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path.string() + "'");
  return load_config(in, path.parent_path());
}

}  // namespace nvthermo::io
