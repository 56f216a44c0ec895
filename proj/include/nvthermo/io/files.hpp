#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "nvthermo/csv.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/noise/timeseries.hpp"
#include "nvthermo/spectrum.hpp"

namespace nvthermo::io {

/// `axis,counts` with `# exposure_s:` and `# axis_unit:` header comments.
inline void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out.precision(17);
  out << "# exposure_s: " << s.exposure_s << '\n';
  out << "# axis_unit: " << s.axis_unit << '\n';
  out << "axis,counts\n";
  for (std::size_t i = 0; i < s.size(); ++i) out << s.axis[i] << ',' << s.counts[i] << '\n';
}

inline Spectrum read_spectrum_csv(std::istream& in) {
  const auto t = csv::read(in, {"axis", "counts"});
  Spectrum s;
  s.axis = t.columns[0];
  s.counts = t.columns[1];
  if (auto it = t.metadata.find("exposure_s"); it != t.metadata.end()) {
    try {
      s.exposure_s = std::stod(it->second);
    } catch (const std::exception&) {
      throw InvalidInput("exposure_s header is not a number");
    }
  }
  if (auto it = t.metadata.find("axis_unit"); it != t.metadata.end()) s.axis_unit = it->second;
  s.validate();
  return s;
}

inline void write_timeseries_csv(std::ostream& out, const noise::TimeSeries& ts) {
  out.precision(17);
  out << "time_s,value\n";
  for (std::size_t i = 0; i < ts.size(); ++i) out << ts.times[i] << ',' << ts.values[i] << '\n';
}

inline noise::TimeSeries read_timeseries_csv(std::istream& in) {
  const auto t = csv::read(in, {"time_s", "value"});
  noise::TimeSeries ts{t.columns[0], t.columns[1]};
  ts.validate();
  return ts;
}

/// Two named numeric columns, e.g. `temperature_K,dwf`.
struct PointSet {
  std::vector<double> x;
  std::vector<double> y;
};

inline PointSet read_points_csv(std::istream& in, const std::string& x_name, const std::string& y_name) {
  const auto t = csv::read(in, {x_name, y_name});
  return {t.columns[0], t.columns[1]};
}

inline void write_points_csv(std::ostream& out, const std::string& x_name, const std::string& y_name,
                             const std::vector<double>& x, const std::vector<double>& y) {
  out.precision(17);
  out << x_name << ',' << y_name << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) out << x[i] << ',' << y[i] << '\n';
}

inline std::ifstream open_input(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidInput("cannot open '" + p.string() + "'");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw InvalidInput("cannot write '" + p.string() + "'");
  return out;
}

}  // namespace nvthermo::io
