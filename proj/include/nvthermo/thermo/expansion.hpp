#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nvthermo/constants.hpp"
#include "nvthermo/csv.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/polynomial.hpp"
#include "nvthermo/thermo/quadrature.hpp"

namespace nvthermo::thermo {

/// Volumetric expansion coefficient e(T) sampled at strictly increasing
/// temperatures, linearly interpolated between rows.
class ExpansionTable {
 public:
  ExpansionTable(std::vector<double> temperature_k, std::vector<double> e_per_k)
      : t_(std::move(temperature_k)), e_(std::move(e_per_k)) {
    if (t_.size() != e_.size() || t_.size() < 2) throw InvalidInput("expansion table needs >= 2 rows");
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (!std::isfinite(t_[i]) || !std::isfinite(e_[i])) throw InvalidInput("expansion table holds non-finite values");
      if (e_[i] < 0.0) throw InvalidInput("expansion coefficient must be >= 0");
      if (i > 0 && !(t_[i] > t_[i - 1])) throw InvalidInput("expansion table temperatures must be strictly increasing");
    }
  }

  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }
  const std::vector<double>& temperatures() const { return t_; }
  const std::vector<double>& values() const { return e_; }

  double operator()(double t) const {
    if (t < t_.front() || t > t_.back()) {
      throw RangeError("temperature " + std::to_string(t) + " K outside expansion table [" +
                       std::to_string(t_.front()) + ", " + std::to_string(t_.back()) + "] K");
    }
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    if (it == t_.end()) return e_.back();
    const std::size_t hi = static_cast<std::size_t>(it - t_.begin());
    const std::size_t lo = hi - 1;
    const double f = (t - t_[lo]) / (t_[hi] - t_[lo]);
    return e_[lo] + f * (e_[hi] - e_[lo]);
  }

 private:
  std::vector<double> t_;
  std::vector<double> e_;
};

/// Parses the `temperature_K,e_per_K` CSV format.
inline ExpansionTable read_expansion_table(std::istream& in) {
  const auto t = csv::read(in, {"temperature_K", "e_per_K"});
  return ExpansionTable(t.columns[0], t.columns[1]);
}

inline ExpansionTable load_expansion_table(const std::string& path) {
  const auto t = csv::read_file(path, {"temperature_K", "e_per_K"});
  return ExpansionTable(t.columns[0], t.columns[1]);
}

/// Bulk modulus B (GPa) and volumetric expansion coefficient e(T) (1/K), given
/// either as a table or as a polynomial in T.
struct ExpansionModel {
  double bulk_modulus_gpa = constants::bulk_modulus_gpa;
  std::variant<Polynomial, ExpansionTable> e;

  double coefficient(double t) const {
    return std::visit([t](const auto& f) { return f(t); }, e);
  }
};

/// P(T) = B * integral_0^T e(t) dt, in GPa.
inline double thermal_pressure(double t, const ExpansionModel& em) {
  if (!(em.bulk_modulus_gpa > 0.0)) throw InvalidParameter("bulk modulus must be > 0");
  if (!(t >= 0.0)) throw RangeError("temperature must be >= 0");
  if (t == 0.0) return 0.0;

  QuadratureOptions opt;
  if (const auto* table = std::get_if<ExpansionTable>(&em.e)) {
    if (table->t_min() > 0.0 || table->t_max() < t) {
      throw RangeError("expansion table does not cover [0, " + std::to_string(t) + "] K");
    }
    opt.breakpoints = table->temperatures();
  } else {
    const auto& poly = std::get<Polynomial>(em.e);
    // Check non-negativity at the quadrature scale instead of for all T.
    for (int i = 0; i <= 32; ++i)
      if (poly(t * i / 32.0) < 0.0) throw InvalidParameter("expansion coefficient must be >= 0");
  }
  const double integral = integrate([&](double x) { return em.coefficient(x); }, 0.0, t, opt);
  return em.bulk_modulus_gpa * integral;
}

}  // namespace nvthermo::thermo
