#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nvthermo/constants.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/lineshape.hpp"
#include "nvthermo/spectrum.hpp"
#include "nvthermo/spin/hermitian_jacobi.hpp"

namespace nvthermo::spin {

using Matrix3c = ComplexMatrix<3>;
using Matrix9c = ComplexMatrix<9>;

/// Spin-Hamiltonian coefficients of one electronic level, all in MHz.
struct SpinParams {
  double d = 0.0;       // zero-field splitting
  double e = 0.0;       // strain splitting
  double a_par = 0.0;   // axial 14N hyperfine
  double a_perp = 0.0;  // transverse 14N hyperfine

  void validate() const {
    nvthermo::detail::require_finite(d, "d");
    nvthermo::detail::require_finite(e, "e");
    nvthermo::detail::require_finite(a_par, "a_par");
    nvthermo::detail::require_finite(a_perp, "a_perp");
  }

  static SpinParams ground_state() {
    return {constants::d_gs_mhz, 0.0, constants::a_par_gs_mhz, constants::a_perp_gs_mhz};
  }
  static SpinParams excited_state() {
    return {constants::d_es_mhz, 0.0, constants::a_es_mhz, constants::a_es_mhz};
  }
};

struct SpinOperators {
  Matrix3c sx, sy, sz;
};

/// Spin-1 matrices in the |+1>, |0>, |-1> basis.
inline SpinOperators build_spin_operators() {
  using cd = std::complex<double>;
  const double r2 = std::sqrt(2.0);
  Matrix3c splus = Matrix3c::Zero();
  splus(0, 1) = r2;
  splus(1, 2) = r2;
  const Matrix3c sminus = splus.adjoint();
  SpinOperators ops;
  ops.sx = 0.5 * (splus + sminus);
  ops.sy = (splus - sminus) / cd(0.0, 2.0);
  ops.sz = Matrix3c::Zero();
  ops.sz(0, 0) = 1.0;
  ops.sz(2, 2) = -1.0;
  return ops;
}

/// Kronecker product a (electron) x b (nucleus).
inline Matrix9c kron(const Matrix3c& a, const Matrix3c& b) {
  Matrix9c out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
  return out;
}

/// Basis index of |m_s> (x) |m_I>, both ordered +1, 0, -1.
constexpr int basis_index(int m_s, int m_i) { return (1 - m_s) * 3 + (1 - m_i); }

/// 9x9 Hermitian Hamiltonian in MHz. Only constructible from a Hermitian matrix.
class HamiltonianMatrix {
 public:
  /// Validates Hermiticity to 1e-12 relative.
  static HamiltonianMatrix from_entries(const Matrix9c& m) {
    const double scale = std::max(m.norm(), 1e-300);
    if ((m - m.adjoint()).norm() > 1e-12 * scale) {
      throw ContractViolation("Hamiltonian matrix is not Hermitian");
    }
    return HamiltonianMatrix(m);
  }

  const Matrix9c& entries() const noexcept { return m_; }

 private:
  explicit HamiltonianMatrix(const Matrix9c& m) : m_(m) {}
  Matrix9c m_;
};

/// D(Sz^2 - 2/3) + E(Sy^2 - Sx^2) + A_par Sz Iz + A_perp (Sx Ix + Sy Iy).
inline HamiltonianMatrix build_hamiltonian(const SpinParams& p) {
  p.validate();
  const SpinOperators s = build_spin_operators();
  const Matrix3c id = Matrix3c::Identity();
  Matrix9c h = p.d * kron(s.sz * s.sz - (2.0 / 3.0) * id, id) +
               p.e * kron(s.sy * s.sy - s.sx * s.sx, id) +
               p.a_par * kron(s.sz, s.sz) +
               p.a_perp * (kron(s.sx, s.sx) + kron(s.sy, s.sy));
  // Symmetrize so the stored entries are exactly Hermitian.
  const Matrix9c herm = 0.5 * (h + h.adjoint());
  return HamiltonianMatrix::from_entries(herm);
}

inline HermitianEigenSystem<9> diagonalize(const HamiltonianMatrix& h) {
  return jacobi_eigen<9>(h.entries());
}

/// Ascending eigenvalues in MHz.
inline std::array<double, 9> eigenvalues(const HamiltonianMatrix& h) {
  const auto sys = diagonalize(h);
  std::array<double, 9> out{};
  for (int k = 0; k < 9; ++k) out[k] = sys.values[k];
  return out;
}

enum class Branch { lower, upper };

struct Transition {
  double frequency_mhz;
  int m_i;
  Branch branch;
};

/// m_s = 0 <-> m_s = +-1 lines, two per nuclear manifold, ordered m_I = +1, 0, -1
/// and lower before upper.
using TransitionSet = std::vector<Transition>;

namespace detail {

struct LevelLabel {
  int ms_class;  // 0 for m_s = 0, 1 for m_s = +-1
  int mi_class;  // |m_I|
  double weight;
};

/// Block with the largest share of the eigenvector's norm, blocks being
/// (|m_s|, |m_I|) classes.
inline LevelLabel label_level(const Eigen::Matrix<std::complex<double>, 9, 1>& v) {
  LevelLabel best{-1, 0, -1.0};
  for (int ms_class = 0; ms_class <= 1; ++ms_class) {
    for (int mi_class = 0; mi_class <= 1; ++mi_class) {
      double w = 0.0;
      for (int ms = -ms_class; ms <= ms_class; ms += (ms_class ? 2 : 1))
        for (int mi = -mi_class; mi <= mi_class; mi += (mi_class ? 2 : 1)) w += std::norm(v[basis_index(ms, mi)]);
      if (w > best.weight) best = {ms_class, mi_class, w};
    }
  }
  return best;
}

}  // namespace detail

/// Eigenvalue differences between the m_s = 0 level and the two m_s = +-1
/// levels inside each nuclear manifold (Delta m_I = 0).
///
/// Each eigenvector is assigned to the (|m_s|, |m_I|) block that carries the
/// largest share of its norm. The transverse hyperfine term conserves the joint
/// flip (m_s, m_I) -> (-m_s, -m_I), so eigenstates mix m_I = +1 and -1 equally
/// and only |m_I| is a good label; inside |m_I| = 1 the energy-ordered levels
/// are dealt alternately to m_I = +1 and -1. A share of 0.5 or less, or a block
/// with the wrong number of levels, raises DegeneracyError.
inline TransitionSet transition_frequencies(const SpinParams& p) {
  const auto sys = diagonalize(build_hamiltonian(p));
  std::vector<double> raw(sys.values.data(), sys.values.data() + 9);

  std::array<std::vector<double>, 2> zero_levels, pm_levels;  // by |m_I|
  for (int k = 0; k < 9; ++k) {
    const auto lab = detail::label_level(sys.vectors.col(k));
    if (lab.weight <= 0.5) {
      throw DegeneracyError("ambiguous spin-level assignment (max block weight " +
                                std::to_string(lab.weight) + ")",
                            raw);
    }
    auto& bucket = lab.ms_class == 0 ? zero_levels[lab.mi_class] : pm_levels[lab.mi_class];
    bucket.push_back(sys.values[k]);
  }
  for (int c = 0; c <= 1; ++c) {
    const std::size_t mult = c == 0 ? 1 : 2;
    if (zero_levels[c].size() != mult || pm_levels[c].size() != 2 * mult) {
      throw DegeneracyError("nuclear manifold |m_I|=" + std::to_string(c) +
                                " does not hold the expected m_s=0 and m_s=+-1 levels",
                            raw);
    }
    std::sort(zero_levels[c].begin(), zero_levels[c].end());
    std::sort(pm_levels[c].begin(), pm_levels[c].end());
  }

  TransitionSet out;
  out.reserve(6);
  for (int m_i = 1; m_i >= -1; --m_i) {
    double z, lo, up;
    if (m_i == 0) {
      z = zero_levels[0][0];
      lo = pm_levels[0][0];
      up = pm_levels[0][1];
    } else {
      const std::size_t slot = m_i == 1 ? 0 : 1;
      z = zero_levels[1][slot];
      lo = pm_levels[1][slot];
      up = pm_levels[1][2 + slot];
    }
    if (!(lo - z > 0.0)) {
      throw InvalidParameter("transition frequencies must be positive; d must dominate the other terms");
    }
    out.push_back({lo - z, m_i, Branch::lower});
    out.push_back({up - z, m_i, Branch::upper});
  }
  return out;
}

/// Hyperfine-weighted half-splitting of the m_s = +-1 pair when the hyperfine
/// lines overlap: E/3 + (2/3) sqrt(A_par^2 + E^2).
inline double average_splitting(double e_es, double a_par) {
  nvthermo::detail::require_finite(e_es, "e_es");
  nvthermo::detail::require_finite(a_par, "a_par");
  if (e_es < 0.0) throw InvalidParameter("e_es must be >= 0");
  return e_es / 3.0 + (2.0 / 3.0) * std::hypot(a_par, e_es);
}

/// Lorentzian ODMR dips on a flat baseline (counts/s).
struct OdmrLineModel {
  std::vector<double> centers;    // MHz
  std::vector<double> widths;     // FWHM, MHz
  std::vector<double> contrasts;  // fractional depth
  double baseline = 1.0;

  void validate() const {
    if (centers.size() != widths.size() || centers.size() != contrasts.size()) {
      throw InvalidParameter("ODMR line lists differ in length");
    }
    for (double w : widths)
      if (!(w > 0.0) || !std::isfinite(w)) throw InvalidParameter("ODMR widths must be > 0");
    for (double c : contrasts)
      if (!(c >= 0.0 && c < 1.0)) throw InvalidParameter("ODMR contrasts must lie in [0, 1)");
    for (double c : centers) nvthermo::detail::require_finite(c, "ODMR center");
    nvthermo::detail::require_finite(baseline, "baseline");
  }
};

/// intensity(f) = baseline * (1 - sum_k contrast_k * L(f; center_k, width_k)),
/// recorded as counts = intensity * exposure.
inline Spectrum synthesize_odmr(const OdmrLineModel& lines, const std::vector<double>& grid,
                                double exposure_s = 1.0) {
  lines.validate();
  if (grid.empty()) throw InvalidInput("ODMR grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidInput("ODMR grid must be strictly increasing");
  if (!(exposure_s > 0.0)) throw InvalidInput("exposure must be > 0");

  Spectrum s;
  s.axis = grid;
  s.axis_unit = "MHz";
  s.exposure_s = exposure_s;
  s.counts.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double dip = 0.0;
    for (std::size_t k = 0; k < lines.centers.size(); ++k)
      dip += lines.contrasts[k] * lorentzian_unit_peak(grid[i], lines.centers[k], lines.widths[k]);
    s.counts[i] = std::max(0.0, lines.baseline * (1.0 - dip) * exposure_s);
  }
  return s;
}

/// ODMR line model with one dip per transition, sharing width and contrast.
inline OdmrLineModel odmr_lines_from(const TransitionSet& t, double width_mhz, double contrast,
                                     double baseline) {
  OdmrLineModel m;
  m.baseline = baseline;
  for (const auto& line : t) {
    m.centers.push_back(line.frequency_mhz);
    m.widths.push_back(width_mhz);
    m.contrasts.push_back(contrast);
  }
  return m;
}

}  // namespace nvthermo::spin
