#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "nvthermo/spin/spin_model.hpp"
#include "support/oracles.hpp"

using namespace nvthermo;
using namespace nvthermo::spin;
using cd = std::complex<double>;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Matrix3c commutator(const Matrix3c& a, const Matrix3c& b) { return a * b - b * a; }

}  // namespace

TEST(SpinOperators, CasimirIsTwo) {
  const auto s = build_spin_operators();
  const Matrix3c c = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
  EXPECT_LT((c - 2.0 * Matrix3c::Identity()).norm(), 1e-14);
}

TEST(SpinOperators, SxSpectrum) {
  const auto s = build_spin_operators();
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(s.sx);
  EXPECT_NEAR(es.eigenvalues()[0], -1.0, 1e-14);
  EXPECT_NEAR(es.eigenvalues()[1], 0.0, 1e-14);
  EXPECT_NEAR(es.eigenvalues()[2], 1.0, 1e-14);
}

TEST(SpinOperators, SzAnnihilatesMsZero) {
  const auto s = build_spin_operators();
  Eigen::Matrix<cd, 3, 1> zero = Eigen::Matrix<cd, 3, 1>::Zero();
  zero[1] = 1.0;
  EXPECT_LT((s.sz * zero).norm(), 1e-15);
}

TEST(SpinOperators, AngularMomentumAlgebra) {
  const auto s = build_spin_operators();
  const cd i(0.0, 1.0);
  EXPECT_LT((commutator(s.sx, s.sy) - i * s.sz).norm(), 1e-14);
  EXPECT_LT((commutator(s.sy, s.sz) - i * s.sx).norm(), 1e-14);
  EXPECT_LT((commutator(s.sz, s.sx) - i * s.sy).norm(), 1e-14);
}

TEST(Hamiltonian, DiagonalCase) {
  const auto v = eigenvalues(build_hamiltonian({2870, 0, 0, 0}));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(v[k], -2.0 * 2870 / 3.0, 1e-9);
  for (int k = 3; k < 9; ++k) EXPECT_NEAR(v[k], 2870 / 3.0, 1e-9);
}

TEST(Hamiltonian, ZeroParametersGiveZeroMatrix) {
  EXPECT_EQ(build_hamiltonian({0, 0, 0, 0}).entries().norm(), 0.0);
}

TEST(Hamiltonian, StrainSplitsPlusMinusPairByTwoE) {
  const auto v = eigenvalues(build_hamiltonian({2870, 10, 0, 0}));
  // Levels: 3 x (-2D/3), 3 x (D/3 - E), 3 x (D/3 + E).
  EXPECT_NEAR(v[8] - v[3], 20.0, 1e-9);
  EXPECT_NEAR(v[5] - v[3], 0.0, 1e-9);
}

TEST(Hamiltonian, IsTraceless) {
  const auto h = build_hamiltonian({2870, 10, -2.14, -2.70});
  EXPECT_NEAR(std::abs(h.entries().trace()), 0.0, 1e-9);
  const auto v = eigenvalues(h);
  double sum = 0.0;
  for (double x : v) sum += x;
  EXPECT_NEAR(sum, 0.0, 1e-9);
}

TEST(Hamiltonian, RejectsNonFinite) {
  EXPECT_THROW(build_hamiltonian({NAN, 0, 0, 0}), InvalidParameter);
  EXPECT_THROW(build_hamiltonian({2870, INFINITY, 0, 0}), InvalidParameter);
}

TEST(Hamiltonian, RejectsNonHermitianEntries) {
  Matrix9c m = Matrix9c::Zero();
  m(0, 1) = 1.0;
  EXPECT_THROW(HamiltonianMatrix::from_entries(m), ContractViolation);
}

TEST(Eigenvalues, ZeroMatrix) {
  for (double v : eigenvalues(HamiltonianMatrix::from_entries(Matrix9c::Zero()))) EXPECT_EQ(v, 0.0);
}

TEST(Eigenvalues, DiagonalIsSorted) {
  Matrix9c m = Matrix9c::Zero();
  const int order[9] = {5, 1, 9, 3, 7, 2, 8, 4, 6};
  for (int k = 0; k < 9; ++k) m(k, k) = order[k];
  const auto v = eigenvalues(HamiltonianMatrix::from_entries(m));
  for (int k = 0; k < 9; ++k) EXPECT_EQ(v[k], k + 1);
}

TEST(Eigenvalues, MatchesDenseOracleForGroundState) {
  const auto h = build_hamiltonian({2870, 10, -2.14, -2.70});
  const auto a = eigenvalues(h);
  const auto b = oracle::dense_eigenvalues(h);
  for (int k = 0; k < 9; ++k) EXPECT_LT(rel(a[k], b[k]), 1e-9) << k;
}

TEST(Eigenvalues, MatchesBlockClosedFormWithoutTransverseHyperfine) {
  for (double e : {0.0, 3.0, 71.7}) {
    for (double a : {0.0, -2.14, 40.0}) {
      const auto v = eigenvalues(build_hamiltonian({1420, e, a, 0.0}));
      const auto w = oracle::block_eigenvalues(1420, e, a);
      for (int k = 0; k < 9; ++k) EXPECT_NEAR(v[k], w[k], 1e-9 * 1420) << e << ' ' << a;
    }
  }
}

TEST(Eigenvalues, RandomHermitianResidualsAndOrthonormality) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix9c m;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) m(i, j) = cd(nd(gen), nd(gen)) * 100.0;
    m = 0.5 * (m + m.adjoint()).eval();
    const auto sys = jacobi_eigen<9>(m);
    const double scale = m.norm();
    for (int k = 0; k < 9; ++k) {
      const auto r = m * sys.vectors.col(k) - sys.values[k] * sys.vectors.col(k);
      EXPECT_LE(r.norm(), 1e-10 * scale);
    }
    EXPECT_LT((sys.vectors.adjoint() * sys.vectors - Matrix9c::Identity()).norm(), 1e-12);
    const auto ref = Eigen::SelfAdjointEigenSolver<Matrix9c>(m, Eigen::EigenvaluesOnly).eigenvalues();
    for (int k = 0; k < 9; ++k) EXPECT_NEAR(sys.values[k], ref[k], 1e-10 * scale);
  }
}

TEST(Eigenvalues, GenericSizeJacobi) {
  ComplexMatrix<4> m;
  m << 2, cd(1, 1), 0, 0, cd(1, -1), 3, cd(0, 2), 0, 0, cd(0, -2), -1, 0.5, 0, 0, 0.5, 4;
  const auto sys = jacobi_eigen<4>(m);
  const auto ref = Eigen::SelfAdjointEigenSolver<ComplexMatrix<4>>(m).eigenvalues();
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(sys.values[k], ref[k], 1e-12);
}

TEST(Transitions, StrainOnly) {
  const auto t = transition_frequencies({2870, 10, 0, 0});
  ASSERT_EQ(t.size(), 6u);
  for (const auto& x : t) EXPECT_NEAR(x.frequency_mhz, x.branch == Branch::lower ? 2860.0 : 2880.0, 1e-9);
}

TEST(Transitions, AxialOnly) {
  for (const auto& x : transition_frequencies({2870, 0, 0, 0})) EXPECT_NEAR(x.frequency_mhz, 2870.0, 1e-9);
}

TEST(Transitions, OrderIsPlusZeroMinusLowerUpper) {
  const auto t = transition_frequencies({2870, 10, -2.14, -2.70});
  const int m_i[6] = {1, 1, 0, 0, -1, -1};
  for (int k = 0; k < 6; ++k) {
    EXPECT_EQ(t[k].m_i, m_i[k]);
    EXPECT_EQ(t[k].branch, k % 2 == 0 ? Branch::lower : Branch::upper);
  }
}

TEST(Transitions, ManifoldSplittingsSecularLimit) {
  const double e = 71.7, a = 40.0;
  const auto t = transition_frequencies({1420, e, a, 0.0});
  EXPECT_LT(rel(t[3].frequency_mhz - t[2].frequency_mhz, 2 * e), 1e-6);
  EXPECT_LT(rel(t[1].frequency_mhz - t[0].frequency_mhz, 2 * std::hypot(a, e)), 1e-6);
  EXPECT_LT(rel(t[5].frequency_mhz - t[4].frequency_mhz, 2 * std::hypot(a, e)), 1e-6);
}

TEST(Transitions, ManifoldSplittingsWithTransverseHyperfineStayWithinSecondOrder) {
  const double d = 1420, e = 71.7, a = 40.0;
  const auto t = transition_frequencies({d, e, a, a});
  const double bound = 2.0 * a * a / d;
  EXPECT_LE(std::abs((t[3].frequency_mhz - t[2].frequency_mhz) - 2 * e), bound);
  EXPECT_LE(std::abs((t[1].frequency_mhz - t[0].frequency_mhz) - 2 * std::hypot(a, e)), bound);
}

TEST(Transitions, GroundStateDefaultsResolveAtZeroStrain) {
  EXPECT_NO_THROW(transition_frequencies(SpinParams::ground_state()));
  EXPECT_NO_THROW(transition_frequencies(SpinParams::excited_state()));
}

TEST(Transitions, InvariantUnderStrainSign) {
  const auto a = transition_frequencies({2870, 7, -2.14, -2.70});
  const auto b = transition_frequencies({2870, -7, -2.14, -2.70});
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(a[k].frequency_mhz, b[k].frequency_mhz, 1e-9);
}

TEST(Transitions, StrongMixingRaisesDegeneracyWithEigenvalues) {
  try {
    transition_frequencies({1, 3, 0, 5});
    FAIL() << "expected DegeneracyError";
  } catch (const DegeneracyError& e) {
    EXPECT_EQ(e.eigenvalues().size(), 9u);
    EXPECT_EQ(e.kind(), ErrorKind::numerical);
  }
}

TEST(AverageSplitting, Examples) {
  EXPECT_NEAR(average_splitting(0, 40), 80.0 / 3.0, 1e-12);
  EXPECT_NEAR(average_splitting(12.5, 0), 12.5, 1e-12);
  EXPECT_NEAR(average_splitting(71.68, 40), 78.62, 5e-3);
  EXPECT_THROW(average_splitting(-1, 40), InvalidParameter);
}

TEST(AverageSplitting, MatchesBruteForceSecularLimit) {
  for (double e : {0.0, 1.0, 10.0, 50.0, 100.0, 775.0}) {
    for (double a : {0.0, 2.14, 40.0}) {
      const double brute = oracle::brute_force_average_splitting({1420, e, a, 0.0});
      EXPECT_NEAR(average_splitting(e, a), brute, 1e-6 * std::max(brute, 1e-3)) << e << ' ' << a;
    }
  }
}

TEST(Odmr, DipDepthAtCenter) {
  OdmrLineModel m{{2870}, {10}, {0.03}, 1000.0};
  const auto s = synthesize_odmr(m, {2860, 2870, 2880}, 2.0);
  EXPECT_NEAR(s.counts[1], 1000.0 * (1 - 0.03) * 2.0, 1e-9);
  EXPECT_NEAR(s.counts[0], 1000.0 * (1 - 0.03 * 0.2) * 2.0, 1e-9);
  EXPECT_EQ(s.axis_unit, "MHz");
}

TEST(Odmr, ZeroContrastIsFlat) {
  OdmrLineModel m{{2860, 2880}, {5, 5}, {0, 0}, 123.0};
  for (double c : synthesize_odmr(m, {2850, 2860, 2870, 2890}).counts) EXPECT_EQ(c, 123.0);
}

TEST(Odmr, GridValidation) {
  OdmrLineModel m{{2870}, {10}, {0.03}, 1.0};
  EXPECT_THROW(synthesize_odmr(m, {}), InvalidInput);
  EXPECT_THROW(synthesize_odmr(m, {1, 1, 2}), InvalidInput);
  m.contrasts = {1.5};
  EXPECT_THROW(synthesize_odmr(m, {1, 2}), InvalidParameter);
}

TEST(Odmr, LinesFromTransitions) {
  const auto m = odmr_lines_from(transition_frequencies({2870, 10, 0, 0}), 4.0, 0.02, 5e4);
  EXPECT_EQ(m.centers.size(), 6u);
  EXPECT_EQ(m.widths[3], 4.0);
  EXPECT_EQ(m.baseline, 5e4);
}
