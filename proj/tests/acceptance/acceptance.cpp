// Acceptance checks. `acceptance <name>` runs one check, no argument runs all.
// Each criterion prints one PASS/FAIL line. Exit 0 when all pass, 1 on any
// failure, 77 when a check is skipped for missing reference data.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "nvthermo/fit/calibration.hpp"
#include "nvthermo/io/config.hpp"
#include "nvthermo/io/files.hpp"
#include "nvthermo/noise/noise_floor.hpp"
#include "nvthermo/noise/normality.hpp"
#include "nvthermo/noise/synthetic.hpp"
#include "nvthermo/noise/timeseries.hpp"
#include "nvthermo/spin/spin_model.hpp"
#include "nvthermo/thermo/dwf.hpp"
#include "nvthermo/thermo/quadrature.hpp"
#include "nvthermo/thermo/strain.hpp"
#include "support/oracles.hpp"

using namespace nvthermo;

namespace {

constexpr int kSkipped = 77;

enum class Outcome { pass, fail, skipped };

struct Reporter {
  bool ok = true;

  void line(bool pass, const std::string& criterion, const std::string& detail) {
    std::printf("%s  %-40s %s\n", pass ? "PASS" : "FAIL", criterion.c_str(), detail.c_str());
    ok = ok && pass;
  }
};

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(x);
  return v;
}

std::filesystem::path reference_dir() { return std::filesystem::path(NVTHERMO_DATA_DIR) / "paper"; }

std::optional<io::PointSet> reference_points(const char* file, const char* x, const char* y) {
  const auto p = reference_dir() / file;
  if (!std::filesystem::exists(p)) return std::nullopt;
  auto in = io::open_input(p);
  return io::read_points_csv(in, x, y);
}

double coverage_floor_500() { return oracle::coverage_floor(0.95, 500); }

// ---------------------------------------------------------------------------

Outcome hyperfine_average_oracle(Reporter& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int points = 0;
  for (double e : {0.0, 1.0, 10.0, 50.0, 100.0, 775.0}) {
    for (double a : {0.0, 2.14, 40.0}) {
      const double brute = oracle::brute_force_average_splitting({constants::d_es_mhz, e, a, 0.0});
      const double closed = spin::average_splitting(e, a);
      const double err = brute == 0.0 ? std::abs(closed) : std::abs(closed - brute) / std::abs(brute);
      worst = std::max(worst, err);
      ++points;
    }
  }
  const double dt = seconds_since(t0);
  rep.line(points == 18 && worst <= 1e-6, "1 average splitting vs 9x9 diagonalization",
           fmt("%d points, max rel err %.2e (tol 1e-6)", points, worst));
  rep.line(dt < 1.0, "1 runtime", fmt("%.3f s (limit 1 s)", dt));
  return Outcome::pass;
}

Outcome sensitivity_anchors(Reporter& rep) {
  thermo::SensitivityInput in;  // n=1, mu=0.021, gamma=40 MHz, DWF=0.005, r=0
  const double one = thermo::noise_floor(in, 154.0);
  rep.line(std::abs(one / 2.3 - 1.0) <= 0.05, "2 single-center floor 2.3 K/rtHz",
           fmt("%.4f K/rtHz, dev %.1f%% (tol 5%%)", one, 100 * (one / 2.3 - 1)));
  in.n_centers = 500;
  const double many = thermo::noise_floor(in, 154.0);
  rep.line(std::abs(many / 0.1 - 1.0) <= 0.10, "2 500-center floor 0.1 K/rtHz",
           fmt("%.4f K/rtHz, dev %.1f%% (tol 10%%)", many, 100 * (many / 0.1 - 1)));
  return Outcome::pass;
}

Outcome phi_room_temperature(Reporter& rep) {
  const double p = thermo::phi(294.0, {4.57, 1614.0});
  rep.line(std::abs(p - 154.0) <= 10.0, "3 phi(294 K) within 154(10) K", fmt("%.2f K", p));
  rep.line(std::abs(p - 147.3) <= 0.05, "3 phi(294 K) analytic value 147.3 K", fmt("%.3f K", p));
  return Outcome::pass;
}

Outcome dwf_calibration_synthetic(Reporter& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  const thermo::DwfModel truth{4.57, 1614.0};
  std::vector<double> t = grid(300.0, 600.0, 25.0), d;
  for (double x : t) d.push_back(thermo::dwf(x, truth));
  const auto c = fit::fit_dwf_calibration(t, d);
  const double es = std::abs(c.model.s / truth.s - 1), et = std::abs(c.model.t_debye / truth.t_debye - 1);
  const double dt = seconds_since(t0);
  rep.line(es <= 1e-8 && et <= 1e-8, "4 DWF calibration, noiseless synthetic",
           fmt("S rel err %.1e, T_D rel err %.1e (tol 1e-8)", es, et));
  rep.line(dt < 1.0, "4 runtime", fmt("%.4f s (limit 1 s)", dt));
  return Outcome::pass;
}

Outcome dwf_calibration_digitized(Reporter& rep) {
  const auto pts = reference_points("fig2b.csv", "temperature_K", "dwf");
  if (!pts) {
    std::printf("SKIP  %-40s %s not found\n", "4 DWF calibration, digitized points", (reference_dir() / "fig2b.csv").c_str());
    return Outcome::skipped;
  }
  const auto c = fit::fit_dwf_calibration(pts->x, pts->y);
  rep.line(std::abs(c.model.s - 4.57) <= 0.07, "4 digitized S = 4.57(7)", fmt("%.4f", c.model.s));
  rep.line(std::abs(c.model.t_debye - 1614.0) <= 23.0, "4 digitized T_D = 1614(23) K", fmt("%.1f K", c.model.t_debye));
  return Outcome::pass;
}

Outcome strain_energy_fit(Reporter& rep) {
  const double xi = 4.7, d_perp = 775.0, a_par = 40.0;
  const fit::StrainSplittingModel model{d_perp, a_par};
  Eigen::VectorXd p(1);
  p << xi;
  const auto t = grid(294.0, 600.0, 18.0);
  std::vector<double> eps;
  for (double x : t) eps.push_back(model.value(x, p));
  const auto exact = fit::fit_strain_energy(t, eps, d_perp, a_par);
  const double err = std::abs(exact.strain_energy_mev / xi - 1);
  rep.line(err <= 1e-8, "5 strain energy, noiseless synthetic", fmt("rel err %.1e (tol 1e-8)", err));

  const int trials = 500;
  int covered = 0;
  for (int k = 0; k < trials; ++k) {
    noise::Rng rng(505, std::uint64_t(k));
    std::vector<double> noisy;
    for (double v : eps) noisy.push_back(v + 2.0 * rng.normal());
    const auto f = fit::fit_strain_energy(t, noisy, d_perp, a_par);
    const double q = oracle::t_quantile(0.95, double(f.fit.dof));
    covered += std::abs(f.strain_energy_mev - xi) <= q * f.strain_energy_err;
  }
  const double rate = covered / double(trials);
  rep.line(rate >= coverage_floor_500(), "5 strain energy 95% CI coverage, 2 MHz",
           fmt("%.3f over %d trials (floor %.3f)", rate, trials, coverage_floor_500()));
  return Outcome::pass;
}

noise::NoiseReport mc_floor(double r, double n_centers, std::size_t trials, double exposure, std::uint64_t seed) {
  noise::PlSourceConfig c;
  c.background_ratio = r;
  c.n_centers = n_centers;
  c.seed = seed;
  return noise::monte_carlo_noise_floor(noise::make_pl_source(c), {}, trials, exposure);
}

Outcome noise_floor_monte_carlo(Reporter& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto base = mc_floor(0.0, 1.0, 2000, 1.0, 2000);
  const double dt = seconds_since(t0);
  rep.line(std::abs(base.ratio - 1.0) <= 0.15, "6 MC floor vs prediction, r=0",
           fmt("implied %.3f, predicted %.3f K/rtHz, ratio %.3f (tol 15%%), %zu failed fits", base.implied_noise_floor,
               base.predicted_noise_floor, base.ratio, base.failures));
  rep.line(dt < 60.0, "6 runtime, 2000 trials", fmt("%.2f s (limit 60 s)", dt));

  // Scaling laws: floor ratios against the first sweep point. The relative
  // standard error of a sample std over N trials is 1/sqrt(2(N-1)); a ratio
  // of two independent estimates carries sqrt(2) of that. Allow 3 sigma.
  const std::size_t n = 1000;
  const double tol = 3.0 * std::sqrt(2.0) / std::sqrt(2.0 * double(n - 1));
  {
    const double r_vals[3] = {0.0, 1.0, 3.0};
    double ref = 0.0;
    std::string detail;
    bool pass = true;
    for (int i = 0; i < 3; ++i) {
      const auto rr = mc_floor(r_vals[i], 1.0, n, 10.0, 600 + i);
      if (i == 0) ref = rr.implied_noise_floor;
      const double got = rr.implied_noise_floor / ref, want = std::sqrt(1.0 + 3.0 * r_vals[i]);
      pass = pass && std::abs(got / want - 1.0) <= tol;
      detail += fmt("r=%g: %.3f/%.3f  ", r_vals[i], got, want);
    }
    rep.line(pass, "6 sqrt(1+3r) scaling", detail + fmt("(tol %.1f%%)", 100 * tol));
  }
  {
    const double n_vals[3] = {1.0, 4.0, 16.0};
    double ref = 0.0;
    std::string detail;
    bool pass = true;
    for (int i = 0; i < 3; ++i) {
      const auto rr = mc_floor(0.0, n_vals[i], n, 10.0, 700 + i);
      if (i == 0) ref = rr.implied_noise_floor;
      const double got = rr.implied_noise_floor / ref, want = 1.0 / std::sqrt(n_vals[i]);
      pass = pass && std::abs(got / want - 1.0) <= tol;
      detail += fmt("n=%g: %.3f/%.3f  ", n_vals[i], got, want);
    }
    rep.line(pass, "6 1/sqrt(n) scaling", detail + fmt("(tol %.1f%%)", 100 * tol));
  }
  return Outcome::pass;
}

Outcome poisson_normality(Reporter& rep) {
  noise::PlSourceConfig c;
  c.background_ratio = 1.0;
  c.seed = 3;
  const auto src = noise::make_pl_source(c);
  const Spectrum ref = noise::expected_spectrum(src, 1.0);
  std::vector<Spectrum> spectra;
  for (std::uint64_t k = 1; k <= 10; ++k) spectra.push_back(noise::synthesize_spectrum(src, 1.0, k));
  std::size_t pooled = 0;
  for (double m : ref.counts) pooled += m > 10.0 ? spectra.size() : 0;
  const double sd = noise::poisson_normality_check(spectra, ref);
  rep.line(pooled >= 10000 && std::abs(sd - 1.0) <= 0.05, "7 normalized residual std 1.00(5)",
           fmt("std %.4f over %zu pooled bins (need >= 10000)", sd, pooled));
  return Outcome::pass;
}

Outcome step_detection(Reporter& rep) {
  noise::StepSeriesConfig c;  // 40 points, 1 s cadence, 17 K step, 4 K noise
  const int runs = 200;
  int hits = 0;
  double sum_sigma = 0.0;
  for (int k = 0; k < runs; ++k) {
    const auto s = noise::detect_step(noise::make_step_series(c, std::uint64_t(k)));
    hits += s.found && std::abs(s.step_size - c.step_size) <= 2.0;
    sum_sigma += s.uncertainty / runs;
  }
  // Even with the changepoint known, the two plateau means leave a step error
  // of sigma sqrt(1/23 + 1/17); this bounds the attainable hit rate.
  const double sigma = c.noise_std * std::sqrt(1.0 / double(c.step_at) + 1.0 / double(c.n_points - c.step_at));
  const double bound = std::erf(2.0 / (sigma * std::sqrt(2.0)));
  const double rate = hits / double(runs);
  rep.line(rate >= 0.95, "8 step 17(2) K in >= 95% of 200 runs",
           fmt("%.3f of runs (ideal-estimator ceiling %.3f, step sigma %.2f K, mean reported %.2f K)", rate, bound,
               sigma, sum_sigma));
  return Outcome::pass;
}

Outcome quadratic_shift_synthetic(Reporter& rep) {
  const thermo::QuadraticShift q;
  const auto t = grid(294.0, 600.0, 17.0);
  std::vector<double> d;
  for (double x : t) d.push_back(thermo::dgs_quadratic(x, q));
  const auto f = fit::fit_quadratic_shift(t, d);
  const double ea = std::abs(f.coefficients.a / q.a - 1), eb = std::abs(f.coefficients.b / q.b - 1),
               ec = std::abs(f.coefficients.c / q.c - 1);
  rep.line(std::max({ea, eb, ec}) <= 1e-10, "9 quadratic shift, noiseless synthetic",
           fmt("rel err a %.1e b %.1e c %.1e (tol 1e-10)", ea, eb, ec));
  return Outcome::pass;
}

Outcome quadratic_shift_digitized(Reporter& rep) {
  const auto pts = reference_points("fig3a.csv", "temperature_K", "d_MHz");
  if (!pts) {
    std::printf("SKIP  %-40s %s not found\n", "9 quadratic shift, digitized points", (reference_dir() / "fig3a.csv").c_str());
    return Outcome::skipped;
  }
  const auto f = fit::fit_quadratic_shift(pts->x, pts->y);
  rep.line(std::abs(f.coefficients.a - constants::dgs_a_mhz) <= 3.0, "9 digitized a", fmt("%.3f MHz", f.coefficients.a));
  rep.line(std::abs(f.coefficients.b - constants::dgs_b_mhz_per_k) <= 1e-2, "9 digitized b",
           fmt("%.3e MHz/K", f.coefficients.b));
  rep.line(std::abs(f.coefficients.c - constants::dgs_c_mhz_per_k2) <= 0.2e-4, "9 digitized c",
           fmt("%.3e MHz/K^2", f.coefficients.c));
  return Outcome::pass;
}

Outcome gamma_fit_coverage(Reporter& rep) {
  const auto em = io::Config{}.expansion_model();
  const double gamma = 11.0;
  const auto t = grid(300.0, 700.0, 10.0);
  std::vector<double> shift;
  for (double x : t) shift.push_back(gamma * thermo::thermal_pressure(x, em));
  const int trials = 500;
  int covered = 0, within = 0;
  for (int k = 0; k < trials; ++k) {
    noise::Rng rng(1010, std::uint64_t(k));
    std::vector<double> noisy;
    for (double v : shift) noisy.push_back(v + rng.normal());
    const auto g = fit::fit_expansion_shift(t, noisy, em);
    const double q = oracle::t_quantile(0.95, double(g.dof));
    covered += std::abs(g.gamma - gamma) <= q * g.gamma_err;
    within += std::abs(g.gamma - gamma) <= 1.0;
  }
  const double cov = covered / double(trials), rate = within / double(trials);
  rep.line(cov >= coverage_floor_500(), "10 Gamma 95% CI coverage, 1 MHz",
           fmt("%.3f over %d trials (floor %.3f), %zu points 300-700 K", cov, trials, coverage_floor_500(), t.size()));
  rep.line(rate >= 0.95, "10 Gamma within 11(1) MHz/GPa", fmt("%.3f of trials", rate));
  return Outcome::pass;
}

Outcome numerical_hygiene(Reporter& rep) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(2718);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); };

  double worst = 0.0;
  auto check = [&](const auto& model, double x, const Eigen::VectorXd& p) {
    worst = std::max(worst, oracle::gradient_mismatch(model, x, p));
  };
  const auto em = io::Config{}.expansion_model();
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd p2(2), p3(3), p8(8), p7(7), p1(1);
    p2 << u(-5, 5), u(-5, 5);
    check(fit::LinearModel{}, u(-10, 10), p2);
    p3 << u(-5, 5), u(-5, 5), u(-1, 1);
    check(fit::QuadraticModel{}, u(-10, 10), p3);
    p8 << u(636, 638), u(0.2, 1), u(1e2, 1e4), u(636, 638), u(0.2, 1), u(1e2, 1e4), u(0, 50), u(-2, 2);
    check(fit::LorentzianSumModel{2, 0.05, 637.5}, u(630, 645), p8);
    p7 << u(2855, 2865), u(3, 10), u(0.01, 0.05), u(2875, 2885), u(3, 10), u(0.01, 0.05), u(1e4, 1e5);
    check(fit::OdmrModel{2}, u(2840, 2900), p7);
    p2 << u(1, 6), u(800, 2000);
    check(fit::DwfCurveModel{}, u(0, 400), p2);
    p2 << u(1, 6), u(0, 2);
    check(fit::LaserDwfModel{}, u(0, 200), p2);
    p1 << u(-20, 20);
    check(fit::ExpansionShiftModel{&em}, u(10, 700), p1);
    p1 << u(0.5, 40);
    check(fit::StrainSplittingModel{}, u(10, 600), p1);
  }
  // dDWF/dT against central differences.
  double worst_deriv = 0.0;
  for (double t : grid(10.0, 800.0, 10.0)) {
    const thermo::DwfModel m;
    const double h = 1e-3;
    const double fd = (thermo::dwf(t + h, m) - thermo::dwf(t - h, m)) / (2 * h);
    worst_deriv = std::max(worst_deriv, std::abs(thermo::dwf_derivative(t, m) - fd) / std::abs(fd));
  }
  rep.line(worst <= 1e-6 && worst_deriv <= 1e-6, "11 Jacobians and dDWF/dT vs finite differences",
           fmt("max rel mismatch %.1e / %.1e (tol 1e-6)", worst, worst_deriv));

  double worst_res = 0.0;
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    spin::Matrix9c m;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) m(i, j) = std::complex<double>(nd(gen), nd(gen)) * 1e3;
    m = 0.5 * (m + m.adjoint()).eval();
    const auto sys = spin::jacobi_eigen<9>(m);
    for (int k = 0; k < 9; ++k) {
      const double r = (m * sys.vectors.col(k) - sys.values[k] * sys.vectors.col(k)).norm() / m.norm();
      worst_res = std::max(worst_res, r);
    }
  }
  for (const auto& sp : {spin::SpinParams::ground_state(), spin::SpinParams::excited_state(),
                         spin::SpinParams{1420, 71.7, 40, 40}}) {
    const auto m = spin::build_hamiltonian(sp).entries();
    const auto sys = spin::jacobi_eigen<9>(m);
    for (int k = 0; k < 9; ++k) {
      const double r = (m * sys.vectors.col(k) - sys.values[k] * sys.vectors.col(k)).norm() / m.norm();
      worst_res = std::max(worst_res, r);
    }
  }
  rep.line(worst_res <= 1e-10, "11 eigen residuals", fmt("max ||Hv - lv|| / ||H|| = %.1e (tol 1e-10)", worst_res));

  double worst_q = 0.0;
  for (int deg = 0; deg <= 19; ++deg) {
    const double a = -0.7, b = 2.3;
    const double v = thermo::gauss_legendre<10>([deg](double x) { return std::pow(x, deg); }, a, b);
    const double exact = (std::pow(b, deg + 1) - std::pow(a, deg + 1)) / (deg + 1);
    worst_q = std::max(worst_q, std::abs(v - exact) / std::abs(exact));
  }
  rep.line(worst_q <= 1e-12, "11 10-point Gauss-Legendre exact to degree 19", fmt("max rel err %.1e", worst_q));

  double worst_t = 0.0;
  for (double t : grid(0.0, 800.0, 0.5)) {
    const thermo::DwfModel m;
    worst_t = std::max(worst_t, std::abs(thermo::temperature_from_dwf(thermo::dwf(t, m), m) - t));
  }
  rep.line(worst_t <= 1e-8, "11 DWF inverse round trip 0-800 K", fmt("max |dT| %.1e K (tol 1e-8)", worst_t));

  const double dt = seconds_since(t0);
  rep.line(dt < 300.0, "11 runtime", fmt("%.2f s (limit 300 s)", dt));
  return Outcome::pass;
}

const std::map<std::string, std::function<Outcome(Reporter&)>> kChecks = {
    {"hyperfine_average_oracle", hyperfine_average_oracle},
    {"sensitivity_anchors", sensitivity_anchors},
    {"phi_room_temperature", phi_room_temperature},
    {"dwf_calibration_synthetic", dwf_calibration_synthetic},
    {"dwf_calibration_digitized", dwf_calibration_digitized},
    {"strain_energy_fit", strain_energy_fit},
    {"noise_floor_monte_carlo", noise_floor_monte_carlo},
    {"poisson_normality", poisson_normality},
    {"step_detection", step_detection},
    {"quadratic_shift_synthetic", quadratic_shift_synthetic},
    {"quadratic_shift_digitized", quadratic_shift_digitized},
    {"gamma_fit_coverage", gamma_fit_coverage},
    {"numerical_hygiene", numerical_hygiene},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> names;
  for (int i = 1; i < argc; ++i) names.push_back(argv[i]);
  if (names.empty())
    for (const auto& [name, fn] : kChecks) names.push_back(name);

  Reporter rep;
  bool skipped = false;
  for (const auto& name : names) {
    const auto it = kChecks.find(name);
    if (it == kChecks.end()) {
      std::fprintf(stderr, "unknown check '%s'\n", name.c_str());
      return 2;
    }
    try {
      skipped = it->second(rep) == Outcome::skipped || skipped;
    } catch (const std::exception& e) {
      rep.line(false, name, std::string("threw: ") + e.what());
    }
  }
  if (!rep.ok) return 1;
  return skipped && names.size() == 1 ? kSkipped : 0;
}
