#include <cmath>
#include <iostream>
#include <memory>

#include "cli/common.hpp"
#include "nvthermo/fit/calibration.hpp"
#include "nvthermo/io/files.hpp"
#include "nvthermo/noise/normality.hpp"
#include "nvthermo/noise/rng.hpp"
#include "nvthermo/noise/synthetic.hpp"
#include "nvthermo/noise/timeseries.hpp"
#include "nvthermo/thermo/dwf.hpp"
#include "nvthermo/thermo/shift.hpp"
#include "nvthermo/thermo/strain.hpp"

namespace nvthermo::cli {

namespace {

struct ReproduceArgs {
  std::string figure;
  std::string data_dir = std::string(NVTHERMO_DATA_DIR) + "/paper";
};

/// A fitted value against a reference value and tolerance.
struct Check {
  std::string name;
  double value = 0.0;
  double err = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;

  bool pass() const { return std::abs(value - reference) <= tolerance; }
  nlohmann::json json() const {
    return {{"name", name},           {"value", value},         {"err", err}, {"reference", reference},
            {"tolerance", tolerance}, {"pass", pass()}};
  }
};

/// Three-sigma agreement with the generating value.
Check self_check(const std::string& name, double value, double err, double truth) {
  return {name, value, err, truth, 3.0 * err + 1e-12 * std::abs(truth)};
}

struct Recipe {
  std::filesystem::path dir;
  const Context* ctx = nullptr;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::filesystem::path> inputs;
  nlohmann::json report = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> rows;

  void columns(const std::string& file, const std::vector<std::string>& names,
               const std::vector<std::vector<double>>& cols) {
    const auto path = dir / file;
    auto out = io::open_output(path);
    out.precision(12);
    for (std::size_t k = 0; k < names.size(); ++k) out << (k ? "," : "") << names[k];
    out << '\n';
    for (std::size_t i = 0; i < cols.front().size(); ++i) {
      for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k][i];
      out << '\n';
    }
    outputs.push_back(path);
  }

  void checks(const std::string& key, const std::vector<Check>& list) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : list) {
      a.push_back(c.json());
      rows.emplace_back(key + " " + c.name,
                        fmt(c.value, 8) + " +- " + fmt(c.err, 3) + " vs " + fmt(c.reference, 8) + " +- " +
                            fmt(c.tolerance, 3) + (c.pass() ? "  PASS" : "  FAIL"));
    }
    report[key] = a;
  }

  /// Digitized points if the file exists; otherwise records the skip.
  std::optional<io::PointSet> digitized(const std::string& data_dir, const std::string& file,
                                        const std::string& x, const std::string& y) {
    const std::filesystem::path p = std::filesystem::path(data_dir) / file;
    if (!std::filesystem::exists(p)) {
      report["digitized"] = {{"status", "skipped"}, {"reason", p.string() + " not found"}};
      rows.emplace_back("digitized", "skipped (" + p.string() + " not found)");
      return std::nullopt;
    }
    inputs.push_back(p);
    auto in = io::open_input(p);
    report["digitized"] = {{"status", "fitted"}, {"path", p.string()}};
    return io::read_points_csv(in, x, y);
  }
};

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(x);
  return v;
}

void fig2b(Recipe& r, const ReproduceArgs& a) {
  const auto& m = r.ctx->config.dwf;
  const auto t = grid(294.0, 600.0, 2.0);
  std::vector<double> t2, d, ld;
  for (double x : t) {
    t2.push_back(x * x);
    d.push_back(thermo::dwf(x, m));
    ld.push_back(std::log(d.back()));
  }
  r.columns("curve.csv", {"temperature_K", "t2_K2", "dwf", "log_dwf"}, {t, t2, d, ld});

  noise::Rng rng(r.ctx->seed, 0);
  const auto ts = grid(300.0, 600.0, 25.0);
  std::vector<double> ds;
  for (double x : ts) ds.push_back(thermo::dwf(x, m) * (1.0 + 0.01 * rng.normal()));
  r.columns("points.csv", {"temperature_K", "dwf"}, {ts, ds});
  const auto c = fit::fit_dwf_calibration(ts, ds);
  r.checks("synthetic", {self_check("S", c.model.s, c.s_err(), m.s),
                         self_check("T_D_K", c.model.t_debye, c.t_debye_err(), m.t_debye)});
  r.report["line"] = {{"intercept", -m.s}, {"slope_per_k2", -m.s * thermo::detail::debye_curvature(m)}};

  if (auto pts = r.digitized(a.data_dir, "fig2b.csv", "temperature_K", "dwf")) {
    const auto f = fit::fit_dwf_calibration(pts->x, pts->y);
    r.checks("reference", {{"S", f.model.s, f.s_err(), constants::dwf_s, 0.07},
                           {"T_D_K", f.model.t_debye, f.t_debye_err(), constants::dwf_t_debye_k, 23.0}});
  }
}

void fig2c(Recipe& r, const ReproduceArgs& a) {
  thermo::DwfModel m{constants::laser_s, r.ctx->config.dwf.t_debye};
  const auto& line = r.ctx->config.laser;
  const auto p = grid(0.0, 500.0, 2.0);
  std::vector<double> d;
  for (double x : p) d.push_back(thermo::dwf(thermo::laser_to_temperature(x, line), m));
  r.columns("curve.csv", {"power_mW", "dwf"}, {p, d});

  noise::Rng rng(r.ctx->seed, 0);
  const auto ps = grid(0.0, 500.0, 50.0);
  std::vector<double> ds;
  for (double x : ps) ds.push_back(thermo::dwf(thermo::laser_to_temperature(x, line), m) * (1.0 + 0.01 * rng.normal()));
  r.columns("points.csv", {"power_mW", "dwf"}, {ps, ds});
  const auto c = fit::fit_laser_calibration(ps, ds, line.t0, m.t_debye);
  r.checks("synthetic", {self_check("S", c.s, c.s_err(), m.s), self_check("b_K_per_mW", c.b, c.b_err(), line.b)});

  if (auto pts = r.digitized(a.data_dir, "fig2c.csv", "power_mW", "dwf")) {
    const auto f = fit::fit_laser_calibration(pts->x, pts->y, line.t0, m.t_debye);
    r.checks("reference", {{"S", f.s, f.s_err(), constants::laser_s, 0.06},
                           {"b_K_per_mW", f.b, f.b_err(), constants::laser_b_k_per_mw, 0.03}});
  }
}

void fig3a(Recipe& r, const ReproduceArgs& a) {
  // Ground-state zero-field splitting against temperature.
  const thermo::QuadraticShift q;
  const auto t = grid(294.0, 600.0, 2.0);
  std::vector<double> d;
  for (double x : t) d.push_back(thermo::dgs_quadratic(x, q));
  r.columns("curve.csv", {"temperature_K", "d_MHz"}, {t, d});

  noise::Rng rng(r.ctx->seed, 0);
  const auto ts = grid(300.0, 600.0, 20.0);
  std::vector<double> ds;
  for (double x : ts) ds.push_back(thermo::dgs_quadratic(x, q) + 0.1 * rng.normal());
  r.columns("points.csv", {"temperature_K", "d_MHz"}, {ts, ds});
  const auto f = fit::fit_quadratic_shift(ts, ds);
  r.checks("synthetic", {self_check("a_MHz", f.coefficients.a, f.err(0), q.a),
                         self_check("b_MHz_per_K", f.coefficients.b, f.err(1), q.b),
                         self_check("c_MHz_per_K2", f.coefficients.c, f.err(2), q.c)});
  if (auto pts = r.digitized(a.data_dir, "fig3a.csv", "temperature_K", "d_MHz")) {
    const auto g = fit::fit_quadratic_shift(pts->x, pts->y);
    r.checks("reference", {{"a_MHz", g.coefficients.a, g.err(0), constants::dgs_a_mhz, 3.0},
                           {"b_MHz_per_K", g.coefficients.b, g.err(1), constants::dgs_b_mhz_per_k, 1e-2},
                           {"c_MHz_per_K2", g.coefficients.c, g.err(2), constants::dgs_c_mhz_per_k2, 0.2e-4}});
  }

  // Normalized residuals of repeated PL spectra.
  noise::PlSourceConfig pc;
  pc.dwf_model = r.ctx->config.dwf;
  pc.background_ratio = 1.0;
  pc.seed = r.ctx->seed;
  const auto src = noise::make_pl_source(pc);
  const Spectrum ref = noise::expected_spectrum(src, 1.0);
  std::vector<Spectrum> spectra;
  for (std::uint64_t k = 1; k <= 10; ++k) spectra.push_back(noise::synthesize_spectrum(src, 1.0, k));
  const double sd = noise::poisson_normality_check(spectra, ref);
  std::vector<double> edges = grid(-5.0, 5.0, 0.25), counts(edges.size() - 1, 0.0), centers;
  std::size_t pooled = 0;
  for (const auto& s : spectra) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!(ref.counts[i] > 10.0)) continue;
      const double z = (s.counts[i] - ref.counts[i]) / std::sqrt(ref.counts[i]);
      ++pooled;
      const auto k = std::floor((z - edges.front()) / 0.25);
      if (k >= 0 && k < double(counts.size())) counts[std::size_t(k)] += 1.0;
    }
  }
  std::vector<double> density;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    centers.push_back(edges[k] + 0.125);
    density.push_back(counts[k] / (double(pooled) * 0.25));
  }
  std::vector<double> gauss;
  for (double c : centers) gauss.push_back(std::exp(-0.5 * c * c) / std::sqrt(2.0 * constants::pi));
  r.columns("residual_histogram.csv", {"z", "count", "density", "unit_normal"}, {centers, counts, density, gauss});
  r.report["normalized_residuals"] = {{"pooled_bins", pooled}, {"std", sd}};
  r.checks("normality", {{"residual_std", sd, 0.0, 1.0, 0.05}});
}

void fig3b(Recipe& r, const ReproduceArgs&) {
  noise::StepSeriesConfig c;
  c.seed = r.ctx->seed;
  const auto ts = noise::make_step_series(c);
  const auto s = noise::detect_step(ts);
  std::vector<double> level;
  for (std::size_t i = 0; i < ts.size(); ++i) level.push_back(i < s.index ? s.level_before : s.level_after);
  r.columns("points.csv", {"time_s", "value"}, {ts.times, ts.values});
  r.columns("curve.csv", {"time_s", "level"}, {ts.times, level});
  r.report["step"] = {{"found", s.found}, {"index", s.index}, {"improvement", s.improvement}};
  r.checks("synthetic", {{"step_K", s.step_size, s.uncertainty, c.step_size, 2.0}});
}

void fig4b(Recipe& r, const ReproduceArgs& a) {
  const auto em = r.ctx->config.expansion_model();
  const double gamma = r.ctx->config.gamma_es_mhz_per_gpa;
  const auto t = grid(294.0, 600.0, 2.0);
  std::vector<double> p, d;
  for (double x : t) {
    p.push_back(thermo::thermal_pressure(x, em));
    d.push_back(gamma * p.back());
  }
  r.columns("curve.csv", {"temperature_K", "pressure_GPa", "shift_MHz"}, {t, p, d});

  noise::Rng rng(r.ctx->seed, 0);
  const auto ts = grid(300.0, 600.0, 20.0);
  std::vector<double> ds;
  for (double x : ts) ds.push_back(thermo::shift_expansion(x, gamma, em) + rng.normal());
  r.columns("points.csv", {"temperature_K", "shift_MHz"}, {ts, ds});
  const auto g = fit::fit_expansion_shift(ts, ds, em);
  r.checks("synthetic", {self_check("gamma_MHz_per_GPa", g.gamma, g.gamma_err, gamma)});
  r.report["expansion_table"] = r.ctx->config.expansion_table;
  if (auto pts = r.digitized(a.data_dir, "fig4b.csv", "temperature_K", "shift_MHz")) {
    const auto f = fit::fit_expansion_shift(pts->x, pts->y, em);
    r.checks("reference", {{"gamma_MHz_per_GPa", f.gamma, f.gamma_err, constants::gamma_es_mhz_per_gpa, 1.0}});
  }
}

void fig4c(Recipe& r, const ReproduceArgs& a) {
  const auto& osm = r.ctx->config.strain;
  const double a_par = r.ctx->config.excited.a_par;
  const auto t = grid(294.0, 600.0, 2.0);
  std::vector<double> e, eps;
  for (double x : t) {
    e.push_back(thermo::e_es_of_t(x, osm));
    eps.push_back(thermo::epsilon_es_of_t(x, osm, a_par));
  }
  r.columns("curve.csv", {"temperature_K", "e_MHz", "epsilon_MHz"}, {t, e, eps});

  noise::Rng rng(r.ctx->seed, 0);
  const auto ts = grid(300.0, 600.0, 20.0);
  std::vector<double> es;
  for (double x : ts) es.push_back(thermo::epsilon_es_of_t(x, osm, a_par) + 2.0 * rng.normal());
  r.columns("points.csv", {"temperature_K", "epsilon_MHz"}, {ts, es});
  const auto f = fit::fit_strain_energy(ts, es, osm.d_perp_es, a_par);
  r.checks("synthetic", {self_check("strain_energy_meV", f.strain_energy_mev, f.strain_energy_err, osm.strain_energy)});
  if (auto pts = r.digitized(a.data_dir, "fig4c.csv", "temperature_K", "epsilon_MHz")) {
    const auto g = fit::fit_strain_energy(pts->x, pts->y, osm.d_perp_es, a_par);
    r.checks("reference", {{"strain_energy_meV", g.strain_energy_mev, g.strain_energy_err, constants::strain_energy_mev, 0.3}});
  }
}

void run_reproduce(const ReproduceArgs& a, const Context& ctx) {
  static const std::map<std::string, std::pair<void (*)(Recipe&, const ReproduceArgs&), std::string>> table = {
      {"2b", {fig2b, "Fig. 2b: log DWF against T^2 (oven)"}},
      {"2c", {fig2c, "Fig. 2c: DWF against laser power"}},
      {"3a", {fig3a, "Fig. 3a: ground-state D(T) and Poissonian spectral noise"}},
      {"3b", {fig3b, "Fig. 3b: temperature step in a ZPL time trace"}},
      {"4b", {fig4b, "Fig. 4b: excited-state D shift from thermal expansion"}},
      {"4c", {fig4c, "Fig. 4c: excited-state splitting epsilon(T)"}}};
  const auto it = table.find(a.figure);
  if (it == table.end()) throw InvalidInput("unknown figure '" + a.figure + "'");

  Recipe r;
  r.ctx = &ctx;
  r.dir = ctx.global.out.empty() ? std::filesystem::path("reproduce_" + a.figure) : std::filesystem::path(ctx.global.out);
  std::filesystem::create_directories(r.dir);
  r.report["figure"] = a.figure;
  r.report["cite"] = it->second.second;
  it->second.first(r, a);

  bool all = true;
  for (const auto& key : {"synthetic", "reference", "normality"}) {
    if (!r.report.contains(key)) continue;
    for (const auto& c : r.report[key]) all = all && c["pass"].get<bool>();
  }
  r.report["status"] = all ? "pass" : "fail";
  const auto fit_path = r.dir / "fit.json";
  {
    auto out = io::open_output(fit_path);
    out << r.report.dump(2) << '\n';
  }
  r.outputs.push_back(fit_path);

  auto m = ctx.manifest("reproduce " + a.figure);
  for (const auto& p : r.inputs) m.add_input(p);
  for (const auto& p : r.outputs) m.add_output(p);
  m.extra = {{"figure", it->second.second}};
  {
    auto out = io::open_output(r.dir / "manifest.json");
    out << m.to_json().dump(2) << '\n';
  }
  r.rows.emplace_back("status", all ? "pass" : "fail");
  r.rows.emplace_back("written", r.dir.string());
  print_summary(it->second.second, r.rows);
}

}  // namespace

void add_reproduce(CLI::App& app, const GlobalOptions& g, const std::vector<std::string>& args) {
  auto a = std::make_shared<ReproduceArgs>();
  auto* s = app.add_subcommand("reproduce", "model curves, data points and fits for a figure");
  s->add_option("figure", a->figure, "2b, 2c, 3a, 3b, 4b or 4c")
      ->required()
      ->check(CLI::IsMember({"2b", "2c", "3a", "3b", "4b", "4c"}));
  s->add_option("--data-dir", a->data_dir, "directory with digitized point CSVs");
  s->callback([a, &g, &args] { run_reproduce(*a, make_context(g, args)); });
}

}  // namespace nvthermo::cli
