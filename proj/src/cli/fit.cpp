#include <functional>
#include <iostream>
#include <memory>

#include "cli/common.hpp"
#include "nvthermo/fit/calibration.hpp"
#include "nvthermo/fit/odmr.hpp"
#include "nvthermo/fit/zpl.hpp"
#include "nvthermo/io/files.hpp"
#include "nvthermo/noise/timeseries.hpp"
#include "nvthermo/thermo/dwf.hpp"

namespace nvthermo::cli {

namespace {

using Rows = std::vector<std::pair<std::string, std::string>>;

struct FitArgs {
  std::string input;
  // zpl
  std::optional<double> window_lo, window_hi, band_lo, band_hi;
  double background_per_bin = 0.0;
  // odmr
  std::size_t lines = 2;
  // laser-cal
  std::optional<double> t0, t_debye;
  // strain-energy
  std::optional<double> d_perp, a_par;
};

nlohmann::json matrix_json(const fit::MatrixXd& m) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

nlohmann::json fit_json(const fit::FitResult& r) {
  return {{"converged", r.converged},
          {"n_iterations", r.n_iterations},
          {"residual_norm", r.residual_norm},
          {"dof", r.dof},
          {"reduced_chi2", r.dof > 0 ? r.reduced_chi2() : 0.0},
          {"rank_deficient", r.rank_deficient},
          {"covariance", matrix_json(r.covariance)}};
}

std::string pm(double v, double e) { return fmt(v, 8) + " +- " + fmt(e, 3); }

struct Outcome {
  nlohmann::json report;
  Rows rows;
  bool converged = true;
};

Outcome fit_zpl_recipe(const FitArgs& a, const Context& ctx) {
  auto in = io::open_input(a.input);
  const Spectrum s = io::read_spectrum_csv(in);
  fit::ZplOptions opt;
  opt.window_lo_nm = a.window_lo.value_or(ctx.config.zpl_window_lo_nm);
  opt.window_hi_nm = a.window_hi.value_or(ctx.config.zpl_window_hi_nm);
  const double band_lo = a.band_lo.value_or(ctx.config.band_lo_nm);
  const double band_hi = a.band_hi.value_or(ctx.config.band_hi_nm);
  const auto z = fit::fit_zpl(s, opt);
  const auto d = fit::compute_dwf(s, z, band_lo, band_hi, a.background_per_bin);
  const auto ds = fit::compute_dwf_star(s, z);

  Outcome o;
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : z.components) {
    comps.push_back({{"center_nm", c.center},
                     {"center_err", c.center_err},
                     {"fwhm_nm", c.fwhm},
                     {"fwhm_err", c.fwhm_err},
                     {"area_counts", c.area},
                     {"area_err", c.area_err}});
  }
  o.report["components"] = comps;
  o.report["baseline"] = {{"intercept", z.intercept}, {"slope_per_nm", z.slope}, {"x_ref_nm", z.x_ref}};
  o.report["window_nm"] = {z.window_lo, z.window_hi};
  o.report["band_nm"] = {band_lo, band_hi};
  o.report["zpl_area"] = z.total_area();
  o.report["zpl_area_err"] = z.total_area_err();
  o.report["dwf"] = {{"value", d.value}, {"err", d.uncertainty}};
  o.report["dwf_star"] = {{"value", ds.value}, {"err", ds.uncertainty}};
  o.report["fit"] = fit_json(z.fit);
  o.rows = {{"ZPL 1 center", pm(z.components[0].center, z.components[0].center_err) + " nm"},
            {"ZPL 2 center", pm(z.components[1].center, z.components[1].center_err) + " nm"},
            {"ZPL area", pm(z.total_area(), z.total_area_err()) + " counts"},
            {"DWF", pm(d.value, d.uncertainty)},
            {"DWF*", pm(ds.value, ds.uncertainty)}};
  try {
    const double t = thermo::temperature_from_dwf(d.value, ctx.config.dwf);
    const double t_err = thermo::phi(t, ctx.config.dwf) * d.uncertainty / d.value;
    o.report["temperature_k"] = {{"value", t}, {"err", t_err}};
    o.rows.emplace_back("temperature", pm(t, t_err) + " K");
  } catch (const RangeError& e) {
    o.report["temperature_k"] = nullptr;
    o.report["temperature_note"] = e.what();
    o.rows.emplace_back("temperature", std::string("n/a: ") + e.what());
  }
  return o;
}

Outcome fit_odmr_recipe(const FitArgs& a, const Context&) {
  auto in = io::open_input(a.input);
  const Spectrum s = io::read_spectrum_csv(in);
  const auto f = fit::fit_odmr(s, a.lines);
  Outcome o;
  nlohmann::json lines = nlohmann::json::array();
  for (const auto& l : f.lines) {
    lines.push_back({{"center_mhz", l.center},
                     {"center_err", l.center_err},
                     {"fwhm_mhz", l.fwhm},
                     {"fwhm_err", l.fwhm_err},
                     {"contrast", l.contrast},
                     {"contrast_err", l.contrast_err}});
    o.rows.emplace_back("line", pm(l.center, l.center_err) + " MHz");
  }
  o.report["lines"] = lines;
  o.report["baseline_counts_per_s"] = f.baseline;
  o.report["d_mhz"] = {{"value", f.d}, {"err", f.d_err}};
  o.rows.emplace_back("D", pm(f.d, f.d_err) + " MHz");
  if (f.splitting) {
    o.report["splitting_mhz"] = {{"value", *f.splitting}, {"err", *f.splitting_err}};
    o.rows.emplace_back("half-splitting", pm(*f.splitting, *f.splitting_err) + " MHz");
  }
  o.report["degenerate"] = f.degenerate;
  o.report["warnings"] = f.warnings;
  for (const auto& w : f.warnings) o.rows.emplace_back("warning", w);
  o.report["fit"] = fit_json(f.fit);
  return o;
}

io::PointSet read_points(const std::string& path, const std::string& x, const std::string& y) {
  auto in = io::open_input(path);
  return io::read_points_csv(in, x, y);
}

Outcome fit_dwf_cal_recipe(const FitArgs& a, const Context&) {
  const auto pts = read_points(a.input, "temperature_K", "dwf");
  const auto c = fit::fit_dwf_calibration(pts.x, pts.y);
  Outcome o;
  o.report["s"] = {{"value", c.model.s}, {"err", c.s_err()}};
  o.report["t_debye_k"] = {{"value", c.model.t_debye}, {"err", c.t_debye_err()}};
  o.report["covariance"] = matrix_json(c.covariance);
  o.report["regression"] = {{"intercept", c.regression.coef[0]},
                            {"slope_per_k2", c.regression.coef[1]},
                            {"rss", c.regression.rss},
                            {"dof", c.regression.dof}};
  o.rows = {{"S", pm(c.model.s, c.s_err())}, {"T_D", pm(c.model.t_debye, c.t_debye_err()) + " K"}};
  return o;
}

Outcome fit_laser_cal_recipe(const FitArgs& a, const Context& ctx) {
  const auto pts = read_points(a.input, "power_mW", "dwf");
  const double t0 = a.t0.value_or(ctx.config.laser.t0);
  const double td = a.t_debye.value_or(ctx.config.dwf.t_debye);
  const auto c = fit::fit_laser_calibration(pts.x, pts.y, t0, td);
  Outcome o;
  o.converged = c.fit.converged;
  o.report["s"] = {{"value", c.s}, {"err", c.s_err()}};
  o.report["b_k_per_mw"] = {{"value", c.b}, {"err", c.b_err()}};
  o.report["t0_k"] = t0;
  o.report["t_debye_k"] = td;
  o.report["fit"] = fit_json(c.fit);
  o.rows = {{"S", pm(c.s, c.s_err())}, {"b", pm(c.b, c.b_err()) + " K/mW"}};
  return o;
}

Outcome fit_quad_shift_recipe(const FitArgs& a, const Context&) {
  const auto pts = read_points(a.input, "temperature_K", "d_MHz");
  const auto q = fit::fit_quadratic_shift(pts.x, pts.y);
  Outcome o;
  o.report["a_mhz"] = {{"value", q.coefficients.a}, {"err", q.err(0)}};
  o.report["b_mhz_per_k"] = {{"value", q.coefficients.b}, {"err", q.err(1)}};
  o.report["c_mhz_per_k2"] = {{"value", q.coefficients.c}, {"err", q.err(2)}};
  o.report["covariance"] = matrix_json(q.covariance);
  o.report["rss"] = q.rss;
  o.report["dof"] = q.dof;
  std::size_t outside = 0;
  for (double t : pts.x) outside += thermo::QuadraticShift::in_fit_range(t) ? 0 : 1;
  if (outside) {
    o.report["warnings"] = {std::to_string(outside) + " points lie outside 294-600 K"};
    o.rows.emplace_back("warning", std::to_string(outside) + " points outside 294-600 K");
  }
  o.rows.emplace_back("a", pm(q.coefficients.a, q.err(0)) + " MHz");
  o.rows.emplace_back("b", pm(q.coefficients.b, q.err(1)) + " MHz/K");
  o.rows.emplace_back("c", pm(q.coefficients.c, q.err(2)) + " MHz/K^2");
  return o;
}

Outcome fit_gamma_recipe(const FitArgs& a, const Context& ctx) {
  const auto pts = read_points(a.input, "temperature_K", "shift_MHz");
  const auto g = fit::fit_expansion_shift(pts.x, pts.y, ctx.config.expansion_model());
  Outcome o;
  o.report["gamma_mhz_per_gpa"] = {{"value", g.gamma}, {"err", g.gamma_err}};
  o.report["dof"] = g.dof;
  o.report["pressure_gpa"] = g.pressure_gpa;
  o.report["expansion_table"] = ctx.config.expansion_table;
  o.rows = {{"Gamma", pm(g.gamma, g.gamma_err) + " MHz/GPa"}};
  return o;
}

Outcome fit_strain_energy_recipe(const FitArgs& a, const Context& ctx) {
  const auto pts = read_points(a.input, "temperature_K", "epsilon_MHz");
  const double d_perp = a.d_perp.value_or(ctx.config.strain.d_perp_es);
  const double a_par = a.a_par.value_or(ctx.config.excited.a_par);
  const auto f = fit::fit_strain_energy(pts.x, pts.y, d_perp, a_par);
  Outcome o;
  o.converged = f.fit.converged;
  o.report["strain_energy_mev"] = {{"value", f.strain_energy_mev}, {"err", f.strain_energy_err}};
  o.report["d_perp_mhz"] = d_perp;
  o.report["a_par_mhz"] = a_par;
  o.report["fit"] = fit_json(f.fit);
  o.rows = {{"strain energy", pm(f.strain_energy_mev, f.strain_energy_err) + " meV"}};
  return o;
}

Outcome fit_step_recipe(const FitArgs& a, const Context&) {
  auto in = io::open_input(a.input);
  const auto ts = io::read_timeseries_csv(in);
  const auto r = noise::detect_step(ts);
  Outcome o;
  o.report["found"] = r.found;
  o.report["index"] = r.index;
  o.report["improvement"] = r.improvement;
  if (r.found) {
    o.report["step_size"] = {{"value", r.step_size}, {"err", r.uncertainty}};
    o.report["level_before"] = r.level_before;
    o.report["level_after"] = r.level_after;
    o.report["time_s"] = ts.times[r.index];
    o.rows = {{"step", pm(r.step_size, r.uncertainty)}, {"index", std::to_string(r.index)}};
  } else {
    o.rows = {{"step", "none"}};
  }
  return o;
}

Outcome fit_detrend_recipe(const FitArgs& a, const Context&) {
  auto in = io::open_input(a.input);
  const auto ts = io::read_timeseries_csv(in);
  const auto c = noise::detrend_cubic(ts);
  Outcome o;
  o.report["coefficients"] = c.coeffs;
  o.report["residual_std"] = c.residual_std;
  o.report["residuals"] = c.residuals;
  o.rows = {{"residual std", fmt(c.residual_std)}};
  return o;
}

void run_recipe(const std::string& recipe, const FitArgs& a, const Context& ctx,
                const std::function<Outcome(const FitArgs&, const Context&)>& body) {
  const std::filesystem::path path =
      ctx.global.out.empty() ? std::filesystem::path(recipe + "_fit." + ctx.global.format)
                             : std::filesystem::path(ctx.global.out);
  auto m = ctx.manifest("fit " + recipe);
  m.add_input(a.input);

  Outcome o;
  try {
    o = body(a, ctx);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::numerical) throw;
    nlohmann::json diag = {{"recipe", recipe}, {"input", a.input}, {"status", "failed"}, {"error", e.what()}};
    write_report(diag, path, ctx.global.format);
    write_manifest(m, path);
    throw;
  }
  o.report["recipe"] = recipe;
  o.report["input"] = a.input;
  o.report["status"] = o.converged ? "converged" : "not_converged";
  write_report(o.report, path, ctx.global.format);
  write_manifest(m, path);
  o.rows.emplace_back("report", path.string());
  print_summary("fit " + recipe + (o.converged ? "" : " (NOT CONVERGED)"), o.rows);
  if (!o.converged) throw NotConverged("fit " + recipe + " did not converge; diagnostic report written");
}

}  // namespace

void add_fit(CLI::App& app, const GlobalOptions& g, const std::vector<std::string>& args) {
  auto* fit = app.add_subcommand("fit", "fit recipes over CSV inputs");
  fit->require_subcommand(1);
  auto a = std::make_shared<FitArgs>();

  using Body = Outcome (*)(const FitArgs&, const Context&);
  const std::vector<std::tuple<std::string, std::string, Body>> recipes = {
      {"zpl", "two-Lorentzian ZPL fit, DWF and temperature (spectrum CSV)", fit_zpl_recipe},
      {"odmr", "Lorentzian ODMR dips (spectrum CSV)", fit_odmr_recipe},
      {"dwf-cal", "S and T_D from temperature_K,dwf", fit_dwf_cal_recipe},
      {"laser-cal", "S and b from power_mW,dwf", fit_laser_cal_recipe},
      {"quad-shift", "a + b T + c T^2 from temperature_K,d_MHz", fit_quad_shift_recipe},
      {"gamma", "pressure coefficient from temperature_K,shift_MHz", fit_gamma_recipe},
      {"strain-energy", "strain energy from temperature_K,epsilon_MHz", fit_strain_energy_recipe},
      {"step", "two-plateau step detection (time-series CSV)", fit_step_recipe},
      {"detrend", "cubic detrend (time-series CSV)", fit_detrend_recipe}};

  for (const auto& [name, help, body] : recipes) {
    auto* sub = fit->add_subcommand(name, help);
    sub->add_option("--in", a->input, "input CSV")->required()->check(CLI::ExistingFile);
    if (name == "zpl") {
      sub->add_option("--window-lo", a->window_lo, "ZPL window start, nm");
      sub->add_option("--window-hi", a->window_hi, "ZPL window end, nm");
      sub->add_option("--band-lo", a->band_lo, "emission band start, nm");
      sub->add_option("--band-hi", a->band_hi, "emission band end, nm");
      sub->add_option("--background-per-bin", a->background_per_bin, "known uniform background, counts/bin");
    } else if (name == "odmr") {
      sub->add_option("--lines", a->lines, "number of dips (1-6)");
    } else if (name == "laser-cal") {
      sub->add_option("--t0", a->t0, "room temperature, K");
      sub->add_option("--t-debye", a->t_debye, "Debye temperature, K");
    } else if (name == "strain-energy") {
      sub->add_option("--d-perp", a->d_perp, "transverse spin-spin term, MHz");
      sub->add_option("--a-par", a->a_par, "axial hyperfine, MHz");
    }
    sub->callback([recipe = name, body = body, a, &g, &args] { run_recipe(recipe, *a, make_context(g, args), body); });
  }
}

}  // namespace nvthermo::cli
