#include <algorithm>
#include <array>
#include <iostream>
#include <memory>
#include <optional>

#include "cli/common.hpp"
#include "nvthermo/io/files.hpp"
#include "nvthermo/noise/rng.hpp"
#include "nvthermo/noise/synthetic.hpp"
#include "nvthermo/noise/timeseries.hpp"
#include "nvthermo/spin/spin_model.hpp"

namespace nvthermo::cli {

namespace {

struct OdmrArgs {
  std::string level = "gs";
  std::optional<double> d, e, a_par, a_perp;
  std::optional<double> width;
  double contrast = 0.03;
  double rate = 1e5;  // off-resonance counts/s
  std::optional<double> f_lo, f_hi, step;
  double exposure = 1.0;
  bool noiseless = false;
};

struct PlArgs {
  std::optional<double> temp;
  std::optional<double> r;
  std::optional<double> n_centers;
  std::optional<double> zpl_rate;
  std::optional<double> dwf;
  double exposure = 1.0;
  bool noiseless = false;
};

struct SeriesArgs {
  std::size_t n_points = 40;
  double cadence = 1.0;
  double level = 294.0;
  std::size_t step_at = 23;
  double step_size = 17.0;
  double noise = 4.0;
  std::vector<double> drift;
};

std::filesystem::path output_path(const Context& ctx, const std::string& fallback) {
  return ctx.global.out.empty() ? std::filesystem::path(fallback) : std::filesystem::path(ctx.global.out);
}

void simulate_odmr(const OdmrArgs& a, const Context& ctx) {
  if (a.level != "gs" && a.level != "es") throw InvalidInput("--level must be gs or es");
  const bool ground = a.level == "gs";
  spin::SpinParams p = ground ? ctx.config.ground : ctx.config.excited;
  if (a.d) p.d = *a.d;
  if (a.e) p.e = *a.e;
  if (a.a_par) p.a_par = *a.a_par;
  if (a.a_perp) p.a_perp = *a.a_perp;
  p.validate();
  const double width = a.width ? *a.width : (ground ? 5.0 : 30.0);
  if (!(width > 0.0)) throw InvalidInput("--width must be > 0");
  if (!(a.rate > 0.0)) throw InvalidInput("--rate must be > 0");

  const auto lines = spin::transition_frequencies(p);
  double fmin = lines.front().frequency_mhz, fmax = fmin;
  for (const auto& l : lines) {
    fmin = std::min(fmin, l.frequency_mhz);
    fmax = std::max(fmax, l.frequency_mhz);
  }
  const double lo = a.f_lo ? *a.f_lo : fmin - 10.0 * width;
  const double hi = a.f_hi ? *a.f_hi : fmax + 10.0 * width;
  const double step = a.step ? *a.step : width / 10.0;
  if (!(hi > lo) || !(step > 0.0)) throw InvalidInput("invalid frequency grid");
  const std::size_t n = std::size_t(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (n < 10 || n > 10'000'000) throw InvalidInput("frequency grid must hold 10 to 1e7 points");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + double(i) * step;

  const auto model = spin::odmr_lines_from(lines, width, a.contrast, a.rate);
  Spectrum s = spin::synthesize_odmr(model, grid, a.exposure);
  if (!a.noiseless) {
    noise::Rng rng(ctx.seed, 0);
    for (double& c : s.counts) c = double(rng.poisson(c));
  }

  const auto path = output_path(ctx, "odmr.csv");
  {
    auto out = io::open_output(path);
    io::write_spectrum_csv(out, s);
  }
  auto m = ctx.manifest("simulate odmr");
  nlohmann::json tr = nlohmann::json::array();
  for (const auto& l : lines) {
    tr.push_back({{"frequency_mhz", l.frequency_mhz},
                  {"m_i", l.m_i},
                  {"branch", l.branch == spin::Branch::lower ? "lower" : "upper"}});
  }
  m.extra = {{"level", a.level},
             {"d_mhz", p.d},
             {"e_mhz", p.e},
             {"a_par_mhz", p.a_par},
             {"a_perp_mhz", p.a_perp},
             {"width_mhz", width},
             {"contrast", a.contrast},
             {"noiseless", a.noiseless},
             {"transitions", tr}};
  write_manifest(m, path);
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& l : lines) {
    rows.emplace_back("m_I=" + std::to_string(l.m_i) + (l.branch == spin::Branch::lower ? " lower" : " upper"),
                      fmt(l.frequency_mhz, 10) + " MHz");
  }
  rows.emplace_back("written", path.string());
  print_summary("ODMR transitions", rows);
}

void simulate_pl(const PlArgs& a, const Context& ctx) {
  noise::PlSourceConfig c;
  c.dwf_model = ctx.config.dwf;
  c.temperature_k = a.temp ? *a.temp : constants::laser_t0_k;
  c.n_centers = a.n_centers ? *a.n_centers : ctx.config.sensitivity.n_centers;
  c.collection_eff = ctx.config.sensitivity.collection_eff;
  c.emission_rate = ctx.config.sensitivity.emission_rate;
  c.background_ratio = a.r ? *a.r : ctx.config.sensitivity.background_ratio;
  c.zpl_rate = a.zpl_rate;
  c.dwf_value = a.dwf;
  c.seed = ctx.seed;
  if (!(a.exposure > 0.0)) throw InvalidInput("--exposure must be > 0");
  const auto src = noise::make_pl_source(c);
  const Spectrum s = a.noiseless ? noise::expected_spectrum(src, a.exposure)
                                 : noise::synthesize_spectrum(src, a.exposure, 0);

  const auto path = output_path(ctx, "pl.csv");
  {
    auto out = io::open_output(path);
    io::write_spectrum_csv(out, s);
  }
  auto m = ctx.manifest("simulate pl");
  m.extra = {{"temperature_k", src.temperature_k},
             {"dwf", src.dwf},
             {"zpl_area_counts", src.zpl_area_rate * a.exposure},
             {"background_ratio", src.background_ratio},
             {"background_per_bin", src.background_rate_per_bin * a.exposure},
             {"exposure_s", a.exposure},
             {"noiseless", a.noiseless}};
  write_manifest(m, path);
  print_summary("PL spectrum", {{"temperature", fmt(src.temperature_k) + " K"},
                                {"DWF", fmt(src.dwf)},
                                {"ZPL counts", fmt(src.zpl_area_rate * a.exposure)},
                                {"background/bin", fmt(src.background_rate_per_bin * a.exposure)},
                                {"written", path.string()}});
}

void simulate_series(const SeriesArgs& a, const Context& ctx) {
  noise::StepSeriesConfig c;
  c.n_points = a.n_points;
  c.cadence_s = a.cadence;
  c.level = a.level;
  c.step_at = a.step_at;
  c.step_size = a.step_size;
  c.noise_std = a.noise;
  c.seed = ctx.seed;
  if (a.drift.size() > 4) throw InvalidInput("--drift takes at most 4 coefficients");
  std::copy(a.drift.begin(), a.drift.end(), c.drift.begin());
  const auto ts = noise::make_step_series(c);

  const auto path = output_path(ctx, "timeseries.csv");
  {
    auto out = io::open_output(path);
    io::write_timeseries_csv(out, ts);
  }
  auto m = ctx.manifest("simulate timeseries");
  m.extra = {{"n_points", a.n_points}, {"cadence_s", a.cadence}, {"level", a.level},    {"step_at", a.step_at},
             {"step_size", a.step_size}, {"noise_std", a.noise}, {"drift", c.drift}};
  write_manifest(m, path);
  print_summary("time series", {{"points", std::to_string(ts.size())}, {"written", path.string()}});
}

}  // namespace

void add_simulate(CLI::App& app, const GlobalOptions& g, const std::vector<std::string>& args) {
  auto* sim = app.add_subcommand("simulate", "write synthetic ODMR, PL or time-series data");
  sim->require_subcommand(1);

  auto odmr = std::make_shared<OdmrArgs>();
  auto* o = sim->add_subcommand("odmr", "ODMR spectrum from the spin Hamiltonian");
  o->add_option("--level", odmr->level, "gs or es")->check(CLI::IsMember({"gs", "es"}));
  o->add_option("--d", odmr->d, "zero-field splitting, MHz");
  o->add_option("--e", odmr->e, "strain splitting, MHz");
  o->add_option("--a-par", odmr->a_par, "axial hyperfine, MHz");
  o->add_option("--a-perp", odmr->a_perp, "transverse hyperfine, MHz");
  o->add_option("--width", odmr->width, "line FWHM, MHz");
  o->add_option("--contrast", odmr->contrast, "fractional dip depth");
  o->add_option("--rate", odmr->rate, "off-resonance counts/s");
  o->add_option("--f-lo", odmr->f_lo, "grid start, MHz");
  o->add_option("--f-hi", odmr->f_hi, "grid end, MHz");
  o->add_option("--step", odmr->step, "grid step, MHz");
  o->add_option("--exposure", odmr->exposure, "seconds per point");
  o->add_flag("--noiseless", odmr->noiseless, "write expected counts");
  o->callback([odmr, &g, &args] { simulate_odmr(*odmr, make_context(g, args)); });

  auto pl = std::make_shared<PlArgs>();
  auto* p = sim->add_subcommand("pl", "NV- photoluminescence spectrum");
  p->add_option("--temp", pl->temp, "temperature, K");
  p->add_option("--r", pl->r, "background-to-ZPL-peak ratio");
  p->add_option("--n-centers", pl->n_centers, "number of NV centers");
  p->add_option("--zpl-rate", pl->zpl_rate, "detected ZPL photons/s (overrides n mu gamma DWF)");
  p->add_option("--dwf", pl->dwf, "DWF value (overrides the DWF model)");
  p->add_option("--exposure", pl->exposure, "seconds");
  p->add_flag("--noiseless", pl->noiseless, "write expected counts");
  p->callback([pl, &g, &args] { simulate_pl(*pl, make_context(g, args)); });

  auto ts = std::make_shared<SeriesArgs>();
  auto* t = sim->add_subcommand("timeseries", "temperature record with a step");
  t->add_option("--n", ts->n_points, "points");
  t->add_option("--cadence", ts->cadence, "seconds between points");
  t->add_option("--level", ts->level, "initial level, K");
  t->add_option("--step-at", ts->step_at, "index of the first point after the step");
  t->add_option("--step-size", ts->step_size, "step, K");
  t->add_option("--noise", ts->noise, "Gaussian noise std, K");
  t->add_option("--drift", ts->drift, "cubic drift coefficients c0 c1 c2 c3 (powers of t)")->delimiter(',');
  t->callback([ts, &g, &args] { simulate_series(*ts, make_context(g, args)); });
}

}  // namespace nvthermo::cli
