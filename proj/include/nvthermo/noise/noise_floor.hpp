#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nvthermo/errors.hpp"
#include "nvthermo/fit/zpl.hpp"
#include "nvthermo/noise/synthetic.hpp"
#include "nvthermo/thermo/dwf.hpp"

namespace nvthermo::noise {

struct NoiseReport {
  double empirical_std = 0.0;        // K
  double implied_noise_floor = 0.0;  // K/sqrt(Hz)
  double predicted_noise_floor = 0.0;
  double ratio = 0.0;  // implied / predicted
  double mean_temperature = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
};

struct MonteCarloOptions {
  fit::ZplOptions zpl;
  double band_lo_nm = 600.0;
  double band_hi_nm = 800.0;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Per-trial recovered temperature: synthesize, fit the ZPL, take the DWF with
/// the known background removed, invert the DWF model. Empty on failure.
inline std::optional<double> pipeline_temperature(const SyntheticSource& src, const thermo::DwfModel& m,
                                                  double exposure_s, std::uint64_t trial,
                                                  const MonteCarloOptions& opt = {}) {
  try {
    const Spectrum s = synthesize_spectrum(src, exposure_s, trial);
    const fit::ZplFit z = fit::fit_zpl(s, opt.zpl);
    const auto d = fit::compute_dwf(s, z, opt.band_lo_nm, opt.band_hi_nm, src.background_rate_per_bin * exposure_s);
    return thermo::temperature_from_dwf(d.value, m);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::numerical || dynamic_cast<const RangeError*>(&e)) return std::nullopt;
    throw;
  }
}

/// Temperature scatter of the full measurement pipeline over independent
/// trials, converted to a noise floor by multiplying with sqrt(exposure), and
/// compared with sqrt(1 + 3r) Phi / sqrt(C_ZPL).
///
/// Trial i always uses stream i of the source seed and results are reduced in
/// trial order, so the report does not depend on the thread count.
inline NoiseReport monte_carlo_noise_floor(const SyntheticSource& src, const thermo::DwfModel& m,
                                           std::size_t trials, double exposure_s,
                                           const MonteCarloOptions& opt = {}) {
  if (trials < 100) throw InvalidInput("Monte-Carlo noise floor needs at least 100 trials");
  if (!(exposure_s > 0.0)) throw InvalidInput("exposure must be > 0");
  std::vector<std::optional<double>> temps(trials);
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::size_t>(threads, trials));
  auto work = [&](unsigned t) {
    for (std::size_t i = t; i < trials; i += threads) temps[i] = pipeline_temperature(src, m, exposure_s, i, opt);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  NoiseReport r;
  r.trials = trials;
  double sum = 0.0;
  std::size_t ok = 0;
  for (const auto& t : temps) {
    if (!t) {
      ++r.failures;
      continue;
    }
    sum += *t;
    ++ok;
  }
  if (double(r.failures) > 0.05 * double(trials)) {
    throw PipelineInstability(std::to_string(r.failures) + " of " + std::to_string(trials) +
                              " pipeline trials failed");
  }
  r.mean_temperature = sum / double(ok);
  double ss = 0.0;
  for (const auto& t : temps)
    if (t) ss += (*t - r.mean_temperature) * (*t - r.mean_temperature);
  r.empirical_std = std::sqrt(ss / double(ok - 1));
  r.implied_noise_floor = r.empirical_std * std::sqrt(exposure_s);
  r.predicted_noise_floor = thermo::noise_floor_from_rate(src.zpl_area_rate, src.background_ratio,
                                                          thermo::phi(src.temperature_k, m));
  r.ratio = r.implied_noise_floor / r.predicted_noise_floor;
  return r;
}

}  // namespace nvthermo::noise
