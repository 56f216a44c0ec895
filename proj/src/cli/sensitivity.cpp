#include <iostream>
#include <memory>

#include "cli/common.hpp"
#include "nvthermo/io/files.hpp"
#include "nvthermo/thermo/dwf.hpp"

namespace nvthermo::cli {

namespace {

struct SensitivityArgs {
  std::vector<double> n{1.0, 500.0};
  std::vector<double> r{0.0, 1.0};
  std::vector<double> c_zpl;
  std::optional<double> mu, gamma, dwf, phi;
  std::optional<double> temp;
};

void run_sensitivity(const SensitivityArgs& a, const Context& ctx) {
  thermo::SensitivityInput base = ctx.config.sensitivity;
  if (a.mu) base.collection_eff = *a.mu;
  if (a.gamma) base.emission_rate = *a.gamma;
  if (a.dwf) base.dwf = *a.dwf;
  double phi_k = a.phi.value_or(ctx.config.phi_k);
  if (a.temp) phi_k = thermo::phi(*a.temp, ctx.config.dwf);
  if (!(phi_k > 0.0)) throw InvalidInput("phi must be > 0");
  if (a.r.empty()) throw InvalidInput("--r needs at least one value");

  struct Row {
    double n, mu, gamma, dwf, r, c_zpl, eta;
  };
  std::vector<Row> rows;
  for (double r : a.r) {
    if (!(r >= 0.0)) throw InvalidInput("background ratios must be >= 0");
    if (!a.c_zpl.empty()) {
      for (double c : a.c_zpl) rows.push_back({0.0, 0.0, 0.0, 0.0, r, c, thermo::noise_floor_from_rate(c, r, phi_k)});
      continue;
    }
    if (a.n.empty()) throw InvalidInput("--n needs at least one value");
    for (double n : a.n) {
      thermo::SensitivityInput in = base;
      in.n_centers = n;
      in.background_ratio = r;
      in.validate();
      if (!(n > 0.0)) throw InvalidInput("center counts must be > 0");
      rows.push_back({n, in.collection_eff, in.emission_rate, in.dwf, r, in.c_zpl(), thermo::noise_floor(in, phi_k)});
    }
  }

  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json j = {{"background_ratio", row.r}, {"c_zpl_per_s", row.c_zpl}, {"phi_k", phi_k},
                        {"eta_k_per_sqrt_hz", row.eta}};
    if (a.c_zpl.empty()) {
      j["n_centers"] = row.n;
      j["collection_eff"] = row.mu;
      j["emission_rate_per_s"] = row.gamma;
      j["dwf"] = row.dwf;
    }
    table.push_back(j);
  }

  std::cout << (a.c_zpl.empty() ? "n_centers,collection_eff,emission_rate_per_s,dwf," : "")
            << "background_ratio,c_zpl_per_s,phi_k,eta_k_per_sqrt_hz\n";
  auto write_rows = [&](std::ostream& out) {
    out.precision(10);
    for (const auto& row : rows) {
      if (a.c_zpl.empty()) out << row.n << ',' << row.mu << ',' << row.gamma << ',' << row.dwf << ',';
      out << row.r << ',' << row.c_zpl << ',' << phi_k << ',' << row.eta << '\n';
    }
  };
  write_rows(std::cout);

  if (!ctx.global.out.empty()) {
    const std::filesystem::path path = ctx.global.out;
    {
      auto out = io::open_output(path);
      if (ctx.global.format == "json") {
        out << table.dump(2) << '\n';
      } else {
        out << (a.c_zpl.empty() ? "n_centers,collection_eff,emission_rate_per_s,dwf," : "")
            << "background_ratio,c_zpl_per_s,phi_k,eta_k_per_sqrt_hz\n";
        write_rows(out);
      }
    }
    auto m = ctx.manifest("sensitivity");
    m.extra = {{"phi_k", phi_k}};
    write_manifest(m, path);
  }
}

}  // namespace

void add_sensitivity(CLI::App& app, const GlobalOptions& g, const std::vector<std::string>& args) {
  auto a = std::make_shared<SensitivityArgs>();
  auto* s = app.add_subcommand("sensitivity", "tabulate the temperature noise floor");
  s->add_option("--n", a->n, "center counts")->delimiter(',');
  s->add_option("--r", a->r, "background-to-ZPL-peak ratios")->delimiter(',');
  s->add_option("--c-zpl", a->c_zpl, "detected ZPL photon rates, 1/s (replaces the n grid)")->delimiter(',');
  s->add_option("--mu", a->mu, "collection efficiency");
  s->add_option("--gamma", a->gamma, "emission rate per center, 1/s");
  s->add_option("--dwf", a->dwf, "Debye-Waller factor");
  s->add_option("--phi", a->phi, "DWF temperature scale, K");
  s->add_option("--temp", a->temp, "compute phi from the DWF model at this temperature, K")->excludes("--phi");
  s->callback([a, &g, &args] { run_sensitivity(*a, make_context(g, args)); });
}

}  // namespace nvthermo::cli
