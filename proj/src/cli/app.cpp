#include <exception>
#include <iostream>

#include "cli/common.hpp"
#include "nvthermo/version.hpp"

namespace nvthermo::cli {

int run(int argc, char** argv) {
  CLI::App app{"NV-center thermometry toolkit: spin-level simulation, spectral fits and sensitivity analysis",
               "nvthermo"};
  app.set_version_flag("--version", "nvthermo " + std::string(version));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed (overrides the config)");
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"csv", "json"}));

  const std::vector<std::string> args(argv + 1, argv + argc);
  add_simulate(app, g, args);
  add_fit(app, g, args);
  add_sensitivity(app, g, args);
  add_reproduce(app, g, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ExitCode::ok : ExitCode::usage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (const auto* d = dynamic_cast<const DegeneracyError*>(&e)) {
      std::cerr << "eigenvalues (MHz):";
      for (double v : d->eigenvalues()) std::cerr << ' ' << v;
      std::cerr << '\n';
    }
    return e.kind() == ErrorKind::numerical ? ExitCode::numerical : ExitCode::validation;
  } catch (const std::exception& e) {
    // I/O and parse failures from the standard library.
    std::cerr << "error: " << e.what() << '\n';
    return ExitCode::validation;
  }
  return ExitCode::ok;
}

}  // namespace nvthermo::cli
