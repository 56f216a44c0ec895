#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nvthermo/errors.hpp"
#include "nvthermo/io/config.hpp"
#include "nvthermo/io/manifest.hpp"

namespace nvthermo::cli {

enum ExitCode : int { ok = 0, usage = 1, validation = 2, numerical = 3 };

/// Flags shared by every subcommand.
struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
};

/// Resolved run state handed to each command.
struct Context {
  GlobalOptions global;
  io::Config config;
  std::string config_hash;
  std::uint64_t seed = 1;
  std::vector<std::string> arguments;

  io::RunManifest manifest(const std::string& command) const;
};

Context make_context(const GlobalOptions& g, std::vector<std::string> arguments);

/// Writes the manifest beside `output` as `<output>.manifest.json`.
void write_manifest(io::RunManifest m, const std::filesystem::path& output);

/// Report as JSON, or as flattened `key,value` rows for --format csv.
void write_report(const nlohmann::json& report, const std::filesystem::path& path, const std::string& format);

/// Flattened `key = value` lines on stdout.
void print_summary(const std::string& title, const std::vector<std::pair<std::string, std::string>>& rows);

std::string fmt(double v, int precision = 6);

/// Thrown after a diagnostic report is written for a fit that did not converge.
struct NotConverged : NumericalError {
  using NumericalError::NumericalError;
};

void add_simulate(CLI::App& app, const GlobalOptions& g, const std::vector<std::string>& args);
void add_fit(CLI::App& app, const GlobalOptions& g, const std::vector<std::string>& args);
void add_sensitivity(CLI::App& app, const GlobalOptions& g, const std::vector<std::string>& args);
void add_reproduce(CLI::App& app, const GlobalOptions& g, const std::vector<std::string>& args);

int run(int argc, char** argv);

}  // namespace nvthermo::cli
