#include "cli/common.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "nvthermo/io/files.hpp"

namespace nvthermo::cli {

Context make_context(const GlobalOptions& g, std::vector<std::string> arguments) {
  Context ctx;
  ctx.global = g;
  ctx.arguments = std::move(arguments);
  if (!g.config_path.empty()) {
    ctx.config = io::load_config_file(g.config_path);
  } else {
    ctx.config.validate();
  }
  if (g.seed) ctx.config.seed = *g.seed;
  ctx.seed = ctx.config.seed;
  ctx.config_hash = io::sha256_hex(ctx.config.canonical());
  if (g.format != "json" && g.format != "csv") throw InvalidInput("--format must be csv or json");
  return ctx;
}

io::RunManifest Context::manifest(const std::string& command) const {
  io::RunManifest m;
  m.command = command;
  m.arguments = arguments;
  m.config_hash = config_hash;
  m.seed = seed;
  m.timestamp = io::utc_timestamp();
  if (!global.config_path.empty()) m.add_input(global.config_path);
  return m;
}

void write_manifest(io::RunManifest m, const std::filesystem::path& output) {
  m.add_output(output);
  std::filesystem::path p = output;
  p += ".manifest.json";
  auto out = io::open_output(p);
  out << m.to_json().dump(2) << '\n';
}

namespace {

void flatten(const nlohmann::json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

}  // namespace

void write_report(const nlohmann::json& report, const std::filesystem::path& path, const std::string& format) {
  auto out = io::open_output(path);
  if (format == "csv") {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(report, "", rows);
    out << "key,value\n";
    for (const auto& [k, v] : rows) {
      const bool quote = v.find(',') != std::string::npos;
      out << k << ',' << (quote ? "\"" + v + "\"" : v) << '\n';
    }
  } else {
    out << report.dump(2) << '\n';
  }
  if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

void print_summary(const std::string& title, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::cout << title << '\n';
  for (const auto& [k, v] : rows) std::cout << "  " << k << std::string(width - k.size() + 2, ' ') << v << '\n';
}

std::string fmt(double v, int precision) {
  std::ostringstream o;
  o.precision(precision);
  o << v;
  return o.str();
}

}  // namespace nvthermo::cli
