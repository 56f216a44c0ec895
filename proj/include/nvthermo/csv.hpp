#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nvthermo/errors.hpp"

namespace nvthermo::csv {

/// Numeric table with named columns. Lines starting with '#' are comments;
/// "# key: value" comments are collected as metadata.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  std::map<std::string, std::string> metadata;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return columns[i];
    throw InvalidInput("CSV has no column '" + name + "'");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

}  // namespace detail

/// Reads a numeric CSV whose header must equal `expected_header` when given.
inline Table read(std::istream& in, const std::vector<std::string>& expected_header = {}) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = detail::trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const std::string body = detail::trim(s.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string::npos)
        t.metadata[detail::trim(body.substr(0, colon))] = detail::trim(body.substr(colon + 1));
      continue;
    }
    auto cells = detail::split(s);
    if (!have_header) {
      t.header = cells;
      if (!expected_header.empty() && t.header != expected_header) {
        std::string want;
        for (std::size_t i = 0; i < expected_header.size(); ++i)
          want += (i ? "," : "") + expected_header[i];
        throw InvalidInput("CSV header must be '" + want + "'");
      }
      t.columns.assign(t.header.size(), {});
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw InvalidInput("CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                         " fields, expected " + std::to_string(t.header.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
        t.columns[i].push_back(v);
      } catch (const std::exception&) {
        throw InvalidInput("CSV line " + std::to_string(line_no) + ": '" + cells[i] + "' is not a number");
      }
    }
  }
  if (!have_header) throw InvalidInput("CSV has no header line");
  return t;
}

inline Table read_file(const std::string& path, const std::vector<std::string>& expected_header = {}) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read(in, expected_header);
}

}  // namespace nvthermo::csv
