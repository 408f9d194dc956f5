#include "itmc/timeseries_csv.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "itmc/errors.hpp"

namespace itmc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_number(std::string_view field) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) return std::nullopt;
  return value;
}

}  // namespace

Trajectory load_timeseries_csv(const std::filesystem::path& path, const std::string& u_column,
                               const std::string& y_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ParseError(path.string() + ": missing header row");

  const auto header = split(line);
  auto find_column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ParseError(path.string() + ": missing column '" + name + "'");
  };
  const std::size_t y_index = find_column(y_column);
  constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);
  const std::size_t u_index = u_column.empty() ? kNoColumn : find_column(u_column);

  Trajectory out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    auto numeric = [&](std::size_t index, const std::string& name) {
      const auto v = parse_number(fields[index]);
      if (!v) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": non-numeric value '" +
                         std::string(fields[index]) + "' in column '" + name + "'");
      }
      return *v;
    };
    out.observations.push_back(numeric(y_index, y_column));
    if (u_index != kNoColumn) out.inputs.push_back(numeric(u_index, u_column));
  }
  if (out.observations.empty()) throw ParseError(path.string() + ": no data rows");
  try {
    validate_trajectory(out);
  } catch (const InvalidData& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw IoError("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_timeseries_csv(const std::filesystem::path& path, const Trajectory& trajectory,
                          const std::string& u_column, const std::string& y_column) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const bool with_inputs = trajectory.has_inputs();
  out << (with_inputs ? u_column + "," : std::string()) << y_column << '\n';
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    if (with_inputs) out << format_double(trajectory.inputs[t]) << ',';
    out << format_double(trajectory.observations[t]) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace itmc
