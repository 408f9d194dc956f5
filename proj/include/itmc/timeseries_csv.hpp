#pragma once

#include <filesystem>
#include <string>

#include "itmc/model.hpp"

namespace itmc {

/// Reads a comma-separated file with a header row. `y_column` is required;
/// `u_column` may be empty for records without inputs. Throws IoError when
/// the file cannot be read and ParseError (with line numbers) for missing
/// columns, non-numeric fields and empty data.
Trajectory load_timeseries_csv(const std::filesystem::path& path, const std::string& u_column,
                               const std::string& y_column);

/// Writes `u_column,y_column` rows (just `y_column` without inputs) with
/// round-trip precision.
void write_timeseries_csv(const std::filesystem::path& path, const Trajectory& trajectory,
                          const std::string& u_column = "u", const std::string& y_column = "y");

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace itmc
