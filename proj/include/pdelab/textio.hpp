#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pdelab {

/// Shortest decimal that round-trips to the same double ('.' separator).
std::string format_real(double v);

/// Parses a full string as a double; throws ParameterError on junk.
double parse_real(std::string_view s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws ParameterError if absent.
  std::size_t column(std::string_view name) const;
};

/// Minimal reader for the unquoted comma-separated files this project writes.
CsvTable parse_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace pdelab
