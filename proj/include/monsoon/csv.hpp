#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace monsoon::csv {

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

/// Shortest round-trip representation; identical bytes for identical values.
std::string format(double value);

double parse_double(std::string_view text, std::string_view context);
long parse_long(std::string_view text, std::string_view context);

/// Rows of a CSV file with comment lines ('#') and blank lines dropped.
/// The first row is the header and is checked against `expected_header`
/// when that is non-empty.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

Table read(const std::filesystem::path& path,
           const std::vector<std::string>& expected_header = {});

/// Opens `path` for writing and emits the provenance stamp line first.
std::ofstream open_output(const std::filesystem::path& path,
                          const std::string& stamp);

/// Flat `key = value` files. '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const KeyValues& kv,
                      const std::string& stamp);

}  // namespace monsoon::csv
