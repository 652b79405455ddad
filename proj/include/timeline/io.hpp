#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace timeline {

/// Bad or missing configuration (paths, parameters).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Shortest decimal string that parses back to exactly `value`. NaN prints as "NA".
std::string format_double(double value);

/// Parses a double written by format_double; "NA" and "" yield NaN.
double parse_double(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Splits text into lines on LF, stripping a trailing CR. A final empty line is not reported.
std::vector<std::string> split_lines(std::string_view text);

std::string_view trim(std::string_view s);

/// Comma-separated list, each item trimmed, empty items dropped.
std::vector<std::string> split_list(std::string_view s, char sep = ',');

/// Minimal CSV support: fields containing separators, quotes or newlines are quoted.
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_split(std::string_view line);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace timeline
