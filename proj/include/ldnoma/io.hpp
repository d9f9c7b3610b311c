#pragma once

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ldnoma {

inline constexpr std::string_view kToolVersion = "0.1.0";

// 17 significant digits, '.' decimal point, independent of the C++ locale.
std::string format_double(double x);

// Numeric table with optional cells; absent cells print empty in CSV and
// null in JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;

  void add_row(std::vector<std::optional<double>> row);
};

std::string to_csv(const Table& t);
nlohmann::json to_json(const Table& t);

enum class OutputFormat { Csv, Json };
OutputFormat parse_output_format(std::string_view text);
std::string render(const Table& t, OutputFormat format);

std::string sha256_hex(std::string_view data);

// Sidecar written next to every output file as <out>.manifest.json.
struct RunManifest {
  std::string subcommand;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string version{kToolVersion};
  std::string checksum;  // SHA-256 of the output file contents
  nlohmann::json results = nlohmann::json::object();

  nlohmann::json to_json() const;
};

// Writes content to path and the manifest (with its checksum filled in) to
// path + ".manifest.json". Throws std::runtime_error if either cannot be
// written.
void write_with_manifest(const std::string& path, const std::string& content,
                         RunManifest manifest);

std::string manifest_path(const std::string& output_path);

} // namespace ldnoma
