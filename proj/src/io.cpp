#include "ldnoma/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ldnoma {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void Table::add_row(std::vector<std::optional<double>> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("table row has wrong width");
  rows.push_back(std::move(row));
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (row[c]) out += format_double(*row[c]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const Table& t) {
  auto arr = nlohmann::json::array();
  for (const auto& row : t.rows) {
    auto obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      obj[t.columns[c]] = row[c] ? nlohmann::json(*row[c]) : nlohmann::json(nullptr);
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

OutputFormat parse_output_format(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw std::invalid_argument("unknown format '" + std::string(text) + "'");
}

std::string render(const Table& t, OutputFormat format) {
  if (format == OutputFormat::Csv) return to_csv(t);
  return to_json(t).dump(2) + "\n";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{{"subcommand", subcommand}, {"parameters", parameters},
                        {"seed", seed},             {"version", version},
                        {"checksum", checksum},     {"results", results}};
}

std::string manifest_path(const std::string& output_path) {
  return output_path + ".manifest.json";
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << content;
  os.flush();
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace

void write_with_manifest(const std::string& path, const std::string& content,
                         RunManifest manifest) {
  manifest.checksum = sha256_hex(content);
  write_file(path, content);
  write_file(manifest_path(path), manifest.to_json().dump(2) + "\n");
}

} // namespace ldnoma
