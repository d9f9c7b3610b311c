#include "doctest.h"

#include "ldnoma/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ldnoma;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("doubles print with 17 significant digits and round-trip") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  for (double x : {1.0 / 3.0, 2.718281828459045, 1e-17, 123456789.123}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("csv and json tables keep absent cells distinct") {
  Table t{{"x", "a", "b"}, {}};
  t.add_row({1.0, 0.5, std::nullopt});
  t.add_row({2.0, std::nullopt, 0.25});
  CHECK(to_csv(t) == "x,a,b\n1,0.5,\n2,,0.25\n");
  const auto j = to_json(t);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["b"].is_null());
  CHECK(j[1]["a"].is_null());
  CHECK(j[1]["b"].get<double>() == 0.25);
  CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
  CHECK(parse_output_format("JSON") == OutputFormat::Json);
  CHECK_THROWS_AS(parse_output_format("xml"), std::invalid_argument);
}

TEST_CASE("sha256 of known inputs") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest sidecar carries the checksum of the written file") {
  const auto dir = std::filesystem::temp_directory_path() / "ldnoma_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.csv").string();
  RunManifest m;
  m.subcommand = "density";
  m.parameters = {{"beta", 1.5}};
  m.seed = 7;
  write_with_manifest(path, "x\n1\n", m);
  const auto content = slurp(path);
  CHECK(content == "x\n1\n");
  const auto manifest = nlohmann::json::parse(slurp(manifest_path(path)));
  CHECK(manifest["checksum"] == sha256_hex(content));
  CHECK(manifest["subcommand"] == "density");
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["version"] == std::string(kToolVersion));
  CHECK(manifest["parameters"]["beta"] == 1.5);
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(write_with_manifest("/nonexistent-dir/x.csv", "x", m), std::runtime_error);
}

}
