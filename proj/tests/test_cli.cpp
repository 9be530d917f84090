#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "embdim/cli.hpp"
#include "embdim/format.hpp"

namespace fs = std::filesystem;
using embdim::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const char* env = std::getenv("EMBDIM_TEST_TMP");
  fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "embdim_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path path = scratch_dir() / name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("roofline command") {
  auto r = invoke({"roofline", "--n", "20000000", "--k", "100", "--method", "paper-table",
                   "--s", "32"});
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["results"][0]["h_bits"].get<double>() == doctest::Approx(1756.3).epsilon(0.05 / 1756.3));
  CHECK(doc["results"][0]["recommended_d"]["32"] == 55);
  CHECK(doc["results"][0]["recommended_d"].size() == 1);

  r = invoke({"roofline", "--n", "1024", "--k", "1", "--s", "32"});
  REQUIRE(r.code == 0);
  doc = nlohmann::json::parse(r.out);
  CHECK(doc["results"][0]["h_bits"] == 10.0);
  CHECK(doc["results"][0]["recommended_d"]["32"] == 1);

  r = invoke({"roofline", "--n", "20000000", "--k", "100", "--t", "16", "--method",
              "paper-table", "--s", "32"});
  REQUIRE(r.code == 0);
  doc = nlohmann::json::parse(r.out);
  CHECK(doc["results"][0]["h_bits"].get<double>() == doctest::Approx(3356.3).epsilon(0.05 / 3356.3));
  CHECK(doc["results"][0]["capacity_bits"]["32"].get<double>() >= 3356.3);

  r = invoke({"roofline", "--n", "1000", "--k", "10", "--method", "exact,ramanujan,stirling"});
  REQUIRE(r.code == 0);
  doc = nlohmann::json::parse(r.out);
  CHECK(doc["results"].size() == 3);
  CHECK(doc["results"][0]["recommended_d"].size() == 3);
}

TEST_CASE("roofline validation errors exit 1 and name the constraint") {
  auto r = invoke({"roofline", "--n", "10", "--k", "11"});
  CHECK(r.code == 1);
  CHECK(r.err.find("0 <= k <= n") != std::string::npos);
  CHECK(r.out.empty());

  CHECK(invoke({"roofline", "--n", "0", "--k", "0"}).code == 1);
  CHECK(invoke({"roofline", "--n", "10", "--k", "2", "--s", "12"}).code == 1);
  CHECK(invoke({"roofline", "--n", "10", "--k", "2", "--method", "bogus"}).code == 1);
  CHECK(invoke({"roofline", "--n", "10", "--k", "10", "--method", "ramanujan"}).code == 1);
  CHECK(invoke({"roofline", "--n", "-3", "--k", "1"}).code == 1);
  CHECK(invoke({"roofline", "--k", "1"}).code == 1);
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"frobnicate"}).code == 1);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("table command") {
  auto r = invoke({"table"});
  REQUIRE(r.code == 0);
  const auto csv = embdim::parse_csv(r.out);
  CHECK(csv.header == std::vector<std::string>{"n", "k", "h_bits", "d_s8", "d_s16", "d_s32",
                                               "h_embedding"});
  REQUIRE(csv.rows.size() == 12);
  CHECK(r.out.find("10000000,100,1656.3,208,104,52,1664\n") != std::string::npos);

  r = invoke({"table", "--method", "exact"});
  REQUIRE(r.code == 0);
  const auto exact = embdim::parse_csv(r.out);
  CHECK(exact.rows[0][0] == "1000000");
  CHECK(exact.rows[0][2] == "19.9");
  CHECK(exact.rows[6][2] == "1468.4");

  r = invoke({"table", "--format", "json"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["rows"].size() == 12);
  CHECK(invoke({"table", "--format", "xml"}).code == 1);
}

TEST_CASE("curve command") {
  auto r = invoke({"curve", "--n", "64", "--k", "1:63"});
  REQUIRE(r.code == 0);
  const auto csv = embdim::parse_csv(r.out);
  CHECK(csv.header == std::vector<std::string>{"k", "h_bits"});
  REQUIRE(csv.rows.size() == 63);
  for (std::size_t i = 0; i < 63; ++i) {
    CHECK(std::abs(std::stod(csv.rows[i][1]) - std::stod(csv.rows[62 - i][1])) <= 1e-9);
  }

  r = invoke({"curve", "--n", "64", "--k", "1:1"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "k,h_bits\n1,6\n");

  r = invoke({"curve", "--signatures", "builtin"});
  REQUIRE(r.code == 0);
  const auto grouped = embdim::parse_csv(r.out);
  CHECK(grouped.header == std::vector<std::string>{"n", "k", "h_bits"});
  CHECK(grouped.rows.size() == 16);

  CHECK(invoke({"curve", "--n", "64", "--k", "0:64", "--method", "ramanujan"}).code == 1);
  CHECK(invoke({"curve", "--n", "64", "--k", "1:65"}).code == 1);
  CHECK(invoke({"curve", "--n", "64", "--k", "5"}).code == 1);
  CHECK(invoke({"curve", "--n", "64", "--k", "a:b"}).code == 1);
  CHECK(invoke({"curve", "--signatures", "mine"}).code == 1);
}

TEST_CASE("curve command writes SVG") {
  const fs::path svg = scratch_dir() / "curve.svg";
  fs::remove(svg);
  auto r = invoke({"curve", "--n", "64", "--k", "1:63", "--svg", svg.string()});
  REQUIRE(r.code == 0);
  const std::string plot = read_file(svg);
  CHECK(plot.rfind("<svg", 0) == 0);
  r = invoke({"curve", "--n", "64", "--k", "1:63", "--format", "svg"});
  CHECK(r.out == plot);
}

TEST_CASE("scan command") {
  auto path = write_file("four.txt", "1 2\n2 1\n3 4\n3 4\n");
  auto r = invoke({"scan", "--input", path.string(), "--n", "10", "--t", "0"});
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["h_empirical_bits"] == 1.0);
  CHECK(doc["distinct"] == 2);
  CHECK(doc["total"] == 4);
  CHECK(doc["skipped_records"] == 0);

  std::string uniform;
  for (int rep = 0; rep < 100; ++rep) {
    for (int c = 0; c < 16; ++c) {
      uniform += "{\"indices\":[" + std::to_string(c) + "," + std::to_string(c + 16) + "]}\n";
    }
  }
  path = write_file("uniform.jsonl", uniform);
  r = invoke({"scan", "--input", path.string(), "--n", "32", "--shards", "4"});
  REQUIRE(r.code == 0);
  doc = nlohmann::json::parse(r.out);
  CHECK(std::abs(doc["h_empirical_bits"].get<double>() - 4.0) <= 1e-9);
  CHECK(doc["distinct"] == 16);

  path = write_file("single.txt", "5 6 7\n7 6 5\n");
  r = invoke({"scan", "--input", path.string(), "--n", "10"});
  REQUIRE(r.code == 0);
  doc = nlohmann::json::parse(r.out);
  CHECK(doc["h_empirical_bits"] == 0.0);
  for (const char* s : {"8", "16", "32"}) CHECK(doc["recommended_d"][s] == 1);
}

TEST_CASE("scan command warnings and errors") {
  auto path = write_file("dirty.txt", "1 2\nnot a record\n99\n3\n");
  auto r = invoke({"scan", "--input", path.string(), "--n", "10"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["skipped_records"] == 2);
  CHECK(r.err.find("warning") != std::string::npos);

  path = write_file("weighted.jsonl",
                    "{\"indices\":[1],\"weights\":[0.1]}\n{\"indices\":[1],\"weights\":[0.9]}\n");
  r = invoke({"scan", "--input", path.string(), "--n", "10", "--t", "1"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["distinct"] == 2);
  r = invoke({"scan", "--input", path.string(), "--n", "10", "--t", "0"});
  CHECK(nlohmann::json::parse(r.out)["distinct"] == 1);

  CHECK(invoke({"scan", "--input", (scratch_dir() / "missing.txt").string(), "--n", "10"}).code == 2);
  path = write_file("empty.txt", "");
  CHECK(invoke({"scan", "--input", path.string(), "--n", "10"}).code == 1);
  path = write_file("blank.txt", "\n\n");
  CHECK(invoke({"scan", "--input", path.string(), "--n", "10"}).code == 1);
  CHECK(invoke({"scan", "--input", path.string(), "--n", "0"}).code == 1);
}

TEST_CASE("verify-kernels command") {
  auto r = invoke({"verify-kernels", "--trials", "5"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS one-hot-equivalence") != std::string::npos);

  CHECK(invoke({"verify-kernels", "--n", "1", "--d", "1", "--trials", "5"}).code == 0);

  r = invoke({"verify-kernels", "--inject-fault", "--trials", "2", "--seed", "77"});
  CHECK(r.code == 3);
  CHECK(r.out.find("counterexample seed 77") != std::string::npos);
  CHECK(invoke({"verify-kernels", "--k", "0"}).code == 1);
}

TEST_CASE("output files are written atomically") {
  const fs::path out = scratch_dir() / "table.csv";
  fs::remove(out);
  auto r = invoke({"table", "--output", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const std::string first = read_file(out);
  CHECK(first == invoke({"table"}).out);

  // Same flags, same bytes.
  REQUIRE(invoke({"table", "--output", out.string()}).code == 0);
  CHECK(read_file(out) == first);

  const fs::path failed = scratch_dir() / "failed.json";
  fs::remove(failed);
  CHECK(invoke({"roofline", "--n", "3", "--k", "9", "--output", failed.string()}).code == 1);
  CHECK_FALSE(fs::exists(failed));
  fs::path tmp = failed;
  tmp += ".tmp";
  CHECK_FALSE(fs::exists(tmp));

  CHECK(invoke({"table", "--output", (scratch_dir() / "no/such/dir/t.csv").string()}).code == 2);
}

TEST_CASE("JSON outputs round trip") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"roofline", "--n", "1000000", "--k", "17", "--t", "3", "--method", "exact,paper-table"},
           {"table", "--format", "json", "--method", "ramanujan"}}) {
    const auto r = invoke(args);
    REQUIRE(r.code == 0);
    CHECK(nlohmann::ordered_json::parse(r.out).dump(2) + "\n" == r.out);
  }
}
