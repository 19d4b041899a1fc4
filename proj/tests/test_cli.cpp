// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = sdsm::cli::run(args, o, e);
  return {code, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sdsm_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_json(const fs::path& dir, const std::string& name, const nlohmann::json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json small_sim() {
  return {{"simulate",
           {{"array", {{"n_antennas", 32}, {"spacing_ratio", 0.25}}},
            {"users", 3},
            {"m_levels", 5},
            {"order", 4},
            {"schemes", {"sd-fs", "sd-1st", "direct", "unquant"}},
            {"snr_db", {0, 20}},
            {"symbols", 20},
            {"trials", 4},
            {"seed", 5}}}};
}

}  // namespace

TEST_CASE("cli design writes a design and a manifest") {
  const fs::path dir = scratch("design");
  const nlohmann::json cfg = {{"design", {{"mode", "first-order"}, {"m_levels", 4}}}};
  const Run r = cli({"design", "--config", write_json(dir, "c.json", cfg).string(), "--out-dir", (dir / "o").string()});
  REQUIRE(r.code == 0);
  const auto d = nlohmann::json::parse(slurp(dir / "o" / "design.json"));
  CHECK(d["design"]["amplitude"] == 3.0);
  const auto m = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
  CHECK(m["outputs"][0]["sha256"] == sdsm::cli::sha256_hex(slurp(dir / "o" / "design.json")));
  CHECK(m["command"] == "design");
  CHECK_FALSE(m.contains("timings_ms"));
  REQUIRE(cli({"design", "--config", (dir / "c.json").string(), "--timings", "--out-dir", (dir / "t").string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "t" / "manifest.json")).contains("timings_ms"));
}

TEST_CASE("cli response from a saved design") {
  const fs::path dir = scratch("response");
  const nlohmann::json cfg = {{"design", {{"mode", "first-order"}, {"m_levels", 4}}}};
  REQUIRE(cli({"design", "--config", write_json(dir, "c.json", cfg).string(), "--out-dir", dir.string()}).code == 0);
  const Run r = cli({"response", "--design", (dir / "design.json").string(), "--points", "5", "--out-dir", (dir / "r").string()});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(dir / "r" / "response.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(cli({"response", "--design", (dir / "design.json").string(), "--points", "0", "--out-dir", (dir / "z").string()}).code == 2);
}

TEST_CASE("cli exit codes and no partial outputs") {
  const fs::path dir = scratch("errors");
  CHECK(cli({"design", "--config", (dir / "missing.json").string(), "--out-dir", (dir / "o").string()}).code == 2);
  nlohmann::json bad = small_sim();
  bad["simulate"]["m_levels"] = 2;
  bad["simulate"]["schemes"] = {"sd-2nd"};
  const Run r = cli({"simulate", "--config", write_json(dir, "bad.json", bad).string(), "--out-dir", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK_FALSE(fs::exists(dir / "o" / "ber.csv"));
  CHECK_FALSE(fs::exists(dir / "o" / "manifest.json"));
  nlohmann::json unknown = small_sim();
  unknown["simulate"]["antennas"] = 3;
  CHECK(cli({"simulate", "--config", write_json(dir, "u.json", unknown).string(), "--out-dir", (dir / "o").string()}).code == 2);
  CHECK(cli({"analyze", "nonsense", "--out-dir", (dir / "o").string()}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"--version"}).out.find(sdsm::cli::tool_version()) != std::string::npos);
}

TEST_CASE("cli simulate is identical across thread counts") {
  const fs::path dir = scratch("threads");
  const auto cfg = write_json(dir, "s.json", small_sim()).string();
  REQUIRE(cli({"simulate", "--config", cfg, "--threads", "1", "--out-dir", (dir / "a").string()}).code == 0);
  REQUIRE(cli({"simulate", "--config", cfg, "--threads", "4", "--out-dir", (dir / "b").string()}).code == 0);
  CHECK(slurp(dir / "a" / "ber.csv") == slurp(dir / "b" / "ber.csv"));
  CHECK(slurp(dir / "a" / "ber.json") == slurp(dir / "b" / "ber.json"));
  REQUIRE(cli({"simulate", "--config", cfg, "--seed", "6", "--out-dir", (dir / "c").string()}).code == 0);
  CHECK(slurp(dir / "a" / "ber.csv") != slurp(dir / "c" / "ber.csv"));
}

TEST_CASE("sha256") {
  CHECK(sdsm::cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
