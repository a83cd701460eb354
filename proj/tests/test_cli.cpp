#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "darbouxkit/cli.hpp"

using darbouxkit::run_cli;
using Json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "darbouxkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> hsa(const char* a, const char* b, const char* k, const char* l) {
  return {"hsa", "--alpha", a, "--beta", b, "--kappa", k, "--lambda", l};
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::string kFieldFile = std::string(DK_SOURCE_DIR) + "/fixtures/hsa_beta0.txt";

}  // namespace

TEST_CASE("analyze report structure") {
  Run r = run(cat({"analyze"}, cat(hsa("1", "1", "1", "1"), {"--degree", "4"})));
  REQUIRE(r.code == 0);
  Json j = r.json();
  CHECK(j["schema"] == 1);
  CHECK(j["tool_version"] == darbouxkit::kToolVersion);
  CHECK(j["command"] == "analyze");
  CHECK(j["seed"] == 1);
  CHECK(j["config"]["alpha"] == "1");
  CHECK(j["model"]["dx"]["text"] == "x*y - x - z");
  CHECK(j["conclusion"] == "none_up_to_bound");
  CHECK(j["darboux_polys"].empty());
  REQUIRE(j["exp_factors"].size() == 1);
  CHECK(j["exp_factors"][0]["body"]["terms"]["x^0*y^0*z^1"] == "1");
  CHECK(j["exp_factors"][0]["cofactor"]["text"] == "x - z");
  CHECK(j.contains("combinations"));
  CHECK(j["notes"].is_array());
}

TEST_CASE("analyze: integrable case and --out") {
  const std::string path = "test_cli_analyze.json";
  Run r = run(cat({"analyze"}, cat(hsa("1", "0", "0", "0"), {"--degree", "2", "--out", path})));
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  Json j = Json::parse(f);
  CHECK(j["conclusion"] == "darboux_integral_found");
  bool found = false;
  for (const auto& c : j["combinations"])
    if (!c["trivial"].get<bool>()) {
      found = true;
      CHECK(c["lie_derivative_numerator"]["text"] == "0");
    }
  CHECK(found);
  std::remove(path.c_str());
}

TEST_CASE("reports are byte-identical for the same config and seed") {
  auto args = cat({"analyze"}, cat(hsa("1", "0", "1", "1"), {"--degree", "3", "--seed", "7"}));
  Run a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.json()["seed"] == 7);
  auto d = cat({"drift"}, cat(hsa("1", "0", "0", "1"), {"--integral", "F1", "--x0", "0.5,0.2,0.1", "--t-end", "1"}));
  CHECK(run(d).out == run(d).out);
}

TEST_CASE("verify on a field file") {
  Run r = run({"verify", "--field", kFieldFile, "--poly", "x", "--cofactor", "y-1"});
  REQUIRE(r.code == 0);
  CHECK(r.json()["verified"] == true);
  CHECK(r.json()["model"]["source"] == "file");
  Run bad = run({"verify", "--field", kFieldFile, "--poly", "x", "--cofactor", "y"});
  CHECK(bad.code == 0);
  CHECK(bad.json()["verified"] == false);
  Run ex = run({"verify", "--field", kFieldFile, "--exp", "z", "--cofactor", "x - z"});
  CHECK(ex.json()["verified"] == true);
}

TEST_CASE("search commands") {
  Run e = run(cat({"search-expfactors"}, cat(hsa("1", "0", "0", "1"), {"--degree", "2"})));
  REQUIRE(e.code == 0);
  CHECK(e.json()["certificates"].size() == 2);
  Run d = run(cat({"search-darboux"}, cat(hsa("1", "0", "1", "1"), {"--degree", "2"})));
  REQUIRE(d.code == 0);
  CHECK(d.json()["certificates"].size() == 2);
  Run fx = run(cat({"search-darboux"}, cat(hsa("1", "0", "1", "1"), {"--degree", "2", "--cofactor", "2*y - 2"})));
  REQUIRE(fx.code == 0);
  CHECK(fx.json()["certificates"][0]["body"]["text"] == "x^2");
}

TEST_CASE("combine") {
  Run r = run(cat({"combine"}, cat(hsa("1", "0", "0", "1"), {"--dp", "x;y-1", "--ef", "-1/2*x^2 - 1/2*y^2 + y;1-y"})));
  REQUIRE(r.code == 0);
  Json j = r.json();
  REQUIRE(j["combinations"].size() == 1);
  CHECK(j["combinations"][0]["weights"] == Json::array({"1", "1"}));
  CHECK(run(cat({"combine"}, cat(hsa("1", "0", "0", "1"), {"--dp", "x;y"}))).code == 2);
}

TEST_CASE("simulate writes CSV") {
  const std::string path = "test_cli_traj.csv";
  Run r = run(cat({"simulate"}, cat(hsa("1", "0", "0", "1"), {"--x0", "0.5,0.2,0.1", "--t-end", "0.01", "--h", "0.005", "--csv", path})));
  REQUIRE(r.code == 0);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "t,x,y,z");
  int rows = 0;
  for (std::string line; std::getline(f, line);) ++rows;
  CHECK(rows == 3);
  std::remove(path.c_str());
}

TEST_CASE("drift, negative control and f2-experiment") {
  Run r = run(cat({"drift"}, cat(hsa("1", "0", "0", "1"), {"--integral", "F1", "--x0", "0.5,0.2,0.1", "--halving"})));
  REQUIRE(r.code == 0);
  Json j = r.json();
  CHECK(j["drift"]["relative_drift"].get<double>() <= 1e-8);
  CHECK(j["halving"]["ratio"].get<double>() >= 8);
  Run n = run(cat({"drift"}, cat(hsa("1", "0", "0", "1"), {"--function", "y", "--x0", "0.5,0.2,0.1", "--halving"})));
  REQUIRE(n.code == 0);
  CHECK(n.json()["drift"]["relative_drift"].get<double>() >= 1e-3);
  Run f2 = run(cat({"f2-experiment"}, cat(hsa("1", "0", "0", "1"), {"--x0", "0.5,0.2,0.1"})));
  REQUIRE(f2.code == 0);
  CHECK(f2.json()["winner"] == "F2_corrected");
}

TEST_CASE("exit codes") {
  // validation
  CHECK(run(cat({"analyze"}, hsa("1.5", "0", "0", "1"))).code == 2);
  CHECK(run(cat({"analyze"}, cat(hsa("1", "0", "0", "1"), {"--degree", "9"}))).code == 2);
  CHECK(run({"analyze", "--alpha", "1"}).code == 2);
  CHECK(run({"analyze", "--field", "/nonexistent/field.txt"}).code == 2);
  CHECK(run(cat({"analyze", "--field", kFieldFile}, hsa("1", "0", "0", "1"))).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  Run bad_x0 = run(cat({"drift"}, cat(hsa("1", "0", "0", "1"), {"--integral", "F1", "--x0", "0.5,0.2"})));
  CHECK(bad_x0.code == 2);
  CHECK(bad_x0.err.find("x0") != std::string::npos);
  // domain and constraint failures
  CHECK(run(cat({"drift"}, cat(hsa("1", "1", "1", "1"), {"--integral", "F1", "--x0", "0.5,0.2,0.1"}))).code == 3);
  CHECK(run(cat({"drift"}, cat(hsa("1", "0", "0", "1"), {"--integral", "F1", "--x0", "-0.5,0.2,0.1"}))).code == 3);
  CHECK(run({"--help"}).code == 0);
}
