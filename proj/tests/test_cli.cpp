#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_app.hpp"
#include "doctest.h"
#include "r3l/exact_partition.hpp"

using namespace r3l;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "r3l");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("r3l_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream is(csv);
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("spectrum at j=0 is one row with value M") {
  const auto cfg = write_temp("spec0.json", R"({"params": {"M": 2.5}})");
  const auto r = run_cli({"spectrum", "--config", cfg, "--j", "0", "--format", "csv", "--no-timestamp"});
  REQUIRE(r.code == 0);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "k,l,kernel_value");
  CHECK(lines[1] == "0,0,2.5");
}

TEST_CASE("spectrum at j=1/2 lists the 29/12 and 15/4 families") {
  const auto r = run_cli({"spectrum", "--j", "1", "--no-timestamp"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  const auto& k = doc["result"]["kernel"];
  REQUIRE(k.size() == 4);
  CHECK(k[0]["value"].get<double>() == doctest::Approx(29.0 / 12.0).epsilon(1e-15));
  CHECK(k[1]["value"].get<double>() == doctest::Approx(15.0 / 4.0).epsilon(1e-15));
  CHECK(doc["result"]["degenerate_pairs"] == 1);
  CHECK_FALSE(doc["provenance"].contains("timestamp"));
  CHECK(doc["provenance"]["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("CSV floats carry 17 significant digits") {
  const auto r = run_cli({"spectrum", "--j", "1", "--format", "csv", "--no-timestamp"});
  CHECK(r.out.find("2.4166666666666665") != std::string::npos);
}

TEST_CASE("zlevel j=0 equals ln f(2M)") {
  const auto r = run_cli({"zlevel", "--j", "0", "--no-timestamp"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  const double expect = kernel_f(2.0, KernelParams::for_level(HalfInt(0), 1, 1)).log_abs();
  CHECK(doc["result"]["log_Z"]["log_abs"].get<double>() == expect);
  CHECK(doc["result"]["log_Z"]["sign"] == 1);
  CHECK(doc["result"]["log_N"]["log_abs"].get<double>() == 0.0);
}

TEST_CASE("zlevel with a custom spectrum and policy") {
  const auto cfg = write_temp(
      "z.json", R"({"twice_j": 1, "spectrum": [2.4166666666666665, 2.4166666666666665], "policy": "divided-difference"})");
  const auto r = run_cli({"zlevel", "--config", cfg, "--no-timestamp"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["result"]["degeneracy_policy_used"] == "divided-difference");
  CHECK(doc["result"]["log_Z"]["log_abs"].get<double>() == doctest::Approx(-24.120692217076556).epsilon(1e-12));
}

TEST_CASE("resum j_max=1/2 has two increments that recompose") {
  const auto r = run_cli({"resum", "--jmax", "1", "--no-timestamp"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  const auto inc = doc["result"]["increments"].get<std::vector<double>>();
  const auto ps = doc["result"]["partial_sums"].get<std::vector<double>>();
  REQUIRE(inc.size() == 2);
  CHECK(ps[1] == ps[0] + inc[1]);
  CHECK(doc["result"]["W"].get<double>() == ps[1]);
}

TEST_CASE("toda times from a config file") {
  const auto cfg = write_temp("toda.json", R"({"twice_j": 1, "spectrum": [1, 2], "sigma": [1, 1], "n_max": 2})");
  const auto r = run_cli({"toda", "--config", cfg, "--no-timestamp"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["result"]["t"] == json::array({3.0, 2.5}));
  CHECK(doc["result"]["t_bar"] == json::array({5.0, 6.5}));
}

TEST_CASE("condensate with an MC comparison") {
  const auto r = run_cli({"condensate", "--j", "1", "--samples", "100000", "--seed", "3", "--no-timestamp"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["result"]["expectation"].get<double>() > 0);
  CHECK(doc["result"]["monte_carlo"]["z_score"].get<double>() <= 3.0);
  CHECK(doc["provenance"]["seed"] == 3);
}

TEST_CASE("flags override the config file") {
  const auto cfg = write_temp("ovr.json", R"({"seed": 5, "twice_j": 3})");
  const auto r = run_cli({"spectrum", "--config", cfg, "--seed", "9", "--j", "0", "--no-timestamp"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["provenance"]["seed"] == 9);
  CHECK(doc["result"]["twice_j"] == 0);
}

TEST_CASE("same config gives the same bytes; the hash tracks the config") {
  const auto a = run_cli({"zlevel", "--j", "2", "--no-timestamp"});
  const auto b = run_cli({"zlevel", "--j", "2", "--no-timestamp"});
  CHECK(a.out == b.out);
  const auto c = run_cli({"zlevel", "--j", "3", "--no-timestamp"});
  CHECK(json::parse(a.out)["provenance"]["config_hash"] != json::parse(c.out)["provenance"]["config_hash"]);
  const auto t = run_cli({"zlevel", "--j", "2"});
  CHECK(json::parse(t.out)["provenance"].contains("timestamp"));
}

TEST_CASE("--out writes the report to a file") {
  const auto path = (std::filesystem::temp_directory_path() / "r3l_test_out.json").string();
  std::filesystem::remove(path);
  const auto r = run_cli({"spectrum", "--out", path, "--no-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(json::parse(buf.str())["result"]["twice_j"] == 0);
}

TEST_CASE("config errors exit with 2 and name the field") {
  const auto bad_m = write_temp("badm.json", R"({"params": {"M": 0}})");
  auto r = run_cli({"spectrum", "--config", bad_m});
  CHECK(r.code == 2);
  CHECK(r.err.find("params.M") != std::string::npos);

  r = run_cli({"spectrum", "--config", write_temp("unk.json", R"({"bogus": 1})")});
  CHECK(r.code == 2);
  CHECK(r.err.find("bogus") != std::string::npos);

  r = run_cli({"zlevel", "--config", write_temp("len.json", R"({"twice_j": 1, "spectrum": [1]})")});
  CHECK(r.code == 2);
  CHECK(r.err.find("spectrum") != std::string::npos);

  r = run_cli({"zlevel", "--config", write_temp("type.json", R"({"twice_j": "one"})")});
  CHECK(r.code == 2);

  r = run_cli({"zlevel", "--config", write_temp("omega.json", R"({"params": {"Omega": 0.5}})")});
  CHECK(r.code == 2);
  CHECK(r.err.find("Omega") != std::string::npos);

  r = run_cli({"zlevel", "--config", write_temp("json.json", "{not json")});
  CHECK(r.code == 2);

  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"spectrum", "--format", "xml"}).code == 2);
  CHECK(run_cli({"spectrum", "--config", "/nonexistent/r3l.json"}).code == 2);
  CHECK(run_cli({"toda", "--config", write_temp("neg.json", R"({"twice_j": 1, "spectrum": [1, 2], "sigma": [-3, 0]})")})
            .code == 2);
}

TEST_CASE("numerical failures exit with 3") {
  const auto cfg = write_temp("num.json", R"({"precision": "double", "twice_j": 16})");
  const auto r = run_cli({"zlevel", "--config", cfg});
  CHECK(r.code == 3);
  CHECK(r.err.find("numerical") != std::string::npos);
}
