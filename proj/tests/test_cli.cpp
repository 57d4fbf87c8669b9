#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

using namespace rmsgof;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

nlohmann::json manifest(const Result& r) {
  const auto all = lines(r.err);
  REQUIRE_FALSE(all.empty());
  return nlohmann::json::parse(all.back());
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("rmsgof_test_" + name);
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

}  // namespace

TEST_CASE("eigs") {
  const auto uniform = write_temp("uniform4.txt", "1\n1\n1\n1\n");
  const auto r = run({"eigs", "--model", uniform});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 5);
  CHECK(l[0] == "variance");
  CHECK(l[1] == "0.25");
  CHECK(l[2] == "0.25");
  CHECK(l[3] == "0.25");
  CHECK(l[4].rfind("# zero_eigenvalue_residual=", 0) == 0);

  const auto two = run({"eigs", "--model", write_temp("quarter.txt", "0.25\n0.75\n")});
  REQUIRE(two.code == 0);
  CHECK(lines(two.out)[1] == "0.375");
  CHECK(lines(two.out).size() == 3);

  const auto bad = run({"eigs", "--model", write_temp("zero.txt", "# weights\n1\n0\n1\n")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);
  CHECK(manifest(bad)["exit_code"] == 2);

  CHECK(run({"eigs", "--model", "/nonexistent/model.txt"}).code == 2);
  CHECK(run({"eigs", "--model", "table3:q"}).code == 2);
  CHECK(run({"eigs", "--model", write_temp("wide.txt", "1\n1\n1e-12\n")}).code == 3);
}

TEST_CASE("pvalue") {
  const auto r = run({"pvalue", "--model", "uniform:n=2", "--x", "0.5"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[0] == "x,confidence,significance,nodes_used,error_estimate");
  const auto f = fields(l[1]);
  CHECK(f[1] == "0.682689492137");
  CHECK(f[2] == "0.317310507863");
  CHECK(std::stoul(f[3]) > 0);

  const auto chi = run({"pvalue", "--model", "uniform:n=5", "--x", std::to_string(13.2767041359876245 / 5.0)});
  REQUIRE(chi.code == 0);
  CHECK(std::abs(std::stod(fields(lines(chi.out)[1])[1]) - 0.99) <= 1e-6);

  const auto model = write_temp("model3.txt", "0.25\n0.25\n0.5\n");
  const auto at_model = run({"pvalue", "--model", model, "--counts", write_temp("counts3.txt", "25\n25\n50\n")});
  REQUIRE(at_model.code == 0);
  const auto zero = fields(lines(at_model.out)[1]);
  CHECK(zero[0] == "0");
  CHECK(zero[1] == "0");
  CHECK(zero[3] == "0");
  CHECK(manifest(at_model)["inputs"]["counts"]["m"] == 100);

  CHECK(run({"pvalue", "--model", model, "--counts", write_temp("counts2.txt", "25\n75\n")}).code == 2);
  CHECK(run({"pvalue", "--model", model}).code == 2);
  CHECK(run({"pvalue", "--model", model, "--x", "1", "--counts", write_temp("c.txt", "1\n1\n1\n")}).code == 2);
  CHECK(run({"pvalue", "--model", model, "--x", "1", "--orders", "21,10"}).code == 2);
  CHECK(run({"pvalue", "--model", model, "--x", "1", "--max-subdivisions", "1"}).code == 4);
}

TEST_CASE("curve") {
  const auto r = run({"curve", "--model", "table3:f", "--grid", "lin:0.01:3:100", "--threads", "2"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 101);
  CHECK(l[0] == "x,significance,nodes_used");
  double previous = 2.0;
  for (std::size_t i = 1; i < l.size(); ++i) {
    const double s = std::stod(fields(l[i])[1]);
    CHECK(s <= previous);
    previous = s;
  }
  const auto m = manifest(r);
  CHECK(m["command"] == "curve");
  CHECK(m["results"]["max_nodes"].get<std::size_t>() > 0);
  CHECK(m["timings_seconds"]["total"].get<double>() >= 0.0);
  CHECK(m["inputs"]["model"]["n"] == 10);

  const auto a = run({"curve", "--model", "table3:a", "--grid", "auto:100"});
  REQUIRE(a.code == 0);
  CHECK(lines(a.out).size() == 101);
  CHECK(manifest(a)["results"]["max_nodes"].get<std::size_t>() <= 700);

  CHECK(run({"curve", "--model", "table3:f", "--grid", "lin:0:1:1"}).code == 2);
  CHECK(run({"curve", "--model", "table3:f", "--grid", "log:0:1:10"}).code == 2);
  CHECK(run({"curve", "--model", "table3:f", "--grid", "spiral:5"}).code == 2);

  const auto one = run({"curve", "--model", "table3:e", "--grid", "log:0.01:10:20", "--threads", "1"});
  const auto four = run({"curve", "--model", "table3:e", "--grid", "log:0.01:10:20", "--threads", "4"});
  CHECK(one.out == four.out);
}

TEST_CASE("power") {
  const std::vector<std::string> args = {"power", "--model", "ex1-model:n=16", "--actual", "ex1-actual:n=16",
                                         "--draws", "200", "--sims", "2000", "--seed", "5"};
  const auto r = run(args);
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 5);
  CHECK(l[0] == "statistic,n,m,n_sims,rate,critical_value,seed");
  CHECK(fields(l[1])[0] == "rms");
  CHECK(fields(l[4])[0] == "ft");
  CHECK(fields(l[1])[6] == "5");
  CHECK(std::stod(fields(l[1])[4]) >= 0.95);
  CHECK(run(args).out == r.out);

  const auto same = run({"power", "--model", "table3:f", "--actual", "table3:f", "--stats", "rms,chi2", "--draws",
                         "1000", "--sims", "4000"});
  REQUIRE(same.code == 0);
  for (std::size_t i = 1; i < 3; ++i) CHECK(std::abs(std::stod(fields(lines(same.out)[i])[4]) - 0.01) <= 0.006);

  CHECK(run({"power", "--model", "table3:f", "--actual", "table3:e"}).code == 2);
  CHECK(run({"power", "--model", "table3:f", "--actual", "table3:f", "--stats", "rms,bogus"}).code == 2);
  CHECK(run({"power", "--model", "table3:f", "--actual", "table3:f", "--sims", "0"}).code == 2);
}

TEST_CASE("distinguish") {
  const auto r = run({"distinguish", "--model", "ex1-model:n=16", "--actual", "ex1-actual:n=16", "--stats", "rms",
                      "--sims", "1000", "--hi", "1024"});
  REQUIRE(r.code == 0);
  const auto f = fields(lines(r.out)[1]);
  CHECK(f[0] == "rms");
  CHECK(std::stoul(f[4]) + 1 == std::stoul(f[2]));
  CHECK(run({"distinguish", "--model", "table3:f", "--actual", "table3:f", "--stats", "rms", "--sims", "500",
             "--hi", "64"})
            .code == 3);
}

TEST_CASE("usage errors and output files") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"eigs"}).code == 2);
  CHECK(run({"--help"}).code == 0);

  const auto out = std::filesystem::temp_directory_path() / "rmsgof_test_out.csv";
  const auto man = std::filesystem::temp_directory_path() / "rmsgof_test_manifest.json";
  const auto r = run({"eigs", "--model", "uniform:n=3", "--out", out.string(), "--manifest", man.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().rfind("variance\n0.333333333333\n0.333333333333\n", 0) == 0);
  CHECK(text.str().find('\r') == std::string::npos);
  std::ifstream m(man);
  CHECK(nlohmann::json::parse(m)["command"] == "eigs");
}

TEST_CASE("grid and digest helpers") {
  const auto lin = cli::parse_grid("lin:0.5:2:4");
  CHECK(lin.kind == cli::GridSpec::Kind::kLinear);
  CHECK(lin.points == 4);
  const auto aut = cli::parse_grid("auto:50:1e-6");
  CHECK(aut.kind == cli::GridSpec::Kind::kAuto);
  CHECK(aut.tail_significance == 1e-6);
  CHECK_THROWS(cli::parse_grid("lin:1:0:4"));
  CHECK_THROWS(cli::parse_grid("auto:2.5"));
  CHECK(cli::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(cli::fnv1a_hex("a") == "af63dc4c8601ec8c");
}
