#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "commands.hpp"
#include "io.hpp"

namespace fs = std::filesystem;
using namespace toric;

namespace {

fs::path scratch() {
  const char* env = std::getenv("TORIC_TEST_TMP");
  fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "toric-cli-test";
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "toric");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("sample writes a CSV with a label header") {
  const auto file = scratch() / "indep.csv";
  const auto r = run({"sample", "--preset", "indep-2x2", "--count", "50", "--seed", "3", "--out", file.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("chi-square distribution") != std::string::npos);
  std::istringstream csv(slurp(file));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("u11,u12,u21,u22", 0) == 0);
  int rows = 0;
  while (std::getline(csv, line)) rows += !line.empty();
  CHECK(rows == 50);

  const auto a = cli::read_tables(file.string(), nullptr, nullptr);
  CHECK(a.size() == 50);
}

TEST_CASE("sample is reproducible and JSON round-trips") {
  const auto dir = scratch();
  const auto first = dir / "q1.json";
  const auto second = dir / "q2.json";
  for (const auto& f : {first, second}) {
    REQUIRE(run({"sample", "--preset", "quasi-3x3", "--count", "20", "--seed", "8", "--format", "json", "--out",
                 f.string()})
                .code == 0);
  }
  const auto j1 = nlohmann::json::parse(slurp(first));
  const auto j2 = nlohmann::json::parse(slurp(second));
  CHECK(j1["records"] == j2["records"]);
  CHECK(j1["meta"]["estimator"] == "exact");
  CHECK(j1["records"].size() == 20);
}

TEST_CASE("sample with an overridden b and the ips estimator") {
  const auto summary = scratch() / "summary.json";
  const auto r = run({"sample", "--preset", "indep-4x5", "--b", "2,1,1,1,1,1,1,1,1", "--estimator", "ips",
                      "--epsilon", "0.01", "--count", "10", "--summary", summary.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("IPS iterations per step") != std::string::npos);
  CHECK(fs::exists(summary));
}

TEST_CASE("chain reports acceptance and ESS") {
  const auto file = scratch() / "chain.csv";
  const auto r = run({"chain", "--preset", "indep-4x5", "--burn-in", "100", "--length", "2000", "--seed", "2",
                      "--out", file.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("acceptance rate") != std::string::npos);
  CHECK(r.out.find("ESS of chi-square") != std::string::npos);
  CHECK(cli::read_tables(file.string(), nullptr, nullptr).size() == 2000);
}

TEST_CASE("compare: exact against direct draws") {
  const auto report = scratch() / "compare.json";
  const auto r = run({"compare", "--preset", "indep-2x2", "exact", "direct:5000", "--out", report.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["total_variation"].get<double>() < 0.03);
}

TEST_CASE("errors map to exit codes") {
  CHECK(run({"sample"}).code == 1);
  CHECK(run({"sample", "--preset", "no-such-preset"}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  const auto bad_b = run({"sample", "--preset", "indep-2x2", "--b", "1,2,2,2"});
  CHECK(bad_b.code == 1);
  CHECK(bad_b.err.find("error:") != std::string::npos);
  // No built-in basis for the quasi-independence preset.
  CHECK(run({"chain", "--preset", "quasi-3x3", "--length", "10"}).code == 1);
  // IPS that cannot converge is a numerical failure.
  CHECK(run({"sample", "--preset", "no3way-2x3x3", "--epsilon", "1e-12", "--max-iter", "1", "--count", "1",
             "--retry-cap", "0"})
            .code == 2);
}

TEST_CASE("model files") {
  const auto dir = scratch();
  const auto model = dir / "model.json";
  std::ofstream(model) << R"({"name": "tiny", "matrix": [[1,1,0,0],[0,0,1,1],[1,0,1,0],[0,1,0,1]],
                              "odds": [1, "2/3", 1, 1], "b": [1,2,2,1]})";
  const auto moves = dir / "moves.csv";
  std::ofstream(moves) << "1,-1,-1,1\n";
  CHECK(run({"sample", "--model-file", model.string(), "--estimator", "exact", "--count", "5"}).code == 0);
  CHECK(run({"chain", "--model-file", model.string(), "--moves-file", moves.string(), "--initial", "1,0,1,1",
             "--length", "50"})
            .code == 0);
  std::ofstream(moves) << "1,1,-1,-1\n";
  CHECK(run({"chain", "--model-file", model.string(), "--moves-file", moves.string(), "--length", "5"}).code == 1);
}
