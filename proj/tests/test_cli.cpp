#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ticklab/cli.hpp"
#include "ticklab/json_io.hpp"

using namespace ticklab;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;

  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ticklab");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ticklab_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("stats on zoo models") {
  Run r = run({"stats", "--model", "multicyclic", "--d", "2", "--k", "1", "--q", "0.5"});
  REQUIRE(r.code == cli::kExitOk);
  Json j = r.json();
  CHECK(j["mu"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(j["sigma2"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(j["accuracy"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));

  r = run({"stats", "--model", "qubit", "--q", "0.5", "--u", "0.8"});
  REQUIRE(r.code == cli::kExitOk);
  j = r.json();
  CHECK(j["mu"].get<double>() == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(j["sigma2"].get<double>() == doctest::Approx(20.0 / 9).epsilon(1e-9));
  CHECK(j["accuracy"].get<double>() == doctest::Approx(7.2).epsilon(1e-9));
}

TEST_CASE("stats error paths") {
  const auto never = scratch("never.json");
  write_file(never, R"({"kind": "classical", "d": 2, "T0": [1, 0, 0, 1], "pi0": [1, 0]})");
  Run r = run({"stats", "--model", "file:" + never.string()});
  CHECK(r.code == cli::kExitInput);
  CHECK(r.err.find("NeverTicks") != std::string::npos);

  const auto bad = scratch("bad.json");
  write_file(bad, R"({"kind": "classical", "d": 2, "T0": [1, 0.5, 0, 0.5], "pi0": [1, 0]})");
  r = run({"stats", "--model", "file:" + bad.string()});
  CHECK(r.code == cli::kExitInput);
  CHECK(r.err.find("InvariantViolation") != std::string::npos);

  r = run({"stats", "--model", "qubit", "--q", "0.5", "--u", "1"});
  CHECK(r.code == cli::kExitIncomplete);
  CHECK(r.err.find("NoConvergence") != std::string::npos);

  CHECK(run({"stats", "--model", "multicyclic", "--d", "6", "--k", "4"}).code == cli::kExitInput);
  CHECK(run({"stats", "--bogus"}).code == cli::kExitInput);
  CHECK(run({}).code == cli::kExitInput);
}

TEST_CASE("stats output model reloads") {
  Run r = run({"stats", "--model", "cyclic", "--d", "3", "--q", "0.4"});
  REQUIRE(r.code == 0);
  const auto path = scratch("reload.json");
  write_file(path, r.json()["model"].dump());
  Run again = run({"stats", "--model", "file:" + path.string()});
  REQUIRE(again.code == 0);
  CHECK(again.json()["mu"] == r.json()["mu"]);
  CHECK(again.json()["sigma2"] == r.json()["sigma2"]);
}

TEST_CASE("csv format") {
  Run r = run({"stats", "--model", "oneway", "--d", "2", "--q", "0.5", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("mu,sigma2,accuracy,accuracy_infinite,method\n", 0) == 0);

  r = run({"--format", "csv", "pmf", "--model", "oneway", "--d", "2", "--q", "0.5", "--N", "4"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "L,pL,survival");
  std::getline(in, line);
  CHECK(line.rfind("1,0,", 0) == 0);  // first step cannot tick from the first state
  std::getline(in, line);
  CHECK(line.rfind("2,0.25,0.75", 0) == 0);
}

TEST_CASE("pmf json") {
  Run r = run({"pmf", "--model", "multicyclic", "--d", "2", "--k", "2", "--q", "0.5", "--N", "6"});
  REQUIRE(r.code == 0);
  const Json j = r.json();
  CHECK(j["pmf"].size() == 6);
  CHECK(j["pmf"][3].get<double>() == doctest::Approx(0.25));
}

TEST_CASE("witness") {
  Run r = run({"witness", "--model", "qubit", "--q", "0.5", "--u", "0.8", "--L", "4"});
  REQUIRE(r.code == 0);
  Json j = r.json();
  CHECK(j["kind"] == "finite_length");
  CHECK(j["bound_provenance"] == "certified");
  CHECK(j["violated"] == true);

  r = run({"witness", "--model", "oneway", "--d", "2", "--q", "0.5"});
  REQUIRE(r.code == 0);
  j = r.json();
  CHECK(j["kind"] == "accuracy");
  CHECK(j["violated"] == false);
}

TEST_CASE("bound") {
  Run r = run({"bound", "--d", "2", "--L", "3", "--err", "2e-2"});
  REQUIRE(r.code == 0);
  const Json j = r.json();
  CHECK(j["upper_bound"].get<double>() <= 8.0 / 27 + 2e-2);
  CHECK(j["upper_bound"].get<double>() >= 8.0 / 27);
  CHECK(j["toolversion"] == cli::kToolVersion);
  CHECK(j.contains("seed"));
  CHECK_FALSE(j.contains("elapsed_seconds"));
  CHECK_FALSE(r.err.empty());  // progress lines

  // byte-for-byte reproducible
  CHECK(run({"bound", "--d", "2", "--L", "3", "--err", "2e-2"}).out == r.out);

  Run p = run({"bound", "--d", "2", "--L", "4", "--err", "1e-3", "--max-points-per-stage", "100000"});
  CHECK(p.code == cli::kExitIncomplete);
  CHECK(p.json()["partial"] == true);

  CHECK(run({"bound", "--d", "5", "--L", "7"}).code == cli::kExitInput);
}

TEST_CASE("search") {
  Run r = run({"search", "--objective", "pl", "--d", "2", "--L", "4", "--restarts", "10", "--steps", "1500",
               "--lr", "0.01"});
  REQUIRE(r.code == 0);
  Json j = r.json();
  CHECK(j["best_objective"].get<double>() >= 0.25 - 1e-4);
  CHECK(j["multicyclic_estimate"].get<double>() == doctest::Approx(0.25));

  r = run({"search", "--objective", "F", "--d", "3", "--restarts", "20", "--steps", "2000"});
  REQUIRE(r.code == 0);
  j = r.json();
  CHECK(std::abs(j["best_objective"].get<double>()) <= 1e-3);
  CHECK(j["witness_status"] == "conjectured");

  const auto trace = scratch("trace.csv");
  r = run({"search", "--objective", "pl", "--d", "2", "--L", "3", "--restarts", "3", "--steps", "50", "--trace",
           trace.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(trace);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);

  // same seed, same bytes
  const std::vector<std::string> args{"search", "--objective", "pl", "--d", "3", "--L", "5",
                                      "--restarts", "4", "--steps", "100", "--seed", "9"};
  CHECK(run(args).out == run(args).out);
}

TEST_CASE("limit") {
  Run r = run({"limit", "--family", "oneway", "--d", "2", "--alpha", "1"});
  REQUIRE(r.code == 0);
  Json j = r.json();
  CHECK(j["verdict"] == "limit exists");
  CHECK(j["R_continuous"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));

  r = run({"limit", "--family", "cyclic", "--d", "2", "--q", "0.5"});
  REQUIRE(r.code == 0);
  CHECK(r.json()["verdict"] == "NoContinuousLimit");

  r = run({"limit", "--family", "qubit", "--alpha", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.json()["V_positive_semidefinite"] == true);

  CHECK(run({"limit", "--family", "oneway", "--deltas", "1e-3,1e-2"}).code == cli::kExitInput);
}

TEST_CASE("tables") {
  Run r = run({"table", "optk"});
  REQUIRE(r.code == 0);
  CHECK(r.json()["all_match"] == true);

  r = run({"table", "qpca", "--grid", "51"});
  REQUIRE(r.code == 0);
  const Json j = r.json();
  REQUIRE(j["rows"].size() == 18);
  CHECK(j["rows"][0]["recomputed"]["estimate"].get<double>() == doctest::Approx(8.0 / 27));

  r = run({"--format", "csv", "table", "fig3", "--grid", "21"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("L,classical_upper_bound,classical_estimate,quantum_family,quantum_optimized\n", 0) == 0);

  CHECK(run({"table", "nope"}).code == cli::kExitInput);
}

TEST_CASE("config file and overrides") {
  const auto cfg = scratch("run.cfg");
  write_file(cfg, "# bit clock\nmodel = oneway\nd = 2\nq = 0.5\n");
  Run r = run({"stats", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  CHECK(r.json()["mu"].get<double>() == doctest::Approx(4.0));

  r = run({"stats", "--config", cfg.string(), "--q", "0.75"});
  REQUIRE(r.code == 0);
  CHECK(r.json()["mu"].get<double>() == doctest::Approx(8.0));

  const auto bad = scratch("bad.cfg");
  write_file(bad, "model = oneway\ncolour = blue\n");
  r = run({"stats", "--config", bad.string()});
  CHECK(r.code == cli::kExitInput);
  CHECK(r.err.find("colour") != std::string::npos);
}

TEST_CASE("output file") {
  const auto path = scratch("out.json");
  std::filesystem::remove(path);
  Run r = run({"stats", "--model", "oneway", "--d", "2", "--q", "0.5", "-o", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const Json j = Json::parse(in);
  CHECK(j["mu"].get<double>() == doctest::Approx(4.0));
}

TEST_CASE("thread count from the environment") {
  setenv("TICKLAB_THREADS", "3", 1);
  Run r = run({"bound", "--d", "2", "--L", "3", "--err", "5e-2"});
  unsetenv("TICKLAB_THREADS");
  REQUIRE(r.code == 0);
  CHECK(r.json()["threads"] == 3);
}

TEST_CASE("help and version") {
  Run r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("bound") != std::string::npos);
}
