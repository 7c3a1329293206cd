#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crlab/runner.hpp"

using namespace crlab;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("crlab_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter;
};
int TempDir::counter = 0;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ordered_json chain_cfg() {
  return ordered_json{{"task", "chain"},
                      {"model", {{"name", "heisenberg"}, {"n", 1}}},
                      {"initial",
                       {{"point", {0.0, 0.0, 0.0}},
                        {"a", {{0.25, 0.0}}}}},
                      {"params", {{"t_span", 0.5}, {"step", 0.01}}}};
}

}  // namespace

TEST_CASE("chain task writes a stamped csv with the expected columns") {
  TempDir tmp;
  RunOutcome out = run_config(chain_cfg(), tmp.path.string(), 0xabcu, std::nullopt);
  REQUIRE(out.exit_code == 0);
  REQUIRE(out.artifacts.size() == 1);
  std::string text = slurp(out.artifacts[0]);
  CHECK(text.rfind("# crlab 0.1.0 digest=0000000000000abc seed=12345", 0) == 0);
  std::istringstream lines(text);
  std::string header, cols;
  std::getline(lines, header);
  std::getline(lines, cols);
  CHECK(cols == "t,x0,x1,x2,re_a0,im_a0");
  // 51 sample rows
  int rows = 0;
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 51);
}

TEST_CASE("runs are deterministic: identical config bytes give identical artifacts") {
  TempDir t1, t2;
  ordered_json cfg = chain_cfg();
  RunOutcome a = run_config(cfg, t1.path.string(), 7, std::nullopt);
  RunOutcome b = run_config(cfg, t2.path.string(), 7, std::nullopt);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (size_t i = 0; i < a.artifacts.size(); ++i)
    CHECK(slurp(a.artifacts[i]) == slurp(b.artifacts[i]));
}

TEST_CASE("seed override lands in the stamp") {
  TempDir tmp;
  RunOutcome out = run_config(chain_cfg(), tmp.path.string(), 1, 999L);
  REQUIRE(out.exit_code == 0);
  CHECK(slurp(out.artifacts[0]).find("seed=999") != std::string::npos);
}

TEST_CASE("config errors exit 2 with a field-tagged record") {
  TempDir tmp;
  // negative step
  {
    ordered_json cfg = chain_cfg();
    cfg["params"]["step"] = -0.01;
    RunOutcome out = run_config(cfg, tmp.path.string(), 1, std::nullopt);
    CHECK(out.exit_code == 2);
    auto rec = ordered_json::parse(out.error_json);
    CHECK(rec["error"]["code"] == "invalid-param");
    CHECK(rec["error"]["field"] == "params.step");
  }
  // unknown model name
  {
    ordered_json cfg = chain_cfg();
    cfg["model"]["name"] = "torus";
    RunOutcome out = run_config(cfg, tmp.path.string(), 1, std::nullopt);
    CHECK(out.exit_code == 2);
    auto rec = ordered_json::parse(out.error_json);
    CHECK(rec["error"]["field"] == "model.name");
  }
  // missing task
  {
    ordered_json cfg = chain_cfg();
    cfg.erase("task");
    RunOutcome out = run_config(cfg, tmp.path.string(), 1, std::nullopt);
    CHECK(out.exit_code == 2);
  }
  // malformed file
  {
    fs::path bad = tmp.path / "bad.json";
    std::ofstream(bad) << "{ not json";
    RunOutcome out = run_config_file(bad.string(), tmp.path.string(), std::nullopt);
    CHECK(out.exit_code == 2);
  }
}

TEST_CASE("numerical failures exit 3 with a domain-exit record") {
  TempDir tmp;
  // |a0| = 0.5 drives the sphere chain's chart amplitude to exactly 1
  ordered_json cfg{{"task", "chain"},
                   {"model", {{"name", "sphere"}, {"n", 1}}},
                   {"initial", {{"point", {0.0, 0.0, 0.0}}, {"a", {{0.5, 0.0}}}}},
                   {"params", {{"t_span", 3.0}, {"step", 0.002}}}};
  RunOutcome out = run_config(cfg, tmp.path.string(), 1, std::nullopt);
  CHECK(out.exit_code == 3);
  auto rec = ordered_json::parse(out.error_json);
  CHECK(rec["error"]["code"] == "domain-exit");
}

TEST_CASE("run_config_file digests the raw bytes") {
  TempDir tmp;
  fs::path cfgp = tmp.path / "run.json";
  std::string text = chain_cfg().dump(2);
  std::ofstream(cfgp, std::ios::binary) << text;
  RunOutcome out = run_config_file(cfgp.string(), tmp.path.string(), std::nullopt);
  REQUIRE(out.exit_code == 0);
  char want[32];
  std::snprintf(want, sizeof want, "digest=%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  CHECK(slurp(out.artifacts[0]).find(want) != std::string::npos);
}

TEST_CASE("curvature report carries the sphere constants") {
  TempDir tmp;
  ordered_json cfg{{"task", "curvature-report"},
                   {"model", {{"name", "sphere"}, {"n", 2}}},
                   {"initial", {{"point", {0.05, -0.1, 0.02, 0.04, 0.1}}}}};
  RunOutcome out = run_config(cfg, tmp.path.string(), 2, std::nullopt);
  REQUIRE(out.exit_code == 0);
  auto doc = ordered_json::parse(slurp(out.artifacts[0]));
  CHECK(doc["tool"] == "crlab 0.1.0");
  CHECK(doc["digest"] == "0000000000000002");
  CHECK(std::abs(doc["scalar"].get<double>() - 6.0) < 1e-6);
  CHECK(doc["pe_residual"].get<double>() < 1e-6);
  CHECK(std::abs(doc["d_norm"].get<double>() - 0.5 * std::sqrt(2.0)) < 1e-6);
}

TEST_CASE("embed-verify emits the three predicates and their agreement") {
  TempDir tmp;
  ordered_json cfg{{"task", "embed-verify"},
                   {"embedding", {{"name", "linear"}, {"n", 1}, {"nhat", 2}}},
                   {"params", {{"t_span", 0.5}, {"step", 0.004}, {"phases", 2}}}};
  RunOutcome out = run_config(cfg, tmp.path.string(), 3, std::nullopt);
  REQUIRE(out.exit_code == 0);
  auto doc = ordered_json::parse(slurp(out.artifacts[0]));
  CHECK(doc["embedding"] == "linear-sphere");
  CHECK(doc["verdicts"]["chain_preserving"] == true);
  CHECK(doc["verdicts"]["lift_exists"] == true);
  CHECK(doc["verdicts"]["totally_geodesic"] == true);
  CHECK(doc["verdicts"]["pairwise_agree"] == true);
  CHECK(doc["sff_norm"].get<double>() < 1e-8);
}

TEST_CASE("geodesic task reports a null defect column") {
  TempDir tmp;
  ordered_json cfg{{"task", "geodesic"},
                   {"model", {{"name", "heisenberg"}, {"n", 1}}},
                   {"initial", {{"point", {0.0, 0.0, 0.0}}, {"a", {{0.2, 0.1}}}}},
                   {"params", {{"t_span", 0.5}, {"step", 0.005}}}};
  RunOutcome out = run_config(cfg, tmp.path.string(), 4, std::nullopt);
  REQUIRE(out.exit_code == 0);
  std::string text = slurp(out.artifacts[0]);
  std::istringstream lines(text);
  std::string header, cols;
  std::getline(lines, header);
  std::getline(lines, cols);
  CHECK(cols.find("null_defect") != std::string::npos);
  // last column stays tiny on every row
  for (std::string line; std::getline(lines, line);) {
    if (line.empty()) continue;
    double nd = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(nd < 1e-8);
  }
}

TEST_CASE("suite task aggregates consistent per-embedding results") {
  TempDir tmp;
  ordered_json cfg{{"task", "suite"},
                   {"suite", "theorem1"},
                   {"params", {{"t_span", 0.4}, {"step", 0.004}, {"phases", 1}}}};
  RunOutcome out = run_config(cfg, tmp.path.string(), 5, std::nullopt);
  REQUIRE(out.exit_code == 0);
  auto doc = ordered_json::parse(slurp(out.artifacts.back()));
  REQUIRE(doc["results"].is_array());
  CHECK(doc["results"].size() == 2);
  CHECK(doc["consistent"] == true);
  for (const auto& r : doc["results"])
    CHECK(r["verdicts"]["pairwise_agree"] == true);
}
