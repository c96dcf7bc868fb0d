#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wentzell/config.hpp"
#include "wentzell/experiments.hpp"
#include "wentzell/io.hpp"

using namespace wentzell;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("wentzell_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("defaults are valid and hashing is stable") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.n_r == 16);
  CHECK(c.n_theta == 48);
  CHECK(c.dt == 1e-4);
  CHECK(c.T == 0.1);
  CHECK(c.jko_h == std::vector<double>{1e-3});
  CHECK(c.resolution == 256);
  CHECK(c.hash() == ExperimentConfig{}.hash());
  ExperimentConfig d;
  d.seed += 1;
  CHECK(d.hash() != c.hash());
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("INI files override defaults; bad values are rejected") {
  const auto dir = scratch("ini");
  {
    std::ofstream f(dir / "run.ini");
    f << "seed = 7\n[mesh]\nn_r = 8\nn_theta = 24\n[model]\na = 0.5, 2\n[time]\ndt = 1e-3\n"
         "[jko]\nh = 4e-3,2e-3\n[metric]\nresolution = 64\n[output]\ndir = results\n";
  }
  const auto c = load_config((dir / "run.ini").string());
  CHECK(c.seed == 7);
  CHECK(c.n_r == 8);
  CHECK(c.a == std::vector<double>{0.5, 2.0});
  CHECK(c.dt == 1e-3);
  CHECK(c.T == 0.1);
  CHECK(c.jko_h == std::vector<double>{4e-3, 2e-3});
  CHECK(c.resolution == 64);
  CHECK(c.out_dir == "results");
  {
    std::ofstream f(dir / "bad.ini");
    f << "[model]\na = 1, -2\n";
  }
  CHECK_THROWS_AS(load_config((dir / "bad.ini").string()), std::invalid_argument);
  CHECK_THROWS(parse_list("1, x"));
  ExperimentConfig z;
  z.n_r = 0;
  CHECK_THROWS_AS(z.validate(), std::invalid_argument);
}

TEST_CASE("CSV writer tags files with the config hash and round-trips doubles") {
  const auto dir = scratch("csv");
  {
    CsvWriter w(dir / "x.csv", {"t", "v"}, 0x1234);
    w.row({0.1, 1.0 / 3.0});
    CHECK_THROWS_AS(w.row({1.0}), std::logic_error);
  }
  const auto text = slurp(dir / "x.csv");
  CHECK(text.rfind("# config_hash=0000000000001234\nt,v\n0.1,", 0) == 0);
  const auto v = text.substr(text.rfind(',') + 1);
  CHECK(std::stod(v) == 1.0 / 3.0);
}

TEST_CASE("cost matrix files round-trip") {
  const auto dir = scratch("cost");
  CostMatrix C;
  C.a = 4.0;
  C.resolution = 32;
  C.nodes = {{0, 0}, {0.5, 0.1}};
  C.C = {0, 0.26, 0.26, 0};
  write_cost_matrix(dir / "c", C);
  const auto D = read_cost_matrix(dir / "c");
  CHECK(D.C == C.C);
  CHECK(D.a == 4.0);
  CHECK(D.nodes.size() == 2);
}

TEST_CASE("experiments are deterministic and the report aggregates them") {
  const auto dir = scratch("exp");
  CHECK_THROWS_AS(emit_report(dir), std::runtime_error);
  ExperimentConfig c;
  c.out_dir = dir.string();
  c.resolution = 48;
  CHECK_THROWS_AS(run_experiment("nope", c), std::invalid_argument);
  run_experiment("snell", c);
  const auto csv1 = slurp(dir / "snell.csv");
  const auto rep1 = emit_report(dir);
  const auto json1 = slurp(dir / "summary.json");
  run_experiment("snell", c);
  emit_report(dir);
  CHECK(slurp(dir / "snell.csv") == csv1);
  CHECK(slurp(dir / "summary.json") == json1);
  CHECK(rep1.at("count").get<std::size_t>() == 1);
  CHECK(rep1.at("experiments").contains("snell"));
  CHECK(csv1.rfind("# config_hash=" + hex64(c.hash()) + "\na,alpha_measured_deg,alpha_predicted_deg\n", 0) == 0);
}

TEST_CASE("varadhan helpers: caps, spacing and the linear fit") {
  const DiskMesh mesh(16, 48);
  const auto A = boundary_cap(mesh, 0.0, 3.14159265358979 / 12);
  CHECK(A.size() == 5);
  const auto t = log_spaced(1e-3, 1e-2, 10);
  CHECK(t.front() == 1e-3);
  CHECK(t.back() == 1e-2);
  CHECK(t[1] / t[0] == doctest::Approx(t[9] / t[8]));
}
