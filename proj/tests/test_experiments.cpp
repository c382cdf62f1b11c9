#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qsl/config.hpp"
#include "qsl/experiments.hpp"
#include "test_util.hpp"

using namespace qsl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qsl_test_" + name);
  fs::remove_all(dir);
  return dir;
}

nlohmann::json manifest_of(const RunResult& r) { return nlohmann::json::parse(slurp(r.manifest)); }

void check_listed_files_exist(const RunResult& r) {
  const auto j = manifest_of(r);
  CHECK(j["files"].size() == r.files);
  for (const auto& f : j["files"]) CHECK(fs::exists(r.manifest.parent_path() / f["path"].get<std::string>()));
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("worker count does not change any output byte") {
    const std::string yaml =
        "experiment: steady_tiles\nbasis_kappa1: 0.1\ndims: [30]\n"
        "grid:\n  A: {min: 0.5, max: 20, count: 3}\n  B: {min: 0.1, max: 20, count: 3}\n";
    auto one = parse_config(yaml);
    one.output_dir = scratch("w1").string();
    one.workers = 1;
    auto many = one;
    many.output_dir = scratch("w8").string();
    many.workers = 8;
    const auto r1 = run_experiment(one);
    const auto r8 = run_experiment(many);
    CHECK(r1.status == RunStatus::ok);
    CHECK(r8.status == RunStatus::ok);
    auto m1 = manifest_of(r1);
    auto m8 = manifest_of(r8);
    for (auto* m : {&m1, &m8}) {
      CHECK((*m)["files"][0]["path"] == "config.yaml");
      m->erase("config_sha256");
      (*m)["files"].erase(0);
    }
    CHECK(m1 == m8);
    for (const auto& f : m1["files"]) {
      const auto name = f["path"].get<std::string>();
      CHECK_MESSAGE(slurp(fs::path(one.output_dir) / name) == slurp(fs::path(many.output_dir) / name), name);
    }
    check_listed_files_exist(r1);
  }

  TEST_CASE("steady tiles mark cells beyond the truncation and skip B > A") {
    auto c = parse_config(
        "experiment: steady_tiles\nbasis_kappa1: 0.1\ndims: [20]\n"
        "grid:\n  A: {min: 1, max: 100, count: 2}\n  B: {min: 1, max: 100, count: 2}\n");
    c.output_dir = scratch("tiles").string();
    const auto r = run_experiment(c);
    CHECK(r.status == RunStatus::ok);
    const auto csv = slurp(fs::path(c.output_dir) / "steady_tiles_N20.csv");
    CHECK(csv.rfind("A,B,C,value,valid_flag,n_hi,energy\n", 0) == 0);
    CHECK(csv.find("100,100,1,") != std::string::npos);
    CHECK(csv.find(",0,94,") != std::string::npos);
    CHECK(csv.find("\n1,100,0.01,,0,,\n") != std::string::npos);
  }

  TEST_CASE("derive_eom writes text, JSON and LaTeX") {
    auto c = parse_config("experiment: derive_eom\n");
    c.output_dir = scratch("eom").string();
    const auto r = run_experiment(c);
    CHECK(r.status == RunStatus::ok);
    CHECK(r.files == 4);
    CHECK(fs::exists(fs::path(c.output_dir) / "eom.tex"));
    check_listed_files_exist(r);
    const auto j = manifest_of(r);
    CHECK(j["experiment"] == "derive_eom");
    CHECK(j["config_sha256"].get<std::string>().size() == 64);
  }

  TEST_CASE("unreached steady state is flagged, not failed") {
    auto c = parse_config(
        "experiment: tss_slices\nbasis_kappa1: 0.1\nstate_kinds: [coherent, thermal]\nenergies: [3]\ndims: [30]\n"
        "slice: {vary: B, fixed: 13.18, axis: {min: 0.08, max: 0.08, count: 1}}\n"
        "steady_state_time: {t_cap: 5}\n");
    c.output_dir = scratch("tss").string();
    const auto r = run_experiment(c);
    CHECK(r.status == RunStatus::ok);
    CHECK(r.failures == 0);
    const auto csv = slurp(fs::path(c.output_dir) / "tss_slices_thermal_E3.csv");
    CHECK(csv == "A,B,T_ss,converged_flag\n13.18,0.08,,0\n");
    const auto j = manifest_of(r);
    bool found = false;
    for (const auto& f : j["files"]) {
      if (f["path"] == "tss_slices_thermal_E3.csv") {
        found = true;
        CHECK(f["meta"]["max_dim_used"].get<int>() > 30);
      }
    }
    CHECK(found);
  }

  TEST_CASE("negativity trace sampling") {
    auto c = parse_config(
        "experiment: negativity_traces\nparams:\n  - {kappa1: 0.1, gamma1: 0.2, gamma2: 0.0}\n"
        "states:\n  - {kind: fock, n: 1}\ndims: [10]\nevolution: {t_end: 1.0, sample_every: 0.25}\n"
        "wigner: {points: 101, half_width: 7}\n");
    c.output_dir = scratch("neg").string();
    const auto r = run_experiment(c);
    CHECK(r.status == RunStatus::ok);
    const auto csv = slurp(fs::path(c.output_dir) / "negativity_fock_1.csv");
    CHECK(csv.rfind("t,V,err\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  }

  TEST_CASE("point failures make a partial run") {
    auto c = parse_config(
        "experiment: wigner_cuts\ndims: [30]\nparams:\n  - {kappa1: 1.0, gamma1: 0.9, gamma2: 0.2}\n"
        "  - {kappa1: 1.0, gamma1: 0.9, gamma2: 0.005}\n");
    c.output_dir = scratch("partial").string();
    const auto r = run_experiment(c);
    CHECK(r.status == RunStatus::partial);
    CHECK(r.failures == 1);
    const auto j = manifest_of(r);
    CHECK(j["failures"][0]["code"] == "DimTooSmall");
  }

  TEST_CASE("invalid configs throw before writing") {
    auto c = parse_config("experiment: wigner_cuts\n");
    c.output_dir = scratch("invalid").string();
    CHECK_ERROR_CODE(run_experiment(c), ErrorCode::ConfigError);
    CHECK(!fs::exists(c.output_dir));
  }
}
