#include "cli.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
  json report;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "vfcal_cli_test" / name;
  fs::remove_all(p);
  return p;
}

Run invoke(const fs::path& dir, std::vector<std::string> args) {
  args.insert(args.begin(), "vfcal");
  args.push_back("--out");
  args.push_back(dir.string());
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r{vfcal::cli::run(static_cast<int>(argv.size()), argv.data(), out, err), out.str(), err.str(), {}};
  std::ifstream is(dir / "report.json");
  if (is) r.report = json::parse(is);
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  return {std::istreambuf_iterator<char>(is), {}};
}

const char* kUnit32 = "0,0,33,33,0.03125";
const char* kHalf32 = "0,1,33,33,0.03125";
const char* kSphere32 = "0.5,-0.5,33,33,0.03125";

}  // namespace

TEST_CASE("curvature") {
  SUBCASE("flat") {
    const auto d = scratch("curv_flat");
    const Run r = invoke(d, {"curvature", "--metric", "preset:flat", "--grid", kUnit32});
    CHECK(r.code == 0);
    CHECK(r.report["verdict"] == "ok");
    CHECK(std::abs(r.report["mean_K"].get<double>()) < 1e-10);
    CHECK(r.report["base_area"].get<double>() == doctest::Approx(1.0));
    CHECK(fs::exists(d / "K.csv"));
    CHECK(fs::exists(d / "lambda.csv"));
  }
  SUBCASE("sphere preset") {
    const Run r = invoke(scratch("curv_sphere"), {"curvature", "--metric", "preset:sphere", "--grid", kSphere32});
    CHECK(r.code == 0);
    CHECK(r.report["interior_mean_K"].get<double>() == doctest::Approx(1.0).epsilon(1e-2));
  }
  SUBCASE("hyperbolic disk as an expression") {
    const Run r = invoke(scratch("curv_expr"),
                         {"curvature", "--metric", "expr:4/(1-x^2-y^2)^2", "--grid", "-0.5,-0.5,33,33,0.03125"});
    CHECK(r.code == 0);
    CHECK(r.report["interior_mean_K"].get<double>() == doctest::Approx(-1.0).epsilon(1e-2));
  }
}

TEST_CASE("evaluate") {
  SUBCASE("flat parallel field is minimal") {
    const auto d = scratch("eval_flat");
    const Run r = invoke(d, {"evaluate", "--metric", "preset:flat", "--grid", kUnit32, "--field", "const:0.3"});
    CHECK(r.code == 0);
    CHECK(r.report["verdict"] == "minimal");
    CHECK(r.report["total"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    for (const char* f : {"theta.csv", "A.csv", "density.csv", "residual_holo.csv", "residual_2_10.csv",
                          "unit_norm_residual.csv"})
      CHECK(fs::exists(d / f));
    for (const char* k : {"volume", "residual", "constant_A", "ratio", "interior_max_holo", "tolerances",
                          "unit_norm_residual_max", "a_form_deviation", "eps_route_deviation", "calibration"})
      CHECK(r.report.contains(k));
  }
  SUBCASE("half-plane: ratio sqrt(2), implied K = -1") {
    const Run r = invoke(scratch("eval_half"), {"evaluate", "--metric", "preset:half-plane", "--grid", kHalf32});
    CHECK(r.code == 0);
    CHECK(r.report["verdict"] == "minimal");
    CHECK(r.report["ratio"].get<double>() == doctest::Approx(std::numbers::sqrt2).epsilon(1e-10));
    CHECK(r.report["implied_K"].get<double>() == doctest::Approx(-1.0).epsilon(1e-10));
  }
  SUBCASE("meridian on the sphere is not minimal") {
    const Run r = invoke(scratch("eval_mer"),
                         {"evaluate", "--metric", "preset:sphere", "--grid", kSphere32, "--field", "meridian"});
    CHECK(r.code == 1);
    CHECK(r.report["verdict"] == "not-minimal");
    // max of 2r/(1+r^2)^2 over the box is 3 sqrt(3)/8 at r = 1/sqrt(3)
    CHECK(r.report["interior_max_holo"].get<double>() == doctest::Approx(3 * std::sqrt(3.0) / 8).epsilon(0.02));
    CHECK_FALSE(r.report.contains("calibration"));
  }
  SUBCASE("expression field and explicit tolerance") {
    const Run r = invoke(scratch("eval_expr"), {"evaluate", "--metric", "preset:flat", "--grid", kUnit32,
                                                "--field", "expr:x*y", "--tol", "1e-3"});
    CHECK(r.code == 1);
    CHECK(r.report["tolerances"]["tol"].get<double>() == 1e-3);
    CHECK(r.report["tolerances"]["tol_default"] == false);
  }
  SUBCASE("angle CSV round trip") {
    const auto d = scratch("eval_csv_src");
    REQUIRE(invoke(d, {"evaluate", "--metric", "preset:flat", "--grid", kUnit32, "--field", "expr:0.2*x"}).code == 0);
    const Run r = invoke(scratch("eval_csv"), {"evaluate", "--metric", "preset:flat", "--field",
                                               "csv:" + (d / "theta.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.report["grid"]["nx"] == 33);
    CHECK(r.report["total"] == invoke(d, {"evaluate", "--metric", "preset:flat", "--grid", kUnit32, "--field",
                                          "expr:0.2*x"}).report["total"]);
  }
}

TEST_CASE("calibrate") {
  SUBCASE("flat and half-plane certify") {
    for (auto [metric, grid] : {std::pair{"preset:flat", kUnit32}, std::pair{"preset:half-plane", kHalf32}}) {
      const auto d = scratch("cal_ok");
      const Run r = invoke(d, {"calibrate", "--metric", metric, "--grid", grid});
      CHECK(r.code == 0);
      CHECK(r.report["verdict"] == "certified");
      CHECK(r.report["certified"] == true);
      CHECK(r.report["comass_sup"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
      for (const char* f : {"b0.csv", "b1.csv", "b2.csv", "closedness.csv"}) CHECK(fs::exists(d / f));
    }
  }
  SUBCASE("meridian does not") {
    const Run r = invoke(scratch("cal_mer"),
                         {"calibrate", "--metric", "preset:sphere", "--grid", kSphere32, "--field", "meridian"});
    CHECK(r.code == 1);
    CHECK(r.report["verdict"] == "not-certified");
    CHECK(r.report["cr_residual_max"].get<double>() > 0.1);
  }
}

TEST_CASE("minimize") {
  SUBCASE("flat, random interior converges to the parallel field") {
    const auto d = scratch("min_flat");
    const Run r = invoke(d, {"minimize", "--metric", "preset:flat", "--grid", "0,0,17,17,0.0625", "--init",
                             "random", "--seed", "3"});
    CHECK(r.code == 0);
    CHECK(r.report["verdict"] == "converged");
    CHECK(r.report["volume"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.report["initial_volume"].get<double>() > r.report["volume"].get<double>());
    CHECK(r.report["options"]["seed"] == 3);
    for (const char* f : {"initial_theta.csv", "theta.csv", "trace.csv"}) CHECK(fs::exists(d / f));
    CHECK(slurp(d / "trace.csv").starts_with("iter,volume,grad_norm\n"));
  }
  SUBCASE("half-plane stays near sqrt(2)") {
    const Run r = invoke(scratch("min_half"), {"minimize", "--metric", "preset:half-plane", "--grid",
                                               "0,1,17,17,0.0625", "--init", "random"});
    CHECK(r.code == 0);
    CHECK(r.report["ratio"].get<double>() == doctest::Approx(std::numbers::sqrt2).epsilon(2e-2));
  }
  SUBCASE("meridian seed on the sphere goes down") {
    const Run r = invoke(scratch("min_mer"), {"minimize", "--metric", "preset:sphere", "--grid",
                                              "0.5,-0.5,17,17,0.0625", "--field", "meridian"});
    CHECK(r.code == 0);
    CHECK(r.report["volume"].get<double>() < r.report["initial_volume"].get<double>());
  }
  SUBCASE("iteration cap") {
    const Run r = invoke(scratch("min_cap"), {"minimize", "--metric", "preset:flat", "--grid", "0,0,17,17,0.0625",
                                              "--init", "random", "--max-iters", "2"});
    CHECK(r.code == 1);
    CHECK(r.report["verdict"] == "not-converged");
    CHECK(r.report["iterations"] == 2);
  }
  SUBCASE("line search failure still reports") {
    const Run r = invoke(scratch("min_ls"), {"minimize", "--metric", "preset:flat", "--grid", "0,0,17,17,0.0625",
                                             "--init", "random", "--initial-step", "1e6", "--no-bb", "--shrink",
                                             "0.99"});
    CHECK(r.code == 1);
    CHECK(r.report["verdict"] == "line-search-failure");
    CHECK(r.report.contains("error"));
  }
}

TEST_CASE("configuration errors exit 2 and still leave a report") {
  const auto d = scratch("bad");
  SUBCASE("missing grid") {
    const Run r = invoke(d, {"evaluate"});
    CHECK(r.code == 2);
    CHECK(r.report["verdict"] == "config-error");
  }
  SUBCASE("bad metric") {
    const Run r = invoke(d, {"curvature", "--metric", "preset:torus", "--grid", kUnit32});
    CHECK(r.code == 2);
    CHECK(r.report["verdict"] == "config-error");
  }
  SUBCASE("bad expression") {
    const Run r = invoke(d, {"evaluate", "--grid", kUnit32, "--field", "expr:1+*x"});
    CHECK(r.code == 2);
    CHECK(r.err.find("config error") != std::string::npos);
  }
  SUBCASE("const field depending on x") {
    CHECK(invoke(d, {"evaluate", "--grid", kUnit32, "--field", "const:x"}).code == 2);
  }
  SUBCASE("bad minimize options") {
    CHECK(invoke(d, {"minimize", "--grid", kUnit32, "--shrink", "1.5"}).code == 2);
    CHECK(invoke(d, {"minimize", "--grid", kUnit32, "--init", "zero"}).code == 2);
  }
  SUBCASE("unknown flag") { CHECK(invoke(d, {"evaluate", "--grid", kUnit32, "--bogus"}).code == 2); }
}

TEST_CASE("parse_grid") {
  using vfcal::cli::parse_grid;
  const vfcal::Lattice s = parse_grid("0,1,5,9,0.25");
  CHECK(s.x0 == 0.0);
  CHECK(s.y0 == 1.0);
  CHECK(s.nx == 5);
  CHECK(s.ny == 9);
  CHECK(s.h == 0.25);
  CHECK_THROWS_AS(parse_grid("0,1,5,9"), vfcal::cli::ConfigError);
  CHECK_THROWS_AS(parse_grid("0,1,5.5,9,0.25"), vfcal::cli::ConfigError);
  CHECK_THROWS_AS(parse_grid("0,1,2,9,0.25"), vfcal::cli::ConfigError);
  CHECK_THROWS_AS(parse_grid("0,1,5,9,-1"), vfcal::cli::ConfigError);
  CHECK_THROWS_AS(parse_grid("a,1,5,9,0.25"), vfcal::cli::ConfigError);
}

TEST_CASE("config file, with flags taking precedence") {
  const auto d = scratch("config");
  fs::create_directories(d);
  const fs::path cfg = d / "run.json";
  std::ofstream(cfg) << R"({"metric": "preset:half-plane",
                           "grid": {"x0": 0, "y0": 1, "nx": 17, "ny": 17, "h": 0.0625},
                           "field": "const:0.5"})";
  const Run a = invoke(d / "a", {"evaluate", "--config", cfg.string()});
  CHECK(a.code == 0);
  CHECK(a.report["metric"] == "preset:half-plane");
  CHECK(a.report["field"] == "const:0.5");
  CHECK(a.report["grid"]["nx"] == 17);
  const Run b = invoke(d / "b", {"evaluate", "--config", cfg.string(), "--metric", "preset:flat", "--grid", kUnit32});
  CHECK(b.report["metric"] == "preset:flat");
  CHECK(b.report["grid"]["nx"] == 33);
  CHECK(b.report["field"] == "const:0.5");

  std::ofstream(d / "broken.json") << "{not json";
  CHECK(invoke(d / "c", {"evaluate", "--config", (d / "broken.json").string()}).code == 2);
}

TEST_CASE("help exits 0") {
  const char* argv[] = {"vfcal", "--help"};
  std::ostringstream out, err;
  CHECK(vfcal::cli::run(2, argv, out, err) == 0);
  CHECK(out.str().find("evaluate") != std::string::npos);
}

TEST_CASE("reruns are byte-identical") {
  const std::vector<std::string> args = {"minimize", "--metric", "preset:half-plane", "--grid", "0,1,13,13,0.083333333333333333",
                                         "--init", "random", "--seed", "11"};
  const auto d1 = scratch("rerun1"), d2 = scratch("rerun2");
  invoke(d1, args);
  invoke(d2, args);
  for (const char* f : {"theta.csv", "trace.csv", "initial_theta.csv"}) CHECK(slurp(d1 / f) == slurp(d2 / f));
  json r1 = json::parse(slurp(d1 / "report.json")), r2 = json::parse(slurp(d2 / "report.json"));
  CHECK(r1 == r2);
}
