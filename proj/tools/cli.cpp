#include "cli.hpp"

#include "vfcal/calibration.hpp"
#include "vfcal/expression.hpp"
#include "vfcal/pde.hpp"
#include "vfcal/volume.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace vfcal::cli {

namespace fs = std::filesystem;
using nlohmann::json;

Lattice parse_grid(const std::string& text) {
  std::stringstream ss(text);
  std::string cell;
  std::vector<std::string> cells;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (cells.size() != 5) throw ConfigError("--grid expects \"x0,y0,nx,ny,h\", got '" + text + "'");
  try {
    std::size_t used = 0;
    auto num = [&](const std::string& c) {
      const double v = std::stod(c, &used);
      if (used != c.size() && c.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument(c);
      }
      return v;
    };
    const double nx = num(cells[2]);
    const double ny = num(cells[3]);
    if (nx != std::floor(nx) || ny != std::floor(ny)) throw std::invalid_argument("counts");
    return Lattice::make(num(cells[0]), num(cells[1]), static_cast<int>(nx), static_cast<int>(ny),
                         num(cells[4]));
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("--grid: ") + e.what());
  } catch (const std::exception&) {
    throw ConfigError("--grid expects \"x0,y0,nx,ny,h\" with numeric entries, got '" + text + "'");
  }
}

UnitVectorField build_field(const std::string& spec, std::shared_ptr<const ConformalChart> chart) {
  const Lattice& lattice = chart->spec();
  if (spec == "meridian") return meridian_field(std::move(chart));
  if (spec.starts_with("const:") || spec.starts_with("expr:")) {
    const std::string text = spec.substr(spec.find(':') + 1);
    const Expression e = Expression::parse(text);
    if (spec.starts_with("const:") && !e.is_constant()) {
      throw ConfigError("const: field angle must not depend on x, y");
    }
    ScalarGrid theta = sample(lattice, [&](double x, double y) { return e.evaluate(x, y); });
    return UnitVectorField::from_angle(std::move(chart), std::move(theta));
  }
  if (spec.starts_with("csv:")) {
    ScalarGrid theta = read_scalar_csv(spec.substr(4));
    if (!(theta.spec() == lattice)) {
      // Coordinates recovered from text may differ from the flag lattice in the last bits.
      const Lattice& t = theta.spec();
      const double tol = 1e-9 * lattice.h;
      if (t.nx != lattice.nx || t.ny != lattice.ny || std::abs(t.h - lattice.h) > tol ||
          std::abs(t.x0 - lattice.x0) > tol || std::abs(t.y0 - lattice.y0) > tol) {
        throw ConfigError("angle CSV lattice does not match --grid");
      }
      theta = ScalarGrid(lattice, theta.values());
    }
    return UnitVectorField::from_angle(std::move(chart), std::move(theta));
  }
  throw ConfigError("--field must be const:<angle>, expr:<angle>, meridian or csv:<path>, got '" +
                    spec + "'");
}

namespace {

struct Flags {
  std::string metric, grid, field, out, config, init;
  double tol = 0, comass_tol = 0, constant_tol = 0, init_amplitude = 0, grad_tol = 0;
  double initial_step = 0, shrink = 0, armijo_c = 0;
  int max_iters = 0;
  std::uint64_t seed = 0;
  bool no_bb = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--metric", f.metric, "preset:<flat|sphere|hyperbolic-disk|half-plane> or expr:<text>");
  sub->add_option("--grid", f.grid, "x0,y0,nx,ny,h");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--config", f.config, "JSON config file (flags override)");
  sub->add_option("--tol", f.tol, "minimality tolerance (default 50 h^2 (1 + max|A|^2))");
}

void add_field(CLI::App* sub, Flags& f) {
  sub->add_option("--field", f.field, "const:<angle> | expr:<angle> | meridian | csv:<path>");
  sub->add_option("--comass-tol", f.comass_tol, "comass tolerance above 1");
  sub->add_option("--constant-tol", f.constant_tol, "relative stddev(|A|) threshold");
}

void add_minimize(CLI::App* sub, Flags& f) {
  sub->add_option("--init", f.init, "initial interior: field | random");
  sub->add_option("--init-amplitude", f.init_amplitude, "random interior amplitude (radians)");
  sub->add_option("--seed", f.seed, "seed for the random interior");
  sub->add_option("--max-iters", f.max_iters, "iteration cap");
  sub->add_option("--grad-tol", f.grad_tol, "max-norm gradient stopping tolerance");
  sub->add_option("--initial-step", f.initial_step, "initial backtracking step");
  sub->add_option("--shrink", f.shrink, "backtracking shrink factor");
  sub->add_option("--armijo-c", f.armijo_c, "sufficient-decrease constant");
  sub->add_flag("--no-bb", f.no_bb, "use initial_step instead of Barzilai-Borwein trial steps");
}

bool given(const CLI::App* sub, const char* name) { return sub->count(name) > 0; }

void apply_json(const json& j, RunConfig& c) {
  auto get = [&](const char* key, auto& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
  };
  try {
    get("metric", c.metric);
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      if (g.is_string()) {
        c.lattice = parse_grid(g.get<std::string>());
      } else {
        c.lattice = Lattice::make(g.at("x0").get<double>(), g.at("y0").get<double>(),
                                  g.at("nx").get<int>(), g.at("ny").get<int>(),
                                  g.at("h").get<double>());
      }
    }
    get("field", c.field);
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    get("comass_tol", c.comass_tol);
    get("constant_tol", c.constant_tol);
    get("out", c.out_dir);
    get("init", c.init);
    get("init_amplitude", c.init_amplitude);
    get("seed", c.minimize.seed);
    get("max_iters", c.minimize.max_iters);
    get("grad_tol", c.minimize.grad_tol);
    get("initial_step", c.minimize.initial_step);
    get("shrink", c.minimize.shrink);
    get("armijo_c", c.minimize.armijo_c);
    get("bb_step", c.minimize.bb_step);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("config grid: ") + e.what());
  }
}

json lattice_json(const Lattice& s) {
  return {{"x0", s.x0}, {"y0", s.y0}, {"nx", s.nx}, {"ny", s.ny}, {"h", s.h}};
}

json base_report(const RunConfig& c) {
  json j{{"command", c.command}, {"metric", c.metric}, {"field", c.field}};
  if (c.lattice) j["grid"] = lattice_json(*c.lattice);
  return j;
}

void write_report(const RunConfig& c, const json& report) {
  std::ofstream os(fs::path(c.out_dir) / "report.json");
  if (!os) throw std::runtime_error("cannot write report.json in " + c.out_dir);
  os << report.dump(2) << '\n';
}

std::string out_path(const RunConfig& c, const char* name) {
  return (fs::path(c.out_dir) / name).string();
}

std::shared_ptr<const ConformalChart> make_chart(const RunConfig& c) {
  if (!c.lattice) throw ConfigError("--grid is required");
  return std::make_shared<const ConformalChart>(chart_from_spec(c.metric, *c.lattice));
}

void prepare(RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + c.out_dir + ": " + ec.message());
}

}  // namespace

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Volume, calibration and minimality diagnostics for unit vector fields on "
               "conformal charts"};
  app.require_subcommand(1);
  Flags f;
  auto* curvature = app.add_subcommand("curvature", "Gauss curvature of the chart metric");
  auto* evaluate = app.add_subcommand("evaluate", "A, volume and minimality residual of a field");
  auto* calibrate = app.add_subcommand("calibrate", "Build and check the calibration of a field");
  auto* minimize_cmd = app.add_subcommand("minimize", "Minimize the volume with Dirichlet data");
  for (auto* sub : {curvature, evaluate, calibrate, minimize_cmd}) add_common(sub, f);
  for (auto* sub : {evaluate, calibrate, minimize_cmd}) add_field(sub, f);
  add_minimize(minimize_cmd, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  const CLI::App* sub = app.get_subcommands().front();
  RunConfig c;
  c.command = sub->get_name();

  if (given(sub, "--config")) {
    std::ifstream is(f.config);
    if (!is) throw ConfigError("cannot open config file " + f.config);
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    apply_json(j, c);
  }

  if (given(sub, "--metric")) c.metric = f.metric;
  if (given(sub, "--grid")) c.lattice = parse_grid(f.grid);
  if (given(sub, "--out")) c.out_dir = f.out;
  if (given(sub, "--tol")) c.tol = f.tol;
  if (c.command != "curvature") {
    if (given(sub, "--field")) c.field = f.field;
    if (given(sub, "--comass-tol")) c.comass_tol = f.comass_tol;
    if (given(sub, "--constant-tol")) c.constant_tol = f.constant_tol;
  }
  if (c.command == "minimize") {
    if (given(sub, "--init")) c.init = f.init;
    if (given(sub, "--init-amplitude")) c.init_amplitude = f.init_amplitude;
    if (given(sub, "--seed")) c.minimize.seed = f.seed;
    if (given(sub, "--max-iters")) c.minimize.max_iters = f.max_iters;
    if (given(sub, "--grad-tol")) c.minimize.grad_tol = f.grad_tol;
    if (given(sub, "--initial-step")) c.minimize.initial_step = f.initial_step;
    if (given(sub, "--shrink")) c.minimize.shrink = f.shrink;
    if (given(sub, "--armijo-c")) c.minimize.armijo_c = f.armijo_c;
    if (given(sub, "--no-bb")) c.minimize.bb_step = false;
    if (c.init != "field" && c.init != "random") throw ConfigError("--init must be field or random");
    try {
      c.minimize.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (c.tol && !(*c.tol > 0.0)) throw ConfigError("--tol must be positive");

  // A CSV field fixes the lattice when --grid is absent.
  if (!c.lattice && c.field.starts_with("csv:")) {
    try {
      c.lattice = read_scalar_csv(c.field.substr(4)).spec();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("field CSV: ") + e.what());
    }
  }
  if (!c.lattice) throw ConfigError("--grid is required");
  return c;
}

int cmd_curvature(const RunConfig& config, std::ostream& log) {
  RunConfig c = config;
  prepare(c);
  const auto chart = make_chart(c);
  json report = base_report(c);
  try {
    const ScalarGrid K = gauss_curvature(*chart);
    write_csv(out_path(c, "lambda.csv"), chart->lambda(), "lambda");
    write_csv(out_path(c, "K.csv"), K, "K");
    const auto inner = K.values().block(2, 2, K.nx() - 4, K.ny() - 4);
    report["min_K"] = K.values().minCoeff();
    report["max_K"] = K.values().maxCoeff();
    report["mean_K"] = K.values().mean();
    if (K.nx() > 4 && K.ny() > 4) {
      report["interior_min_K"] = inner.minCoeff();
      report["interior_max_K"] = inner.maxCoeff();
      report["interior_mean_K"] = inner.mean();
    }
    report["base_area"] = base_area(*chart);
    report["verdict"] = "ok";
    write_report(c, report);
    log << "mean K = " << K.values().mean() << '\n';
    return 0;
  } catch (const NumericalError& e) {
    report["verdict"] = "numerical-error";
    report["error"] = e.what();
    write_report(c, report);
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_evaluate(const RunConfig& config, std::ostream& log) {
  RunConfig c = config;
  prepare(c);
  const auto chart = make_chart(c);
  const UnitVectorField X = build_field(c.field, chart);
  FieldDerivatives D = compute_A(X);
  compute_epsilons(X, D);
  const VolumeReport vol = total_volume(D, *chart);
  const double tol = c.tol.value_or(default_minimality_tolerance(D));
  const MinimalityVerdict mv = is_minimal(D, tol);
  const ConstantADiagnosis diag = constant_A_diagnosis(D, *chart, c.constant_tol);
  const ScalarGrid unit = unit_norm_residual(X);
  const std::string verdict = mv.minimal ? "minimal" : "not-minimal";

  write_csv(out_path(c, "theta.csv"), X.theta(), "theta");
  write_csv(out_path(c, "A.csv"), D.A);
  write_csv(out_path(c, "density.csv"), vol.density, "vol_density");
  write_csv(out_path(c, "residual_holo.csv"), mv.report.residual_holo, "residual_holo");
  write_csv(out_path(c, "residual_2_10.csv"), mv.report.residual_2_10, "residual_2_10");
  write_csv(out_path(c, "unit_norm_residual.csv"), unit, "unit_norm_residual");

  json report = base_report(c);
  report["volume"] = to_json(vol);
  report["residual"] = to_json(mv.report, verdict);
  report["constant_A"] = to_json(diag);
  report["total"] = vol.total;
  report["ratio"] = vol.ratio();
  report["interior_max_holo"] = mv.report.interior_max_holo;
  if (diag.applicable) report["implied_K"] = diag.implied_K;
  report["unit_norm_residual_max"] = sup_norm(unit);
  report["unit_norm_defect"] = unit_norm_defect(X);
  report["a_form_deviation"] = D.form_deviation;
  report["eps_route_deviation"] = D.eps_route_deviation.value_or(0.0);
  if (mv.calibration) report["calibration"] = to_json(*mv.calibration);
  report["tolerances"] = {{"tol", tol}, {"tol_default", !c.tol.has_value()},
                          {"constant_tol", c.constant_tol}};
  report["verdict"] = verdict;
  write_report(c, report);
  log << "vol = " << vol.total << ", ratio = " << vol.ratio() << ", interior max residual = "
      << mv.report.interior_max_holo << " -> " << verdict << '\n';
  return mv.minimal ? 0 : 1;
}

int cmd_calibrate(const RunConfig& config, std::ostream& log) {
  RunConfig c = config;
  prepare(c);
  const auto chart = make_chart(c);
  const UnitVectorField X = build_field(c.field, chart);
  const FieldDerivatives D = compute_A(X);
  const CalibrationForm phi = build_calibration(D);
  const double threshold = closedness_threshold(D);

  write_csv(out_path(c, "b0.csv"), phi.b0, "b0");
  write_csv(out_path(c, "b1.csv"), phi.b1, "b1");
  write_csv(out_path(c, "b2.csv"), phi.b2, "b2");
  write_csv(out_path(c, "closedness.csv"), closedness_residual(phi), "cr_residual");

  json report = base_report(c);
  report.update(to_json(phi));
  report["cr_residual_boundary"] = phi.cr_residual_boundary;
  report["cr_threshold"] = threshold;
  report["b_mean"] = {phi.b0.values().mean(), phi.b1.values().mean(), phi.b2.values().mean()};
  report["tolerances"] = {{"comass_tol", c.comass_tol}, {"cr_threshold", threshold}};
  try {
    comass_check(phi, c.comass_tol);
  } catch (const ComassViolation& e) {
    report["certified"] = false;
    report["verdict"] = "comass-violation";
    report["error"] = e.what();
    write_report(c, report);
    log << "error: " << e.what() << '\n';
    return 1;
  }
  const Certification cert = certify(phi, threshold, c.comass_tol);
  report["certified"] = cert.certified;
  report["verdict"] = cert.certified ? "certified" : "not-certified";
  write_report(c, report);
  log << "comass = " << phi.comass_sup << ", closedness residual = " << phi.cr_residual_max
      << " (threshold " << threshold << ") -> " << (cert.certified ? "certified" : "not certified")
      << '\n';
  return cert.certified ? 0 : 1;
}

namespace {

void write_trace(const RunConfig& c, const MinimizeResult& r) {
  std::ofstream os(out_path(c, "trace.csv"));
  os << "iter,volume,grad_norm\n";
  char buf[96];
  for (const TraceEntry& t : r.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", t.iter, t.volume, t.grad_norm);
    os << buf;
  }
}

json minimize_json(const MinimizeResult& r, double initial_volume, double area) {
  return {
      {"converged", r.converged},
      {"iterations", r.iterations},
      {"initial_volume", initial_volume},
      {"volume", r.volume},
      {"base_area", area},
      {"ratio", r.volume / area},
      {"bound_gap", r.bound_gap},
      {"cr_residual_max", r.cr_residual_max},
      {"final_residual", to_json(r.final_residual, r.converged ? "converged" : "not-converged")},
  };
}

}  // namespace

int cmd_minimize(const RunConfig& config, std::ostream& log) {
  RunConfig c = config;
  prepare(c);
  const auto chart = make_chart(c);
  const UnitVectorField seed_field = build_field(c.field, chart);
  ScalarGrid initial = seed_field.theta();
  if (c.init == "random") initial = random_interior(initial, c.init_amplitude, c.minimize.seed);
  const double initial_volume = energy(initial, chart);
  const double area = base_area(*chart);

  json report = base_report(c);
  report["options"] = {{"max_iters", c.minimize.max_iters},
                       {"grad_tol", c.minimize.grad_tol},
                       {"initial_step", c.minimize.initial_step},
                       {"shrink", c.minimize.shrink},
                       {"armijo_c", c.minimize.armijo_c},
                       {"bb_step", c.minimize.bb_step},
                       {"seed", c.minimize.seed},
                       {"init", c.init},
                       {"init_amplitude", c.init_amplitude}};
  write_csv(out_path(c, "initial_theta.csv"), initial, "theta");
  try {
    const MinimizeResult r = minimize(chart, initial, c.minimize);
    write_trace(c, r);
    write_csv(out_path(c, "theta.csv"), r.theta, "theta");
    report.update(minimize_json(r, initial_volume, area));
    report["verdict"] = r.converged ? "converged" : "not-converged";
    write_report(c, report);
    log << "volume " << initial_volume << " -> " << r.volume << " in " << r.iterations
        << " iterations (" << (r.converged ? "converged" : "not converged") << ")\n";
    return r.converged ? 0 : 1;
  } catch (const LineSearchError& e) {
    write_trace(c, e.partial());
    write_csv(out_path(c, "theta.csv"), e.partial().theta, "theta");
    report.update(minimize_json(e.partial(), initial_volume, area));
    report["verdict"] = "line-search-failure";
    report["error"] = e.what();
    write_report(c, report);
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

namespace {

RunConfig fallback_config(int argc, const char* const* argv) {
  RunConfig c;
  if (argc > 1) c.command = argv[1];
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--out" && k + 1 < argc) c.out_dir = argv[k + 1];
    if (a.starts_with("--out=")) c.out_dir = a.substr(6);
  }
  return c;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  auto fail = [&](int code, const char* verdict, const std::string& msg) {
    err << (code == 2 ? "config error: " : "error: ") << msg << '\n';
    // Leave a machine-readable verdict even when parsing failed part way.
    if (!config) config = fallback_config(argc, argv);
    try {
      std::error_code ec;
      fs::create_directories(config->out_dir, ec);
      json report = base_report(*config);
      report["verdict"] = verdict;
      report["error"] = msg;
      write_report(*config, report);
    } catch (const std::exception&) {
    }
    return code;
  };
  try {
    config = parse_command_line(argc, argv, out);
    if (!config) return 0;
    const RunConfig& c = *config;
    if (c.command == "curvature") return cmd_curvature(c, out);
    if (c.command == "evaluate") return cmd_evaluate(c, out);
    if (c.command == "calibrate") return cmd_calibrate(c, out);
    return cmd_minimize(c, out);
  } catch (const ConfigError& e) {
    return fail(2, "config-error", e.what());
  } catch (const ParseError& e) {
    return fail(2, "config-error", e.what());
  } catch (const DomainError& e) {
    return fail(2, "config-error", e.what());
  } catch (const DimensionError& e) {
    return fail(2, "config-error", e.what());
  } catch (const std::exception& e) {
    return fail(1, "error", e.what());
  }
}

}  // namespace vfcal::cli
