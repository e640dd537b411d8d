#ifndef VFCAL_TOOLS_CLI_HPP_
#define VFCAL_TOOLS_CLI_HPP_

#include "vfcal/chart.hpp"
#include "vfcal/field.hpp"
#include "vfcal/grid.hpp"
#include "vfcal/optimizer.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace vfcal::cli {

/// Invalid flags, config file or field specification (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string metric = "preset:flat";
  std::optional<Lattice> lattice;
  /// const:<angle> | expr:<angle expression> | meridian | csv:<path>
  std::string field = "const:0";
  /// Minimality tolerance; module default 50 h^2 (1 + max|A|^2) when unset.
  std::optional<double> tol;
  double comass_tol = 1e-9;
  /// Relative tolerance on stddev(|A|) for the constant-A diagnosis.
  double constant_tol = 1e-4;
  std::string out_dir = "out";

  // minimize
  std::string init = "field";  ///< field | random
  double init_amplitude = 0.5;
  MinimizeOptions minimize;
};

/// "x0,y0,nx,ny,h"
Lattice parse_grid(const std::string& text);

/// Builds the angle field named by `spec` on `chart`.
UnitVectorField build_field(const std::string& spec, std::shared_ptr<const ConformalChart> chart);

/// Reads flags (and an optional --config JSON file; flags win). Throws
/// ConfigError on invalid input. Returns nullopt after printing --help.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out);

int cmd_curvature(const RunConfig& config, std::ostream& log);
int cmd_evaluate(const RunConfig& config, std::ostream& log);
int cmd_calibrate(const RunConfig& config, std::ostream& log);
int cmd_minimize(const RunConfig& config, std::ostream& log);

/// Full front end: parse, dispatch, map errors to exit codes
/// (0 all checks pass, 1 check or numerical failure, 2 configuration error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vfcal::cli

#endif  // VFCAL_TOOLS_CLI_HPP_
