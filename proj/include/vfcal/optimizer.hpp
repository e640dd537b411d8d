#ifndef VFCAL_OPTIMIZER_HPP_
#define VFCAL_OPTIMIZER_HPP_

#include "vfcal/chart.hpp"
#include "vfcal/grid.hpp"
#include "vfcal/pde.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace vfcal {

struct MinimizeOptions {
  int max_iters = 20000;
  /// Stop when the max-norm of the interior gradient falls below this.
  double grad_tol = 1e-10;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo_c = 1e-4;
  int max_backtracks = 60;
  /// Trial step from the Barzilai-Borwein quotient; otherwise `initial_step`.
  bool bb_step = true;
  /// Seed for random_interior.
  std::uint64_t seed = 1;

  void validate() const;
};

struct TraceEntry {
  int iter = 0;
  double volume = 0.0;
  double grad_norm = 0.0;  ///< max-norm over interior nodes
};

struct MinimizeResult {
  ScalarGrid theta;
  std::vector<double> volume_trace;
  std::vector<TraceEntry> trace;
  bool converged = false;
  int iterations = 0;
  ResidualReport final_residual;
  double volume = 0.0;
  /// vol - integral X*phi with phi built from the result.
  double bound_gap = 0.0;
  double cr_residual_max = 0.0;
};

class LineSearchError : public std::runtime_error {
 public:
  LineSearchError(const std::string& what, MinimizeResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const MinimizeResult& partial() const { return partial_; }

 private:
  MinimizeResult partial_;
};

/// total_volume(from_angle(chart, theta)).total
double energy(const ScalarGrid& theta, std::shared_ptr<const ConformalChart> chart);

/// Exact gradient of `energy` with respect to the interior theta nodes
/// (adjoint of the discrete stencils); boundary entries are zero.
ScalarGrid energy_gradient(const ScalarGrid& theta, const ConformalChart& chart);

/// Energy and gradient in one pass.
double energy_and_gradient(const ScalarGrid& theta, const ConformalChart& chart,
                           ScalarGrid& gradient);

/// Copy of `boundary` with interior nodes replaced by boundary + U(-amplitude, amplitude)
/// noise drawn from a generator seeded with `seed`.
ScalarGrid random_interior(const ScalarGrid& boundary, double amplitude, std::uint64_t seed);

/// Gradient descent over the interior angles with Armijo backtracking. The
/// boundary layer of `initial` is the Dirichlet data and is never modified.
/// Throws LineSearchError when no step decreases the energy.
MinimizeResult minimize(std::shared_ptr<const ConformalChart> chart, const ScalarGrid& initial,
                        const MinimizeOptions& opts);

}  // namespace vfcal

#endif  // VFCAL_OPTIMIZER_HPP_
