#ifndef VFCAL_CHART_HPP_
#define VFCAL_CHART_HPP_

#include "vfcal/expression.hpp"
#include "vfcal/grid.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace vfcal {

/// The lattice leaves the natural domain of a preset, or lambda is not
/// strictly positive somewhere.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A derived quantity failed an internal consistency check (e.g. the
/// imaginary part of the Laplacian of log lambda).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rectangle of a Riemann surface in isothermal coordinates: the metric is
/// lambda (dx^2 + dy^2) with lambda > 0.
class ConformalChart {
 public:
  /// Throws DomainError unless lambda is finite and positive at every node.
  ConformalChart(ScalarGrid lambda, std::string source);

  const Lattice& spec() const { return lambda_.spec(); }
  const ScalarGrid& lambda() const { return lambda_; }
  const std::string& source() const { return source_; }

 private:
  ScalarGrid lambda_;
  std::string source_;
};

/// Names accepted by preset_chart.
inline constexpr std::string_view kPresetNames[] = {"flat", "sphere", "hyperbolic-disk",
                                                    "half-plane"};

/// flat: 1; sphere: 4/(1+r^2)^2; hyperbolic-disk: 4/(1-r^2)^2 on r < 1;
/// half-plane: 1/y^2 on y > 0.
ConformalChart preset_chart(std::string_view name, const Lattice& spec);

/// Chart with lambda given by a metric expression in x, y, r2.
ConformalChart expression_chart(const Expression& lambda, const Lattice& spec);

/// `preset:<name>` or `expr:<text>`.
ConformalChart chart_from_spec(std::string_view metric_spec, const Lattice& spec);

/// Christoffel coefficient: nabla_{d/dz} d/dz = Gamma d/dz with
/// Gamma = (1/lambda) d lambda / dz.
ComplexGrid gamma(const ConformalChart& chart);

/// Gauss curvature K = -(2/lambda) d^2 log(lambda) / dz dzbar.
///
/// The nested Wirtinger operators commute exactly on the lattice, so the
/// imaginary part is rounding only; anything above `imag_tol` (relative to
/// the largest real part) throws NumericalError.
ScalarGrid gauss_curvature(const ConformalChart& chart, double imag_tol = 1e-8);

/// K = -(2/lambda) dGamma/dzbar. Same quantity as gauss_curvature, computed
/// through Gamma; kept for cross-checking the two routes.
ScalarGrid gauss_curvature_from_gamma(const ConformalChart& chart);

/// Integral of lambda dx dy (area of the chart rectangle on the surface).
double base_area(const ConformalChart& chart);

}  // namespace vfcal

#endif  // VFCAL_CHART_HPP_
