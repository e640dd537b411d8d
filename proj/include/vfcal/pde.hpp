#ifndef VFCAL_PDE_HPP_
#define VFCAL_PDE_HPP_

#include "vfcal/calibration.hpp"
#include "vfcal/chart.hpp"
#include "vfcal/field.hpp"
#include "vfcal/grid.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>

namespace vfcal {

/// Residuals of the minimality equation
///   2(1 + |A|^2) dA/dzbar - A d|A|^2/dzbar = 0,
/// equivalently d/dzbar [A / sqrt(1 + |A|^2)] = 0.
struct ResidualReport {
  ScalarGrid residual_2_10;  ///< |2(1+|A|^2) A_zbar - A (|A|^2)_zbar|
  ScalarGrid residual_holo;  ///< |d/dzbar (A / sqrt(1+|A|^2))|
  double max_2_10 = 0.0;
  double max_holo = 0.0;
  double l2_holo = 0.0;
  double interior_max_2_10 = 0.0;
  double interior_max_holo = 0.0;
  double boundary_max_holo = 0.0;
  /// Interior max of the quotient differentiated directly on the lattice
  /// rather than through the chain rule.
  double interior_max_holo_direct = 0.0;
};

/// Both residual grids share the same dA/dzbar and dA/dz samples:
/// d|A|^2/dzbar = conj(A) A_zbar + A conj(A_z), and
/// residual_holo = residual_2_10 / (2 (1 + |A|^2)^{3/2}).
/// "Interior" excludes the two outer lattice layers.
ResidualReport minimality_residual(const FieldDerivatives& D);

/// 50 h^2 (1 + max|A|^2).
double default_minimality_tolerance(const FieldDerivatives& D);

struct MinimalityVerdict {
  bool minimal = false;
  double tol = 0.0;
  ResidualReport report;
  /// Attached when minimal: the calibration built from the field.
  std::optional<CalibrationForm> calibration = std::nullopt;
};

MinimalityVerdict is_minimal(const FieldDerivatives& D, double tol);

/// When |A| is constant the field is a solution only if A is constant and
/// the surface has curvature K = -|A|^2, with vol(X) = sqrt(1 - K) vol(M).
struct ConstantADiagnosis {
  bool applicable = false;
  std::string explanation;
  double mean_absA = 0.0;
  double stddev_absA = 0.0;
  double stddev_A = 0.0;
  double implied_K = 0.0;
  double max_curvature_deviation = 0.0;  ///< vs gauss_curvature, interior
  double predicted_volume = 0.0;
  double total_volume = 0.0;
  double predicted_ratio = 0.0;
  double ratio = 0.0;
};

ConstantADiagnosis constant_A_diagnosis(const FieldDerivatives& D, const ConformalChart& chart,
                                        double tol = 1e-4);

/// {max_2_10, max_holo, l2_holo, interior_max_holo, verdict}
nlohmann::json to_json(const ResidualReport& report, const std::string& verdict);
nlohmann::json to_json(const ConstantADiagnosis& diag);

}  // namespace vfcal

#endif  // VFCAL_PDE_HPP_
