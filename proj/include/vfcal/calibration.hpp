#ifndef VFCAL_CALIBRATION_HPP_
#define VFCAL_CALIBRATION_HPP_

#include "vfcal/field.hpp"
#include "vfcal/grid.hpp"

#include <nlohmann/json_fwd.hpp>

#include <stdexcept>

namespace vfcal {

struct ComassViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kComassTolerance = 1e-9;

/// 2-form phi = b2 e0^e1 + b1 e2^e0 + b0 e1^e2 on the unit tangent bundle,
/// with coefficients pulled back from the base.
///
/// phi has comass 1 iff sup(b0^2 + b1^2 + b2^2) = 1, and is closed iff
/// b1 + i b0 is holomorphic. Closedness is therefore measured as
/// |d(b1 + i b0)/dzbar|; the full exterior derivative on the bundle is never
/// assembled.
struct CalibrationForm {
  ScalarGrid b0;
  ScalarGrid b1;
  ScalarGrid b2;
  double comass_sup = 0.0;
  /// max closedness residual two layers in from the edge.
  double cr_residual_max = 0.0;
  /// max closedness residual on the two outer layers (reported, not gated).
  double cr_residual_boundary = 0.0;
};

/// Coefficients given directly; comass and closedness diagnostics are filled in.
CalibrationForm make_calibration(ScalarGrid b0, ScalarGrid b1, ScalarGrid b2);

/// b = (-A0, -A1, 1) / sqrt(1 + A0^2 + A1^2), the unique unit vector for
/// which the pullback of phi equals vol_X.
CalibrationForm build_calibration(const FieldDerivatives& D);

/// sup over nodes of b0^2 + b1^2 + b2^2. Throws ComassViolation if any node
/// exceeds 1 + tol. A value below 1 - tol is returned as is (not a
/// calibration, but not an error).
double comass_check(const CalibrationForm& phi, double tol = kComassTolerance);

/// |d(b1 + i b0)/dzbar| per node.
ScalarGrid closedness_residual(const CalibrationForm& phi);

/// Pullback X*phi per unit chart area: (-b0 A0 - b1 A1 + b2) lambda.
ScalarGrid pullback_density(const FieldDerivatives& D, const CalibrationForm& phi,
                            const ConformalChart& chart);

struct FundamentalGap {
  double pullback_integral = 0.0;  ///< integral of X'*phi
  double volume = 0.0;             ///< vol(X')
  double gap() const { return volume - pullback_integral; }
};

/// Both sides of  integral X'*phi <= vol(X'). Refuses (ComassViolation) when
/// phi fails the comass check.
FundamentalGap fundamental_gap(const UnitVectorField& X_prime, const CalibrationForm& phi,
                               double comass_tol = kComassTolerance);

/// Closedness threshold for certification: 10 h^2 (1 + max |dA/dz| + |dA/dzbar|)
/// over the interior, i.e. scaled by the field's second derivatives.
double closedness_threshold(const FieldDerivatives& D);

struct Certification {
  double comass_sup = 0.0;
  double cr_residual_max = 0.0;
  double threshold = 0.0;
  bool comass_ok = false;
  bool certified = false;
};

/// Comass within tol of 1 and closedness residual below `threshold`.
Certification certify(const CalibrationForm& phi, double threshold,
                      double comass_tol = kComassTolerance);

/// {comass_sup, cr_residual_max}
nlohmann::json to_json(const CalibrationForm& phi);

}  // namespace vfcal

#endif  // VFCAL_CALIBRATION_HPP_
