#include "vfcal/calibration.hpp"

#include "vfcal/volume.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>

namespace vfcal {

namespace {

constexpr int kSecondOrderMargin = 2;

ScalarGrid comass_density(const CalibrationForm& phi) {
  return make_grid(phi.b0.spec(),
                   phi.b0.values().square() + phi.b1.values().square() + phi.b2.values().square());
}

}  // namespace

CalibrationForm make_calibration(ScalarGrid b0, ScalarGrid b1, ScalarGrid b2) {
  require_same_lattice(b0, b1);
  require_same_lattice(b0, b2);
  CalibrationForm phi{.b0 = std::move(b0), .b1 = std::move(b1), .b2 = std::move(b2)};
  phi.comass_sup = sup_norm(comass_density(phi));
  const ScalarGrid cr = closedness_residual(phi);
  phi.cr_residual_max = interior_max(cr, kSecondOrderMargin);
  phi.cr_residual_boundary = boundary_max(cr, kSecondOrderMargin);
  return phi;
}

CalibrationForm build_calibration(const FieldDerivatives& D) {
  const Lattice& s = D.A.spec();
  const ScalarGrid::Array norm = (1.0 + D.A.values().abs2()).sqrt();
  return make_calibration(make_grid(s, -D.A0.values() / norm), make_grid(s, -D.A1.values() / norm),
                          make_grid(s, 1.0 / norm));
}

double comass_check(const CalibrationForm& phi, double tol) {
  const double sup = sup_norm(comass_density(phi));
  if (sup > 1.0 + tol) {
    throw ComassViolation("comass violated: sup(b0^2 + b1^2 + b2^2) = " + std::to_string(sup));
  }
  return sup;
}

ScalarGrid closedness_residual(const CalibrationForm& phi) {
  ComplexGrid::Array w(phi.b1.nx(), phi.b1.ny());
  w.real() = phi.b1.values();
  w.imag() = phi.b0.values();
  return abs(wirtinger_dzbar(ComplexGrid(phi.b1.spec(), std::move(w))));
}

ScalarGrid pullback_density(const FieldDerivatives& D, const CalibrationForm& phi,
                            const ConformalChart& chart) {
  require_same_lattice(D.A.spec(), phi.b0.spec());
  require_same_lattice(D.A.spec(), chart.spec());
  return make_grid(chart.spec(), (-phi.b0.values() * D.A0.values() -
                                  phi.b1.values() * D.A1.values() + phi.b2.values()) *
                                     chart.lambda().values());
}

FundamentalGap fundamental_gap(const UnitVectorField& X_prime, const CalibrationForm& phi,
                               double comass_tol) {
  comass_check(phi, comass_tol);
  const FieldDerivatives D = compute_A(X_prime);
  return {
      .pullback_integral = integrate(pullback_density(D, phi, X_prime.chart())),
      .volume = total_volume(D, X_prime.chart()).total,
  };
}

double closedness_threshold(const FieldDerivatives& D) {
  const ScalarGrid second =
      make_grid(D.A.spec(), wirtinger_dz(D.A).values().abs() + wirtinger_dzbar(D.A).values().abs());
  const double h = D.A.spec().h;
  return 10.0 * h * h * (1.0 + interior_max(second, kSecondOrderMargin));
}

Certification certify(const CalibrationForm& phi, double threshold, double comass_tol) {
  Certification c{.cr_residual_max = phi.cr_residual_max, .threshold = threshold};
  try {
    c.comass_sup = comass_check(phi, comass_tol);
    c.comass_ok = std::abs(c.comass_sup - 1.0) <= comass_tol;
  } catch (const ComassViolation&) {
    c.comass_sup = phi.comass_sup;
    c.comass_ok = false;
  }
  c.certified = c.comass_ok && c.cr_residual_max < threshold;
  return c;
}

nlohmann::json to_json(const CalibrationForm& phi) {
  return {{"comass_sup", phi.comass_sup}, {"cr_residual_max", phi.cr_residual_max}};
}

}  // namespace vfcal
