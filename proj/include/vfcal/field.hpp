#ifndef VFCAL_FIELD_HPP_
#define VFCAL_FIELD_HPP_

#include "vfcal/chart.hpp"
#include "vfcal/grid.hpp"

#include <memory>
#include <optional>

namespace vfcal {

/// Unit vector field X = f d/dz + conj(f) d/dzbar on a chart. Fields built
/// from an angle carry theta and satisfy |f|^2 lambda = 1 to rounding.
class UnitVectorField {
 public:
  /// f = exp(i theta) / sqrt(lambda).
  static UnitVectorField from_angle(std::shared_ptr<const ConformalChart> chart, ScalarGrid theta);

  /// Uses `f` as given, without normalizing it. Intended for fields with a
  /// closed-form coefficient and for negative tests of the unit-norm checks.
  static UnitVectorField from_coefficient(std::shared_ptr<const ConformalChart> chart,
                                          ComplexGrid f);

  const ConformalChart& chart() const { return *chart_; }
  const std::shared_ptr<const ConformalChart>& chart_ptr() const { return chart_; }
  const Lattice& spec() const { return f_.spec(); }
  const ComplexGrid& f() const { return f_; }

  /// The angle grid the field was built from, or arg(f) (principal branch)
  /// for coefficient-built fields.
  ScalarGrid theta() const;
  bool has_theta() const { return theta_.has_value(); }

 private:
  UnitVectorField(std::shared_ptr<const ConformalChart> chart, ComplexGrid f,
                  std::optional<ScalarGrid> theta);

  std::shared_ptr<const ConformalChart> chart_;
  ComplexGrid f_;
  std::optional<ScalarGrid> theta_;
};

/// Field tangent to the directed meridians of the round sphere, in the
/// stereographic chart: f = (z/|z|) / sqrt(lambda). The chart rectangle must
/// not contain z = 0.
UnitVectorField meridian_field(std::shared_ptr<const ConformalChart> chart);

/// Closed form of A for the meridian field on the sphere preset:
/// (1 - |z|^2) / (2|z|).
ComplexGrid meridian_A_exact(const Lattice& spec);

/// First-order invariants of a unit field. A = A1 + i A0 with
/// A0 = <nabla_X X, Y>, A1 = <nabla_Y X, Y> and Y = iX.
struct FieldDerivatives {
  ComplexGrid A;
  ScalarGrid A0;
  ScalarGrid A1;
  ScalarGrid absA;

  /// A from the Christoffel route 2(Gamma f + df/dz).
  ComplexGrid A_gamma_form;
  /// max |A - A_gamma_form| over nodes one layer in from the edge.
  double form_deviation = 0.0;
  /// Same, over the whole lattice (boundary stencils included).
  double form_deviation_all = 0.0;

  /// Filled by compute_epsilons.
  std::optional<ComplexGrid> eps0 = std::nullopt;
  std::optional<ComplexGrid> eps1 = std::nullopt;
  /// max deviation of (eps-route A1, A0) from (A1, A0), one layer in.
  std::optional<double> eps_route_deviation = std::nullopt;
};

/// A = -2 lambda f^2 d(conj f)/dz. The alternative 2(Gamma f + df/dz) is
/// evaluated too and its deviation recorded.
FieldDerivatives compute_A(const UnitVectorField& X);

/// eps0 = f f_z + (f^2/lambda) lambda_z + conj(f) f_zbar,
/// eps1 = f f_z + (f^2/lambda) lambda_z - conj(f) f_zbar,
/// so that nabla_X X = eps0 d/dz + c.c. and nabla_Y X = i eps1 d/dz + c.c.
/// Cross-checks A1 = Re(eps1 conj f) lambda and A0 = Im(eps0 conj f) lambda.
void compute_epsilons(const UnitVectorField& X, FieldDerivatives& D);

/// |f_z conj(f) lambda + f conj(f)_z lambda + f conj(f) lambda_z| per node.
ScalarGrid unit_norm_residual(const UnitVectorField& X);

/// max | |f|^2 lambda - 1 | over nodes.
double unit_norm_defect(const UnitVectorField& X);

}  // namespace vfcal

#endif  // VFCAL_FIELD_HPP_
