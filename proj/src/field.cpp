#include "vfcal/field.hpp"

#include <cmath>

namespace vfcal {

UnitVectorField::UnitVectorField(std::shared_ptr<const ConformalChart> chart, ComplexGrid f,
                                 std::optional<ScalarGrid> theta)
    : chart_(std::move(chart)), f_(std::move(f)), theta_(std::move(theta)) {}

UnitVectorField UnitVectorField::from_angle(std::shared_ptr<const ConformalChart> chart,
                                            ScalarGrid theta) {
  require_same_lattice(chart->spec(), theta.spec());
  const auto& t = theta.values();
  const auto inv_sqrt = chart->lambda().values().rsqrt();
  ComplexGrid::Array f(t.rows(), t.cols());
  f.real() = t.cos() * inv_sqrt;
  f.imag() = t.sin() * inv_sqrt;
  ComplexGrid fg(theta.spec(), std::move(f));
  return UnitVectorField(std::move(chart), std::move(fg), std::move(theta));
}

UnitVectorField UnitVectorField::from_coefficient(std::shared_ptr<const ConformalChart> chart,
                                                  ComplexGrid f) {
  require_same_lattice(chart->spec(), f.spec());
  return UnitVectorField(std::move(chart), std::move(f), std::nullopt);
}

ScalarGrid UnitVectorField::theta() const {
  if (theta_) return *theta_;
  return make_grid(spec(), f_.values().arg());
}

UnitVectorField meridian_field(std::shared_ptr<const ConformalChart> chart) {
  const Lattice& s = chart->spec();
  ComplexGrid::Array f(s.nx, s.ny);
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      const Complex z = s.z(i, j);
      const double r = std::abs(z);
      if (r == 0.0) throw DomainError("meridian field is singular at z = 0");
      f(i, j) = (z / r) / std::sqrt(chart->lambda()(i, j));
    }
  }
  ComplexGrid fg(s, std::move(f));
  return UnitVectorField::from_coefficient(std::move(chart), std::move(fg));
}

ComplexGrid meridian_A_exact(const Lattice& spec) {
  return sample_z(spec, [](Complex z) {
    const double r = std::abs(z);
    return Complex((1.0 - r * r) / (2.0 * r), 0.0);
  });
}

FieldDerivatives compute_A(const UnitVectorField& X) {
  const Lattice& s = X.spec();
  const auto& f = X.f().values();
  const auto lambda = X.chart().lambda().values().cast<Complex>();

  const ComplexGrid fbar_z = wirtinger_dz(conj(X.f()));
  ComplexGrid A = make_grid(s, -2.0 * lambda * f.square() * fbar_z.values());

  const ComplexGrid f_z = wirtinger_dz(X.f());
  const ComplexGrid G = gamma(X.chart());
  ComplexGrid A_gamma = make_grid(s, 2.0 * (G.values() * f + f_z.values()));

  const ScalarGrid dev = make_grid(s, (A.values() - A_gamma.values()).abs());

  FieldDerivatives D{
      .A = A,
      .A0 = imag(A),
      .A1 = real(A),
      .absA = abs(A),
      .A_gamma_form = std::move(A_gamma),
      .form_deviation = interior_max(dev, 1),
      .form_deviation_all = sup_norm(dev),
  };
  return D;
}

void compute_epsilons(const UnitVectorField& X, FieldDerivatives& D) {
  require_same_lattice(X.spec(), D.A.spec());
  const Lattice& s = X.spec();
  const auto& f = X.f().values();
  const auto& lam = X.chart().lambda().values();
  const auto lambda = lam.cast<Complex>();

  const auto f_z = wirtinger_dz(X.f()).values();
  const auto f_zbar = wirtinger_dzbar(X.f()).values();
  const auto lambda_z = wirtinger_dz(X.chart().lambda()).values();

  const ComplexGrid::Array common = f * f_z + f.square() / lambda * lambda_z;
  const ComplexGrid::Array tail = f.conjugate() * f_zbar;
  ComplexGrid eps0 = make_grid(s, common + tail);
  ComplexGrid eps1 = make_grid(s, common - tail);

  const ScalarGrid a1 = make_grid(s, (eps1.values() * f.conjugate()).real() * lam);
  const ScalarGrid a0 = make_grid(s, (eps0.values() * f.conjugate()).imag() * lam);
  const double dev1 = interior_max(make_grid(s, a1.values() - D.A1.values()), 1);
  const double dev0 = interior_max(make_grid(s, a0.values() - D.A0.values()), 1);

  D.eps0 = std::move(eps0);
  D.eps1 = std::move(eps1);
  D.eps_route_deviation = std::max(dev0, dev1);
}

ScalarGrid unit_norm_residual(const UnitVectorField& X) {
  const auto& f = X.f().values();
  const auto lambda = X.chart().lambda().values().cast<Complex>();
  const auto f_z = wirtinger_dz(X.f()).values();
  const auto fbar_z = wirtinger_dz(conj(X.f())).values();
  const auto lambda_z = wirtinger_dz(X.chart().lambda()).values();
  return make_grid(X.spec(), (f_z * f.conjugate() * lambda + f * fbar_z * lambda +
                              f * f.conjugate() * lambda_z)
                                 .abs());
}

double unit_norm_defect(const UnitVectorField& X) {
  return (X.f().values().abs2() * X.chart().lambda().values() - 1.0).abs().maxCoeff();
}

}  // namespace vfcal
