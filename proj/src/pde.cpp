#include "vfcal/pde.hpp"

#include "vfcal/volume.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace vfcal {

namespace {

constexpr int kMargin = 2;

double interior_stddev(const ScalarGrid& g, int margin) {
  const auto block = g.values().block(margin, margin, g.nx() - 2 * margin, g.ny() - 2 * margin);
  const double mean = block.mean();
  return std::sqrt((block - mean).square().mean());
}

double interior_stddev(const ComplexGrid& g, int margin) {
  const auto block = g.values().block(margin, margin, g.nx() - 2 * margin, g.ny() - 2 * margin);
  const Complex mean = block.mean();
  return std::sqrt((block - mean).abs2().mean());
}

}  // namespace

ResidualReport minimality_residual(const FieldDerivatives& D) {
  const Lattice& s = D.A.spec();
  const auto& A = D.A.values();
  const ComplexGrid::Array A_zbar = wirtinger_dzbar(D.A).values();
  const ComplexGrid::Array A_z = wirtinger_dz(D.A).values();
  const ComplexGrid::Array absA2_zbar = A.conjugate() * A_zbar + A * A_z.conjugate();
  const ScalarGrid::Array q = 1.0 + A.abs2();

  ResidualReport r;
  r.residual_2_10 = make_grid(s, (2.0 * q.cast<Complex>() * A_zbar - A * absA2_zbar).abs());
  r.residual_holo = make_grid(s, r.residual_2_10.values() / (2.0 * q * q.sqrt()));

  r.max_2_10 = sup_norm(r.residual_2_10);
  r.max_holo = sup_norm(r.residual_holo);
  r.l2_holo = std::sqrt(integrate(make_grid(s, r.residual_holo.values().square())));
  r.interior_max_2_10 = interior_max(r.residual_2_10, kMargin);
  r.interior_max_holo = interior_max(r.residual_holo, kMargin);
  r.boundary_max_holo = boundary_max(r.residual_holo, kMargin);

  const ComplexGrid g = make_grid(s, A / q.sqrt().cast<Complex>());
  r.interior_max_holo_direct = interior_max(abs(wirtinger_dzbar(g)), kMargin);
  return r;
}

double default_minimality_tolerance(const FieldDerivatives& D) {
  const double h = D.A.spec().h;
  return 50.0 * h * h * (1.0 + D.A.values().abs2().maxCoeff());
}

MinimalityVerdict is_minimal(const FieldDerivatives& D, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("minimality tolerance must be positive");
  MinimalityVerdict v{.tol = tol, .report = minimality_residual(D)};
  v.minimal = v.report.interior_max_holo < tol;
  if (v.minimal) v.calibration = build_calibration(D);
  return v;
}

ConstantADiagnosis constant_A_diagnosis(const FieldDerivatives& D, const ConformalChart& chart,
                                        double tol) {
  ConstantADiagnosis d;
  const int margin = kMargin;
  d.mean_absA = D.absA.values()
                    .block(margin, margin, D.absA.nx() - 2 * margin, D.absA.ny() - 2 * margin)
                    .mean();
  d.stddev_absA = interior_stddev(D.absA, margin);
  d.stddev_A = interior_stddev(D.A, margin);
  if (d.stddev_absA >= tol * (1.0 + d.mean_absA)) {
    d.explanation = "|A| is not constant (stddev " + std::to_string(d.stddev_absA) + ")";
    return d;
  }
  d.applicable = true;
  d.implied_K = -d.mean_absA * d.mean_absA;
  const ScalarGrid K = gauss_curvature(chart);
  d.max_curvature_deviation =
      interior_max(make_grid(K.spec(), K.values() - d.implied_K), margin);
  const VolumeReport vol = total_volume(D, chart);
  d.total_volume = vol.total;
  d.ratio = vol.ratio();
  d.predicted_ratio = std::sqrt(1.0 - d.implied_K);
  d.predicted_volume = d.predicted_ratio * vol.base_area;
  d.explanation = "|A| constant: implied K = -|A|^2";
  return d;
}

nlohmann::json to_json(const ResidualReport& report, const std::string& verdict) {
  return {
      {"max_2_10", report.max_2_10},
      {"max_holo", report.max_holo},
      {"l2_holo", report.l2_holo},
      {"interior_max_holo", report.interior_max_holo},
      {"interior_max_2_10", report.interior_max_2_10},
      {"boundary_max_holo", report.boundary_max_holo},
      {"interior_max_holo_direct", report.interior_max_holo_direct},
      {"verdict", verdict},
  };
}

nlohmann::json to_json(const ConstantADiagnosis& d) {
  nlohmann::json j{
      {"applicable", d.applicable},
      {"explanation", d.explanation},
      {"mean_absA", d.mean_absA},
      {"stddev_absA", d.stddev_absA},
  };
  if (d.applicable) {
    j["stddev_A"] = d.stddev_A;
    j["implied_K"] = d.implied_K;
    j["max_curvature_deviation"] = d.max_curvature_deviation;
    j["predicted_volume"] = d.predicted_volume;
    j["total_volume"] = d.total_volume;
    j["predicted_ratio"] = d.predicted_ratio;
    j["ratio"] = d.ratio;
  }
  return j;
}

}  // namespace vfcal
