#include "vfcal/volume.hpp"

#include <nlohmann/json.hpp>

namespace vfcal {

ScalarGrid volume_density(const FieldDerivatives& D, const ConformalChart& chart) {
  require_same_lattice(D.A.spec(), chart.spec());
  return make_grid(chart.spec(), (1.0 + D.A.values().abs2()).sqrt() * chart.lambda().values());
}

VolumeReport total_volume(const FieldDerivatives& D, const ConformalChart& chart) {
  VolumeReport r{.density = volume_density(D, chart)};
  r.total = integrate(r.density);
  r.base_area = base_area(chart);
  return r;
}

VolumeReport total_volume(const UnitVectorField& X) {
  return total_volume(compute_A(X), X.chart());
}

nlohmann::json to_json(const VolumeReport& report) {
  return {
      {"total", report.total},
      {"base_area", report.base_area},
      {"ratio", report.ratio()},
      {"min_density", report.density.values().minCoeff()},
      {"max_density", report.density.values().maxCoeff()},
  };
}

}  // namespace vfcal
