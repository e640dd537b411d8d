#ifndef VFCAL_VOLUME_HPP_
#define VFCAL_VOLUME_HPP_

#include "vfcal/chart.hpp"
#include "vfcal/field.hpp"
#include "vfcal/grid.hpp"

#include <nlohmann/json_fwd.hpp>

namespace vfcal {

/// Volume of the section X(M) in the unit tangent bundle with the Sasaki
/// metric, restricted to the chart rectangle.
struct VolumeReport {
  ScalarGrid density;  ///< sqrt(1 + |A|^2) lambda, per unit chart area
  double total = 0.0;
  double base_area = 0.0;  ///< integral of lambda

  double ratio() const { return total / base_area; }
};

ScalarGrid volume_density(const FieldDerivatives& D, const ConformalChart& chart);

VolumeReport total_volume(const UnitVectorField& X);
VolumeReport total_volume(const FieldDerivatives& D, const ConformalChart& chart);

/// {total, base_area, ratio, min_density, max_density}
nlohmann::json to_json(const VolumeReport& report);

}  // namespace vfcal

#endif  // VFCAL_VOLUME_HPP_
