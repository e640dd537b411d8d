#include "vfcal/chart.hpp"

#include <cmath>

namespace vfcal {

ConformalChart::ConformalChart(ScalarGrid lambda, std::string source)
    : lambda_(std::move(lambda)), source_(std::move(source)) {
  lambda_.spec().validate();
  if (!(lambda_.values() > 0.0).all()) {
    throw DomainError("conformal factor must be positive at every node (" + source_ + ")");
  }
}

namespace {

double corner_max_r2(const Lattice& s) {
  const double xa = std::max(std::abs(s.x0), std::abs(s.x(s.nx - 1)));
  const double ya = std::max(std::abs(s.y0), std::abs(s.y(s.ny - 1)));
  return xa * xa + ya * ya;
}

ScalarGrid sample_checked(const Lattice& spec, const std::string& source, auto&& fn) {
  try {
    return sample(spec, fn);
  } catch (const NonFiniteError&) {
    throw DomainError("conformal factor is not finite on the lattice (" + source + ")");
  }
}

}  // namespace

ConformalChart preset_chart(std::string_view name, const Lattice& spec) {
  spec.validate();
  const std::string source = "preset:" + std::string(name);
  if (name == "flat") {
    return ConformalChart(ScalarGrid(spec, 1.0), source);
  }
  if (name == "sphere") {
    return ConformalChart(sample(spec,
                                 [](double x, double y) {
                                   const double q = 1.0 + x * x + y * y;
                                   return 4.0 / (q * q);
                                 }),
                          source);
  }
  if (name == "hyperbolic-disk") {
    if (corner_max_r2(spec) >= 1.0) {
      throw DomainError("hyperbolic-disk chart requires every node inside r < 1");
    }
    return ConformalChart(sample(spec,
                                 [](double x, double y) {
                                   const double q = 1.0 - x * x - y * y;
                                   return 4.0 / (q * q);
                                 }),
                          source);
  }
  if (name == "half-plane") {
    if (spec.y0 <= 0.0) throw DomainError("half-plane chart requires y > 0 at every node");
    return ConformalChart(sample(spec, [](double, double y) { return 1.0 / (y * y); }), source);
  }
  throw DomainError("unknown preset '" + std::string(name) + "'");
}

ConformalChart expression_chart(const Expression& lambda, const Lattice& spec) {
  spec.validate();
  const std::string source = "expr:" + lambda.text();
  return ConformalChart(
      sample_checked(spec, source, [&](double x, double y) { return lambda.evaluate(x, y); }),
      source);
}

ConformalChart chart_from_spec(std::string_view metric_spec, const Lattice& spec) {
  if (metric_spec.starts_with("preset:")) return preset_chart(metric_spec.substr(7), spec);
  if (metric_spec.starts_with("expr:")) {
    return expression_chart(Expression::parse(metric_spec.substr(5)), spec);
  }
  throw DomainError("metric must be preset:<name> or expr:<text>, got '" +
                    std::string(metric_spec) + "'");
}

ComplexGrid gamma(const ConformalChart& chart) {
  const ComplexGrid dl = wirtinger_dz(chart.lambda());
  return make_grid(chart.spec(), dl.values() / chart.lambda().values().cast<Complex>());
}

ScalarGrid gauss_curvature(const ConformalChart& chart, double imag_tol) {
  const ScalarGrid log_lambda = make_grid(chart.spec(), chart.lambda().values().log());
  const ComplexGrid lap = wirtinger_dzbar(wirtinger_dz(log_lambda));
  const double re_scale = std::max(1.0, lap.values().real().abs().maxCoeff());
  const double im_max = lap.values().imag().abs().maxCoeff();
  if (im_max > imag_tol * re_scale) {
    throw NumericalError("imaginary part of d^2 log(lambda)/dz dzbar is " + std::to_string(im_max));
  }
  return make_grid(chart.spec(), -2.0 * lap.values().real() / chart.lambda().values());
}

ScalarGrid gauss_curvature_from_gamma(const ConformalChart& chart) {
  const ComplexGrid dg = wirtinger_dzbar(gamma(chart));
  return make_grid(chart.spec(), -2.0 * dg.values().real() / chart.lambda().values());
}

double base_area(const ConformalChart& chart) { return integrate(chart.lambda()); }

}  // namespace vfcal
