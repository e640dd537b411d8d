#include "vfcal/chart.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace vfcal;

namespace {

const Complex I(0.0, 1.0);

// Gamma = d log(lambda)/dz, differentiated by hand.
Complex half_plane_gamma(Complex z) { return I / z.imag(); }
Complex sphere_gamma(Complex z) { return -2.0 * std::conj(z) / (1.0 + std::norm(z)); }

double interior_error(const ComplexGrid& g, Complex (*exact)(Complex), int margin = 1) {
  return interior_max(make_grid(g.spec(), (g.values() - sample_z(g.spec(), exact).values()).abs()),
                      margin);
}

double curvature_error(const ScalarGrid& K, double exact, int margin = 2) {
  return interior_max(make_grid(K.spec(), K.values() - exact), margin);
}

}  // namespace

TEST_CASE("preset charts") {
  const Lattice unit = Lattice::covering(0, 1, 0, 1, 8);
  CHECK((preset_chart("flat", unit).lambda().values() == 1.0).all());
  CHECK(preset_chart("flat", unit).source() == "preset:flat");

  const ConformalChart hp = preset_chart("half-plane", Lattice::covering(0, 1, 1, 2, 4));
  CHECK(hp.lambda()(0, 2) == doctest::Approx(1.0 / 2.25).epsilon(1e-15));

  const ConformalChart sphere = preset_chart("sphere", Lattice::covering(-1, 1, -1, 1, 4));
  CHECK(sphere.lambda()(4, 4) == doctest::Approx(4.0));  // z = 0

  const ConformalChart disk = preset_chart("hyperbolic-disk", Lattice::covering(-0.5, 0.5, -0.5, 0.5, 8));
  CHECK(disk.lambda()(4, 4) == doctest::Approx(4.0));
}

TEST_CASE("preset domain errors") {
  CHECK_THROWS_AS(preset_chart("hyperbolic-disk", Lattice::covering(-1, 1, -1, 1, 8)), DomainError);
  CHECK_THROWS_AS(preset_chart("hyperbolic-disk", Lattice::covering(0, 0.75, 0, 0.75, 8)),
                  DomainError);  // corner at r^2 = 1.125
  CHECK_THROWS_AS(preset_chart("half-plane", Lattice::covering(0, 1, 0, 1, 8)), DomainError);
  CHECK_THROWS_AS(preset_chart("half-plane", Lattice::covering(0, 1, -1, 1, 8)), DomainError);
  CHECK_THROWS_AS(preset_chart("torus", Lattice::covering(0, 1, 0, 1, 8)), DomainError);
}

TEST_CASE("expression charts") {
  const Lattice s = Lattice::covering(-0.5, 0.5, -0.5, 0.5, 8);
  const ConformalChart c = chart_from_spec("expr:4/(1-r2)^2", s);
  const ConformalChart p = chart_from_spec("preset:hyperbolic-disk", s);
  CHECK((c.lambda().values() - p.lambda().values()).abs().maxCoeff() < 1e-14);
  CHECK(c.source() == "expr:4/(1-r2)^2");

  CHECK_THROWS_AS(chart_from_spec("expr:x", s), DomainError);          // lambda <= 0
  CHECK_THROWS_AS(chart_from_spec("expr:1/(x-x)", s), DomainError);    // not finite
  CHECK_THROWS_AS(chart_from_spec("expr:1+", s), ParseError);
  CHECK_THROWS_AS(chart_from_spec("sphere", s), DomainError);
}

TEST_CASE("gamma examples") {
  SUBCASE("flat") {
    const ComplexGrid G = gamma(preset_chart("flat", Lattice::covering(0, 1, 0, 1, 8)));
    CHECK(G.values().abs().maxCoeff() == 0.0);
  }
  SUBCASE("half-plane: Gamma = i/y, second order") {
    auto err = [](int n) {
      return interior_error(gamma(preset_chart("half-plane", Lattice::covering(0, 1, 1, 2, n))),
                            half_plane_gamma, 0);
    };
    const double e1 = err(32), e2 = err(64);
    CHECK(e1 < 5e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  }
  SUBCASE("sphere: Gamma = -2 conj(z)/(1+|z|^2), second order") {
    auto err = [](int n) {
      return interior_error(gamma(preset_chart("sphere", Lattice::covering(-1, 1, -1, 1, n))),
                            sphere_gamma, 0);
    };
    const double e1 = err(32), e2 = err(64);
    CHECK(e1 < 5e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  }
}

TEST_CASE("gauss curvature of the presets") {
  CHECK(gauss_curvature(preset_chart("flat", Lattice::covering(0, 1, 0, 1, 8))).values().abs().maxCoeff() ==
        0.0);

  struct Case {
    const char* name;
    Lattice (*lattice)(int);
    double K;
  };
  const Case cases[] = {
      {"sphere", [](int n) { return Lattice::covering(-1, 1, -1, 1, n); }, 1.0},
      {"half-plane", [](int n) { return Lattice::covering(0, 1, 1, 2, n); }, -1.0},
      {"hyperbolic-disk", [](int n) { return Lattice::covering(-0.25, 0.25, -0.25, 0.25, 2 * n); }, -1.0},
  };
  for (const Case& c : cases) {
    CAPTURE(std::string(c.name));
    const double e1 = curvature_error(gauss_curvature(preset_chart(c.name, c.lattice(32))), c.K);
    const double e2 = curvature_error(gauss_curvature(preset_chart(c.name, c.lattice(64))), c.K);
    CHECK(e1 < 1e-2);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  }
}

TEST_CASE("curvature through Gamma agrees with the log-lambda route") {
  auto dev = [](int n) {
    const ConformalChart c = preset_chart("sphere", Lattice::covering(0.2, 1.2, -0.5, 0.5, n));
    const ScalarGrid a = gauss_curvature(c);
    const ScalarGrid b = gauss_curvature_from_gamma(c);
    return interior_max(make_grid(a.spec(), a.values() - b.values()), 2);
  };
  const double d1 = dev(32), d2 = dev(64);
  CHECK(d1 < 1e-2);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("curvature is not scale invariant") {
  const Lattice s = Lattice::covering(-0.5, 0.5, -0.5, 0.5, 32);
  const ConformalChart sphere = preset_chart("sphere", s);
  const ConformalChart doubled(make_grid(s, 2.0 * sphere.lambda().values()), "2 sphere");
  const ScalarGrid K1 = gauss_curvature(sphere);
  const ScalarGrid K2 = gauss_curvature(doubled);
  CHECK(curvature_error(K1, 1.0) < 5e-3);
  CHECK(curvature_error(K2, 0.5) < 5e-3);

  const Lattice unit = Lattice::covering(0, 1, 0, 1, 8);
  CHECK(gauss_curvature(chart_from_spec("expr:1", unit)).values().abs().maxCoeff() == 0.0);
  CHECK(gauss_curvature(chart_from_spec("expr:4", unit)).values().abs().maxCoeff() < 1e-12);
}

TEST_CASE("chart requires positive lambda") {
  const Lattice s = Lattice::covering(0, 1, 0, 1, 4);
  CHECK_THROWS_AS(ConformalChart(ScalarGrid(s, 0.0), "zero"), DomainError);
  CHECK_THROWS_AS(ConformalChart(ScalarGrid(s, -1.0), "negative"), DomainError);
  CHECK(base_area(ConformalChart(ScalarGrid(s, 2.0), "two")) == doctest::Approx(2.0));
}
