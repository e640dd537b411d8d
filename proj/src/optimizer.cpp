#include "vfcal/optimizer.hpp"

#include "vfcal/calibration.hpp"
#include "vfcal/field.hpp"
#include "vfcal/volume.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace vfcal {

void MinimizeOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("shrink must lie in (0, 1)");
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("armijo_c must lie in (0, 1)");
  if (max_backtracks < 1) throw std::invalid_argument("max_backtracks must be >= 1");
}

double energy(const ScalarGrid& theta, std::shared_ptr<const ConformalChart> chart) {
  return total_volume(UnitVectorField::from_angle(std::move(chart), theta)).total;
}

namespace {

// Second-order first-derivative stencil along an axis of n nodes: central in
// the interior, 3-point one-sided at the ends (same as diff_x / diff_y).
struct Stencil {
  int idx[3];
  double c[3];
  int len;
};

Stencil stencil(int k, int n) {
  if (k == 0) return {{0, 1, 2}, {-3.0, 4.0, -1.0}, 3};
  if (k == n - 1) return {{n - 1, n - 2, n - 3}, {3.0, -4.0, 1.0}, 3};
  return {{k + 1, k - 1, 0}, {1.0, -1.0, 0.0}, 2};
}

}  // namespace

double energy_and_gradient(const ScalarGrid& theta, const ConformalChart& chart,
                           ScalarGrid& gradient) {
  require_same_lattice(theta.spec(), chart.spec());
  const Lattice& s = theta.spec();
  const int nx = s.nx, ny = s.ny;
  const auto& t = theta.values();
  const auto& lam = chart.lambda().values();
  const double half_s = 0.25 / s.h;  // 1/2 (Wirtinger) times 1/(2h) (stencil)

  // With f = exp(i theta)/sqrt(lambda): A = -2 exp(2 i theta) v, v = d(conj f)/dz,
  // so the energy is sum_n W_n lambda_n sqrt(1 + 4 |v_n|^2).
  ComplexGrid::Array u(nx, ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double r = 1.0 / std::sqrt(lam(i, j));
      u(i, j) = Complex(std::cos(t(i, j)) * r, -std::sin(t(i, j)) * r);
    }
  }

  std::vector<Stencil> sx(nx), sy(ny);
  for (int i = 0; i < nx; ++i) sx[i] = stencil(i, nx);
  for (int j = 0; j < ny; ++j) sy[j] = stencil(j, ny);

  ScalarGrid::Array density(nx, ny);
  ComplexGrid::Array G(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const Stencil& b = sy[j];
    for (int i = 0; i < nx; ++i) {
      const Stencil& a = sx[i];
      Complex dx = 0.0, dy = 0.0;
      for (int k = 0; k < a.len; ++k) dx += a.c[k] * u(a.idx[k], j);
      for (int k = 0; k < b.len; ++k) dy += b.c[k] * u(i, b.idx[k]);
      // v = (Dx - i Dy) u / 2
      const Complex v = half_s * Complex(dx.real() + dy.imag(), dx.imag() - dy.real());
      const double root = std::sqrt(1.0 + 4.0 * std::norm(v));
      density(i, j) = lam(i, j) * root;
      // dE = Re sum conj(G) dv with G = 4 W lambda v / root
      G(i, j) = (4.0 * trapezoid_weight(s, i, j) * lam(i, j) / root) * v;
    }
  }
  const double value = integrate(ScalarGrid(s, std::move(density)));

  // P = Dz^H G = (Dx^T + i Dy^T) G / 2, scattered stencil by stencil.
  ComplexGrid::Array P = ComplexGrid::Array::Zero(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const Stencil& b = sy[j];
    for (int i = 0; i < nx; ++i) {
      const Stencil& a = sx[i];
      const Complex g = half_s * G(i, j);
      const Complex ig(-g.imag(), g.real());
      for (int k = 0; k < a.len; ++k) P(a.idx[k], j) += a.c[k] * g;
      for (int k = 0; k < b.len; ++k) P(i, b.idx[k]) += b.c[k] * ig;
    }
  }

  // dv = Dz du, du = -i u dtheta: dE/dtheta = Re(conj(P) (-i) u) = Im(conj(P) u)
  ScalarGrid::Array g = ScalarGrid::Array::Zero(nx, ny);
  for (int j = 1; j < ny - 1; ++j) {
    for (int i = 1; i < nx - 1; ++i) g(i, j) = P(i, j).real() * u(i, j).imag() - P(i, j).imag() * u(i, j).real();
  }
  gradient = ScalarGrid(s, std::move(g));
  return value;
}

ScalarGrid energy_gradient(const ScalarGrid& theta, const ConformalChart& chart) {
  ScalarGrid g;
  energy_and_gradient(theta, chart, g);
  return g;
}

ScalarGrid random_interior(const ScalarGrid& boundary, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarGrid::Array v = boundary.values();
  for (int j = 1; j < boundary.ny() - 1; ++j) {
    for (int i = 1; i < boundary.nx() - 1; ++i) {
      // Explicit affine map of the raw 53-bit draw keeps runs reproducible
      // across standard libraries.
      const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      v(i, j) += amplitude * (2.0 * unit - 1.0);
    }
  }
  return ScalarGrid(boundary.spec(), std::move(v));
}

namespace {

double interior_max_norm(const ScalarGrid& g) { return interior_max(g, 1); }

void finalize(MinimizeResult& r, const std::shared_ptr<const ConformalChart>& chart) {
  const UnitVectorField X = UnitVectorField::from_angle(chart, r.theta);
  const FieldDerivatives D = compute_A(X);
  r.final_residual = minimality_residual(D);
  const CalibrationForm phi = build_calibration(D);
  const VolumeReport vol = total_volume(D, *chart);
  r.volume = vol.total;
  r.bound_gap = vol.total - integrate(pullback_density(D, phi, *chart));
  r.cr_residual_max = phi.cr_residual_max;
}

}  // namespace

MinimizeResult minimize(std::shared_ptr<const ConformalChart> chart, const ScalarGrid& initial,
                        const MinimizeOptions& opts) {
  opts.validate();
  require_same_lattice(initial.spec(), chart->spec());

  MinimizeResult r;
  ScalarGrid theta = initial;
  ScalarGrid grad;
  double value = energy_and_gradient(theta, *chart, grad);

  ScalarGrid::Array prev_theta, prev_grad;
  bool have_prev = false;
  int iter = 0;
  for (;; ++iter) {
    const double gnorm = interior_max_norm(grad);
    r.volume_trace.push_back(value);
    r.trace.push_back({iter, value, gnorm});
    if (gnorm < opts.grad_tol) {
      r.converged = true;
      break;
    }
    if (iter >= opts.max_iters) break;

    double step = opts.initial_step;
    if (opts.bb_step && have_prev) {
      const ScalarGrid::Array s = theta.values() - prev_theta;
      const ScalarGrid::Array y = grad.values() - prev_grad;
      const double sy = (s * y).sum();
      if (sy > 0.0) step = (s * s).sum() / sy;
    }

    const double g2 = grad.values().square().sum();
    bool accepted = false;
    for (int k = 0; k < opts.max_backtracks; ++k) {
      ScalarGrid trial(theta.spec(), theta.values() - step * grad.values());
      ScalarGrid trial_grad;
      const double trial_value = energy_and_gradient(trial, *chart, trial_grad);
      if (trial_value <= value - opts.armijo_c * step * g2) {
        prev_theta = theta.values();
        prev_grad = grad.values();
        have_prev = true;
        theta = std::move(trial);
        grad = std::move(trial_grad);
        value = trial_value;
        accepted = true;
        break;
      }
      step *= opts.shrink;
    }
    if (!accepted) {
      r.theta = theta;
      r.iterations = iter;
      finalize(r, chart);
      throw LineSearchError("line search failed at iteration " + std::to_string(iter) +
                                " (grad max-norm " + std::to_string(gnorm) + ")",
                            std::move(r));
    }
  }

  r.theta = std::move(theta);
  r.iterations = iter;
  finalize(r, chart);
  return r;
}

}  // namespace vfcal
