#ifndef VFCAL_GRID_HPP_
#define VFCAL_GRID_HPP_

#include <Eigen/Core>

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

namespace vfcal {

using Complex = std::complex<double>;

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Uniform square lattice in the chart coordinate z = x + iy.
/// Node (i, j) sits at (x0 + i h, y0 + j h).
struct Lattice {
  double x0 = 0.0;
  double y0 = 0.0;
  int nx = 3;
  int ny = 3;
  double h = 1.0;

  /// Lattice covering [x0, x0 + (nx-1) h] x [y0, y0 + (ny-1) h]; throws
  /// DimensionError unless nx, ny >= 3 and h > 0.
  static Lattice make(double x0, double y0, int nx, int ny, double h);

  /// Lattice with `n` intervals per unit length over [x0,x1]x[y0,y1]. The
  /// rectangle sides must be integer multiples of 1/n.
  static Lattice covering(double x0, double x1, double y0, double y1, int n);

  double x(int i) const { return x0 + i * h; }
  double y(int j) const { return y0 + j * h; }
  Complex z(int i, int j) const { return {x(i), y(j)}; }
  double width() const { return (nx - 1) * h; }
  double height() const { return (ny - 1) * h; }
  long size() const { return static_cast<long>(nx) * ny; }

  void validate() const;

  friend bool operator==(const Lattice&, const Lattice&) = default;
};

std::ostream& operator<<(std::ostream& os, const Lattice& spec);

/// Sampled function on a Lattice. Storage is column-major (nx, ny) so that
/// values(i, j) is the node at x index i, y index j.
template <typename Scalar>
class Grid {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Grid() = default;
  Grid(const Lattice& spec, Array values) : spec_(spec), values_(std::move(values)) {
    if (values_.rows() != spec_.nx || values_.cols() != spec_.ny) {
      throw DimensionError("grid values do not match lattice shape");
    }
    if (!values_.allFinite()) throw NonFiniteError("grid has non-finite samples");
  }
  Grid(const Lattice& spec, Scalar fill)
      : spec_(spec), values_(Array::Constant(spec.nx, spec.ny, fill)) {}

  const Lattice& spec() const { return spec_; }
  const Array& values() const { return values_; }
  Scalar operator()(int i, int j) const { return values_(i, j); }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }

 private:
  Lattice spec_{};
  Array values_{};
};

using ScalarGrid = Grid<double>;
using ComplexGrid = Grid<Complex>;

/// Samples `fn(x, y)` at every node.
template <typename Fn>
auto sample(const Lattice& spec, Fn&& fn) {
  using Scalar = std::decay_t<decltype(fn(0.0, 0.0))>;
  typename Grid<Scalar>::Array values(spec.nx, spec.ny);
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) values(i, j) = fn(spec.x(i), spec.y(j));
  }
  return Grid<Scalar>(spec, std::move(values));
}

/// Samples `fn(z)` with z = x + iy.
template <typename Fn>
ComplexGrid sample_z(const Lattice& spec, Fn&& fn) {
  return sample(spec, [&](double x, double y) { return Complex(fn(Complex(x, y))); });
}

void require_same_lattice(const Lattice& a, const Lattice& b);

template <typename A, typename B>
void require_same_lattice(const Grid<A>& a, const Grid<B>& b) {
  require_same_lattice(a.spec(), b.spec());
}

/// Wraps an Eigen expression back into a grid on `spec`.
template <typename Expr>
auto make_grid(const Lattice& spec, const Eigen::ArrayBase<Expr>& expr) {
  using Scalar = typename Expr::Scalar;
  return Grid<Scalar>(spec, typename Grid<Scalar>::Array(expr));
}

ComplexGrid to_complex(const ScalarGrid& g);
ComplexGrid conj(const ComplexGrid& g);
ScalarGrid real(const ComplexGrid& g);
ScalarGrid imag(const ComplexGrid& g);
ScalarGrid abs(const ComplexGrid& g);
ScalarGrid abs(const ScalarGrid& g);

// Second-order finite differences along one axis: central in the interior,
// 3-point one-sided on the two boundary nodes.
ScalarGrid::Array diff_x(const ScalarGrid::Array& v, double h);
ScalarGrid::Array diff_y(const ScalarGrid::Array& v, double h);
ComplexGrid::Array diff_x(const ComplexGrid::Array& v, double h);
ComplexGrid::Array diff_y(const ComplexGrid::Array& v, double h);

// Transposes of the stencil operators above (used by adjoint gradients).
ComplexGrid::Array diff_x_transpose(const ComplexGrid::Array& v, double h);
ComplexGrid::Array diff_y_transpose(const ComplexGrid::Array& v, double h);

/// d/dz = (d/dx - i d/dy) / 2.
ComplexGrid wirtinger_dz(const ComplexGrid& g);
ComplexGrid wirtinger_dz(const ScalarGrid& g);
/// d/dzbar = (d/dx + i d/dy) / 2.
ComplexGrid wirtinger_dzbar(const ComplexGrid& g);
ComplexGrid wirtinger_dzbar(const ScalarGrid& g);

/// Adjoint (conjugate transpose) of wirtinger_dz with respect to the
/// unweighted inner product sum conj(a) b.
ComplexGrid::Array wirtinger_dz_adjoint(const ComplexGrid::Array& g, double h);

/// Composite trapezoid rule over the lattice rectangle. Summation order is
/// fixed (y outer, x inner) and compensated.
double integrate(const ScalarGrid& density);

/// Trapezoid weight of node (i, j), including the h^2 cell factor.
double trapezoid_weight(const Lattice& spec, int i, int j);
ScalarGrid trapezoid_weights(const Lattice& spec);

double sup_norm(const ScalarGrid& g);

/// max |g| over nodes at least `margin` layers away from the lattice edge.
double interior_max(const ScalarGrid& g, int margin);
/// max |g| over nodes within `margin` layers of the edge.
double boundary_max(const ScalarGrid& g, int margin);

/// CSV dump: header `x,y,value` / `x,y,re,im`, row-major by y then x,
/// 17 significant digits.
void write_csv(std::ostream& os, const ScalarGrid& g, const std::string& value_name = "value");
void write_csv(std::ostream& os, const ComplexGrid& g);
void write_csv(const std::string& path, const ScalarGrid& g, const std::string& value_name = "value");
void write_csv(const std::string& path, const ComplexGrid& g);

/// Reads a real grid dump `x,y,<name>`. The lattice is recovered from the
/// coordinates, which must be row-major by y then x on a uniform square lattice.
ScalarGrid read_scalar_csv(std::istream& is);
ScalarGrid read_scalar_csv(const std::string& path);

}  // namespace vfcal

#endif  // VFCAL_GRID_HPP_
