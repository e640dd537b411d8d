#include "vfcal/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace vfcal {

Lattice Lattice::make(double x0, double y0, int nx, int ny, double h) {
  Lattice spec{x0, y0, nx, ny, h};
  spec.validate();
  return spec;
}

Lattice Lattice::covering(double x0, double x1, double y0, double y1, int n) {
  if (n <= 0) throw DimensionError("intervals per unit must be positive");
  const double cx = (x1 - x0) * n;
  const double cy = (y1 - y0) * n;
  const long ix = std::lround(cx);
  const long iy = std::lround(cy);
  if (std::abs(cx - ix) > 1e-9 || std::abs(cy - iy) > 1e-9) {
    throw DimensionError("rectangle sides are not multiples of the spacing");
  }
  return make(x0, y0, static_cast<int>(ix) + 1, static_cast<int>(iy) + 1, 1.0 / n);
}

void Lattice::validate() const {
  if (nx < 3 || ny < 3) {
    throw DimensionError("lattice needs at least 3 nodes per axis, got " + std::to_string(nx) +
                         "x" + std::to_string(ny));
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw DimensionError("lattice spacing must be positive");
  if (!std::isfinite(x0) || !std::isfinite(y0)) throw DimensionError("lattice origin must be finite");
}

std::ostream& operator<<(std::ostream& os, const Lattice& spec) {
  return os << "Lattice{x0=" << spec.x0 << ", y0=" << spec.y0 << ", nx=" << spec.nx
            << ", ny=" << spec.ny << ", h=" << spec.h << "}";
}

void require_same_lattice(const Lattice& a, const Lattice& b) {
  if (!(a == b)) throw DimensionError("grids live on different lattices");
}

ComplexGrid to_complex(const ScalarGrid& g) {
  return make_grid(g.spec(), g.values().cast<Complex>());
}

ComplexGrid conj(const ComplexGrid& g) { return make_grid(g.spec(), g.values().conjugate()); }
ScalarGrid real(const ComplexGrid& g) { return make_grid(g.spec(), g.values().real()); }
ScalarGrid imag(const ComplexGrid& g) { return make_grid(g.spec(), g.values().imag()); }
ScalarGrid abs(const ComplexGrid& g) { return make_grid(g.spec(), g.values().abs()); }
ScalarGrid abs(const ScalarGrid& g) { return make_grid(g.spec(), g.values().abs()); }

namespace {

void require_stencil_size(Eigen::Index n) {
  if (n < 3) throw DimensionError("finite differences need at least 3 nodes per axis");
}

// Derivative along the first index (x).
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> diff_rows(
    const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& v, double h) {
  const Eigen::Index n = v.rows();
  require_stencil_size(n);
  const double s = 1.0 / (2.0 * h);
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> d(n, v.cols());
  d.row(0) = (-3.0 * v.row(0) + 4.0 * v.row(1) - v.row(2)) * s;
  d.middleRows(1, n - 2) = (v.bottomRows(n - 2) - v.topRows(n - 2)) * s;
  d.row(n - 1) = (3.0 * v.row(n - 1) - 4.0 * v.row(n - 2) + v.row(n - 3)) * s;
  return d;
}

template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> diff_cols(
    const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& v, double h) {
  const Eigen::Index n = v.cols();
  require_stencil_size(n);
  const double s = 1.0 / (2.0 * h);
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> d(v.rows(), n);
  d.col(0) = (-3.0 * v.col(0) + 4.0 * v.col(1) - v.col(2)) * s;
  d.middleCols(1, n - 2) = (v.rightCols(n - 2) - v.leftCols(n - 2)) * s;
  d.col(n - 1) = (3.0 * v.col(n - 1) - 4.0 * v.col(n - 2) + v.col(n - 3)) * s;
  return d;
}

// Transpose of diff_rows: scatter each output row back onto its stencil.
ComplexGrid::Array diff_rows_transpose(const ComplexGrid::Array& w, double h) {
  const Eigen::Index n = w.rows();
  require_stencil_size(n);
  const double s = 1.0 / (2.0 * h);
  ComplexGrid::Array t = ComplexGrid::Array::Zero(n, w.cols());
  t.row(0) += -3.0 * s * w.row(0);
  t.row(1) += 4.0 * s * w.row(0);
  t.row(2) += -s * w.row(0);
  t.bottomRows(n - 2) += s * w.middleRows(1, n - 2);
  t.topRows(n - 2) -= s * w.middleRows(1, n - 2);
  t.row(n - 1) += 3.0 * s * w.row(n - 1);
  t.row(n - 2) += -4.0 * s * w.row(n - 1);
  t.row(n - 3) += s * w.row(n - 1);
  return t;
}

}  // namespace

ScalarGrid::Array diff_x(const ScalarGrid::Array& v, double h) { return diff_rows(v, h); }
ScalarGrid::Array diff_y(const ScalarGrid::Array& v, double h) { return diff_cols(v, h); }
ComplexGrid::Array diff_x(const ComplexGrid::Array& v, double h) { return diff_rows(v, h); }
ComplexGrid::Array diff_y(const ComplexGrid::Array& v, double h) { return diff_cols(v, h); }

ComplexGrid::Array diff_x_transpose(const ComplexGrid::Array& v, double h) {
  return diff_rows_transpose(v, h);
}

ComplexGrid::Array diff_y_transpose(const ComplexGrid::Array& v, double h) {
  return diff_rows_transpose(v.transpose(), h).transpose();
}

ComplexGrid wirtinger_dz(const ComplexGrid& g) {
  g.spec().validate();
  const double h = g.spec().h;
  const Complex i(0.0, 1.0);
  return make_grid(g.spec(), 0.5 * (diff_x(g.values(), h) - i * diff_y(g.values(), h)));
}

ComplexGrid wirtinger_dzbar(const ComplexGrid& g) {
  g.spec().validate();
  const double h = g.spec().h;
  const Complex i(0.0, 1.0);
  return make_grid(g.spec(), 0.5 * (diff_x(g.values(), h) + i * diff_y(g.values(), h)));
}

ComplexGrid wirtinger_dz(const ScalarGrid& g) { return wirtinger_dz(to_complex(g)); }
ComplexGrid wirtinger_dzbar(const ScalarGrid& g) { return wirtinger_dzbar(to_complex(g)); }

ComplexGrid::Array wirtinger_dz_adjoint(const ComplexGrid::Array& g, double h) {
  // (Dx - i Dy)/2 with real Dx, Dy has adjoint (Dx^T + i Dy^T)/2.
  const Complex i(0.0, 1.0);
  return 0.5 * (diff_x_transpose(g, h) + i * diff_y_transpose(g, h));
}

double trapezoid_weight(const Lattice& spec, int i, int j) {
  const double wx = (i == 0 || i == spec.nx - 1) ? 0.5 : 1.0;
  const double wy = (j == 0 || j == spec.ny - 1) ? 0.5 : 1.0;
  return wx * wy * spec.h * spec.h;
}

ScalarGrid trapezoid_weights(const Lattice& spec) {
  ScalarGrid::Array w(spec.nx, spec.ny);
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) w(i, j) = trapezoid_weight(spec, i, j);
  }
  return ScalarGrid(spec, std::move(w));
}

double integrate(const ScalarGrid& density) {
  const Lattice& spec = density.spec();
  // Neumaier summation.
  double sum = 0.0;
  double comp = 0.0;
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      const double term = trapezoid_weight(spec, i, j) * density(i, j);
      const double t = sum + term;
      if (std::abs(sum) >= std::abs(term)) {
        comp += (sum - t) + term;
      } else {
        comp += (term - t) + sum;
      }
      sum = t;
    }
  }
  return sum + comp;
}

double sup_norm(const ScalarGrid& g) { return g.values().abs().maxCoeff(); }

double interior_max(const ScalarGrid& g, int margin) {
  const int nx = g.nx() - 2 * margin;
  const int ny = g.ny() - 2 * margin;
  if (nx <= 0 || ny <= 0) throw DimensionError("lattice has no interior at this margin");
  return g.values().block(margin, margin, nx, ny).abs().maxCoeff();
}

double boundary_max(const ScalarGrid& g, int margin) {
  double m = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const bool inner = i >= margin && j >= margin && i < g.nx() - margin && j < g.ny() - margin;
      if (!inner) m = std::max(m, std::abs(g(i, j)));
    }
  }
  return m;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

}  // namespace

void write_csv(std::ostream& os, const ScalarGrid& g, const std::string& value_name) {
  const Lattice& s = g.spec();
  os << "x,y," << value_name << '\n';
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      os << fmt17(s.x(i)) << ',' << fmt17(s.y(j)) << ',' << fmt17(g(i, j)) << '\n';
    }
  }
}

void write_csv(std::ostream& os, const ComplexGrid& g) {
  const Lattice& s = g.spec();
  os << "x,y,re,im\n";
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      os << fmt17(s.x(i)) << ',' << fmt17(s.y(j)) << ',' << fmt17(g(i, j).real()) << ','
         << fmt17(g(i, j).imag()) << '\n';
    }
  }
}

void write_csv(const std::string& path, const ScalarGrid& g, const std::string& value_name) {
  auto os = open_out(path);
  write_csv(os, g, value_name);
}

void write_csv(const std::string& path, const ComplexGrid& g) {
  auto os = open_out(path);
  write_csv(os, g);
}

ScalarGrid read_scalar_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty grid CSV");
  std::vector<double> xs, ys, vs;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    double row[3];
    for (double& r : row) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error("grid CSV line " + std::to_string(lineno) + ": expected 3 columns");
      }
      try {
        r = std::stod(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("grid CSV line " + std::to_string(lineno) + ": bad number '" +
                                 cell + "'");
      }
    }
    xs.push_back(row[0]);
    ys.push_back(row[1]);
    vs.push_back(row[2]);
  }
  if (xs.size() < 9) throw DimensionError("grid CSV has fewer than 3x3 nodes");

  int nx = 1;
  while (nx < static_cast<int>(ys.size()) && ys[nx] == ys[0]) ++nx;
  if (xs.size() % nx != 0) throw DimensionError("grid CSV is not a full rectangle");
  const int ny = static_cast<int>(xs.size() / nx);
  const double h = xs[1] - xs[0];
  const Lattice spec = Lattice::make(xs[0], ys[0], nx, ny, h);

  ScalarGrid::Array values(nx, ny);
  const double tol = 1e-9 * std::max(1.0, h);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      if (std::abs(xs[k] - spec.x(i)) > tol || std::abs(ys[k] - spec.y(j)) > tol) {
        throw DimensionError("grid CSV coordinates are not a uniform square lattice");
      }
      values(i, j) = vs[k];
    }
  }
  return ScalarGrid(spec, std::move(values));
}

ScalarGrid read_scalar_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_scalar_csv(is);
}

}  // namespace vfcal
