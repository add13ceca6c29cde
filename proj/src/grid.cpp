#include "bpfsim/grid.hpp"

#include <algorithm>
#include <cmath>

namespace bpfsim {

Grid1D::Grid1D(double x_min_, double x_max_, int n_cells_)
    : x_min(x_min_), x_max(x_max_), n_cells(n_cells_) {
  if (!(x_min < x_max)) throw std::invalid_argument("Grid1D: x_min must be < x_max");
  if (n_cells < 4) throw std::invalid_argument("Grid1D: n_cells must be >= 4");
  dx = (x_max - x_min) / n_cells;
}

Field::Field(const Grid1D& grid, std::vector<double> values)
    : grid_(grid), v_(std::move(values)) {
  if (static_cast<int>(v_.size()) != grid_.n_nodes())
    throw std::invalid_argument("Field: value count must equal node count");
  if (!all_finite(v_)) throw std::invalid_argument("Field: non-finite entry");
}

double trapezoid(std::span<const double> v, double dx) {
  const std::size_t n = v.size();
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) acc += v[i];
  acc += 0.5 * (v[0] + v[n - 1]);
  return acc * dx;
}

double integrate(const Field& f) { return trapezoid(f.values(), f.grid().dx); }

Field central_diff(const Field& f) {
  const int n = f.grid().n_cells;
  const double inv2dx = 1.0 / (2.0 * f.grid().dx);
  Field out(f.grid());
  for (int i = 1; i < n; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv2dx;
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2dx;
  out[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) * inv2dx;
  return out;
}

Field second_diff(const Field& f, const GhostPair& ghosts) {
  const int n = f.grid().n_cells;
  const double invdx2 = 1.0 / (f.grid().dx * f.grid().dx);
  Field out(f.grid());
  // (v[i+1] + v[i-1]) - 2 v[i]: the symmetric grouping keeps mirror-image
  // data exactly mirror-symmetric in floating point.
  for (int i = 1; i < n; ++i) out[i] = ((f[i + 1] + f[i - 1]) - 2.0 * f[i]) * invdx2;
  out[0] = ((f[1] + ghosts.left) - 2.0 * f[0]) * invdx2;
  out[n] = ((ghosts.right + f[n - 1]) - 2.0 * f[n]) * invdx2;
  return out;
}

GhostPair mirror_ghosts(const Field& f) {
  const int n = f.grid().n_cells;
  return GhostPair{f[1], f[n - 1]};
}

Field shift(const Field& f, int offset_nodes) {
  const int n = f.grid().n_cells;
  if (offset_nodes > n || offset_nodes < -n)
    throw std::invalid_argument("shift: |offset_nodes| must be <= n_cells");
  Field out(f.grid());
  const int lo = std::max(0, -offset_nodes);
  const int hi = std::min(n, n - offset_nodes);
  for (int i = lo; i <= hi; ++i) out[i] = f[i + offset_nodes];
  return out;
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out(a.grid());
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out(a.grid());
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Field operator*(double s, const Field& a) {
  Field out(a.grid());
  for (int i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

Field nodewise_product(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out(a.grid());
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double min_value(const Field& f) {
  double m = f[0];
  for (double v : f.values()) m = std::min(m, v);
  return m;
}

double max_value(const Field& f) {
  double m = f[0];
  for (double v : f.values()) m = std::max(m, v);
  return m;
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("fields must share one grid");
}

double interpolate(const Field& f, double x) {
  const Grid1D& g = f.grid();
  double s = (x - g.x_min) / g.dx;
  if (s <= 0.0) return f[0];
  if (s >= g.n_cells) return f[g.n_cells];
  int j = static_cast<int>(s);
  if (j >= g.n_cells) j = g.n_cells - 1;
  double w = s - j;
  return (1.0 - w) * f[j] + w * f[j + 1];
}

}  // namespace bpfsim
