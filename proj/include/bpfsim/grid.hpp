#pragma once

#include <span>
#include <vector>

#include "bpfsim/errors.hpp"

namespace bpfsim {

/// Uniform node-centered grid on [x_min, x_max]: n_cells equal subintervals,
/// n_cells + 1 nodes including both endpoints.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int n_cells = 0;
  double dx = 0.0;

  Grid1D() = default;
  Grid1D(double x_min_, double x_max_, int n_cells_);

  int n_nodes() const { return n_cells + 1; }
  double node(int i) const { return x_min + i * dx; }
  double length() const { return x_max - x_min; }

  friend bool operator==(const Grid1D& a, const Grid1D& b) {
    return a.x_min == b.x_min && a.x_max == b.x_max && a.n_cells == b.n_cells;
  }
};

/// Real-valued function sampled at the grid nodes. Plain value type.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid1D& grid) : grid_(grid), v_(grid.n_nodes(), 0.0) {}
  Field(const Grid1D& grid, std::vector<double> values);

  template <typename F>
  static Field sample(const Grid1D& grid, F&& fn) {
    Field out(grid);
    for (int i = 0; i < grid.n_nodes(); ++i) out.v_[i] = fn(grid.node(i));
    return out;
  }

  const Grid1D& grid() const { return grid_; }
  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

 private:
  Grid1D grid_;
  std::vector<double> v_;
};

/// Ghost node values just outside the domain; they encode the active
/// boundary condition and are supplied by the model layer.
struct GhostPair {
  double left = 0.0;
  double right = 0.0;
};

/// Composite trapezoidal approximation of the integral over the grid.
double integrate(const Field& f);

/// Trapezoidal sum of raw node values (kernel helper).
double trapezoid(std::span<const double> v, double dx);

/// First derivative: central differences at interior nodes, one-sided
/// second-order stencils at the two boundary nodes.
Field central_diff(const Field& f);

/// Second derivative (v[i+1] - 2 v[i] + v[i-1]) / dx^2 with caller-supplied
/// ghost values closing the stencil at the boundary nodes.
Field second_diff(const Field& f, const GhostPair& ghosts);

/// Ghosts realizing a zero normal derivative (even reflection).
GhostPair mirror_ghosts(const Field& f);

/// Translation by offset_nodes cells with zero extension outside the domain:
/// out[i] = f[i + offset_nodes] where the source index exists, else 0.
/// offset_nodes > 0 samples from the right. Requires |offset_nodes| <= n_cells.
Field shift(const Field& f, int offset_nodes);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field nodewise_product(const Field& a, const Field& b);

double max_abs(const Field& f);
double min_value(const Field& f);
double max_value(const Field& f);
bool all_finite(std::span<const double> v);
void require_same_grid(const Field& a, const Field& b);

/// Piecewise-linear interpolation of node values at x (clamped to the domain).
double interpolate(const Field& f, double x);

}  // namespace bpfsim
