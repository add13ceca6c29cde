#include "bpfsim/transforms.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace bpfsim {

namespace {

Field neumann_sum(const Field& f, int step_nodes) {
  const int n = f.grid().n_cells;
  Field acc = f;  // j = 0 term
  for (int off = step_nodes; std::abs(off) <= n; off += step_nodes) {
    const Field term = shift(f, off);
    for (int i = 0; i <= n; ++i) acc[i] += term[i];
  }
  return acc;
}

// Second difference of w with one-sided second-order boundary rows; w need
// not satisfy any wall condition of its own.
void second_diff_one_sided(const Grid1D& g, const std::vector<double>& w,
                           std::vector<double>& out) {
  const int n = g.n_cells;
  const double invdx2 = 1.0 / (g.dx * g.dx);
  for (int i = 1; i < n; ++i) out[i] = ((w[i + 1] + w[i - 1]) - 2.0 * w[i]) * invdx2;
  out[0] = (2.0 * w[0] - 5.0 * w[1] + 4.0 * w[2] - w[3]) * invdx2;
  out[n] = (2.0 * w[n] - 5.0 * w[n - 1] + 4.0 * w[n - 2] - w[n - 3]) * invdx2;
}

double heat_residual(std::span<const BpfState> traj, const BpfParams& p, double dt_out,
                     const std::function<Field(const BpfState&, int)>& transform) {
  if (traj.size() < 3)
    throw std::invalid_argument("heat residual needs at least 3 snapshots");
  const Grid1D& g = traj[0].f.grid();
  const int m = offset_nodes_for(p.a, g);
  const double D = p.diffusion();
  const int nn = g.n_nodes();

  std::vector<Field> w;
  w.reserve(traj.size());
  for (const BpfState& s : traj) w.push_back(transform(s, m));

  std::vector<double> lap(nn), res(nn);
  double worst = 0.0;
  for (std::size_t s = 1; s + 1 < w.size(); ++s) {
    second_diff_one_sided(g, w[s].values(), lap);
    for (int i = 0; i < nn; ++i) {
      const double wt = (w[s + 1][i] - w[s - 1][i]) / (2.0 * dt_out);
      res[i] = wt - D * lap[i];
      res[i] *= res[i];
    }
    worst = std::max(worst, std::sqrt(trapezoid(res, g.dx)));
  }
  return worst;
}

}  // namespace

Field neumann_F(const Field& f, int a_nodes) {
  if (a_nodes < 1) throw std::invalid_argument("neumann_F: a_nodes must be >= 1");
  return neumann_sum(f, a_nodes);
}

Field neumann_G(const Field& g, int a_nodes) {
  if (a_nodes < 1) throw std::invalid_argument("neumann_G: a_nodes must be >= 1");
  return neumann_sum(g, -a_nodes);
}

int neumann_series_length(const Grid1D& grid, int a_nodes) {
  return (grid.n_cells + a_nodes - 1) / a_nodes;
}

double heat_residual_FG(std::span<const BpfState> trajectory, const BpfParams& p,
                        double dt_out) {
  return heat_residual(trajectory, p, dt_out, [](const BpfState& s, int m) {
    return neumann_F(s.f, m) - neumann_G(s.g, m);
  });
}

double heat_residual_fSg(std::span<const BpfState> trajectory, const BpfParams& p,
                         double dt_out) {
  return heat_residual(trajectory, p, dt_out, [](const BpfState& s, int m) {
    return s.f + shift(s.g, m);
  });
}

TransformReport transform_report(std::span<const BpfState> trajectory,
                                 const BpfParams& p, double dt_out) {
  if (trajectory.empty()) throw std::invalid_argument("transform_report: empty trajectory");
  const Grid1D& g = trajectory[0].f.grid();
  TransformReport r;
  r.a_nodes = offset_nodes_for(p.a, g);
  r.series_length = neumann_series_length(g, r.a_nodes);
  r.heat_residual_FG = heat_residual_FG(trajectory, p, dt_out);
  r.heat_residual_fSg = heat_residual_fSg(trajectory, p, dt_out);
  r.dx = g.dx;
  r.dt_out = dt_out;
  r.n_cells = g.n_cells;
  return r;
}

}  // namespace bpfsim
