#pragma once

#include <span>

#include "bpfsim/grid.hpp"
#include "bpfsim/kinetic.hpp"

namespace bpfsim {

/// Finite geometric-series transforms built from the displacement operators
/// S phi(x) = phi(x + a) and T phi(x) = phi(x - a) with zero extension:
///   F = (I - S)^{-1} f = sum_j S^j f,   G = (I - T)^{-1} g = sum_j T^j g.
/// Zero extension truncates both sums exactly once the displacement leaves
/// the domain, so (I - S) F = f and (I - T) G = g hold to round-off.
Field neumann_F(const Field& f, int a_nodes);
Field neumann_G(const Field& g, int a_nodes);

/// Smallest J with J * a covering the domain length.
int neumann_series_length(const Grid1D& grid, int a_nodes);

/// Discrete check that w = F - G follows the heat equation: max over
/// interior snapshots of the L2 norm of (w_t - D w_xx), with w_t by centered
/// time differences of the stored snapshots and w_xx by second differences
/// (one-sided second-order stencils at the two boundary nodes).
double heat_residual_FG(std::span<const BpfState> trajectory, const BpfParams& p,
                        double dt_out);

/// Same protocol for w = f + S g.
double heat_residual_fSg(std::span<const BpfState> trajectory, const BpfParams& p,
                         double dt_out);

struct TransformReport {
  int series_length = 0;
  double heat_residual_FG = 0.0;
  double heat_residual_fSg = 0.0;
  double dx = 0.0;
  double dt_out = 0.0;
  int n_cells = 0;
  int a_nodes = 0;
};

TransformReport transform_report(std::span<const BpfState> trajectory,
                                 const BpfParams& p, double dt_out);

}  // namespace bpfsim
