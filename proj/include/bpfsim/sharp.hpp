#pragma once

#include "bpfsim/grid.hpp"

namespace bpfsim {

/// Zero-epsilon limit: h follows the heat equation with zero-flux walls, the
/// imbalance collapses to u = +h left of the price p(t) and -h right of it,
/// and p is pinned by the buyer-mass relation
///   integral_{x_min}^{p} h dx = m_f.
struct SharpState {
  Field h;
  double p = 0.0;
  double t = 0.0;
};

/// RK4 advance of the semi-discrete diffusion with mirror ghosts.
Field heat_step(const Field& h, double D, double dt);

/// Solves the buyer-mass relation for p by monotone bisection on the
/// piecewise-linear cumulative trapezoid integral of h.
double price_from_mass(const Field& h, double m_f);

/// Advances h by one heat step and p by RK4 on p' = -h_x(p)/h(p); the p
/// stages evaluate h and h_x on time-interpolated fields.
SharpState price_ode_step(const SharpState& s, double D, double dt);

/// The two-sided profile u = sign(p - x) h with the node pair bracketing p
/// blended so that integral(u) matches the mass split implied by p exactly.
Field reconstruct_u(const SharpState& s);

/// Long-time price: the flat steady state of h splits its mass at
///   mean(h_I) (p_inf - x_min) = m_f.
double equilibrium_price(const Field& h_I, double m_f);

double heat_dt_policy(const Grid1D& grid, double D, double safety);

/// Heat flow plus both price trackers (mass relation and price ODE).
class SharpSolver {
 public:
  SharpSolver(Field h_initial, double m_f, double D, double safety = 0.4);

  const Field& h() const { return h_; }
  double t() const { return t_; }
  double m_f() const { return m_f_; }
  double m_g() const { return m_g_; }
  double diffusion() const { return D_; }
  double price_ode() const { return p_ode_; }
  double price_mass() const;
  double last_dt() const { return last_dt_; }

  SharpState state_mass() const;  // p from the mass relation
  void advance_to(double t_target, double dt_override = 0.0);

 private:
  void step(double dt);
  double slope_over_h(const std::vector<double>& h, double x) const;

  Grid1D grid_;
  Field h_;
  double m_f_, m_g_, D_, safety_;
  double p_ode_, t_ = 0.0, last_dt_ = 0.0;
  std::vector<double> h1_, kh_[4], hx_a_, hx_m_, hx_b_, hmid_, hnew_;
};

}  // namespace bpfsim
