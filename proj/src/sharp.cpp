#include "bpfsim/sharp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bpfsim {

namespace {

// D ((h[i+1]+h[i-1]) - 2 h[i])/dx^2 with mirror ghosts.
void heat_lap(const Grid1D& g, double D, const std::vector<double>& h,
              std::vector<double>& out) {
  const int n = g.n_cells;
  const double c = D / (g.dx * g.dx);
  for (int i = 1; i < n; ++i) out[i] = c * ((h[i + 1] + h[i - 1]) - 2.0 * h[i]);
  out[0] = c * ((h[1] + h[1]) - 2.0 * h[0]);
  out[n] = c * ((h[n - 1] + h[n - 1]) - 2.0 * h[n]);
}

void heat_rk4(const Grid1D& g, double D, double dt, const std::vector<double>& h,
              std::vector<double>& out, std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4, std::vector<double>& tmp) {
  const int nn = g.n_nodes();
  heat_lap(g, D, h, k1);
  for (int i = 0; i < nn; ++i) tmp[i] = h[i] + 0.5 * dt * k1[i];
  heat_lap(g, D, tmp, k2);
  for (int i = 0; i < nn; ++i) tmp[i] = h[i] + 0.5 * dt * k2[i];
  heat_lap(g, D, tmp, k3);
  for (int i = 0; i < nn; ++i) tmp[i] = h[i] + dt * k3[i];
  heat_lap(g, D, tmp, k4);
  const double w = dt / 6.0;
  for (int i = 0; i < nn; ++i)
    out[i] = h[i] + w * ((k1[i] + k4[i]) + 2.0 * (k2[i] + k3[i]));
}

void diff_into(const Grid1D& g, const std::vector<double>& v, std::vector<double>& out) {
  const int n = g.n_cells;
  const double inv2dx = 1.0 / (2.0 * g.dx);
  for (int i = 1; i < n; ++i) out[i] = (v[i + 1] - v[i - 1]) * inv2dx;
  out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv2dx;
  out[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) * inv2dx;
}

double interp_raw(const Grid1D& g, const std::vector<double>& v, double x) {
  double s = (x - g.x_min) / g.dx;
  if (s <= 0.0) return v[0];
  if (s >= g.n_cells) return v[g.n_cells];
  int j = static_cast<int>(s);
  if (j >= g.n_cells) j = g.n_cells - 1;
  const double w = s - j;
  return (1.0 - w) * v[j] + w * v[j + 1];
}

// p' = -h_x(p)/h(p); singular when h(p) degenerates.
double price_velocity(const Grid1D& g, const std::vector<double>& h,
                      const std::vector<double>& hx, double p) {
  const double hv = interp_raw(g, h, p);
  if (hv < 1e-12) throw NumericalError("price ODE singular: h(p) below 1e-12");
  return -interp_raw(g, hx, p) / hv;
}

// Cumulative trapezoid integral at the nodes.
std::vector<double> cumulative(const Field& h) {
  const int n = h.grid().n_cells;
  std::vector<double> c(n + 1, 0.0);
  for (int i = 1; i <= n; ++i)
    c[i] = c[i - 1] + 0.5 * h.grid().dx * (h[i - 1] + h[i]);
  return c;
}

double eval_cumulative(const Grid1D& g, const std::vector<double>& c, double x) {
  double s = (x - g.x_min) / g.dx;
  if (s <= 0.0) return c[0];
  if (s >= g.n_cells) return c[g.n_cells];
  int j = static_cast<int>(s);
  if (j >= g.n_cells) j = g.n_cells - 1;
  const double w = s - j;
  return (1.0 - w) * c[j] + w * c[j + 1];
}

}  // namespace

Field heat_step(const Field& h, double D, double dt) {
  if (dt < 0.0) throw std::invalid_argument("heat_step: dt must be >= 0");
  const Grid1D& g = h.grid();
  const int nn = g.n_nodes();
  std::vector<double> out(nn), k1(nn), k2(nn), k3(nn), k4(nn), tmp(nn);
  heat_rk4(g, D, dt, h.values(), out, k1, k2, k3, k4, tmp);
  if (!all_finite(out)) throw NumericalError("heat step produced non-finite values");
  return Field(g, std::move(out));
}

double price_from_mass(const Field& h, double m_f) {
  const Grid1D& g = h.grid();
  const std::vector<double> c = cumulative(h);
  const double total = c[g.n_cells];
  if (!(m_f > 0.0 && m_f < total))
    throw std::invalid_argument("price_from_mass: m_f must lie in (0, integral of h)");
  double lo = g.x_min, hi = g.x_max;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double cm = eval_cumulative(g, c, mid);
    if (std::abs(cm - m_f) <= 1e-13 * std::max(1.0, total)) break;
    if (cm < m_f)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
      break;
  }
  return mid;
}

SharpState price_ode_step(const SharpState& s, double D, double dt) {
  if (dt < 0.0) throw std::invalid_argument("price_ode_step: dt must be >= 0");
  const Grid1D& g = s.h.grid();
  const int nn = g.n_nodes();
  std::vector<double> hnew(nn), k1(nn), k2(nn), k3(nn), k4(nn), tmp(nn);
  heat_rk4(g, D, dt, s.h.values(), hnew, k1, k2, k3, k4, tmp);
  std::vector<double> hmid(nn);
  for (int i = 0; i < nn; ++i) hmid[i] = 0.5 * (s.h[i] + hnew[i]);
  std::vector<double> hx0(nn), hxm(nn), hx1(nn);
  diff_into(g, s.h.values(), hx0);
  diff_into(g, hmid, hxm);
  diff_into(g, hnew, hx1);
  const double p1 = price_velocity(g, s.h.values(), hx0, s.p);
  const double p2 = price_velocity(g, hmid, hxm, s.p + 0.5 * dt * p1);
  const double p3 = price_velocity(g, hmid, hxm, s.p + 0.5 * dt * p2);
  const double p4 = price_velocity(g, hnew, hx1, s.p + dt * p3);
  SharpState out;
  out.h = Field(g, std::move(hnew));
  out.p = s.p + dt / 6.0 * ((p1 + p4) + 2.0 * (p2 + p3));
  out.t = s.t + dt;
  return out;
}

Field reconstruct_u(const SharpState& s) {
  const Grid1D& g = s.h.grid();
  const int n = g.n_cells;
  if (!(s.p > g.x_min && s.p < g.x_max))
    throw std::invalid_argument("reconstruct_u: p must lie inside the domain");

  const std::vector<double> c = cumulative(s.h);
  const double total = c[n];
  const double target = 2.0 * eval_cumulative(g, c, s.p) - total;  // m_f - m_g

  Field u(g);
  for (int i = 0; i <= n; ++i) u[i] = g.node(i) < s.p ? s.h[i] : -s.h[i];

  const double spos = (s.p - g.x_min) / g.dx;
  int j = static_cast<int>(spos);
  if (j >= n) j = n - 1;
  double theta = spos - j;

  auto weight = [&](int i) { return (i == 0 || i == n) ? 0.5 * g.dx : g.dx; };

  if (theta <= 1e-9 || theta >= 1.0 - 1e-9) {
    // p sits on a node: blend that single node
    const int jn = theta <= 1e-9 ? j : j + 1;
    u[jn] = 0.0;
    double rest = trapezoid(u.values(), g.dx);
    u[jn] = (target - rest) / weight(jn);
  } else {
    u[j] = (theta - 0.5) * s.h[j];
    u[j + 1] = (theta - 0.5) * s.h[j + 1];
    const double t0 = trapezoid(u.values(), g.dx);
    const double delta = (target - t0) / (weight(j) + weight(j + 1));
    u[j] += delta;
    u[j + 1] += delta;
  }
  return u;
}

double equilibrium_price(const Field& h_I, double m_f) {
  const double total = integrate(h_I);
  if (!(m_f > 0.0 && m_f < total))
    throw std::invalid_argument("equilibrium_price: m_f must lie in (0, integral of h)");
  const double mean = total / h_I.grid().length();
  return h_I.grid().x_min + m_f / mean;
}

double heat_dt_policy(const Grid1D& grid, double D, double safety) {
  return safety * grid.dx * grid.dx / (2.0 * D);
}

SharpSolver::SharpSolver(Field h_initial, double m_f, double D, double safety)
    : grid_(h_initial.grid()), h_(std::move(h_initial)), m_f_(m_f), D_(D), safety_(safety) {
  if (!(D_ > 0.0)) throw std::invalid_argument("diffusion must be > 0");
  if (min_value(h_) < -1e-12)
    throw std::invalid_argument("sharp solver requires nonnegative h");
  const double total = integrate(h_);
  if (!(m_f_ > 0.0 && m_f_ < total))
    throw std::invalid_argument("m_f must lie in (0, integral of h)");
  m_g_ = total - m_f_;
  p_ode_ = price_from_mass(h_, m_f_);
  const int nn = grid_.n_nodes();
  h1_.resize(nn);
  for (auto& v : kh_) v.resize(nn);
  hx_a_.resize(nn);
  hx_m_.resize(nn);
  hx_b_.resize(nn);
  hmid_.resize(nn);
  hnew_.resize(nn);
}

void SharpSolver::step(double dt) {
  const int nn = grid_.n_nodes();
  std::vector<double>& h = h_.values();
  heat_rk4(grid_, D_, dt, h, hnew_, kh_[0], kh_[1], kh_[2], kh_[3], h1_);
  for (int i = 0; i < nn; ++i) hmid_[i] = 0.5 * (h[i] + hnew_[i]);
  diff_into(grid_, h, hx_a_);
  diff_into(grid_, hmid_, hx_m_);
  diff_into(grid_, hnew_, hx_b_);
  const double p1 = price_velocity(grid_, h, hx_a_, p_ode_);
  const double p2 = price_velocity(grid_, hmid_, hx_m_, p_ode_ + 0.5 * dt * p1);
  const double p3 = price_velocity(grid_, hmid_, hx_m_, p_ode_ + 0.5 * dt * p2);
  const double p4 = price_velocity(grid_, hnew_, hx_b_, p_ode_ + dt * p3);
  p_ode_ += dt / 6.0 * ((p1 + p4) + 2.0 * (p2 + p3));
  h.swap(hnew_);
  t_ += dt;
  last_dt_ = dt;
  if (!all_finite(h) || !std::isfinite(p_ode_))
    throw NumericalError("sharp step produced non-finite values");
}

double SharpSolver::price_mass() const { return price_from_mass(h_, m_f_); }

SharpState SharpSolver::state_mass() const { return SharpState{h_, price_mass(), t_}; }

void SharpSolver::advance_to(double t_target, double dt_override) {
  if (t_target < t_) throw std::invalid_argument("advance_to: target in the past");
  while (t_ < t_target) {
    const double span = t_target - t_;
    if (span <= 0.0) break;
    const double cap = dt_override > 0.0 ? dt_override : heat_dt_policy(grid_, D_, safety_);
    if (!(cap > 1e-15 * std::max(1.0, t_target)))
      throw NumericalError("sharp time step collapsed");
    const long nsteps = std::max(1L, static_cast<long>(std::ceil(span / cap - 1e-12)));
    const double dt = span / static_cast<double>(nsteps);
    for (long s = 0; s < nsteps; ++s) step(dt);
    t_ = t_target;
  }
}

}  // namespace bpfsim
