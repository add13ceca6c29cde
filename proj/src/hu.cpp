#include "bpfsim/hu.hpp"

#include <algorithm>
#include <cmath>

namespace bpfsim {

namespace {

// phi = h^2 - u^2 at every node.
void fill_phi(const std::vector<double>& h, const std::vector<double>& u,
              std::vector<double>& phi) {
  for (std::size_t i = 0; i < h.size(); ++i) phi[i] = h[i] * h[i] - u[i] * u[i];
}

void hu_rhs_central_kernel(const HuParams& p, const Grid1D& grid,
                           const std::vector<double>& h, const std::vector<double>& u,
                           std::vector<double>& phi, std::vector<double>& dh,
                           std::vector<double>& du) {
  const int n = grid.n_cells;
  const double dx = grid.dx;
  const double D = p.diffusion;
  const double invdx2 = 1.0 / (dx * dx);
  const double adv = 1.0 / (4.0 * p.epsilon * dx);

  fill_phi(h, u, phi);

  if (!p.freeze_h) {
    for (int i = 1; i < n; ++i) dh[i] = D * ((h[i + 1] + h[i - 1]) - 2.0 * h[i]) * invdx2;
    dh[0] = D * ((h[1] + h[1]) - 2.0 * h[0]) * invdx2;
    dh[n] = D * ((h[n - 1] + h[n - 1]) - 2.0 * h[n]) * invdx2;
  } else {
    std::fill(dh.begin(), dh.end(), 0.0);
  }

  for (int i = 1; i < n; ++i) {
    du[i] = D * ((u[i + 1] + u[i - 1]) - 2.0 * u[i]) * invdx2 +
            adv * (phi[i + 1] - phi[i - 1]);
  }
  // Wall ghosts: mirror for h; for u the centered difference through the
  // ghost matches -u_x = phi / (2 eps D), i.e. zero total flux.
  const double gscale = dx / (p.epsilon * D);
  const double ug_left = u[1] + gscale * phi[0];
  const double ug_right = u[n - 1] - gscale * phi[n];
  const double phig_left = h[1] * h[1] - ug_left * ug_left;
  const double phig_right = h[n - 1] * h[n - 1] - ug_right * ug_right;
  du[0] = D * ((u[1] + ug_left) - 2.0 * u[0]) * invdx2 + adv * (phi[1] - phig_left);
  du[n] = D * ((ug_right + u[n - 1]) - 2.0 * u[n]) * invdx2 + adv * (phig_right - phi[n - 1]);
}

void hu_rhs_conservative_kernel(const HuParams& p, const Grid1D& grid,
                                const std::vector<double>& h, const std::vector<double>& u,
                                std::vector<double>& phi, std::vector<double>& dh,
                                std::vector<double>& du) {
  const int n = grid.n_cells;
  const double dx = grid.dx;
  const double D = p.diffusion;
  const double half_over_eps = 0.5 / p.epsilon;

  fill_phi(h, u, phi);

  // Face fluxes; the two wall faces carry zero flux. Boundary nodes own half
  // cells so the weighted tendencies telescope exactly.
  auto face_u = [&](int i) {  // face between nodes i and i+1
    return D * (u[i + 1] - u[i]) / dx + half_over_eps * 0.5 * (phi[i + 1] + phi[i]);
  };
  auto face_h = [&](int i) { return D * (h[i + 1] - h[i]) / dx; };

  double fl = 0.0;  // flux at the left wall face
  for (int i = 0; i <= n; ++i) {
    const double fr = (i < n) ? face_u(i) : 0.0;
    const double vol = (i == 0 || i == n) ? 0.5 * dx : dx;
    du[i] = (fr - fl) / vol;
    fl = fr;
  }
  if (!p.freeze_h) {
    fl = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double fr = (i < n) ? face_h(i) : 0.0;
      const double vol = (i == 0 || i == n) ? 0.5 * dx : dx;
      dh[i] = (fr - fl) / vol;
      fl = fr;
    }
  } else {
    std::fill(dh.begin(), dh.end(), 0.0);
  }
}

void hu_rhs_kernel(const HuParams& p, const Grid1D& grid,
                   const std::vector<double>& h, const std::vector<double>& u,
                   std::vector<double>& phi, std::vector<double>& dh,
                   std::vector<double>& du) {
  if (p.scheme == Scheme::paper_central)
    hu_rhs_central_kernel(p, grid, h, u, phi, dh, du);
  else
    hu_rhs_conservative_kernel(p, grid, h, u, phi, dh, du);
}

}  // namespace

std::pair<Field, Field> hu_rhs_paper(const HuState& s, const HuParams& p) {
  require_same_grid(s.h, s.u);
  const Grid1D& grid = s.h.grid();
  std::vector<double> phi(grid.n_nodes());
  Field dh(grid), du(grid);
  HuParams q = p;
  q.scheme = Scheme::paper_central;
  hu_rhs_central_kernel(q, grid, s.h.values(), s.u.values(), phi, dh.values(), du.values());
  return {std::move(dh), std::move(du)};
}

std::pair<Field, Field> hu_rhs_conservative(const HuState& s, const HuParams& p) {
  require_same_grid(s.h, s.u);
  const Grid1D& grid = s.h.grid();
  std::vector<double> phi(grid.n_nodes());
  Field dh(grid), du(grid);
  HuParams q = p;
  q.scheme = Scheme::flux_conservative;
  hu_rhs_conservative_kernel(q, grid, s.h.values(), s.u.values(), phi, dh.values(), du.values());
  return {std::move(dh), std::move(du)};
}

HuState from_fg(const Field& f, const Field& g) {
  require_same_grid(f, g);
  HuState s;
  s.h = f + g;
  s.u = f - g;
  s.t = 0.0;
  return s;
}

std::pair<Field, Field> to_fg(const HuState& s) {
  require_same_grid(s.h, s.u);
  Field f(s.h.grid()), g(s.h.grid());
  for (int i = 0; i < f.size(); ++i) {
    f[i] = 0.5 * (s.h[i] + s.u[i]);
    g[i] = 0.5 * (s.h[i] - s.u[i]);
  }
  return {std::move(f), std::move(g)};
}

double price_from_u(const Field& u, std::optional<double> previous_price) {
  const Grid1D& grid = u.grid();
  const int n = grid.n_cells;

  struct Crossing {
    double x;
    double slope;
  };
  std::vector<Crossing> down;

  int last_sign = 0;
  int last_idx = -1;  // last node with nonzero sign
  for (int i = 0; i <= n; ++i) {
    const int s = u[i] > 0.0 ? 1 : (u[i] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last_sign > 0 && s < 0) {
      double x;
      if (last_idx + 1 == i) {
        x = grid.node(last_idx) + grid.dx * u[last_idx] / (u[last_idx] - u[i]);
      } else {
        // a run of exact zeros separates the signs; take its midpoint
        x = 0.5 * (grid.node(last_idx + 1) + grid.node(i - 1));
      }
      const double slope = (u[i] - u[last_idx]) / (grid.node(i) - grid.node(last_idx));
      down.push_back({x, slope});
    }
    last_sign = s;
    last_idx = i;
  }
  if (down.empty()) throw std::invalid_argument("price_from_u: no interface");
  if (down.size() == 1) return down[0].x;
  if (previous_price) {
    const Crossing* best = &down[0];
    for (const auto& c : down)
      if (std::abs(c.x - *previous_price) < std::abs(best->x - *previous_price)) best = &c;
    return best->x;
  }
  const Crossing* best = &down[0];
  for (const auto& c : down)
    if (c.slope < best->slope) best = &c;
  return best->x;
}

double price_from_u(const HuState& s, std::optional<double> previous_price) {
  return price_from_u(s.u, previous_price);
}

double time_trapezoid(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size())
    throw std::invalid_argument("time_trapezoid: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i)
    acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
  return acc;
}

double gap_integral(std::span<const HuState> trajectory, double dt_out) {
  if (trajectory.size() < 2) return 0.0;
  std::vector<double> times(trajectory.size()), gaps(trajectory.size());
  for (std::size_t s = 0; s < trajectory.size(); ++s) {
    const HuState& st = trajectory[s];
    require_same_grid(st.h, st.u);
    Field gap(st.h.grid());
    for (int i = 0; i < gap.size(); ++i) gap[i] = st.h[i] * st.h[i] - st.u[i] * st.u[i];
    gaps[s] = integrate(gap);
    times[s] = trajectory[0].t + static_cast<double>(s) * dt_out;
  }
  return time_trapezoid(times, gaps);
}

double hu_dt_policy(const HuState& s, const HuParams& p, double safety) {
  const double dx = s.h.grid().dx;
  const double diff_limit = dx * dx / (2.0 * p.diffusion);
  const double peak_h = std::max(max_abs(s.h), 1e-300);
  const double adv_limit = p.epsilon * dx / (2.0 * peak_h);
  return safety * std::min(diff_limit, adv_limit);
}

HuSolver::HuSolver(HuState initial, HuParams params, double safety)
    : params_(params), safety_(safety), state_(std::move(initial)) {
  require_same_grid(state_.h, state_.u);
  if (!(params_.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(params_.diffusion > 0.0)) throw std::invalid_argument("diffusion must be > 0");
  const int nn = state_.h.grid().n_nodes();
  phi_.resize(nn);
  h1_.resize(nn);
  u1_.resize(nn);
  for (auto& v : kh_) v.resize(nn);
  for (auto& v : ku_) v.resize(nn);
}

void HuSolver::rhs(const std::vector<double>& h, const std::vector<double>& u,
                   std::vector<double>& dh, std::vector<double>& du) {
  hu_rhs_kernel(params_, state_.h.grid(), h, u, phi_, dh, du);
}

void HuSolver::step(double dt) {
  const int nn = state_.h.grid().n_nodes();
  std::vector<double>& h = state_.h.values();
  std::vector<double>& u = state_.u.values();
  const bool fh = params_.freeze_h;

  rhs(h, u, kh_[0], ku_[0]);
  for (int i = 0; i < nn; ++i) {
    h1_[i] = fh ? h[i] : h[i] + 0.5 * dt * kh_[0][i];
    u1_[i] = u[i] + 0.5 * dt * ku_[0][i];
  }
  rhs(h1_, u1_, kh_[1], ku_[1]);
  for (int i = 0; i < nn; ++i) {
    h1_[i] = fh ? h[i] : h[i] + 0.5 * dt * kh_[1][i];
    u1_[i] = u[i] + 0.5 * dt * ku_[1][i];
  }
  rhs(h1_, u1_, kh_[2], ku_[2]);
  for (int i = 0; i < nn; ++i) {
    h1_[i] = fh ? h[i] : h[i] + dt * kh_[2][i];
    u1_[i] = u[i] + dt * ku_[2][i];
  }
  rhs(h1_, u1_, kh_[3], ku_[3]);
  const double w = dt / 6.0;
  for (int i = 0; i < nn; ++i) {
    if (!fh) h[i] += w * ((kh_[0][i] + kh_[3][i]) + 2.0 * (kh_[1][i] + kh_[2][i]));
    u[i] += w * ((ku_[0][i] + ku_[3][i]) + 2.0 * (ku_[1][i] + ku_[2][i]));
  }
  state_.t += dt;
  last_dt_ = dt;
  check_state();
}

void HuSolver::check_state() const {
  if (!all_finite(state_.h.values()) || !all_finite(state_.u.values()))
    throw NumericalError("hu step produced non-finite values");
  double max_h2 = 0.0, max_excess = 0.0;
  for (int i = 0; i < state_.h.size(); ++i) {
    const double h2 = state_.h[i] * state_.h[i];
    max_h2 = std::max(max_h2, h2);
    max_excess = std::max(max_excess, state_.u[i] * state_.u[i] - h2);
  }
  if (max_excess > 1e-4 * std::max(max_h2, 1e-300))
    throw InvariantError("hu step: u^2 - h^2 exceeded the hard threshold");
}

double HuSolver::dt_policy() const { return hu_dt_policy(state_, params_, safety_); }

void HuSolver::advance_to(double t_target, double dt_override) {
  if (t_target < state_.t) throw std::invalid_argument("advance_to: target in the past");
  while (state_.t < t_target) {
    const double span = t_target - state_.t;
    if (span <= 0.0) break;
    const double cap = dt_override > 0.0 ? dt_override : dt_policy();
    if (!(cap > 1e-15 * std::max(1.0, t_target)))
      throw NumericalError("hu time step collapsed");
    const long nsteps = std::max(1L, static_cast<long>(std::ceil(span / cap - 1e-12)));
    const double dt = span / static_cast<double>(nsteps);
    for (long s = 0; s < nsteps; ++s) step(dt);
    state_.t = t_target;
  }
}

HuState hu_step(const HuState& s, const HuParams& p, double dt) {
  if (dt < 0.0) throw std::invalid_argument("hu_step: dt must be >= 0");
  HuSolver solver(s, p);
  if (dt > 0.0) solver.advance_to(s.t + dt, dt);
  return solver.state();
}

}  // namespace bpfsim
