#include "bpfsim/kinetic.hpp"

#include <algorithm>
#include <cmath>

namespace bpfsim {

int offset_nodes_for(double a, const Grid1D& grid) {
  if (!(a > 0.0)) throw std::invalid_argument("transaction cost a must be > 0");
  const double ratio = a / grid.dx;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded))
    throw std::invalid_argument("a must be an integer multiple of dx");
  if (rounded > grid.n_cells)
    throw std::invalid_argument("a exceeds the domain length");
  return static_cast<int>(rounded);
}

namespace {

// df = D ((f[i+1]+f[i-1]) - 2 f[i])/dx^2 - mu/k-scaled loss + displaced gain.
// Mirror ghosts close the diffusion stencil; gains use zero extension.
void bpf_rhs_kernel(const BpfParams& p, const Grid1D& grid, int m,
                    const std::vector<double>& f, const std::vector<double>& g,
                    std::vector<double>& mu, std::vector<double>& df,
                    std::vector<double>& dg) {
  const int n = grid.n_cells;
  const double D = p.diffusion();
  const double invdx2 = 1.0 / (grid.dx * grid.dx);
  const double k = p.k;

  for (int i = 0; i <= n; ++i) mu[i] = f[i] * g[i];

  for (int i = 1; i < n; ++i) {
    const double lap_f = ((f[i + 1] + f[i - 1]) - 2.0 * f[i]) * invdx2;
    const double lap_g = ((g[i + 1] + g[i - 1]) - 2.0 * g[i]) * invdx2;
    const double gain_f = (i + m <= n) ? mu[i + m] : 0.0;
    const double gain_g = (i - m >= 0) ? mu[i - m] : 0.0;
    df[i] = D * lap_f + k * (gain_f - mu[i]);
    dg[i] = D * lap_g + k * (gain_g - mu[i]);
  }
  // mirror ghosts at both walls
  df[0] = D * ((f[1] + f[1]) - 2.0 * f[0]) * invdx2 + k * ((m <= n ? mu[m] : 0.0) - mu[0]);
  dg[0] = D * ((g[1] + g[1]) - 2.0 * g[0]) * invdx2 + k * (0.0 - mu[0]);
  df[n] = D * ((f[n - 1] + f[n - 1]) - 2.0 * f[n]) * invdx2 + k * (0.0 - mu[n]);
  dg[n] = D * ((g[n - 1] + g[n - 1]) - 2.0 * g[n]) * invdx2 + k * ((n - m >= 0 ? mu[n - m] : 0.0) - mu[n]);
}

}  // namespace

std::pair<Field, Field> bpf_rhs(const BpfState& s, const BpfParams& p) {
  require_same_grid(s.f, s.g);
  const Grid1D& grid = s.f.grid();
  const int m = offset_nodes_for(p.a, grid);
  std::vector<double> mu(grid.n_nodes());
  Field df(grid), dg(grid);
  bpf_rhs_kernel(p, grid, m, s.f.values(), s.g.values(), mu, df.values(), dg.values());
  return {std::move(df), std::move(dg)};
}

Field transaction_density(const BpfState& s, const BpfParams& p) {
  require_same_grid(s.f, s.g);
  Field mu(s.f.grid());
  for (int i = 0; i < mu.size(); ++i) mu[i] = p.k * s.f[i] * s.g[i];
  return mu;
}

PriceEstimates price_estimates(const Field& mu) {
  const Grid1D& grid = mu.grid();
  const double total = integrate(mu);
  if (!(total > 0.0))
    throw std::invalid_argument("price_estimates: no trades (mu integrates to zero)");

  int arg = 0;
  for (int i = 1; i < mu.size(); ++i)
    if (mu[i] > mu[arg]) arg = i;  // leftmost on ties

  Field xmu(grid);
  for (int i = 0; i < mu.size(); ++i) xmu[i] = grid.node(i) * mu[i];
  const double mean = integrate(xmu) / total;

  // cumulative trapezoid integral; half-mass point, linear within the cell
  const double half = 0.5 * total;
  double median = grid.x_max;
  double cum = 0.0;
  if (cum >= half) median = grid.x_min;
  for (int i = 1; i < mu.size(); ++i) {
    const double next = cum + 0.5 * grid.dx * (mu[i - 1] + mu[i]);
    if (next >= half) {
      const double cell = next - cum;
      const double frac = cell > 0.0 ? (half - cum) / cell : 1.0;
      median = grid.node(i - 1) + frac * grid.dx;
      break;
    }
    cum = next;
  }
  return PriceEstimates{grid.node(arg), mean, median};
}

double bpf_dt_policy(const BpfState& s, const BpfParams& p, double safety) {
  const double dx = s.f.grid().dx;
  const double diff_limit = dx * dx / (2.0 * p.diffusion());
  const double peak = std::max(max_abs(s.f), max_abs(s.g));
  const double tiny = 1e-300;
  const double react_limit = 1.0 / (2.0 * p.k * peak + tiny);
  return safety * std::min(diff_limit, react_limit);
}

bool support_guard_ok(const BpfState& s, int a_nodes, double rel_tol) {
  const int n = s.f.grid().n_cells;
  double band = 0.0, global = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double act = s.f[i] * s.g[i];
    global = std::max(global, act);
    if (i <= a_nodes || i >= n - a_nodes) band = std::max(band, act);
  }
  return band <= rel_tol * global || global == 0.0;
}

BpfSolver::BpfSolver(BpfState initial, BpfParams params, double safety)
    : params_(params), safety_(safety), state_(std::move(initial)) {
  require_same_grid(state_.f, state_.g);
  m_ = offset_nodes_for(params_.a, state_.f.grid());
  const int nn = state_.f.grid().n_nodes();
  mu_.resize(nn);
  f1_.resize(nn);
  g1_.resize(nn);
  for (auto& v : kf_) v.resize(nn);
  for (auto& v : kg_) v.resize(nn);
  if (params_.support_guard && !support_guard_ok(state_, m_))
    throw InvariantError("support guard: trading activity within a of the boundary");
}

void BpfSolver::rhs(const std::vector<double>& f, const std::vector<double>& g,
                    std::vector<double>& df, std::vector<double>& dg) {
  bpf_rhs_kernel(params_, state_.f.grid(), m_, f, g, mu_, df, dg);
}

void BpfSolver::step(double dt) {
  const int nn = state_.f.grid().n_nodes();
  std::vector<double>& f = state_.f.values();
  std::vector<double>& g = state_.g.values();

  rhs(f, g, kf_[0], kg_[0]);
  for (int i = 0; i < nn; ++i) {
    f1_[i] = f[i] + 0.5 * dt * kf_[0][i];
    g1_[i] = g[i] + 0.5 * dt * kg_[0][i];
  }
  rhs(f1_, g1_, kf_[1], kg_[1]);
  for (int i = 0; i < nn; ++i) {
    f1_[i] = f[i] + 0.5 * dt * kf_[1][i];
    g1_[i] = g[i] + 0.5 * dt * kg_[1][i];
  }
  rhs(f1_, g1_, kf_[2], kg_[2]);
  for (int i = 0; i < nn; ++i) {
    f1_[i] = f[i] + dt * kf_[2][i];
    g1_[i] = g[i] + dt * kg_[2][i];
  }
  rhs(f1_, g1_, kf_[3], kg_[3]);
  const double w = dt / 6.0;
  for (int i = 0; i < nn; ++i) {
    f[i] += w * ((kf_[0][i] + kf_[3][i]) + 2.0 * (kf_[1][i] + kf_[2][i]));
    g[i] += w * ((kg_[0][i] + kg_[3][i]) + 2.0 * (kg_[1][i] + kg_[2][i]));
  }
  state_.t += dt;
  last_dt_ = dt;
  check_state();
}

void BpfSolver::check_state() const {
  if (!all_finite(state_.f.values()) || !all_finite(state_.g.values()))
    throw NumericalError("bpf step produced non-finite values");
  if (std::min(min_value(state_.f), min_value(state_.g)) < -1e-6)
    throw NumericalError("bpf step produced values below -1e-6");
}

double BpfSolver::dt_policy() const { return bpf_dt_policy(state_, params_, safety_); }

void BpfSolver::advance_to(double t_target, double dt_override) {
  if (t_target < state_.t) throw std::invalid_argument("advance_to: target in the past");
  while (state_.t < t_target) {
    const double span = t_target - state_.t;
    if (span <= 0.0) break;
    const double cap = dt_override > 0.0 ? dt_override : dt_policy();
    if (!(cap > 1e-15 * std::max(1.0, t_target)))
      throw NumericalError("bpf time step collapsed");
    const long nsteps = std::max(1L, static_cast<long>(std::ceil(span / cap - 1e-12)));
    const double dt = span / static_cast<double>(nsteps);
    for (long s = 0; s < nsteps; ++s) step(dt);
    state_.t = t_target;  // remove accumulated round-off in t
  }
  if (params_.support_guard && !support_guard_ok(state_, m_))
    throw InvariantError("support guard: trading activity within a of the boundary");
}

BpfState bpf_step(const BpfState& s, const BpfParams& p, double dt) {
  if (dt < 0.0) throw std::invalid_argument("bpf_step: dt must be >= 0");
  BpfParams local = p;
  local.support_guard = false;  // single-step primitive; the run loop guards
  BpfSolver solver(s, local);
  if (dt > 0.0) solver.advance_to(s.t + dt, dt);
  return solver.state();
}

}  // namespace bpfsim
