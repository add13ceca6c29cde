#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bpfsim/grid.hpp"

namespace bpfsim {

enum class Scheme { paper_central, flux_conservative };

/// Parameters of the high-frequency limit system in the transformed
/// variables h = f + g, u = f - g:
///   h_t = D h_xx
///   u_t = D u_xx + (1/(2 eps)) (h^2 - u^2)_x
/// with zero-flux walls: h_x = 0 and -u_x = (1/(2 eps D)) (h^2 - u^2).
/// epsilon is the inverse trading intensity (eps = 1/c). freeze_h holds h
/// fixed and advances only u (the h = 1 special case reduces to a viscous
/// Burgers equation on the fast time scale).
struct HuParams {
  double epsilon = 0.05;
  double diffusion = 1.0;
  Scheme scheme = Scheme::paper_central;
  bool freeze_h = false;
};

struct HuState {
  Field h;
  Field u;
  double t = 0.0;
};

/// Pointwise central-difference tendencies: second differences plus the
/// centered form of the advective term,
///   du[i] += (1/(4 eps dx)) (h[i+1]^2 - u[i+1]^2 - h[i-1]^2 + u[i-1]^2).
/// Boundary rows close with a mirror ghost for h and a ghost for u chosen so
/// the centered difference through the ghost satisfies the wall condition.
std::pair<Field, Field> hu_rhs_paper(const HuState& s, const HuParams& p);

/// Flux-form tendencies: interior faces carry
///   F = D (u[i+1]-u[i])/dx + (1/(2 eps)) avg(h^2-u^2),
/// wall faces carry zero flux, and boundary nodes own half cells, so the
/// trapezoid integrals of h and u telescope to zero exactly.
std::pair<Field, Field> hu_rhs_conservative(const HuState& s, const HuParams& p);

/// RK4 advance by dt with the selected scheme.
HuState hu_step(const HuState& s, const HuParams& p, double dt);

HuState from_fg(const Field& f, const Field& g);
std::pair<Field, Field> to_fg(const HuState& s);

/// x-coordinate of the downward zero crossing of u (linear interpolation).
/// With several candidates, picks the one closest to previous_price, or the
/// steepest descent when no previous price is given.
double price_from_u(const HuState& s, std::optional<double> previous_price = std::nullopt);
double price_from_u(const Field& u, std::optional<double> previous_price = std::nullopt);

/// Time-trapezoid of integral(h^2 - u^2) over uniformly spaced snapshots.
double gap_integral(std::span<const HuState> trajectory, double dt_out);

/// Trapezoid in time of sampled values at the given times (non-decreasing).
double time_trapezoid(std::span<const double> times, std::span<const double> values);

/// Stability bound: diffusive limit and the advective speed max|h|/eps.
double hu_dt_policy(const HuState& s, const HuParams& p, double safety);

/// Sequential RK4 integrator with preallocated workspace.
class HuSolver {
 public:
  HuSolver(HuState initial, HuParams params, double safety = 0.4);

  const HuState& state() const { return state_; }
  const HuParams& params() const { return params_; }
  double dt_policy() const;
  double last_dt() const { return last_dt_; }

  void advance_to(double t_target, double dt_override = 0.0);

 private:
  void rhs(const std::vector<double>& h, const std::vector<double>& u,
           std::vector<double>& dh, std::vector<double>& du);
  void step(double dt);
  void check_state() const;

  HuParams params_;
  double safety_;
  HuState state_;
  double last_dt_ = 0.0;
  std::vector<double> phi_, h1_, u1_, kh_[4], ku_[4];
};

}  // namespace bpfsim
