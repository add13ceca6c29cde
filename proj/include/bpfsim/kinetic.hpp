#pragma once

#include <utility>
#include <vector>

#include "bpfsim/grid.hpp"

namespace bpfsim {

/// Parameters of the kinetic two-density trading model:
///   f_t = (sigma^2/2) f_xx - k f g + k (f g)(x + a)
///   g_t = (sigma^2/2) g_xx - k f g + k (f g)(x - a)
/// k is the transaction rate, a the transaction cost (price displacement per
/// trade), sigma the diffusivity. a must be an exact multiple of the grid
/// spacing so the displacement operators stay exact at the discrete level.
struct BpfParams {
  double k = 1.0;
  double a = 0.1;
  double sigma = 1.0;
  bool support_guard = true;

  double c() const { return k * a; }
  double diffusion() const { return 0.5 * sigma * sigma; }
};

/// Buyer density f, vendor density g at time t (shared grid).
struct BpfState {
  Field f;
  Field g;
  double t = 0.0;
};

/// Converts the transaction cost into a whole number of cells; throws if a
/// is not an integer multiple of dx (within 1e-9 relative).
int offset_nodes_for(double a, const Grid1D& grid);

/// Semi-discrete tendencies (df/dt, dg/dt). Diffusion closes with mirror
/// ghosts (zero normal derivative); the displaced gain terms use zero
/// extension outside the domain.
std::pair<Field, Field> bpf_rhs(const BpfState& s, const BpfParams& p);

/// Classical four-stage Runge-Kutta advance by dt.
BpfState bpf_step(const BpfState& s, const BpfParams& p, double dt);

/// Local trading rate mu = k f g.
Field transaction_density(const BpfState& s, const BpfParams& p);

struct PriceEstimates {
  double argmax;  // node of maximal mu, leftmost on ties
  double mean;    // integral of x mu / integral of mu
  double median;  // half-mass point of the cumulative trapezoid integral
};

/// Price estimates from a transaction density with positive total mass.
PriceEstimates price_estimates(const Field& mu);

/// Explicit stability bound: diffusive limit and reaction limit.
double bpf_dt_policy(const BpfState& s, const BpfParams& p, double safety);

/// True when trading activity (f g) within distance a of either boundary is
/// negligible relative to its global maximum.
bool support_guard_ok(const BpfState& s, int a_nodes, double rel_tol = 1e-10);

/// Sequential RK4 integrator with preallocated workspace. One instance per
/// trajectory; instances share nothing and may run on separate threads.
class BpfSolver {
 public:
  BpfSolver(BpfState initial, BpfParams params, double safety = 0.4);

  const BpfState& state() const { return state_; }
  const BpfParams& params() const { return params_; }
  double dt_policy() const;
  double last_dt() const { return last_dt_; }

  /// Advances to t_target in uniform substeps of at most the policy dt
  /// (or dt_override if given), landing on t_target exactly.
  void advance_to(double t_target, double dt_override = 0.0);

 private:
  void rhs(const std::vector<double>& f, const std::vector<double>& g,
           std::vector<double>& df, std::vector<double>& dg);
  void step(double dt);
  void check_state() const;

  BpfParams params_;
  double safety_;
  int m_;  // a in cells
  BpfState state_;
  double last_dt_ = 0.0;
  // workspace
  std::vector<double> mu_, f1_, g1_, kf_[4], kg_[4];
};

}  // namespace bpfsim
