#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bpfsim/runner.hpp"
#include "bpfsim/transforms.hpp"

namespace bpfsim {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares affine fit y = slope x + intercept.
FitResult fit_affine(std::span<const double> x, std::span<const double> y);

/// Affine fit of log y against log x (x, y > 0).
FitResult fit_loglog(std::span<const double> x, std::span<const double> y);

/// Affine fit of log|p(t) - p_inf| on [t0, t1]; slope is the negated decay
/// rate. Samples where the gap underflows 1e-14 truncate the window; fewer
/// than three usable samples is an error.
FitResult fit_exponential(const PriceSeries& series, double t0, double t1, double p_inf);

/// Strict monotone decrease with ties (within 1e-12 relative) counted as
/// violations.
bool strictly_decreasing(std::span<const double> v);

struct EpsSweepRow {
  double eps = 0.0;
  double gap_integral = 0.0;
  double dist_to_limit = 0.0;
  double bound = 0.0;  // 4 eps (1 + T) max h
  bool bound_ok = false;
  // effective configuration of the member run
  int n_cells = 0;
  double dx = 0.0, dt = 0.0, diffusion = 0.0, T = 0.0;
  std::string scheme;
};

struct EpsSweepResult {
  std::vector<EpsSweepRow> rows;
  std::optional<FitResult> gap_fit;  // log gap vs log eps (>= 3 members)
};

/// Runs the base configuration once per epsilon; records the time-integrated
/// gap (with its vanishing-epsilon bound) and the distance at time T to the
/// zero-epsilon profile (heat flow of h plus the mass-split step). Members
/// execute concurrently; rows keep the input order.
EpsSweepResult run_eps_sweep(const RunConfig& base, std::span<const double> eps_values,
                             Norm norm);

struct KaSweepRow {
  double a = 0.0;
  double k = 0.0;
  double dist = 0.0;  // distance of (f, g) to the limit-system reference at T
  int n_cells = 0;
  double dx = 0.0, dt = 0.0, sigma = 0.0, T = 0.0;
};

struct KaSweepResult {
  std::vector<KaSweepRow> rows;
  double c = 0.0;
};

/// Runs the kinetic model once per transaction cost with k = c/a and
/// compares against one limit-system reference at epsilon = 1/c.
/// ref_epsilon, when given, must match 1/c.
KaSweepResult run_ka_sweep(const RunConfig& base_bpf, std::span<const double> a_values,
                           Norm norm, std::optional<double> ref_epsilon = std::nullopt);

struct SegregationRow {
  double t = 0.0;
  double overlap_fg = 0.0;
  int sign_changes_u = 0;
};

/// Per-snapshot overlap integral and count of sign changes of u.
std::vector<SegregationRow> segregation_metrics(const RunResult& run);

/// Kinetic run re-executed per refinement level (n_cells and dt_out halving
/// in lockstep), each level reduced to its transform report.
std::vector<TransformReport> run_transform_check(const RunConfig& base_bpf, int levels);

void write_eps_sweep_csv(const EpsSweepResult& r, const RunConfig& base,
                         const std::string& dir);
void write_ka_sweep_csv(const KaSweepResult& r, const RunConfig& base,
                        const std::string& dir);
void write_transform_check_csv(std::span<const TransformReport> rows,
                               const RunConfig& base, const std::string& dir);

}  // namespace bpfsim
