#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bpfsim/config.hpp"
#include "bpfsim/grid.hpp"

namespace bpfsim {

enum class Norm { L1, L2, Linf };
Norm norm_from_string(const std::string& s);
std::string to_string(Norm n);
double field_norm(const Field& f, Norm n);
double field_distance(const Field& a, const Field& b, Norm n);

/// One diagnostics record at an output time. Price columns that are not
/// defined for the active model (or have no interface yet) stay empty.
struct DiagnosticsRow {
  double t = 0.0;
  double mass_f = 0.0, mass_g = 0.0, mass_h = 0.0, mass_u = 0.0;
  std::optional<double> price_zero_crossing, price_mass;
  std::optional<double> price_argmax_mu, price_mean_mu, price_median_mu;
  double gap_h2_u2 = 0.0;       // integral of (h^2 - u^2)
  double max_u2_minus_h2 = 0.0; // max over nodes
  double overlap_fg = 0.0;      // integral of f g
  double max_ux = 0.0;          // max over nodes of du/dx
  double dt_used = 0.0;
};

struct Snapshot {
  double t = 0.0;
  Field f, g, h, u;
  std::optional<Field> mu;  // bpf only
};

struct PriceSample {
  double t = 0.0;
  double p = 0.0;
};
using PriceSeries = std::vector<PriceSample>;

struct RunResult {
  RunConfig config;
  Grid1D grid;
  double m_f0 = 0.0, m_g0 = 0.0;
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<Snapshot> snapshots;
  double run_max_abs_h = 0.0;        // over nodes and output times
  double run_max_u2_minus_h2 = 0.0;  // over nodes and output times

  /// Time-trapezoid of the gap column over the diagnostics rows.
  double gap_integral() const;
  PriceSeries price_mass_series() const;
  PriceSeries price_zero_series() const;
  const Snapshot& snapshot_at(double t) const;
};

/// Executes the configured model in memory.
RunResult run_simulation(const RunConfig& cfg);

/// Writes diagnostics.csv and snapshot_<t>.csv into dir (created if needed).
void write_run_outputs(const RunResult& result, const std::string& dir);

/// Full run with file output and exit-code semantics:
/// 0 ok, 1 config error, 2 numerical failure, 3 invariant violation.
int run_to_files(const RunConfig& cfg, std::ostream& err);

/// Norms of the field differences between two run directories with matching
/// grids and snapshot times; prints one line per (time, field) and returns
/// the largest value.
double compare_dirs(const std::string& dir_a, const std::string& dir_b, Norm norm,
                    std::ostream& out);

}  // namespace bpfsim
