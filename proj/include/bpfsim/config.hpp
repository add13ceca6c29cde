#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bpfsim/grid.hpp"
#include "bpfsim/hu.hpp"

namespace bpfsim {

enum class Model { bpf, hu, burgers, sharp };

std::string to_string(Model m);
std::string to_string(Scheme s);

/// Initial-profile recipe for one density. Built-in kinds are smooth
/// formulas sampled on the grid; "file" reads an (x, value) CSV whose x
/// column must match the grid nodes.
struct InitSpec {
  enum class Kind { gaussian_bump, bump_sum, tanh_profile, file };
  Kind kind = Kind::gaussian_bump;
  // gaussian_bump / tanh_profile
  double center = 0.0;
  double width = 0.1;      // gaussian std dev
  double amplitude = 1.0;
  double steepness = 1.0;  // tanh slope scale
  double offset = 0.0;     // tanh baseline
  // bump_sum
  std::vector<double> centers, widths, amplitudes;
  // file
  std::string path;
};

Field sample_init(const InitSpec& spec, const Grid1D& grid);

/// Fully validated description of one simulation run. Parsed from
/// line-oriented "key = value" text ('#' starts a comment).
struct RunConfig {
  Model model = Model::hu;
  double x_min = -1.0, x_max = 1.0;
  int n_cells = 0;
  std::optional<double> sigma, diffusion_in, epsilon_in, k_in, a_in, c_in;
  double T = 0.0;
  double dt_out = 0.0;
  std::optional<double> dt_override;
  std::vector<double> snapshot_times;  // sorted, deduplicated
  Scheme scheme = Scheme::paper_central;
  bool freeze_h = false;
  InitSpec init_f, init_g;
  std::string output_dir;
  double safety = 0.4;

  Grid1D grid() const { return Grid1D(x_min, x_max, n_cells); }
  double diffusion() const;             // hu / burgers / sharp
  double epsilon() const;               // hu / burgers
  double k() const { return *k_in; }    // bpf
  double a() const { return *a_in; }    // bpf
  std::optional<double> c() const;      // k a, or 1/eps; none for sharp
};

/// Parses and validates; throws ConfigError carrying the offending line.
RunConfig parse_config(const std::string& text);

/// Canonical "key = value" lines of the effective configuration, including
/// derived quantities (dx, c, a in cells, resolved diffusion).
std::vector<std::string> effective_config_lines(const RunConfig& cfg);

/// Built-in experiment presets: "figure1", "burgers-limit".
std::string preset_text(const std::string& name);
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

std::string fmt17(double v);       // 17 significant digits, round-trip exact
std::string fmt_compact(double v); // short label formatting (%.12g)

}  // namespace bpfsim
