#include "bpfsim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "bpfsim/hu.hpp"
#include "bpfsim/kinetic.hpp"
#include "bpfsim/sharp.hpp"

namespace bpfsim {

Norm norm_from_string(const std::string& s) {
  if (s == "L1") return Norm::L1;
  if (s == "L2") return Norm::L2;
  if (s == "Linf") return Norm::Linf;
  throw ConfigError("unknown norm '" + s + "' (use L1|L2|Linf)");
}

std::string to_string(Norm n) {
  switch (n) {
    case Norm::L1: return "L1";
    case Norm::L2: return "L2";
    case Norm::Linf: return "Linf";
  }
  return "?";
}

double field_norm(const Field& f, Norm n) {
  switch (n) {
    case Norm::L1: {
      Field a(f.grid());
      for (int i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
      return integrate(a);
    }
    case Norm::L2: {
      Field a(f.grid());
      for (int i = 0; i < f.size(); ++i) a[i] = f[i] * f[i];
      return std::sqrt(integrate(a));
    }
    case Norm::Linf:
      return max_abs(f);
  }
  return 0.0;
}

double field_distance(const Field& a, const Field& b, Norm n) {
  return field_norm(a - b, n);
}

double RunResult::gap_integral() const {
  std::vector<double> t, v;
  t.reserve(diagnostics.size());
  v.reserve(diagnostics.size());
  for (const auto& row : diagnostics) {
    t.push_back(row.t);
    v.push_back(row.gap_h2_u2);
  }
  return time_trapezoid(t, v);
}

PriceSeries RunResult::price_mass_series() const {
  PriceSeries s;
  for (const auto& row : diagnostics)
    if (row.price_mass) s.push_back({row.t, *row.price_mass});
  return s;
}

PriceSeries RunResult::price_zero_series() const {
  PriceSeries s;
  for (const auto& row : diagnostics)
    if (row.price_zero_crossing) s.push_back({row.t, *row.price_zero_crossing});
  return s;
}

const Snapshot& RunResult::snapshot_at(double t) const {
  for (const auto& s : snapshots)
    if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return s;
  throw std::invalid_argument("no snapshot at t = " + fmt_compact(t));
}

namespace {

struct EventSchedule {
  std::vector<double> times;          // sorted unique event times
  std::vector<bool> is_diag, is_snap;
};

EventSchedule build_schedule(const RunConfig& cfg) {
  std::vector<double> snaps = cfg.snapshot_times;
  if (snaps.empty()) {
    snaps.push_back(0.0);
    if (cfg.T > 0.0) snaps.push_back(cfg.T);
  }
  std::vector<double> diags;
  diags.push_back(0.0);
  for (long j = 1; static_cast<double>(j - 1) * cfg.dt_out < cfg.T; ++j) {
    const double t = std::min(static_cast<double>(j) * cfg.dt_out, cfg.T);
    diags.push_back(t);
    if (t >= cfg.T) break;
  }

  const double tol = 1e-12 * std::max(1.0, cfg.T);
  std::vector<double> all = diags;
  all.insert(all.end(), snaps.begin(), snaps.end());
  std::sort(all.begin(), all.end());
  EventSchedule sched;
  for (double t : all) {
    if (!sched.times.empty() && t - sched.times.back() <= tol) continue;
    sched.times.push_back(t);
    sched.is_diag.push_back(false);
    sched.is_snap.push_back(false);
  }
  auto mark = [&](const std::vector<double>& set, std::vector<bool>& flags) {
    for (double t : set) {
      for (std::size_t i = 0; i < sched.times.size(); ++i)
        if (std::abs(sched.times[i] - t) <= tol) {
          flags[i] = true;
          break;
        }
    }
  };
  mark(diags, sched.is_diag);
  mark(snaps, sched.is_snap);
  return sched;
}

int count_sign_changes(const Field& u) {
  int changes = 0, last = 0;
  for (int i = 0; i < u.size(); ++i) {
    const int s = u[i] > 0.0 ? 1 : (u[i] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

// Shared per-output bookkeeping for every model.
struct Recorder {
  RunResult* out;
  std::optional<double> prev_zero;

  void record(const RunConfig& cfg, double t, const Field& f, const Field& g,
              const Field& h, const Field& u, const std::optional<Field>& mu,
              std::optional<double> price_zero_override,
              std::optional<double> price_mass_override, double dt_used, bool diag,
              bool snap) {
    if (!diag && !snap) return;
    const double mass_f = integrate(f), mass_g = integrate(g);
    if (mass_f < 0.0 || mass_g < 0.0)
      throw InvariantError("negative mass at t = " + fmt_compact(t));

    if (diag) {
      DiagnosticsRow row;
      row.t = t;
      row.mass_f = mass_f;
      row.mass_g = mass_g;
      row.mass_h = integrate(h);
      row.mass_u = integrate(u);

      if (price_zero_override) {
        row.price_zero_crossing = price_zero_override;
      } else {
        try {
          row.price_zero_crossing = price_from_u(u, prev_zero);
        } catch (const std::invalid_argument&) {
        }
      }
      if (row.price_zero_crossing) prev_zero = row.price_zero_crossing;

      if (price_mass_override) {
        row.price_mass = price_mass_override;
      } else {
        try {
          row.price_mass = price_from_mass(h, mass_f);
        } catch (const std::invalid_argument&) {
        }
      }

      if (mu) {
        try {
          const PriceEstimates pe = price_estimates(*mu);
          row.price_argmax_mu = pe.argmax;
          row.price_mean_mu = pe.mean;
          row.price_median_mu = pe.median;
        } catch (const std::invalid_argument&) {
        }
      }

      Field gap(h.grid());
      double max_excess = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < h.size(); ++i) {
        const double h2 = h[i] * h[i], u2 = u[i] * u[i];
        gap[i] = h2 - u2;
        max_excess = std::max(max_excess, u2 - h2);
      }
      row.gap_h2_u2 = integrate(gap);
      row.max_u2_minus_h2 = max_excess;
      row.overlap_fg = integrate(nodewise_product(f, g));
      row.max_ux = max_value(central_diff(u));
      row.dt_used = dt_used;
      out->diagnostics.push_back(std::move(row));

      out->run_max_abs_h = std::max(out->run_max_abs_h, max_abs(h));
      out->run_max_u2_minus_h2 = std::max(out->run_max_u2_minus_h2, max_excess);
    }
    if (snap) {
      Snapshot s;
      s.t = t;
      s.f = f;
      s.g = g;
      s.h = h;
      s.u = u;
      s.mu = mu;
      out->snapshots.push_back(std::move(s));
    }
  }
};

}  // namespace

RunResult run_simulation(const RunConfig& cfg) {
  const Grid1D grid = cfg.grid();
  Field f0 = sample_init(cfg.init_f, grid);
  Field g0 = sample_init(cfg.init_g, grid);
  for (Field* fld : {&f0, &g0})
    for (int i = 0; i < fld->size(); ++i)
      if ((*fld)[i] < 0.0) {
        if ((*fld)[i] < -1e-12)
          throw ConfigError("initial data must be nonnegative");
        (*fld)[i] = 0.0;
      }

  RunResult out;
  out.config = cfg;
  out.grid = grid;
  out.m_f0 = integrate(f0);
  out.m_g0 = integrate(g0);
  out.run_max_u2_minus_h2 = -std::numeric_limits<double>::infinity();

  const EventSchedule sched = build_schedule(cfg);
  Recorder rec{&out, std::nullopt};
  const double dt_override = cfg.dt_override.value_or(0.0);

  switch (cfg.model) {
    case Model::bpf: {
      BpfParams p;
      p.k = cfg.k();
      p.a = cfg.a();
      p.sigma = *cfg.sigma;
      p.support_guard = true;
      BpfSolver solver(BpfState{f0, g0, 0.0}, p, cfg.safety);
      for (std::size_t e = 0; e < sched.times.size(); ++e) {
        solver.advance_to(sched.times[e], dt_override);
        const BpfState& s = solver.state();
        const Field h = s.f + s.g;
        const Field u = s.f - s.g;
        const Field mu = transaction_density(s, p);
        rec.record(cfg, s.t, s.f, s.g, h, u, mu, std::nullopt, std::nullopt,
                   solver.last_dt(), sched.is_diag[e], sched.is_snap[e]);
      }
      break;
    }
    case Model::hu:
    case Model::burgers: {
      HuParams p;
      p.epsilon = cfg.epsilon();
      p.diffusion = cfg.diffusion();
      p.scheme = cfg.scheme;
      p.freeze_h = cfg.freeze_h;
      HuSolver solver(from_fg(f0, g0), p, cfg.safety);
      for (std::size_t e = 0; e < sched.times.size(); ++e) {
        solver.advance_to(sched.times[e], dt_override);
        const HuState& s = solver.state();
        auto [f, g] = to_fg(s);
        rec.record(cfg, s.t, f, g, s.h, s.u, std::nullopt, std::nullopt, std::nullopt,
                   solver.last_dt(), sched.is_diag[e], sched.is_snap[e]);
      }
      break;
    }
    case Model::sharp: {
      Field h0 = f0 + g0;
      SharpSolver solver(h0, out.m_f0, cfg.diffusion(), cfg.safety);
      for (std::size_t e = 0; e < sched.times.size(); ++e) {
        solver.advance_to(sched.times[e], dt_override);
        const SharpState sm = solver.state_mass();
        const Field u = reconstruct_u(sm);
        Field f(grid), g(grid);
        for (int i = 0; i < f.size(); ++i) {
          f[i] = 0.5 * (sm.h[i] + u[i]);
          g[i] = 0.5 * (sm.h[i] - u[i]);
        }
        rec.record(cfg, solver.t(), f, g, sm.h, u, std::nullopt, solver.price_ode(),
                   sm.p, solver.last_dt(), sched.is_diag[e], sched.is_snap[e]);
      }
      break;
    }
  }
  return out;
}

namespace {

void write_header(std::FILE* fp, const RunConfig& cfg, const char* kind) {
  std::fprintf(fp, "# bpfsim %s\n", kind);
  for (const std::string& line : effective_config_lines(cfg))
    std::fprintf(fp, "# %s\n", line.c_str());
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? fmt17(*v) : std::string();
}

}  // namespace

void write_run_outputs(const RunResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const RunConfig& cfg = result.config;

  {
    const std::string path = dir + "/diagnostics.csv";
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw ConfigError("cannot open " + path + " for writing");
    write_header(fp, cfg, "diagnostics");
    std::fprintf(fp,
                 "t,mass_f,mass_g,mass_h,mass_u,price_zero_crossing,price_mass,"
                 "price_argmax_mu,price_mean_mu,price_median_mu,gap_h2_u2,"
                 "max_u2_minus_h2,overlap_fg,max_ux,dt_used\n");
    for (const DiagnosticsRow& r : result.diagnostics) {
      std::fprintf(fp, "%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s\n",
                   fmt17(r.t).c_str(), fmt17(r.mass_f).c_str(), fmt17(r.mass_g).c_str(),
                   fmt17(r.mass_h).c_str(), fmt17(r.mass_u).c_str(),
                   opt_cell(r.price_zero_crossing).c_str(), opt_cell(r.price_mass).c_str(),
                   opt_cell(r.price_argmax_mu).c_str(), opt_cell(r.price_mean_mu).c_str(),
                   opt_cell(r.price_median_mu).c_str(), fmt17(r.gap_h2_u2).c_str(),
                   fmt17(r.max_u2_minus_h2).c_str(), fmt17(r.overlap_fg).c_str(),
                   fmt17(r.max_ux).c_str(), fmt17(r.dt_used).c_str());
    }
    std::fclose(fp);
  }

  for (const Snapshot& s : result.snapshots) {
    const std::string path = dir + "/snapshot_" + fmt_compact(s.t) + ".csv";
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw ConfigError("cannot open " + path + " for writing");
    write_header(fp, cfg, "snapshot");
    std::fprintf(fp, "# t = %s\n", fmt17(s.t).c_str());
    std::fprintf(fp, "x,f,g,h,u,mu\n");
    for (int i = 0; i < s.h.size(); ++i) {
      std::fprintf(fp, "%s,%s,%s,%s,%s,%s\n", fmt17(result.grid.node(i)).c_str(),
                   fmt17(s.f[i]).c_str(), fmt17(s.g[i]).c_str(), fmt17(s.h[i]).c_str(),
                   fmt17(s.u[i]).c_str(), s.mu ? fmt17((*s.mu)[i]).c_str() : "");
    }
    std::fclose(fp);
  }
}

int run_to_files(const RunConfig& cfg, std::ostream& err) {
  try {
    RunResult result = run_simulation(cfg);
    if (cfg.output_dir.empty()) throw ConfigError("output_dir is required for file output");
    write_run_outputs(result, cfg.output_dir);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

namespace {

struct SnapshotFile {
  double t = 0.0;
  std::vector<double> x;
  std::map<std::string, std::vector<double>> cols;  // f,g,h,u,mu (mu may be absent)
};

SnapshotFile read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  SnapshotFile sf;
  std::string line;
  bool have_t = false, have_cols = false;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t pos = line.find("t = ");
      if (!have_t && pos != std::string::npos) {
        sf.t = std::stod(line.substr(pos + 4));
        have_t = true;
      }
      continue;
    }
    if (!have_cols) {
      std::stringstream ss(line);
      std::string name;
      while (std::getline(ss, name, ',')) names.push_back(name);
      have_cols = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= names.size()) throw ConfigError("ragged row in " + path);
      if (!cell.empty()) {
        const double v = std::stod(cell);
        if (names[c] == "x")
          sf.x.push_back(v);
        else
          sf.cols[names[c]].push_back(v);
      }
      ++c;
    }
  }
  if (!have_t) throw ConfigError("missing '# t =' metadata in " + path);
  return sf;
}

std::map<double, SnapshotFile> read_run_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::map<double, SnapshotFile> out;
  std::vector<std::string> paths;
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("snapshot_", 0) == 0 && name.size() > 4 &&
        name.substr(name.size() - 4) == ".csv")
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    SnapshotFile sf = read_snapshot(p);
    out[sf.t] = std::move(sf);
  }
  if (out.empty()) throw ConfigError("no snapshot files in " + dir);
  return out;
}

}  // namespace

double compare_dirs(const std::string& dir_a, const std::string& dir_b, Norm norm,
                    std::ostream& out) {
  const auto runs_a = read_run_dir(dir_a);
  const auto runs_b = read_run_dir(dir_b);
  if (runs_a.size() != runs_b.size())
    throw ConfigError("snapshot time mismatch between run directories");

  double worst = 0.0;
  auto itb = runs_b.begin();
  for (auto ita = runs_a.begin(); ita != runs_a.end(); ++ita, ++itb) {
    const SnapshotFile& A = ita->second;
    const SnapshotFile& B = itb->second;
    if (std::abs(A.t - B.t) > 1e-9 * std::max(1.0, std::abs(A.t)))
      throw ConfigError("snapshot time mismatch: " + fmt_compact(A.t) + " vs " +
                        fmt_compact(B.t));
    if (A.x.size() != B.x.size()) throw ConfigError("grid mismatch between runs");
    for (std::size_t i = 0; i < A.x.size(); ++i)
      if (std::abs(A.x[i] - B.x[i]) > 1e-12 * std::max(1.0, std::abs(A.x[i])))
        throw ConfigError("grid mismatch between runs");
    if (A.x.size() < 2) throw ConfigError("degenerate snapshot in comparison");
    const double dx = A.x[1] - A.x[0];

    for (const char* name : {"f", "g", "h", "u", "mu"}) {
      const auto ca = A.cols.find(name);
      const auto cb = B.cols.find(name);
      if (ca == A.cols.end() || cb == B.cols.end()) continue;
      if (ca->second.size() != A.x.size() || cb->second.size() != A.x.size()) continue;
      std::vector<double> diff(A.x.size());
      for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = ca->second[i] - cb->second[i];
      double val = 0.0;
      switch (norm) {
        case Norm::L1: {
          for (auto& d : diff) d = std::abs(d);
          val = trapezoid(diff, dx);
          break;
        }
        case Norm::L2: {
          for (auto& d : diff) d = d * d;
          val = std::sqrt(trapezoid(diff, dx));
          break;
        }
        case Norm::Linf: {
          for (auto d : diff) val = std::max(val, std::abs(d));
          break;
        }
      }
      out << "t=" << fmt_compact(A.t) << " field=" << name << " " << to_string(norm)
          << "=" << fmt17(val) << "\n";
      worst = std::max(worst, val);
    }
  }
  return worst;
}

}  // namespace bpfsim
