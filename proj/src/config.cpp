#include "bpfsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace bpfsim {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string to_string(Model m) {
  switch (m) {
    case Model::bpf: return "bpf";
    case Model::hu: return "hu";
    case Model::burgers: return "burgers";
    case Model::sharp: return "sharp";
  }
  return "?";
}

std::string to_string(Scheme s) {
  return s == Scheme::paper_central ? "paper_central" : "flux_conservative";
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

struct RawValue {
  std::string value;
  int line = 0;
};

using KeyMap = std::map<std::string, RawValue>;

double to_double(const std::string& key, const RawValue& rv) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(rv.value, &pos);
    if (pos != rv.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("invalid number for key '" + key + "': " + rv.value, rv.line);
  }
}

int to_int(const std::string& key, const RawValue& rv) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(rv.value, &pos);
    if (pos != rv.value.size()) throw std::invalid_argument("");
    return static_cast<int>(v);
  } catch (...) {
    throw ConfigError("invalid integer for key '" + key + "': " + rv.value, rv.line);
  }
}

bool to_bool(const std::string& key, const RawValue& rv) {
  if (rv.value == "true") return true;
  if (rv.value == "false") return false;
  throw ConfigError("invalid boolean for key '" + key + "' (use true|false)", rv.line);
}

std::vector<double> to_list(const std::string& key, const RawValue& rv) {
  std::vector<double> out;
  std::stringstream ss(rv.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("empty entry in list for key '" + key + "'", rv.line);
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("");
    } catch (...) {
      throw ConfigError("invalid list entry for key '" + key + "': " + item, rv.line);
    }
  }
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'", rv.line);
  return out;
}

const char* const kKnownKeys[] = {
    "model", "x_min", "x_max", "n_cells", "sigma", "diffusion", "epsilon", "k",
    "a", "c", "T", "dt_out", "dt_override", "snapshot_times", "scheme",
    "freeze_h", "output_dir", "safety"};

const char* const kInitKeys[] = {"kind",   "center", "width",      "amplitude",
                                 "steepness", "offset", "centers", "widths",
                                 "amplitudes", "path"};

bool known_key(const std::string& key) {
  for (const char* k : kKnownKeys)
    if (key == k) return true;
  for (const char* side : {"init.f.", "init.g."}) {
    if (key.rfind(side, 0) == 0) {
      const std::string sub = key.substr(7);
      for (const char* k : kInitKeys)
        if (sub == k) return true;
    }
  }
  return false;
}

InitSpec parse_init(const KeyMap& kv, const std::string& prefix) {
  auto get = [&](const std::string& sub) -> const RawValue* {
    auto it = kv.find(prefix + sub);
    return it == kv.end() ? nullptr : &it->second;
  };
  const RawValue* kind = get("kind");
  if (!kind) throw ConfigError("missing required key '" + prefix + "kind'");
  InitSpec spec;
  auto need = [&](const std::string& sub) -> const RawValue& {
    const RawValue* rv = get(sub);
    if (!rv) throw ConfigError("missing required key '" + prefix + sub + "'");
    return *rv;
  };
  if (kind->value == "gaussian_bump") {
    spec.kind = InitSpec::Kind::gaussian_bump;
    spec.center = to_double(prefix + "center", need("center"));
    spec.width = to_double(prefix + "width", need("width"));
    spec.amplitude = to_double(prefix + "amplitude", need("amplitude"));
    if (!(spec.width > 0.0))
      throw ConfigError("'" + prefix + "width' must be > 0", need("width").line);
  } else if (kind->value == "bump_sum") {
    spec.kind = InitSpec::Kind::bump_sum;
    spec.centers = to_list(prefix + "centers", need("centers"));
    spec.widths = to_list(prefix + "widths", need("widths"));
    spec.amplitudes = to_list(prefix + "amplitudes", need("amplitudes"));
    if (spec.widths.size() != spec.centers.size() ||
        spec.amplitudes.size() != spec.centers.size())
      throw ConfigError("'" + prefix + "centers/widths/amplitudes' must have equal length",
                        kind->line);
    for (double w : spec.widths)
      if (!(w > 0.0)) throw ConfigError("'" + prefix + "widths' must be > 0", kind->line);
  } else if (kind->value == "tanh_profile") {
    spec.kind = InitSpec::Kind::tanh_profile;
    spec.center = to_double(prefix + "center", need("center"));
    spec.steepness = to_double(prefix + "steepness", need("steepness"));
    spec.amplitude = to_double(prefix + "amplitude", need("amplitude"));
    spec.offset = to_double(prefix + "offset", need("offset"));
  } else if (kind->value == "file") {
    spec.kind = InitSpec::Kind::file;
    spec.path = need("path").value;
  } else {
    throw ConfigError("unknown init kind '" + kind->value + "' for '" + prefix + "kind'",
                      kind->line);
  }
  return spec;
}

}  // namespace

Field sample_init(const InitSpec& spec, const Grid1D& grid) {
  switch (spec.kind) {
    case InitSpec::Kind::gaussian_bump:
      return Field::sample(grid, [&](double x) {
        const double z = (x - spec.center) / spec.width;
        return spec.amplitude * std::exp(-0.5 * z * z);
      });
    case InitSpec::Kind::bump_sum:
      return Field::sample(grid, [&](double x) {
        double v = 0.0;
        for (std::size_t b = 0; b < spec.centers.size(); ++b) {
          const double z = (x - spec.centers[b]) / spec.widths[b];
          v += spec.amplitudes[b] * std::exp(-0.5 * z * z);
        }
        return v;
      });
    case InitSpec::Kind::tanh_profile:
      return Field::sample(grid, [&](double x) {
        return spec.offset + spec.amplitude * std::tanh(spec.steepness * (x - spec.center));
      });
    case InitSpec::Kind::file: {
      std::ifstream in(spec.path);
      if (!in) throw ConfigError("cannot open init file '" + spec.path + "'");
      Field out(grid);
      std::string line;
      int i = 0;
      while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
        double x = 0.0, v = 0.0;
        if (std::sscanf(line.c_str(), "%lf ,%lf", &x, &v) != 2 &&
            std::sscanf(line.c_str(), "%lf,%lf", &x, &v) != 2)
          throw ConfigError("bad row in init file '" + spec.path + "': " + line);
        if (i > grid.n_cells) throw ConfigError("too many rows in init file '" + spec.path + "'");
        if (std::abs(x - grid.node(i)) > 1e-12 * std::max(1.0, std::abs(x)))
          throw ConfigError("init file x column does not match the grid at row " +
                            std::to_string(i));
        out[i++] = v;
      }
      if (i != grid.n_nodes())
        throw ConfigError("init file '" + spec.path + "' has " + std::to_string(i) +
                          " rows, expected " + std::to_string(grid.n_nodes()));
      return out;
    }
  }
  throw ConfigError("unreachable init kind");
}

double RunConfig::diffusion() const {
  if (diffusion_in) return *diffusion_in;
  if (sigma) return 0.5 * (*sigma) * (*sigma);
  throw ConfigError("no diffusion coefficient available");
}

double RunConfig::epsilon() const {
  if (epsilon_in) return *epsilon_in;
  if (c_in) return 1.0 / *c_in;
  throw ConfigError("no epsilon available");
}

std::optional<double> RunConfig::c() const {
  if (model == Model::bpf) return k() * a();
  if (model == Model::sharp) return std::nullopt;
  return 1.0 / epsilon();
}

RunConfig parse_config(const std::string& text) {
  KeyMap kv;
  {
    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
      ++line_no;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw = raw.substr(0, hash);
      raw = trim(raw);
      if (raw.empty()) continue;
      const auto eq = raw.find('=');
      if (eq == std::string::npos)
        throw ConfigError("expected 'key = value': " + raw, line_no);
      const std::string key = trim(raw.substr(0, eq));
      const std::string value = trim(raw.substr(eq + 1));
      if (key.empty()) throw ConfigError("empty key", line_no);
      if (value.empty()) throw ConfigError("empty value for key '" + key + "'", line_no);
      if (!known_key(key)) throw ConfigError("unknown key '" + key + "'", line_no);
      if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
      kv[key] = RawValue{value, line_no};
    }
  }

  auto have = [&](const std::string& key) { return kv.count(key) != 0; };
  auto need = [&](const std::string& key) -> const RawValue& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
  };

  RunConfig cfg;

  {
    const RawValue& rv = need("model");
    if (rv.value == "bpf") cfg.model = Model::bpf;
    else if (rv.value == "hu") cfg.model = Model::hu;
    else if (rv.value == "burgers") cfg.model = Model::burgers;
    else if (rv.value == "sharp") cfg.model = Model::sharp;
    else throw ConfigError("unknown model '" + rv.value + "'", rv.line);
  }

  cfg.x_min = to_double("x_min", need("x_min"));
  cfg.x_max = to_double("x_max", need("x_max"));
  cfg.n_cells = to_int("n_cells", need("n_cells"));
  if (!(cfg.x_min < cfg.x_max))
    throw ConfigError("x_min must be < x_max", need("x_min").line);
  if (cfg.n_cells < 4) throw ConfigError("n_cells must be >= 4", need("n_cells").line);

  cfg.T = to_double("T", need("T"));
  if (!(cfg.T >= 0.0)) throw ConfigError("T must be >= 0", need("T").line);
  cfg.dt_out = to_double("dt_out", need("dt_out"));
  if (!(cfg.dt_out > 0.0)) throw ConfigError("dt_out must be > 0", need("dt_out").line);

  if (have("sigma")) {
    cfg.sigma = to_double("sigma", kv["sigma"]);
    if (!(*cfg.sigma > 0.0)) throw ConfigError("sigma must be > 0", kv["sigma"].line);
  }
  if (have("diffusion")) {
    cfg.diffusion_in = to_double("diffusion", kv["diffusion"]);
    if (!(*cfg.diffusion_in > 0.0))
      throw ConfigError("diffusion must be > 0", kv["diffusion"].line);
  }
  if (have("epsilon")) {
    cfg.epsilon_in = to_double("epsilon", kv["epsilon"]);
    if (!(*cfg.epsilon_in > 0.0)) throw ConfigError("epsilon must be > 0", kv["epsilon"].line);
  }
  if (have("k")) {
    cfg.k_in = to_double("k", kv["k"]);
    if (!(*cfg.k_in >= 0.0)) throw ConfigError("k must be >= 0", kv["k"].line);
  }
  if (have("a")) {
    cfg.a_in = to_double("a", kv["a"]);
    if (!(*cfg.a_in > 0.0)) throw ConfigError("a must be > 0", kv["a"].line);
  }
  if (have("c")) cfg.c_in = to_double("c", kv["c"]);
  if (have("dt_override")) {
    cfg.dt_override = to_double("dt_override", kv["dt_override"]);
    if (!(*cfg.dt_override > 0.0))
      throw ConfigError("dt_override must be > 0", kv["dt_override"].line);
  }
  if (have("safety")) {
    cfg.safety = to_double("safety", kv["safety"]);
    if (!(cfg.safety > 0.0 && cfg.safety <= 1.0))
      throw ConfigError("safety must lie in (0, 1]", kv["safety"].line);
  }
  if (have("scheme")) {
    const RawValue& rv = kv["scheme"];
    if (rv.value == "paper_central") cfg.scheme = Scheme::paper_central;
    else if (rv.value == "flux_conservative") cfg.scheme = Scheme::flux_conservative;
    else throw ConfigError("unknown scheme '" + rv.value + "'", rv.line);
  }
  if (have("freeze_h")) cfg.freeze_h = to_bool("freeze_h", kv["freeze_h"]);
  if (have("output_dir")) cfg.output_dir = kv["output_dir"].value;

  if (have("snapshot_times")) {
    cfg.snapshot_times = to_list("snapshot_times", kv["snapshot_times"]);
    std::sort(cfg.snapshot_times.begin(), cfg.snapshot_times.end());
    cfg.snapshot_times.erase(
        std::unique(cfg.snapshot_times.begin(), cfg.snapshot_times.end()),
        cfg.snapshot_times.end());
    for (double t : cfg.snapshot_times)
      if (t < 0.0 || t > cfg.T)
        throw ConfigError("snapshot_times must lie in [0, T]", kv["snapshot_times"].line);
  }

  // model / parameter consistency
  const Grid1D grid = cfg.grid();
  switch (cfg.model) {
    case Model::bpf: {
      if (!cfg.k_in) throw ConfigError("model bpf requires key 'k'");
      if (!cfg.a_in) throw ConfigError("model bpf requires key 'a'");
      if (cfg.epsilon_in)
        throw ConfigError("model bpf takes (k, a), not epsilon", kv["epsilon"].line);
      if (!cfg.sigma) throw ConfigError("model bpf requires key 'sigma'");
      if (cfg.diffusion_in)
        throw ConfigError("model bpf derives its diffusivity from sigma; drop 'diffusion'",
                          kv["diffusion"].line);
      try {
        offset_nodes_for(*cfg.a_in, grid);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), kv["a"].line);
      }
      if (cfg.c_in && std::abs(*cfg.c_in - (*cfg.k_in) * (*cfg.a_in)) >
                          1e-9 * std::max(1.0, std::abs(*cfg.c_in)))
        throw ConfigError("c does not match k*a", kv["c"].line);
      if (cfg.freeze_h) throw ConfigError("freeze_h applies to hu/burgers models only",
                                          kv["freeze_h"].line);
      break;
    }
    case Model::hu:
    case Model::burgers: {
      if (cfg.k_in || cfg.a_in)
        throw ConfigError("model " + to_string(cfg.model) +
                          " takes epsilon (or c), not (k, a)");
      if (!cfg.epsilon_in && !cfg.c_in)
        throw ConfigError("model " + to_string(cfg.model) + " requires key 'epsilon'");
      if (cfg.epsilon_in && cfg.c_in &&
          std::abs(*cfg.c_in * (*cfg.epsilon_in) - 1.0) > 1e-9)
        throw ConfigError("c does not match 1/epsilon", kv["c"].line);
      if (!cfg.diffusion_in && !cfg.sigma)
        throw ConfigError("model " + to_string(cfg.model) +
                          " requires 'diffusion' or 'sigma'");
      if (cfg.model == Model::burgers) {
        if (have("freeze_h") && !cfg.freeze_h)
          throw ConfigError("model burgers implies freeze_h = true", kv["freeze_h"].line);
        cfg.freeze_h = true;
      }
      break;
    }
    case Model::sharp: {
      if (cfg.epsilon_in || cfg.k_in || cfg.a_in || cfg.c_in)
        throw ConfigError("model sharp is the zero-epsilon limit; drop epsilon/k/a/c");
      if (!cfg.diffusion_in && !cfg.sigma)
        throw ConfigError("model sharp requires 'diffusion' or 'sigma'");
      if (cfg.freeze_h) throw ConfigError("freeze_h applies to hu/burgers models only",
                                          kv["freeze_h"].line);
      break;
    }
  }

  cfg.init_f = parse_init(kv, "init.f.");
  cfg.init_g = parse_init(kv, "init.g.");

  // sampled initial data must be admissible
  Field f0 = sample_init(cfg.init_f, grid);
  Field g0 = sample_init(cfg.init_g, grid);
  for (Field* fld : {&f0, &g0}) {
    for (int i = 0; i < fld->size(); ++i) {
      if ((*fld)[i] < 0.0) {
        if ((*fld)[i] < -1e-12)
          throw ConfigError("initial data must be nonnegative (node " + std::to_string(i) +
                            ")");
        (*fld)[i] = 0.0;
      }
    }
  }
  if (cfg.model == Model::burgers) {
    for (int i = 0; i < f0.size(); ++i)
      if (std::abs(f0[i] + g0[i] - 1.0) > 1e-9)
        throw ConfigError("model burgers requires initial h = f + g identically 1");
  }

  return cfg;
}

std::vector<std::string> effective_config_lines(const RunConfig& cfg) {
  std::vector<std::string> out;
  auto add = [&](const std::string& key, const std::string& value) {
    out.push_back(key + " = " + value);
  };
  add("model", to_string(cfg.model));
  add("x_min", fmt17(cfg.x_min));
  add("x_max", fmt17(cfg.x_max));
  add("n_cells", std::to_string(cfg.n_cells));
  if (cfg.sigma) add("sigma", fmt17(*cfg.sigma));
  if (cfg.model == Model::bpf) {
    add("k", fmt17(cfg.k()));
    add("a", fmt17(cfg.a()));
  } else if (cfg.model != Model::sharp) {
    add("epsilon", fmt17(cfg.epsilon()));
  }
  if (cfg.model != Model::bpf) add("diffusion", fmt17(cfg.diffusion()));
  add("T", fmt17(cfg.T));
  add("dt_out", fmt17(cfg.dt_out));
  if (cfg.dt_override) add("dt_override", fmt17(*cfg.dt_override));
  if (!cfg.snapshot_times.empty()) {
    std::string list;
    for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
      if (i) list += ",";
      list += fmt17(cfg.snapshot_times[i]);
    }
    add("snapshot_times", list);
  }
  add("scheme", to_string(cfg.scheme));
  add("freeze_h", cfg.freeze_h ? "true" : "false");
  add("safety", fmt17(cfg.safety));
  if (!cfg.output_dir.empty()) add("output_dir", cfg.output_dir);

  auto add_init = [&](const std::string& prefix, const InitSpec& s) {
    switch (s.kind) {
      case InitSpec::Kind::gaussian_bump:
        add(prefix + "kind", "gaussian_bump");
        add(prefix + "center", fmt17(s.center));
        add(prefix + "width", fmt17(s.width));
        add(prefix + "amplitude", fmt17(s.amplitude));
        break;
      case InitSpec::Kind::bump_sum: {
        add(prefix + "kind", "bump_sum");
        auto join = [&](const std::vector<double>& v) {
          std::string r;
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) r += ",";
            r += fmt17(v[i]);
          }
          return r;
        };
        add(prefix + "centers", join(s.centers));
        add(prefix + "widths", join(s.widths));
        add(prefix + "amplitudes", join(s.amplitudes));
        break;
      }
      case InitSpec::Kind::tanh_profile:
        add(prefix + "kind", "tanh_profile");
        add(prefix + "center", fmt17(s.center));
        add(prefix + "steepness", fmt17(s.steepness));
        add(prefix + "amplitude", fmt17(s.amplitude));
        add(prefix + "offset", fmt17(s.offset));
        break;
      case InitSpec::Kind::file:
        add(prefix + "kind", "file");
        add(prefix + "path", s.path);
        break;
    }
  };
  add_init("init.f.", cfg.init_f);
  add_init("init.g.", cfg.init_g);

  // derived quantities
  const Grid1D g = cfg.grid();
  add("derived.dx", fmt17(g.dx));
  if (auto c = cfg.c()) add("derived.c", fmt17(*c));
  if (cfg.model == Model::bpf)
    add("derived.a_nodes", std::to_string(offset_nodes_for(cfg.a(), g)));
  return out;
}

std::vector<std::string> preset_names() { return {"figure1", "burgers-limit"}; }

std::string preset_text(const std::string& name) {
  if (name == "figure1") {
    return R"(# Interleaved buyer/vendor groups in the high-frequency regime:
# two buyer bumps flanking a central vendor bump, run until the
# densities segregate and the price interface equilibrates.
model = hu
x_min = -1
x_max = 1
n_cells = 2000
sigma = 0.1
epsilon = 0.05
T = 30
dt_out = 0.25
snapshot_times = 0,0.5,1,5,10,30
scheme = paper_central
init.f.kind = bump_sum
init.f.centers = -0.45,0.45
init.f.widths = 0.2,0.2
init.f.amplitudes = 0.25,0.25
init.g.kind = gaussian_bump
init.g.center = 0
init.g.width = 0.2
init.g.amplitude = 0.3
output_dir = out/figure1
)";
  }
  if (name == "burgers-limit") {
    return R"(# Equilibrated total density (h = 1): the imbalance follows a viscous
# Burgers equation on the fast time scale and steepens into a single
# standing interface.
model = burgers
x_min = -1
x_max = 1
n_cells = 400
diffusion = 1
epsilon = 0.05
T = 1
dt_out = 0.005
snapshot_times = 0,0.5,1
init.f.kind = tanh_profile
init.f.center = 0
init.f.steepness = 4
init.f.amplitude = -0.45
init.f.offset = 0.5
init.g.kind = tanh_profile
init.g.center = 0
init.g.steepness = 4
init.g.amplitude = 0.45
init.g.offset = 0.5
output_dir = out/burgers-limit
)";
  }
  throw ConfigError("unknown preset '" + name + "' (available: figure1, burgers-limit)");
}

RunConfig preset_config(const std::string& name) { return parse_config(preset_text(name)); }

}  // namespace bpfsim
