#include "dgair/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dgair/error.hpp"

namespace dgair {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(std::string_view v, std::size_t line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("expected a number, got '" + std::string(v) + "'", line);
  return out;
}

long long to_integer(std::string_view v, std::size_t line) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("expected an integer, got '" + std::string(v) + "'", line);
  return out;
}

int to_int_in(std::string_view v, std::size_t line, long long lo, long long hi, const char* what) {
  const long long x = to_integer(v, line);
  if (x < lo || x > hi)
    throw ConfigError(std::string(what) + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "], got " + std::to_string(x),
                      line);
  return static_cast<int>(x);
}

bool to_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError("expected true or false, got '" + std::string(v) + "'", line);
}

double positive(double v, std::size_t line, const char* what) {
  if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive", line);
  return v;
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string canonical_expression(std::string_view v, std::size_t line) {
  try {
    return expr::to_string(expr::parse(v));
  } catch (const ParseError& e) {
    throw ConfigError(std::string("expression '") + std::string(v) + "': " + e.what(), line);
  }
}

using Setter = std::function<void(RunConfig&, std::string_view, std::size_t)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = [] {
    std::map<std::string, std::map<std::string, Setter>> t;
    auto& mesh = t["mesh"];
    mesh["nx"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.mesh.nx = to_int_in(v, l, 1, 4096, "nx"); };
    mesh["ny"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.mesh.ny = to_int_in(v, l, 1, 4096, "ny"); };
    mesh["x0"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.mesh.domain.x0 = to_double(v, l); };
    mesh["x1"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.mesh.domain.x1 = to_double(v, l); };
    mesh["y0"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.mesh.domain.y0 = to_double(v, l); };
    mesh["y1"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.mesh.domain.y1 = to_double(v, l); };

    auto& dg = t["dg"];
    dg["k"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.dg.k = to_int_in(v, l, 0, kMaxDegree, "k"); };
    dg["scheme"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      const auto s = parse_scheme(v);
      if (!s) throw ConfigError("scheme must be sipg, nipg or iipg, got '" + std::string(v) + "'", l);
      c.dg.scheme = *s;
    };
    dg["sigma0"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      if (v == "auto") {
        c.dg.sigma0.reset();
        return;
      }
      const double s = to_double(v, l);
      if (s < 0.0) throw ConfigError("sigma0 must be >= 0", l);
      c.dg.sigma0 = s;
    };
    dg["beta0"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      const double b = to_double(v, l);
      if (b < 1.0) throw ConfigError("beta0 must be >= 1", l);
      c.dg.beta0 = b;
    };

    auto& model = t["model"];
    auto expression = [](std::optional<std::string> ModelSection::*field) {
      return [field](RunConfig& c, std::string_view v, std::size_t l) { c.model.*field = canonical_expression(v, l); };
    };
    auto number = [](std::optional<double> ModelSection::*field) {
      return [field](RunConfig& c, std::string_view v, std::size_t l) { c.model.*field = to_double(v, l); };
    };
    model["kx"] = expression(&ModelSection::kx);
    model["ky"] = expression(&ModelSection::ky);
    model["c"] = expression(&ModelSection::c);
    model["e"] = expression(&ModelSection::e);
    model["E"] = expression(&ModelSection::emission);
    model["Q"] = expression(&ModelSection::chemistry);
    model["u0"] = expression(&ModelSection::u0);
    model["exact"] = expression(&ModelSection::exact);
    model["k1"] = number(&ModelSection::k1);
    model["k2"] = number(&ModelSection::k2);
    model["k_lower"] = number(&ModelSection::k_lower);
    model["k_upper"] = number(&ModelSection::k_upper);
    model["c_lower"] = number(&ModelSection::c_lower);
    model["c_upper"] = number(&ModelSection::c_upper);
    model["L_Q"] = number(&ModelSection::lipschitz);
    model["u_min"] = number(&ModelSection::u_min);
    model["u_max"] = number(&ModelSection::u_max);
    model["manufactured"] = [](RunConfig& c, std::string_view v, std::size_t l) { c.model.manufactured = to_bool(v, l); };

    auto& time = t["time"];
    time["integrator"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      const auto i = parse_integrator(v);
      if (!i)
        throw ConfigError("integrator must be forward-euler, ssprk3, backward-euler or crank-nicolson, got '" +
                              std::string(v) + "'",
                          l);
      c.time.integrator = *i;
    };
    time["dt"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      if (v == "auto")
        c.time.dt.reset();
      else
        c.time.dt = positive(to_double(v, l), l, "dt");
    };
    time["T"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      const double T = to_double(v, l);
      if (T < 0.0) throw ConfigError("T must be >= 0", l);
      c.time.final_time = T;
    };
    time["safety"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.time.safety = positive(to_double(v, l), l, "safety");
    };
    time["picard_tolerance"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.time.picard_tolerance = positive(to_double(v, l), l, "picard_tolerance");
    };
    time["picard_max_iterations"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.time.picard_max_iterations = to_int_in(v, l, 1, 100000, "picard_max_iterations");
    };
    time["linear_tolerance"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.time.linear_tolerance = positive(to_double(v, l), l, "linear_tolerance");
    };
    time["startup_steps"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.time.startup_steps = to_int_in(v, l, 0, 1000, "startup_steps");
    };

    auto& run = t["run"];
    run["preset"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      const auto& names = preset_names();
      if (v != "custom" && std::find(names.begin(), names.end(), v) == names.end())
        throw ConfigError("unknown preset '" + std::string(v) + "'", l);
      c.run.preset = std::string(v);
    };
    run["levels"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.run.levels.clear();
      for (auto item : split_list(v)) c.run.levels.push_back(to_int_in(item, l, 1, 4096, "level"));
    };
    run["dt_scale"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.run.dt_scale = positive(to_double(v, l), l, "dt_scale");
    };
    run["seed"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      const long long s = to_integer(v, l);
      if (s < 0) throw ConfigError("seed must be >= 0", l);
      c.run.seed = static_cast<std::uint64_t>(s);
    };
    run["samples"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.run.samples = static_cast<std::size_t>(to_int_in(v, l, 1, 1000000, "samples"));
    };
    run["sigma_grid"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.run.sigma_grid.clear();
      for (auto item : split_list(v)) {
        const double s = to_double(item, l);
        if (s < 0.0) throw ConfigError("sigma_grid values must be >= 0", l);
        c.run.sigma_grid.push_back(s);
      }
    };

    auto& output = t["output"];
    output["directory"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      if (v.empty()) throw ConfigError("directory must not be empty", l);
      c.output.directory = std::string(v);
    };
    output["vtk_stride"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.output.vtk_stride = static_cast<std::size_t>(to_int_in(v, l, 0, 1000000000, "vtk_stride"));
    };
    output["observer_stride"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.output.observer_stride = static_cast<std::size_t>(to_int_in(v, l, 1, 1000000000, "observer_stride"));
    };
    output["observers_csv"] = [](RunConfig& c, std::string_view v, std::size_t l) {
      c.output.observers_csv = to_bool(v, l);
    };
    return t;
  }();
  return table;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  const auto& table = setters();
  const std::map<std::string, Setter>* section = nullptr;
  std::string section_name;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    ++line_no;
    const auto nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section_name = std::string(trim(line.substr(1, line.size() - 2)));
      const auto it = table.find(section_name);
      if (it == table.end()) throw ConfigError("unknown section [" + section_name + "]", line_no);
      section = &it->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    if (!section) throw ConfigError("key '" + key + "' outside any section", line_no);
    // The preset may also be named under [model].
    const std::map<std::string, Setter>* target = section;
    std::string qualified = section_name + "." + key;
    if (section_name == "model" && key == "preset") {
      target = &table.at("run");
      qualified = "run.preset";
    }
    const auto setter = target->find(key);
    if (setter == target->end()) throw ConfigError("unknown key '" + key + "' in [" + section_name + "]", line_no);
    if (!seen.insert(qualified).second) throw ConfigError("duplicate key '" + key + "'", line_no);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line_no);
    setter->second(cfg, value, line_no);
  }
  const Rect& d = cfg.mesh.domain;
  if (!(d.x1 > d.x0) || !(d.y1 > d.y0)) throw ConfigError("domain bounds must satisfy x0 < x1 and y0 < y1", 0);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto opt_expr = [&](const char* key, const std::optional<std::string>& v) {
    if (v) out << key << " = " << *v << "\n";
  };
  auto opt_num = [&](const char* key, const std::optional<double>& v) {
    if (v) out << key << " = " << format_double(*v) << "\n";
  };
  out << "[mesh]\n"
      << "nx = " << cfg.mesh.nx << "\n"
      << "ny = " << cfg.mesh.ny << "\n"
      << "x0 = " << format_double(cfg.mesh.domain.x0) << "\n"
      << "x1 = " << format_double(cfg.mesh.domain.x1) << "\n"
      << "y0 = " << format_double(cfg.mesh.domain.y0) << "\n"
      << "y1 = " << format_double(cfg.mesh.domain.y1) << "\n\n";

  out << "[dg]\n"
      << "k = " << cfg.dg.k << "\n"
      << "scheme = " << scheme_name(cfg.dg.scheme) << "\n"
      << "sigma0 = " << (cfg.dg.sigma0 ? format_double(*cfg.dg.sigma0) : "auto") << "\n"
      << "beta0 = " << format_double(cfg.dg.beta0) << "\n\n";

  out << "[model]\n";
  opt_expr("kx", cfg.model.kx);
  opt_expr("ky", cfg.model.ky);
  opt_expr("c", cfg.model.c);
  opt_expr("e", cfg.model.e);
  opt_expr("E", cfg.model.emission);
  opt_expr("Q", cfg.model.chemistry);
  opt_expr("u0", cfg.model.u0);
  opt_expr("exact", cfg.model.exact);
  opt_num("k1", cfg.model.k1);
  opt_num("k2", cfg.model.k2);
  opt_num("k_lower", cfg.model.k_lower);
  opt_num("k_upper", cfg.model.k_upper);
  opt_num("c_lower", cfg.model.c_lower);
  opt_num("c_upper", cfg.model.c_upper);
  opt_num("L_Q", cfg.model.lipschitz);
  opt_num("u_min", cfg.model.u_min);
  opt_num("u_max", cfg.model.u_max);
  out << "manufactured = " << (cfg.model.manufactured ? "true" : "false") << "\n\n";

  out << "[time]\n"
      << "integrator = " << integrator_name(cfg.time.integrator) << "\n"
      << "dt = " << (cfg.time.dt ? format_double(*cfg.time.dt) : "auto") << "\n";
  if (cfg.time.final_time) out << "T = " << format_double(*cfg.time.final_time) << "\n";
  out << "safety = " << format_double(cfg.time.safety) << "\n"
      << "picard_tolerance = " << format_double(cfg.time.picard_tolerance) << "\n"
      << "picard_max_iterations = " << cfg.time.picard_max_iterations << "\n"
      << "linear_tolerance = " << format_double(cfg.time.linear_tolerance) << "\n"
      << "startup_steps = " << cfg.time.startup_steps << "\n\n";

  out << "[run]\n"
      << "preset = " << cfg.run.preset << "\n"
      << "levels = ";
  for (std::size_t i = 0; i < cfg.run.levels.size(); ++i) out << (i ? ", " : "") << cfg.run.levels[i];
  out << "\n"
      << "dt_scale = " << format_double(cfg.run.dt_scale) << "\n"
      << "seed = " << cfg.run.seed << "\n"
      << "samples = " << cfg.run.samples << "\n"
      << "sigma_grid = ";
  for (std::size_t i = 0; i < cfg.run.sigma_grid.size(); ++i)
    out << (i ? ", " : "") << format_double(cfg.run.sigma_grid[i]);
  out << "\n\n";

  out << "[output]\n"
      << "directory = " << cfg.output.directory << "\n"
      << "vtk_stride = " << cfg.output.vtk_stride << "\n"
      << "observer_stride = " << cfg.output.observer_stride << "\n"
      << "observers_csv = " << (cfg.output.observers_csv ? "true" : "false") << "\n";
  return out.str();
}

namespace {

ProblemSpec zero_problem() {
  ProblemSpec spec;
  spec.name = "custom";
  const auto zero = expr::number(0.0);
  spec.kx = spec.ky = spec.c = spec.e = spec.emission = spec.chemistry = spec.u0 = zero;
  return spec;
}

}  // namespace

ProblemSpec build_problem(const RunConfig& cfg) {
  ProblemSpec spec;
  if (cfg.run.preset == "custom") {
    spec = zero_problem();
  } else {
    try {
      spec = make_preset(cfg.run.preset);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what(), 0);
    }
  }
  const ModelSection& m = cfg.model;
  spec.domain = cfg.mesh.domain;
  bool coefficients_changed = false;
  auto set_expr = [&](expr::ExprPtr& slot, const std::optional<std::string>& text, bool transport) {
    if (!text) return;
    slot = expr::parse(*text);
    coefficients_changed = coefficients_changed || transport;
  };
  set_expr(spec.kx, m.kx, true);
  set_expr(spec.ky, m.ky, true);
  set_expr(spec.c, m.c, true);
  set_expr(spec.e, m.e, true);
  set_expr(spec.chemistry, m.chemistry, true);
  set_expr(spec.emission, m.emission, false);
  set_expr(spec.u0, m.u0, false);
  if (m.k1) spec.k1 = *m.k1, coefficients_changed = true;
  if (m.k2) spec.k2 = *m.k2, coefficients_changed = true;
  if (m.k_lower) spec.bounds.k_lower = *m.k_lower;
  if (m.k_upper) spec.bounds.k_upper = *m.k_upper;
  if (m.c_lower) spec.bounds.c_lower = *m.c_lower;
  if (m.c_upper) spec.bounds.c_upper = *m.c_upper;
  if (m.lipschitz) spec.lipschitz_bound = *m.lipschitz;
  if (m.u_min) spec.u_min = *m.u_min;
  if (m.u_max) spec.u_max = *m.u_max;
  if (m.exact) {
    spec.exact = ExactSolution::from(expr::parse(*m.exact));
    if (!m.u0) spec.u0 = expr::simplify(expr::substitute(spec.exact->u, expr::Var::t, expr::number(0.0)));
  }
  // A preset's manufactured forcing is rebuilt when its coefficients change.
  const bool preset_mms = spec.exact && (cfg.run.preset == "smooth-mms" || cfg.run.preset == "polynomial-mms");
  if (m.manufactured && !spec.exact) throw ConfigError("manufactured = true needs an exact solution", 0);
  if (m.manufactured && m.emission) throw ConfigError("manufactured = true conflicts with an explicit E", 0);
  if (!m.emission && (m.manufactured || (preset_mms && (coefficients_changed || m.exact))))
    spec.emission = mms_forcing(spec, *spec.exact);
  if (cfg.time.final_time) spec.final_time = *cfg.time.final_time;
  return spec;
}

PenaltyConfig build_penalty(const RunConfig& cfg) {
  PenaltyConfig p = PenaltyConfig::for_scheme(cfg.dg.scheme, cfg.dg.k);
  if (cfg.dg.sigma0) p.sigma0 = *cfg.dg.sigma0;
  p.beta0 = cfg.dg.beta0;
  return p;
}

TimeConfig build_time(const RunConfig& cfg, const ProblemSpec& spec) {
  TimeConfig t;
  t.integrator = cfg.time.integrator;
  t.dt = cfg.time.dt;
  t.final_time = cfg.time.final_time.value_or(spec.final_time);
  t.cfl_safety = cfg.time.safety;
  t.picard_tolerance = cfg.time.picard_tolerance;
  t.picard_max_iterations = cfg.time.picard_max_iterations;
  t.linear_tolerance = cfg.time.linear_tolerance;
  t.startup_steps = cfg.time.startup_steps;
  return t;
}

}  // namespace dgair
