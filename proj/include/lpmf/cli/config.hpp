#pragma once

#include "lpmf/fock/presets.hpp"
#include "lpmf/landau_pekar/landau_pekar.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lpmf::cli {

namespace pt = boost::property_tree;

struct ConfigError : std::runtime_error {
  std::string path;
  ConfigError(std::string field, const std::string& msg) : std::runtime_error(field + ": " + msg), path(std::move(field)) {}
};

struct LpSettings {
  double L = 10.0;
  int n = 32;
  int d = 3;
  double alpha = 0.1;
  std::string initial = "gaussian";  // gaussian | fixed_point
  double sigma = 0.0;                // 0 selects L/8
  LPStepperConfig stepper;
};

struct FockSettings {
  double t_end = 1.0;
  int samples = 11;
  std::string psi = "peaked";       // peaked | uniform
  std::string phi = "fixed_point";  // zero | fixed_point
  double krylov_tol = 1e-10;
  double lp_dt = 1e-3;
};

struct BoundsSettings {
  std::vector<double> form_factor_K{0.5, 1.0, 4.0, 16.0};
  std::vector<double> eps{0.25, 1.0, 4.0, 16.0};
  double cg_p_max = 10.0;
  bool operator_checks = true;
  bool scaling = false;
  ModelSpec scaling_spec;
  std::vector<double> scaling_K;
  std::vector<int> scaling_N{1, 2, 3};
};

struct SweepSettings {
  std::vector<int> N_list;
  std::vector<double> K_list;
  std::vector<double> alpha_list;
  int threads = 0;
};

struct RunConfig {
  std::string mode;
  uint64_t seed = 0;
  bool has_seed = false;
  std::string out = "out";
  std::string source_text;
  std::vector<std::pair<std::string, std::string>> entries;  // flattened echo
  LpSettings lp;
  ModelSpec model;
  FockSettings fock;
  BoundsSettings bounds;
  SweepSettings sweep;
  double leakage_tolerance = 1e-6;
};

namespace detail {

template <class T>
T parse_value(const std::string& field, const std::string& text) {
  std::istringstream is(text);
  T v{};
  is >> v;
  std::string rest;
  if (is.fail() || (is >> rest)) throw ConfigError(field, "cannot parse '" + text + "'");
  return v;
}

template <>
inline std::string parse_value<std::string>(const std::string&, const std::string& text) {
  return text;
}

template <>
inline bool parse_value<bool>(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(field, "expected true/false, got '" + text + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& field, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError(field, "empty list element");
    out.push_back(parse_value<T>(field, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& t) : t_(t) {}

  bool has(const std::string& path) const { return static_cast<bool>(t_.get_optional<std::string>(path)); }
  bool has_section(const std::string& s) const { return static_cast<bool>(t_.get_child_optional(s)); }

  template <class T>
  T required(const std::string& path) const {
    auto v = t_.get_optional<std::string>(path);
    if (!v) throw ConfigError(path, "missing required field");
    return parse_value<T>(path, *v);
  }

  template <class T>
  T get(const std::string& path, T fallback) const {
    auto v = t_.get_optional<std::string>(path);
    return v ? parse_value<T>(path, *v) : fallback;
  }

  template <class T>
  std::vector<T> list(const std::string& path, std::vector<T> fallback) const {
    auto v = t_.get_optional<std::string>(path);
    return v ? parse_list<T>(path, *v) : fallback;
  }

  template <class T>
  std::vector<T> required_list(const std::string& path) const {
    auto v = t_.get_optional<std::string>(path);
    if (!v) throw ConfigError(path, "missing required field");
    return parse_list<T>(path, *v);
  }

 private:
  const pt::ptree& t_;
};

inline void check(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(field, msg);
}

// modes = shells:1 | axis:1,5,9
inline std::vector<Idx3> parse_modes(const std::string& field, const std::string& text, int dim) {
  const auto colon = text.find(':');
  check(colon != std::string::npos, field, "expected 'shells:<count>' or 'axis:<r1,r2,...>'");
  const std::string kind = text.substr(0, colon), arg = text.substr(colon + 1);
  if (kind == "shells") {
    const int shells = parse_value<int>(field, arg);
    check(shells >= 0, field, "shell count must be >= 0");
    return shells == 0 ? std::vector<Idx3>{} : lowest_shell_modes(dim, shells);
  }
  if (kind == "axis") {
    const auto radii = parse_list<int>(field, arg);
    for (int r : radii) check(r > 0, field, "axis radii must be positive");
    return axis_modes(dim, radii);
  }
  throw ConfigError(field, "unknown mode set '" + kind + "'");
}

inline ModelSpec read_model(const Reader& r, const std::string& sec) {
  ModelSpec s;
  const double L = r.required<double>(sec + ".L");
  const int n = r.required<int>(sec + ".n");
  const int d = r.get<int>(sec + ".d", 3);
  check(L > 0.0, sec + ".L", "must be positive");
  check(n >= 1, sec + ".n", "must be >= 1");
  check(d == 1 || d == 3, sec + ".d", "must be 1 or 3");
  s.sites = BoxLattice(L, n, d);
  s.n_particles = r.get<int>(sec + ".N", 1);
  check(s.n_particles >= 1, sec + ".N", "must be >= 1");
  s.modes = parse_modes(sec + ".modes", r.get<std::string>(sec + ".modes", "shells:1"), d);
  s.phonon_cutoff = r.required<int>(sec + ".cutoff");
  check(s.phonon_cutoff >= 0, sec + ".cutoff", "must be >= 0");
  s.alpha = r.get<double>(sec + ".alpha", 1.0);
  check(s.alpha >= 0.0, sec + ".alpha", "must be >= 0");
  s.K = r.get<double>(sec + ".K", 1.0);
  check(s.K > 0.0, sec + ".K", "must be positive");
  s.dimension_cap = r.get<std::size_t>(sec + ".dimension_cap", 500000);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(sec + ".modes", e.what());
  }
  return s;
}

inline void flatten(const pt::ptree& t, const std::string& prefix,
                    std::vector<std::pair<std::string, std::string>>& out) {
  for (const auto& [k, v] : t) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.empty()) out.emplace_back(key, v.data());
    else flatten(v, key, out);
  }
}

}  // namespace detail

// Parses and validates an INI config for the given subcommand; every field
// the subcommand needs is checked before any computation starts.
inline RunConfig parse_config_text(const std::string& text, const std::string& mode) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("<file>", std::string("malformed INI at line ") + std::to_string(e.line()) + ": " + e.message());
  }
  detail::Reader r(tree);
  RunConfig c;
  c.source_text = text;
  detail::flatten(tree, "", c.entries);
  c.mode = mode;
  if (r.has("run.mode")) {
    const auto m = r.required<std::string>("run.mode");
    detail::check(m == mode, "run.mode", "config is for '" + m + "' but subcommand is '" + mode + "'");
  }
  if (r.has("run.seed")) {
    c.seed = r.required<uint64_t>("run.seed");
    c.has_seed = true;
  }
  c.out = r.get<std::string>("run.out", c.out);
  c.leakage_tolerance = r.get<double>("tolerances.leakage", c.leakage_tolerance);
  detail::check(c.leakage_tolerance > 0.0, "tolerances.leakage", "must be positive");

  if (mode == "lp") {
    auto& lp = c.lp;
    lp.L = r.required<double>("lattice.L");
    lp.n = r.required<int>("lattice.n");
    lp.d = r.get<int>("lattice.d", 3);
    detail::check(lp.L > 0.0, "lattice.L", "must be positive");
    detail::check(lp.n >= 2 && lp.n % 2 == 0, "lattice.n", "must be even and >= 2");
    detail::check(lp.d == 1 || lp.d == 3, "lattice.d", "must be 1 or 3");
    lp.alpha = r.required<double>("lp.alpha");
    detail::check(lp.alpha >= 0.0, "lp.alpha", "must be >= 0");
    lp.initial = r.get<std::string>("lp.initial", lp.initial);
    detail::check(lp.initial == "gaussian" || lp.initial == "fixed_point", "lp.initial",
                  "must be gaussian or fixed_point");
    lp.sigma = r.get<double>("lp.sigma", 0.0);
    detail::check(lp.sigma >= 0.0, "lp.sigma", "must be >= 0");
    lp.stepper.dt = r.required<double>("lp.dt");
    lp.stepper.t_end = r.required<double>("lp.t_end");
    lp.stepper.record_every = r.get<int>("lp.record_every", 10);
    lp.stepper.snapshot_every = r.get<int>("lp.snapshot_every", 0);
    try {
      lp.stepper.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("lp", e.what());
    }
  } else if (mode == "fock" || mode == "sweep") {
    c.model = detail::read_model(r, "model");
    auto& f = c.fock;
    f.t_end = r.required<double>("fock.t_end");
    detail::check(f.t_end >= 0.0, "fock.t_end", "must be >= 0");
    f.samples = r.get<int>("fock.samples", f.samples);
    detail::check(f.samples >= 2, "fock.samples", "must be >= 2");
    f.psi = r.get<std::string>("fock.psi", f.psi);
    detail::check(f.psi == "peaked" || f.psi == "uniform", "fock.psi", "must be peaked or uniform");
    f.phi = r.get<std::string>("fock.phi", f.phi);
    detail::check(f.phi == "zero" || f.phi == "fixed_point", "fock.phi", "must be zero or fixed_point");
    f.krylov_tol = r.get<double>("fock.krylov_tol", f.krylov_tol);
    detail::check(f.krylov_tol > 0.0, "fock.krylov_tol", "must be positive");
    f.lp_dt = r.get<double>("fock.lp_dt", f.lp_dt);
    detail::check(f.lp_dt > 0.0, "fock.lp_dt", "must be positive");
    if (mode == "sweep") {
      auto& s = c.sweep;
      s.N_list = r.required_list<int>("sweep.N_list");
      s.K_list = r.list<double>("sweep.K_list", {c.model.K});
      s.alpha_list = r.list<double>("sweep.alpha_list", {c.model.alpha});
      s.threads = r.get<int>("sweep.threads", 0);
      for (int N : s.N_list) detail::check(N >= 1, "sweep.N_list", "entries must be >= 1");
      for (double K : s.K_list) detail::check(K > 0.0, "sweep.K_list", "entries must be positive");
      for (double a : s.alpha_list) detail::check(a >= 0.0, "sweep.alpha_list", "entries must be >= 0");
      detail::check(s.threads >= 0, "sweep.threads", "must be >= 0");
    }
  } else if (mode == "bounds") {
    auto& b = c.bounds;
    b.form_factor_K = r.list<double>("bounds.form_factor_K", b.form_factor_K);
    for (double K : b.form_factor_K) detail::check(K > 0.0, "bounds.form_factor_K", "entries must be positive");
    b.eps = r.list<double>("bounds.eps", b.eps);
    for (double e : b.eps) detail::check(e > 0.0, "bounds.eps", "entries must be positive");
    b.cg_p_max = r.get<double>("bounds.cg_p_max", b.cg_p_max);
    detail::check(b.cg_p_max > 0.0, "bounds.cg_p_max", "must be positive");
    b.operator_checks = r.get<bool>("bounds.operator_checks", true);
    if (b.operator_checks) c.model = detail::read_model(r, "model");
    b.scaling = r.has_section("scaling");
    if (b.scaling) {
      b.scaling_spec = detail::read_model(r, "scaling");
      b.scaling_K = r.required_list<double>("scaling.K_list");
      b.scaling_N = r.list<int>("scaling.N_list", b.scaling_N);
      detail::check(b.scaling_K.size() >= 3, "scaling.K_list", "needs at least 3 values");
    }
  } else {
    throw ConfigError("run.mode", "unknown mode '" + mode + "'");
  }
  return c;
}

inline RunConfig parse_config(const std::string& path, const std::string& mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), mode);
}

// 64-bit FNV-1a of the config text and the effective seed.
inline uint64_t config_hash(const std::string& text, uint64_t seed) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](unsigned char b) {
    h ^= b;
    h *= 1099511628211ull;
  };
  for (unsigned char ch : text) mix(ch);
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
  return h;
}

}  // namespace lpmf::cli
