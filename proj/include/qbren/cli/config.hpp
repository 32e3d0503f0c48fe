#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <toml.hpp>

#include "qbren/error.hpp"
#include "qbren/model.hpp"

namespace qbren::cli {

struct ProbeConfig {
  std::vector<double> alphas = {0.0, 0.1, 0.25, 0.4};
  double lambda = -1.0;
  std::vector<double> tau = {1e3, std::pow(10.0, 3.5), 1e4};
  std::vector<int> grid_sizes = {256, 512, 1024};
  double grid_alpha = 0.6;  // omega^{-1} f outside H for the grid proxy
};

struct FockConfig {
  std::vector<double> omega = {1.0, 1.3, 1.7};
  std::vector<double> f = {0.3, 0.2, 0.1};
  double lambda = 0.2;
  int nmax = 8;
  int levels = 10;
  double tolerance = 1e-4;
  int number_nmax = 10;
  double theta = std::numbers::pi / 3;
  int bound_modes = 2;
  int bound_nmax = 8;
  int trials = 200;
};

struct IdentityConfig {
  int small_instances = 20;
  int small_dim = 16;
  int large_instances = 5;
  int large_dim = 64;
};

struct RunConfig {
  model::ScenarioConfig scenario;
  std::vector<double> formal_tau = {1e2, 1e3, 1e4};
  ProbeConfig probe;
  FockConfig fock;
  IdentityConfig identities;
};

// regular scenario: omega(k) = k, f(k) = 1/k on [1, 1e3]
inline RunConfig default_config() {
  RunConfig c;
  c.scenario.omega.kind = model::OmegaSpec::Kind::power;
  c.scenario.omega.p = 1.0;
  c.scenario.f.kind = model::FormFactorSpec::Kind::power;
  c.scenario.f.exponent = -1.0;
  c.scenario.grid.spacing = model::GridSpec::Spacing::logarithmic;
  c.scenario.grid.k_min = 1.0;
  c.scenario.grid.k_max = 1e3;
  c.scenario.grid.nodes = 256;
  c.scenario.lambda = 0.5;
  return c;
}

namespace detail {

inline std::string at_line(const toml::node& n) { return " (line " + std::to_string(n.source().begin.line) + ")"; }

inline void check_keys(const toml::table& t, const std::string& where, const std::set<std::string>& allowed) {
  for (auto&& [k, v] : t) {
    if (!allowed.count(std::string(k.str())))
      throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where + at_line(v));
  }
}

inline double get_double(const toml::table& t, const char* key, double fallback) {
  auto node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<double>()) return *v;
  throw ConfigError(std::string("key '") + key + "' must be a number" + at_line(*node));
}

inline int get_int(const toml::table& t, const char* key, int fallback) {
  auto node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<int64_t>()) return static_cast<int>(*v);
  throw ConfigError(std::string("key '") + key + "' must be an integer" + at_line(*node));
}

inline std::string get_string(const toml::table& t, const char* key, const std::string& fallback) {
  auto node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<std::string>()) return *v;
  throw ConfigError(std::string("key '") + key + "' must be a string" + at_line(*node));
}

inline std::vector<double> get_list(const toml::table& t, const char* key, std::vector<double> fallback) {
  auto node = t.get(key);
  if (!node) return fallback;
  auto arr = node->as_array();
  if (!arr) throw ConfigError(std::string("key '") + key + "' must be an array" + at_line(*node));
  std::vector<double> out;
  for (auto&& e : *arr) {
    auto v = e.value<double>();
    if (!v) throw ConfigError(std::string("array '") + key + "' must hold numbers" + at_line(e));
    out.push_back(*v);
  }
  return out;
}

}  // namespace detail

inline RunConfig parse_config(const toml::table& root) {
  using namespace detail;
  RunConfig c = default_config();
  check_keys(root, "config", {"omega", "f", "measure", "grid", "flow", "probe", "fock", "identities"});
  auto section = [&](const char* name) -> const toml::table* {
    auto node = root.get(name);
    if (!node) return nullptr;
    if (!node->is_table()) throw ConfigError(std::string("[") + name + "] must be a table");
    return node->as_table();
  };

  if (auto t = section("omega")) {
    check_keys(*t, "[omega]", {"kind", "p", "mass", "k", "values"});
    auto& o = c.scenario.omega;
    auto kind = get_string(*t, "kind", "power");
    if (kind == "power") o.kind = model::OmegaSpec::Kind::power;
    else if (kind == "massive") o.kind = model::OmegaSpec::Kind::massive;
    else if (kind == "kinetic") o.kind = model::OmegaSpec::Kind::kinetic;
    else if (kind == "table") o.kind = model::OmegaSpec::Kind::table;
    else throw ConfigError("unknown omega kind '" + kind + "'");
    o.p = get_double(*t, "p", o.p);
    o.mass = get_double(*t, "mass", o.mass);
    o.table_k = get_list(*t, "k", {});
    o.table_values = get_list(*t, "values", {});
  }
  if (auto t = section("f")) {
    check_keys(*t, "[f]", {"kind", "exponent", "amplitude", "threshold", "support", "k", "re", "im"});
    auto& f = c.scenario.f;
    auto kind = get_string(*t, "kind", "power");
    if (kind == "power") f.kind = model::FormFactorSpec::Kind::power;
    else if (kind == "power_indicator") f.kind = model::FormFactorSpec::Kind::power_indicator;
    else if (kind == "table") f.kind = model::FormFactorSpec::Kind::table;
    else throw ConfigError("unknown f kind '" + kind + "'");
    f.exponent = get_double(*t, "exponent", f.exponent);
    f.amplitude = get_double(*t, "amplitude", f.amplitude);
    f.threshold = get_double(*t, "threshold", f.threshold);
    auto sup = get_list(*t, "support", {});
    if (!sup.empty()) {
      if (sup.size() != 2 || !(sup[1] > sup[0])) throw ConfigError("f.support must be [lo, hi] with lo < hi");
      f.support_min = sup[0];
      f.support_max = sup[1];
    }
    f.table_k = get_list(*t, "k", {});
    f.table_re = get_list(*t, "re", {});
    f.table_im = get_list(*t, "im", {});
  }
  if (auto t = section("measure")) {
    check_keys(*t, "[measure]", {"kind", "dim", "c"});
    auto& m = c.scenario.measure;
    auto kind = get_string(*t, "kind", "lebesgue");
    if (kind == "lebesgue") m.kind = model::MeasureSpec::Kind::lebesgue;
    else if (kind == "radial") m.kind = model::MeasureSpec::Kind::radial;
    else throw ConfigError("unknown measure kind '" + kind + "'");
    m.dim = get_int(*t, "dim", m.dim);
    m.c = get_double(*t, "c", m.c);
  }
  if (auto t = section("grid")) {
    check_keys(*t, "[grid]", {"spacing", "k_min", "k_max", "nodes", "table", "weights"});
    auto& g = c.scenario.grid;
    auto sp = get_string(*t, "spacing", "logarithmic");
    if (sp == "linear") g.spacing = model::GridSpec::Spacing::linear;
    else if (sp == "logarithmic") g.spacing = model::GridSpec::Spacing::logarithmic;
    else if (sp == "table") g.spacing = model::GridSpec::Spacing::table;
    else throw ConfigError("unknown grid spacing '" + sp + "'");
    g.k_min = get_double(*t, "k_min", g.k_min);
    g.k_max = get_double(*t, "k_max", g.k_max);
    g.nodes = get_int(*t, "nodes", g.nodes);
    g.table = get_list(*t, "table", {});
    g.weights = get_list(*t, "weights", {});
  }
  if (auto t = section("flow")) {
    check_keys(*t, "[flow]", {"lambda", "cutoffs", "tau"});
    c.scenario.lambda = get_double(*t, "lambda", c.scenario.lambda);
    c.scenario.cutoffs = get_list(*t, "cutoffs", {});
    c.formal_tau = get_list(*t, "tau", c.formal_tau);
  }
  if (auto t = section("probe")) {
    check_keys(*t, "[probe]", {"alpha", "lambda", "tau", "grid_sizes", "grid_alpha"});
    auto& p = c.probe;
    p.alphas = get_list(*t, "alpha", p.alphas);
    p.lambda = get_double(*t, "lambda", p.lambda);
    p.tau = get_list(*t, "tau", p.tau);
    p.grid_alpha = get_double(*t, "grid_alpha", p.grid_alpha);
    auto gs = get_list(*t, "grid_sizes", {});
    if (!gs.empty()) {
      p.grid_sizes.clear();
      for (double x : gs) p.grid_sizes.push_back(static_cast<int>(x));
    }
  }
  if (auto t = section("fock")) {
    check_keys(*t, "[fock]", {"omega", "f", "lambda", "nmax", "levels", "tolerance", "number_nmax", "theta",
                              "bound_modes", "bound_nmax", "trials"});
    auto& f = c.fock;
    f.omega = get_list(*t, "omega", f.omega);
    f.f = get_list(*t, "f", f.f);
    if (f.omega.size() != f.f.size()) throw ConfigError("[fock] omega and f must have equal length");
    f.lambda = get_double(*t, "lambda", f.lambda);
    f.nmax = get_int(*t, "nmax", f.nmax);
    f.levels = get_int(*t, "levels", f.levels);
    f.tolerance = get_double(*t, "tolerance", f.tolerance);
    f.number_nmax = get_int(*t, "number_nmax", f.number_nmax);
    f.theta = get_double(*t, "theta", f.theta);
    f.bound_modes = get_int(*t, "bound_modes", f.bound_modes);
    f.bound_nmax = get_int(*t, "bound_nmax", f.bound_nmax);
    f.trials = get_int(*t, "trials", f.trials);
  }
  if (auto t = section("identities")) {
    check_keys(*t, "[identities]", {"small_instances", "small_dim", "large_instances", "large_dim"});
    auto& i = c.identities;
    i.small_instances = get_int(*t, "small_instances", i.small_instances);
    i.small_dim = get_int(*t, "small_dim", i.small_dim);
    i.large_instances = get_int(*t, "large_instances", i.large_instances);
    i.large_dim = get_int(*t, "large_dim", i.large_dim);
  }
  model::validate(c.scenario);
  return c;
}

inline RunConfig parse_config_string(const std::string& text) {
  try {
    return parse_config(toml::parse(text));
  } catch (const toml::parse_error& e) {
    throw ConfigError("TOML parse error at line " + std::to_string(e.source().begin.line) + ": " +
                      std::string(e.description()));
  }
}

inline RunConfig load_config(const std::string& path) {
  try {
    return parse_config(toml::parse_file(path));
  } catch (const toml::parse_error& e) {
    throw ConfigError("TOML parse error in " + path + " at line " + std::to_string(e.source().begin.line) + ": " +
                      std::string(e.description()));
  }
}

}  // namespace qbren::cli
