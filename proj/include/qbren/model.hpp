#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "qbren/error.hpp"
#include "qbren/numerics/linalg.hpp"

namespace qbren::model {

using numerics::CVector;
using numerics::Vector;

struct OmegaSpec {
  enum class Kind { power, massive, kinetic, table } kind = Kind::power;
  double p = 1.0;     // max(1, k^p)
  double mass = 1.0;  // sqrt(k^2 + m^2)
  std::vector<double> table_k, table_values;
};

struct FormFactorSpec {
  enum class Kind { power, power_indicator, table } kind = Kind::power;
  double exponent = -1.0;
  double amplitude = 1.0;
  double threshold = 1.0;  // indicator k >= threshold
  double support_min = 0.0;
  double support_max = std::numeric_limits<double>::infinity();
  std::vector<double> table_k, table_re, table_im;
};

struct MeasureSpec {
  enum class Kind { lebesgue, radial } kind = Kind::lebesgue;
  int dim = 3;
  double c = std::numeric_limits<double>::quiet_NaN();  // defaults to the unit sphere area
};

struct GridSpec {
  enum class Spacing { linear, logarithmic, table } spacing = Spacing::logarithmic;
  double k_min = 1.0;
  double k_max = 1e3;
  int nodes = 256;
  std::vector<double> table;    // explicit nodes
  std::vector<double> weights;  // explicit weights, overrides the trapezoid rule
};

struct ScenarioConfig {
  OmegaSpec omega;
  FormFactorSpec f;
  MeasureSpec measure;
  GridSpec grid;
  double lambda = 0.0;
  std::vector<double> cutoffs;  // empty: automatic geometric ladder
};

// Discretized one-particle data. Matrices elsewhere act in the unitary
// image g -> sqrt(w) g, so every vector entering them carries sqrt(w_i).
struct DiscretizedModel {
  Vector k, w, omega;
  CVector f;
  double lambda = 0.0;

  Eigen::Index size() const { return k.size(); }

  bool real_form_factor() const { return f.imag().cwiseAbs().maxCoeff() == 0.0; }

  // sqrt(w) f as a real vector; f must be real
  Vector fhat() const {
    if (size() > 0 && !real_form_factor())
      throw DomainError("form factor has a phase; apply gauge_reduce first");
    return w.cwiseSqrt().cwiseProduct(f.real());
  }
  CVector fhat_complex() const { return w.cwiseSqrt().cast<std::complex<double>>().cwiseProduct(f); }

  // || omega^{-s} f ||
  double norm(double s) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < size(); ++i) acc += w(i) * std::norm(f(i)) * std::pow(omega(i), -2.0 * s);
    return std::sqrt(acc);
  }
};

namespace detail {

inline void require_increasing(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ConfigError(std::string(what) + " must be strictly increasing");
}

inline double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t j = it - xs.begin();
  double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return (1 - t) * ys[j - 1] + t * ys[j];
}

inline double sphere_area(int d) {
  // 2 pi^{d/2} / Gamma(d/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace detail

inline double omega_at(const OmegaSpec& o, double k) {
  switch (o.kind) {
    case OmegaSpec::Kind::power:
      return std::max(1.0, std::pow(k, o.p));
    case OmegaSpec::Kind::massive:
      return std::sqrt(k * k + o.mass * o.mass);
    case OmegaSpec::Kind::kinetic:
      return std::max(1.0, k + k * k);
    case OmegaSpec::Kind::table:
      return detail::interp(o.table_k, o.table_values, k);
  }
  return 1.0;
}

inline std::complex<double> f_at(const FormFactorSpec& s, double k) {
  if (k < s.support_min || k > s.support_max) return 0.0;
  switch (s.kind) {
    case FormFactorSpec::Kind::power:
      return s.amplitude * std::pow(k, s.exponent);
    case FormFactorSpec::Kind::power_indicator:
      return k >= s.threshold ? s.amplitude * std::pow(k, s.exponent) : 0.0;
    case FormFactorSpec::Kind::table: {
      double re = detail::interp(s.table_k, s.table_re, k);
      double im = s.table_im.empty() ? 0.0 : detail::interp(s.table_k, s.table_im, k);
      return s.amplitude * std::complex<double>(re, im);
    }
  }
  return 0.0;
}

inline double density(const MeasureSpec& m, double k) {
  if (m.kind == MeasureSpec::Kind::lebesgue) return 1.0;
  double c = std::isnan(m.c) ? detail::sphere_area(m.dim) : m.c;
  return c * std::pow(k, m.dim - 1);
}

inline std::vector<double> grid_nodes(const GridSpec& g) {
  std::vector<double> k;
  switch (g.spacing) {
    case GridSpec::Spacing::table:
      k = g.table;
      break;
    case GridSpec::Spacing::linear:
    case GridSpec::Spacing::logarithmic: {
      if (g.nodes < 2) throw ConfigError("grid needs at least two nodes (or an explicit table)");
      if (!(g.k_max > g.k_min)) throw ConfigError("grid needs k_max > k_min");
      for (int i = 0; i < g.nodes; ++i) {
        double t = double(i) / (g.nodes - 1);
        if (g.spacing == GridSpec::Spacing::linear)
          k.push_back(g.k_min + t * (g.k_max - g.k_min));
        else
          k.push_back(g.k_min * std::pow(g.k_max / g.k_min, t));
      }
      k.back() = g.k_max;
      break;
    }
  }
  if (k.empty()) throw ConfigError("grid has no nodes");
  detail::require_increasing(k, "grid nodes");
  if (k.front() < 1.0) throw ConfigError("grid nodes must lie in [1, inf)");
  return k;
}

inline std::vector<double> automatic_cutoffs(const DiscretizedModel& m, int count = 8) {
  double lo = std::max(10.0, 2.0 * m.omega.minCoeff());
  double hi = m.omega.maxCoeff();
  std::vector<double> out;
  if (hi <= lo) return {hi};
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
  out.back() = hi;
  return out;
}

inline void validate(const ScenarioConfig& c) {
  if (c.grid.spacing != GridSpec::Spacing::table && !(c.grid.k_min >= 1.0))
    throw ConfigError("grid k_min must be >= 1");
  if (c.omega.kind == OmegaSpec::Kind::table) {
    if (c.omega.table_k.size() < 1 || c.omega.table_k.size() != c.omega.table_values.size())
      throw ConfigError("omega table needs matching k and values lists");
    detail::require_increasing(c.omega.table_k, "omega table nodes");
  }
  if (c.f.kind == FormFactorSpec::Kind::table) {
    if (c.f.table_k.empty() || c.f.table_k.size() != c.f.table_re.size() ||
        (!c.f.table_im.empty() && c.f.table_im.size() != c.f.table_k.size()))
      throw ConfigError("f table needs matching k, re (and im) lists");
    detail::require_increasing(c.f.table_k, "f table nodes");
  }
  if (c.measure.kind == MeasureSpec::Kind::radial && c.measure.dim < 1)
    throw ConfigError("radial measure needs dim >= 1");
  if (c.omega.kind == OmegaSpec::Kind::massive && !(c.omega.mass >= 1.0))
    throw ConfigError("massive dispersion needs mass >= 1 so that omega >= 1");
  if (!std::isfinite(c.lambda)) throw ConfigError("lambda must be finite");
  detail::require_increasing(c.cutoffs, "cutoffs");
}

inline DiscretizedModel build_model(const ScenarioConfig& c) {
  validate(c);
  auto k = grid_nodes(c.grid);
  const Eigen::Index m = static_cast<Eigen::Index>(k.size());
  DiscretizedModel out;
  out.k = Eigen::Map<const Vector>(k.data(), m);
  out.w.resize(m);
  out.omega.resize(m);
  out.f.resize(m);
  out.lambda = c.lambda;
  if (!c.grid.weights.empty()) {
    if (c.grid.weights.size() != k.size()) throw ConfigError("grid weights must match the nodes");
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!(c.grid.weights[i] > 0.0)) throw ConfigError("grid weights must be positive");
      out.w(i) = c.grid.weights[i];
    }
  } else {
    if (m < 2) throw ConfigError("a single node needs explicit weights");
    for (Eigen::Index i = 0; i < m; ++i) {
      double left = i > 0 ? k[i] - k[i - 1] : 0.0;
      double right = i + 1 < m ? k[i + 1] - k[i] : 0.0;
      out.w(i) = 0.5 * (left + right) * density(c.measure, k[i]);
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    out.omega(i) = omega_at(c.omega, k[i]);
    out.f(i) = f_at(c.f, k[i]);
    if (!(out.omega(i) >= 1.0)) throw ConfigError("omega < 1 at node k = " + std::to_string(k[i]));
    if (!std::isfinite(out.f(i).real()) || !std::isfinite(out.f(i).imag()))
      throw ConfigError("f not finite at node k = " + std::to_string(k[i]));
  }
  if (!c.cutoffs.empty() && c.cutoffs.back() > out.omega.maxCoeff() * (1 + 1e-12))
    throw ConfigError("cutoff exceeds the largest omega on the grid");
  return out;
}

inline std::vector<double> cutoffs_for(const ScenarioConfig& c, const DiscretizedModel& m) {
  return c.cutoffs.empty() ? automatic_cutoffs(m) : c.cutoffs;
}

// f_n = f 1{omega <= n}
inline DiscretizedModel cutoff_project(const DiscretizedModel& m, double n) {
  DiscretizedModel out = m;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (m.omega(i) > n) out.f(i) = 0.0;
  return out;
}

// multiplication by the phase of f is unitary and commutes with omega
inline std::pair<DiscretizedModel, CVector> gauge_reduce(const DiscretizedModel& m) {
  DiscretizedModel out = m;
  CVector phase(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double r = std::abs(m.f(i));
    phase(i) = r > 0.0 ? m.f(i) / r : std::complex<double>(1.0, 0.0);
    out.f(i) = r;
  }
  return {out, phase};
}

// d contiguous blocks, each collapsed to one mode carrying the block's weight
// and the block's share of ||f||^2
inline DiscretizedModel coarse_grain(const DiscretizedModel& m, int d) {
  if (d < 1 || d > m.size()) throw DimensionError("coarse_grain: bad target size");
  DiscretizedModel out;
  out.k.resize(d);
  out.w.resize(d);
  out.omega.resize(d);
  out.f.resize(d);
  out.lambda = m.lambda;
  const Eigen::Index n = m.size();
  for (int b = 0; b < d; ++b) {
    Eigen::Index lo = n * b / d, hi = n * (b + 1) / d;
    double W = 0, F = 0, wk = 0, wo = 0, fo = 0;
    for (Eigen::Index i = lo; i < hi; ++i) {
      double fi = std::norm(m.f(i)) * m.w(i);
      W += m.w(i);
      F += fi;
      wk += m.w(i) * m.k(i);
      wo += m.w(i) * m.omega(i);
      fo += fi * m.omega(i);
    }
    out.w(b) = W;
    out.k(b) = wk / W;
    out.omega(b) = F > 0 ? fo / F : wo / W;
    out.f(b) = std::sqrt(F / W);
  }
  return out;
}

inline const std::vector<double>& regularity_orders() {
  static const std::vector<double> s = {-0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 1.5};
  return s;
}

enum class Regularity { h_regular, needs_energy_renorm, needs_charge_renorm, out_of_theory };

inline std::string to_string(Regularity r) {
  switch (r) {
    case Regularity::h_regular:
      return "H-regular";
    case Regularity::needs_energy_renorm:
      return "needs-energy-renorm";
    case Regularity::needs_charge_renorm:
      return "needs-charge-renorm";
    case Regularity::out_of_theory:
      return "out-of-theory";
  }
  return "?";
}

struct RegularityReport {
  std::map<double, double> norms;      // s -> ||omega^{-s} f|| on the full grid
  double log_norm = 0.0;               // ||ln(omega)^2 f||
  std::map<double, double> exponents;  // s -> fitted growth exponent of ||omega^{-s} f_n|| in n
  std::vector<double> cutoffs;
  std::map<double, std::vector<double>> growth;  // s -> ||omega^{-s} f_n|| along the cutoffs
  bool f_in_h = false;                 // the unrenormalized form is defined
  Regularity classification = Regularity::out_of_theory;
  double tol = 0.05;
};

// exponent of a sequence a_n ~ n^e, fitted on log-log axes over the nonzero entries
inline double fit_exponent(const std::vector<double>& n, const std::vector<double>& a) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n.size(); ++i)
    if (a[i] > 0.0) {
      x.push_back(std::log(n[i]));
      y.push_back(std::log(a[i]));
    }
  if (x.size() < 2) return 0.0;
  return numerics::fit_slope(x, y);
}

// Case selection: omega^{-1/4} f in H needs nothing beyond the infinite-trace
// constant, omega^{-1/2} f in H needs the energy counterterm, and the charge
// counterterm covers omega^{-1/2} f outside H as long as omega^{-3/2} f is in H.
inline RegularityReport regularity_scan(const DiscretizedModel& m, const std::vector<double>& cutoffs,
                                        double tol = 0.05) {
  if (cutoffs.size() < 2) throw ConfigError("regularity_scan needs at least two cutoffs");
  RegularityReport r;
  r.tol = tol;
  r.cutoffs = cutoffs;
  for (double s : regularity_orders()) {
    r.norms[s] = m.norm(s);
    std::vector<double> seq;
    for (double n : cutoffs) seq.push_back(cutoff_project(m, n).norm(s));
    r.exponents[s] = fit_exponent(cutoffs, seq);
    r.growth[s] = seq;
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double l = std::log(m.omega(i));
    acc += m.w(i) * std::norm(m.f(i)) * l * l * l * l;
  }
  r.log_norm = std::sqrt(acc);
  auto bounded = [&](double s) { return r.exponents[s] <= tol; };
  r.f_in_h = bounded(0.0);
  if (bounded(0.25))
    r.classification = Regularity::h_regular;
  else if (bounded(0.5))
    r.classification = Regularity::needs_energy_renorm;
  else if (bounded(1.5))
    r.classification = Regularity::needs_charge_renorm;
  else
    r.classification = Regularity::out_of_theory;
  return r;
}

}  // namespace qbren::model
