#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "qbren/error.hpp"

namespace qbren::numerics {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_panels = 40000;
  double scale = 1.0;  // t = scale * u / (1 - u)
  int levels = 32;     // dyadic panels on each side of u = 1/2
};

template <class T>
struct QuadResult {
  T value;
  double error = 0.0;
  int panels = 0;
  int evaluations = 0;
  double tail_exponent = 0.0;  // fitted decay exponent at the upper cap (half-line only)
};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(std::complex<double> x) { return std::abs(x); }
template <class D>
double magnitude(const Eigen::MatrixBase<D>& m) {
  return m.norm();
}

namespace detail {

// Gauss-Kronrod 7/15
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// a panel also carries r = R - x at its ends, R a fixed reference point,
// so that integrands singular-looking at R can be evaluated without cancellation
struct Panel {
  double a, b, ra, rb;
};

template <class T>
struct Evaluated {
  Panel p;
  T value;
  double err;
};

template <class G>
auto gk15(G& g, const Panel& p, int& evals) {
  using T = std::decay_t<decltype(g(0.0, 1.0))>;
  const double c = 0.5 * (p.a + p.b);
  const double h = 0.5 * (p.b - p.a);
  const double rc = 0.5 * (p.ra + p.rb);
  T fc = g(c, rc);
  T kron = fc * wgk[7];
  T gauss = fc * wg[3];
  for (int k = 0; k < 7; ++k) {
    const double dx = h * xgk[k];
    T f1 = g(c - dx, rc + dx);
    T f2 = g(c + dx, rc - dx);
    T s = f1 + f2;
    kron = kron + s * wgk[k];
    if (k % 2 == 1) gauss = gauss + s * wg[k / 2];
  }
  evals += 15;
  T kh = kron * h;
  T gh = gauss * h;
  double err = magnitude(T(kh - gh));
  return Evaluated<T>{p, kh, err};
}

template <class G>
auto adaptive(G&& g, const std::vector<Panel>& init, const QuadratureSpec& spec) {
  using T = std::decay_t<decltype(g(0.0, 1.0))>;
  using E = Evaluated<T>;
  auto cmp = [](const E& x, const E& y) { return x.err < y.err; };
  std::priority_queue<E, std::vector<E>, decltype(cmp)> heap(cmp);
  int evals = 0;
  std::vector<E> done;  // panels too narrow to split
  for (const auto& p : init) heap.push(gk15(g, p, evals));

  auto totals = [&]() {
    auto copy = heap;
    std::vector<E> tmp;
    while (!copy.empty()) {
      tmp.push_back(copy.top());
      copy.pop();
    }
    for (auto& e : done) tmp.push_back(e);
    std::sort(tmp.begin(), tmp.end(), [](const E& x, const E& y) { return x.p.a < y.p.a; });
    T v = tmp.front().value * 0.0;
    double err = 0.0;
    for (auto& e : tmp) {
      v = v + e.value;
      err += e.err;
    }
    return std::make_pair(v, err);
  };

  T sum = heap.top().value * 0.0;
  double err = 0.0;
  {
    auto t = totals();
    sum = t.first;
    err = t.second;
  }
  int panels = static_cast<int>(heap.size());
  while (!heap.empty()) {
    const double target = std::max(spec.abs_tol, spec.rel_tol * magnitude(sum));
    if (err <= target) break;
    if (panels >= spec.max_panels) {
      auto t = totals();
      throw QuadratureError("quadrature did not reach tolerance within the panel budget",
                            magnitude(t.first), t.second);
    }
    E worst = heap.top();
    heap.pop();
    const Panel& p = worst.p;
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      done.push_back(worst);
      continue;
    }
    const double rmid = 0.5 * (p.ra + p.rb);
    E left = gk15(g, Panel{p.a, mid, p.ra, rmid}, evals);
    E right = gk15(g, Panel{mid, p.b, rmid, p.rb}, evals);
    sum = sum - worst.value + left.value + right.value;
    err = err - worst.err + left.err + right.err;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  auto t = totals();
  QuadResult<T> out{t.first, t.second, panels, evals, 0.0};
  return out;
}

}  // namespace detail

// integral of g over [0, inf). The map t = s u/(1-u) is resolved on dyadic
// panels up to t = s 2^levels; beyond that the integrand is treated as a
// power law whose exponent is fitted from g(T), g(2T), g(4T).
template <class G>
auto integrate_halfline(G&& g, const QuadratureSpec& spec = {}) {
  using T = std::decay_t<decltype(g(1.0))>;
  const double s = spec.scale;
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("integrate_halfline: scale must be positive");
  const int L = spec.levels;
  std::vector<detail::Panel> init;
  // lower side: [2^-(k+1), 2^-k] * 1/2 ... down to 0
  init.push_back({0.0, std::ldexp(1.0, -L), 1.0, 1.0 - std::ldexp(1.0, -L)});
  for (int k = L; k >= 2; --k) {
    double a = std::ldexp(1.0, -k), b = std::ldexp(1.0, -k + 1);
    init.push_back({a, b, 1.0 - a, 1.0 - b});
  }
  // upper side: 1 - u from 1/2 down to 2^-L, kept exact
  for (int k = 1; k < L; ++k) {
    double ra = std::ldexp(1.0, -k), rb = std::ldexp(1.0, -k - 1);
    init.push_back({1.0 - ra, 1.0 - rb, ra, rb});
  }
  auto mapped = [&](double u, double r) -> T {
    double t = s * u / r;
    double jac = s / (r * r);
    return T(g(t) * jac);
  };
  auto res = detail::adaptive(mapped, init, spec);

  const double rmax = std::ldexp(1.0, -L);
  const double tcap = s * (1.0 - rmax) / rmax;
  T g0 = g(tcap);
  T g1 = g(2.0 * tcap);
  T g2 = g(4.0 * tcap);
  res.evaluations += 3;
  double m0 = magnitude(g0), m1 = magnitude(g1), m2 = magnitude(g2);
  if (m0 > 0.0) {
    double p1 = std::log2(m0 / m1);
    double p2 = std::log2(m1 / m2);
    if (!std::isfinite(p1) || p1 <= 1.05) {
      throw QuadratureError("integrand does not decay fast enough at the upper cap",
                            magnitude(res.value), std::numeric_limits<double>::infinity());
    }
    T tail = g0 * (tcap / (p1 - 1.0));
    double terr = magnitude(tail) * (std::isfinite(p2) ? std::abs(p1 - p2) / (p1 - 1.0) : 1.0);
    res.value = res.value + tail;
    res.error += terr;
    res.tail_exponent = p1;
  } else {
    res.tail_exponent = std::numeric_limits<double>::infinity();
  }
  return res;
}

// integral over [a, b] with optional interior breakpoints
template <class G>
auto integrate_interval(G&& g, double a, double b, std::vector<double> breaks = {},
                        const QuadratureSpec& spec = {}) {
  if (!(b > a)) throw DomainError("integrate_interval: need a < b");
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<detail::Panel> init;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double x0 = breaks[i], x1 = breaks[i + 1];
    if (x0 < a || x1 > b) continue;
    init.push_back({x0, x1, b - x0, b - x1});
  }
  using T = std::decay_t<decltype(g(a))>;
  auto plain = [&](double x, double) -> T { return T(g(x)); };
  return detail::adaptive(plain, init, spec);
}

inline std::vector<double> geometric_breaks(double a, double b, int per_decade = 2) {
  std::vector<double> out;
  if (a <= 0.0 || b <= a) return out;
  double r = std::pow(10.0, 1.0 / per_decade);
  for (double x = a * r; x < b; x *= r) out.push_back(x);
  return out;
}

}  // namespace qbren::numerics
