#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "qbren/bogoliubov.hpp"
#include "qbren/cli/config.hpp"
#include "qbren/cli/report.hpp"
#include "qbren/fock.hpp"
#include "qbren/model.hpp"
#include "qbren/rankone.hpp"
#include "qbren/renorm/flow.hpp"
#include "qbren/renorm/probe.hpp"
#include "qbren/renorm/resolvent.hpp"

namespace qbren::cli {

using numerics::cplx;
using numerics::CMatrix;
using numerics::Matrix;
using numerics::Vector;

struct StudyOutput {
  RunReport report;
  std::optional<Table> flow;
  std::optional<Table> probe;
};

struct Options {
  std::uint64_t seed = 1;
  bool inject_fault = false;
};

// a > 0 log-uniform on [0.1, 100]; alpha either positive or negative with T > 0
inline rankone::RankOneOp random_rank_one(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  rankone::RankOneOp op;
  op.a.resize(m);
  op.psi.resize(m);
  for (int i = 0; i < m; ++i) {
    op.a(i) = 0.1 * std::pow(1000.0, u(rng));
    op.psi(i) = g(rng);
  }
  double q = op.psi.cwiseAbs2().cwiseQuotient(op.a).sum();
  if (u(rng) < 0.5)
    op.alpha = 0.1 + 1.9 * u(rng);
  else
    op.alpha = -(0.1 + 0.8 * u(rng)) / q;
  return op;
}

inline double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

inline model::DiscretizedModel scenario_model(const RunConfig& cfg) {
  auto m = model::build_model(cfg.scenario);
  return model::gauge_reduce(m).first;
}

// closed forms on the half line
inline double scalar_identity_error(double x) {
  const double pi = std::numbers::pi, r2 = std::numbers::sqrt2;
  numerics::QuadratureSpec s;
  s.rel_tol = 1e-12;
  double worst = 0.0;
  auto test = [&](auto g, double scale, double exact) {
    s.scale = scale;
    double v = numerics::integrate_halfline(g, s).value;
    worst = std::max(worst, std::abs(v - exact) / std::abs(exact));
  };
  test([&](double t) { return x / (x + t * t); }, std::sqrt(x), 0.5 * pi * std::sqrt(x));
  test([&](double t) { return 1.0 / (x + t * t); }, std::sqrt(x), 0.5 * pi / std::sqrt(x));
  test([&](double t) { return x / (x + t * t * t * t); }, std::pow(x, 0.25), pi / (2 * r2) * std::pow(x, 0.25));
  test([&](double t) { return 1.0 / (x + std::pow(t, 4.0 / 3.0)); }, std::pow(x, 0.75),
       3 * pi / (2 * r2) * std::pow(x, -0.25));
  return worst;
}

inline StudyOutput study_identities(const RunConfig& cfg, const Options& opt) {
  StudyOutput out{RunReport("identities"), {}, {}};
  auto& rep = out.report;
  auto& res = rep.payload();
  std::mt19937_64 rng(opt.seed);

  double sc = 0.0;
  for (double x : {1e-3, 0.5, 1.0, 7.0, 1e3, 1e6}) sc = std::max(sc, scalar_identity_error(x));
  rep.check_le("scalar_halfline_identities", sc, 1e-10);

  double rerr = 0.0;
  for (int i = 0; i < cfg.identities.small_instances; ++i) {
    auto op = random_rank_one(rng, cfg.identities.small_dim);
    for (cplx z : {cplx(-1.0, 0.0), cplx(2.0, 3.0), cplx(-0.5, 0.1)}) {
      CMatrix dense = op.dense().cast<cplx>();
      dense.diagonal().array() -= z;
      CMatrix ref = dense.inverse();
      rerr = std::max(rerr, (rankone::resolvent_rank_one(op, z) - ref).norm() / ref.norm());
    }
  }
  rep.check_le("rank_one_resolvent_vs_dense", rerr, 1e-10);

  double perr = 0.0, terr = 0.0;
  auto run_powers = [&](int count, int dim) {
    for (int i = 0; i < count; ++i) {
      auto op = random_rank_one(rng, dim);
      for (auto p : {rankone::Power::half, rankone::Power::neg_half, rankone::Power::quarter,
                     rankone::Power::neg_quarter})
        perr = std::max(perr, rel(rankone::power(op, p, rankone::Method::quadrature),
                                  rankone::power(op, p, rankone::Method::eig)));
      Matrix direct = rankone::power_half(op, rankone::Method::eig);
      direct.diagonal() -= op.a.cwiseSqrt();
      double tr = direct.trace();
      terr = std::max(terr, std::abs(rankone::trace_sqrt_shift(op) - tr) / std::max(std::abs(tr), 1e-300));
    }
  };
  run_powers(cfg.identities.small_instances, cfg.identities.small_dim);
  run_powers(cfg.identities.large_instances, cfg.identities.large_dim);
  rep.check_le("power_quadrature_vs_eig", perr, 1e-6);
  rep.check_le("trace_sqrt_shift_vs_direct", terr, 1e-8);

  auto m = scenario_model(cfg);
  const std::vector<cplx> zs = {-1.0, {1.0, 2.0}, {-3.0, 0.5}, {0.0, 0.5}};
  const std::vector<cplx> ws = {-2.0, {0.0, 2.0}};
  auto reg = renorm::regular_family(m);
  if (opt.inject_fault) {
    auto clean = reg;
    const double eps = 1e-3;
    reg.eval = [clean, eps](cplx z) {
      CMatrix r = clean.eval(z);
      r.diagonal().array() += eps;
      return r;
    };
    res["fault_injected"] = eps;
  }
  auto fr = rankone::resolvent_family_check(reg, zs, ws);
  rep.check_le("regular_family_resolvent_identity", fr.resolvent_identity_residual, 1e-10);
  rep.check_le("regular_family_conjugation", fr.conjugation_residual, 1e-10);
  rep.check("regular_family_kernel_trivial", fr.kernel_trivial, {{"min_singular_value", fr.min_singular_value}});

  auto mr = m;
  mr.lambda = m.lambda < 0.0 ? m.lambda : -std::max(std::abs(m.lambda), 0.5);
  auto rf = rankone::resolvent_family_check(renorm::renormalized_family(mr), zs, ws);
  rep.check_le("renormalized_family_resolvent_identity", rf.resolvent_identity_residual, 1e-10);
  rep.check_le("renormalized_family_conjugation", rf.conjugation_residual, 1e-10);
  rep.check("renormalized_family_kernel_trivial", rf.kernel_trivial, {{"min_singular_value", rf.min_singular_value}});

  auto mt = mr;
  mt.lambda = renorm::renormalized_coupling(mr.lambda, renorm::inverse_omega_norm(mr));
  double same = 0.0;
  for (cplx z : zs) {
    CMatrix a = renorm::renormalized_resolvent(mr, z), b = renorm::regular_resolvent(mt, z);
    same = std::max(same, (a - b).norm() / b.norm());
  }
  rep.check_le("renormalized_equals_regular_at_shifted_coupling", same, 1e-10,
               {{"lambda", mr.lambda}, {"lambda_shifted", mt.lambda}});
  res["scalar_identity_error"] = sc;
  res["power_error"] = perr;
  res["trace_error"] = terr;
  return out;
}

inline StudyOutput study_diagonalize(const RunConfig& cfg, const Options&) {
  StudyOutput out{RunReport("diagonalize"), {}, {}};
  auto& rep = out.report;
  auto& res = rep.payload();
  using bogoliubov::XiMode;
  using rankone::Method;
  auto m = scenario_model(cfg);
  auto b = bogoliubov::build_blocks(m, XiMode::direct);
  res["modes"] = m.size();
  res["lambda"] = m.lambda;

  auto dense = bogoliubov::build_xi(m, XiMode::direct, Method::eig);
  rep.check_le("xi_secular_vs_dense", rel(b.xi, dense.xi), 1e-8);
  auto regular = bogoliubov::build_xi(m, XiMode::regular);
  rep.check_le("xi_regular_vs_direct", rel(regular.xi, b.xi), 1e-6);
  auto quad = bogoliubov::build_xi(m, XiMode::direct, Method::quadrature);
  rep.check_le("xi_quadrature_vs_secular", rel(quad.xi, b.xi), 1e-6);

  auto mr = m;
  mr.lambda = m.lambda < 0.0 ? m.lambda : -std::max(std::abs(m.lambda), 0.5);
  auto mt = mr;
  mt.lambda = renorm::renormalized_coupling(mr.lambda, renorm::inverse_omega_norm(mr));
  auto xr = bogoliubov::build_xi(mr, XiMode::renormalized);
  auto xt = bogoliubov::build_xi(mt, XiMode::direct);
  auto xq = bogoliubov::build_xi(mr, XiMode::renormalized, Method::quadrature);
  rep.check_le("xi_renormalized_vs_direct_at_shifted_coupling", rel(xr.xi, xt.xi), 1e-6);
  rep.check_le("xi_renormalized_quadrature", rel(xq.xi, xr.xi), 1e-6);

  rep.check_le("diagonalization_residual", bogoliubov::diagonalization_residual(b), 1e-8);
  rep.check_le("symplectic_residual", bogoliubov::symplectic_residual(b), 1e-8);
  auto bq = bogoliubov::build_blocks(m, XiMode::direct, Method::quadrature);
  // V vanishes at zero coupling, so both blocks are measured against the pair's size
  double uv = std::sqrt(b.U.squaredNorm() + b.V.squaredNorm());
  rep.check_le("uv_quadrature_vs_secular",
               std::sqrt((bq.U - b.U).squaredNorm() + (bq.V - b.V).squaredNorm()) / uv, 1e-6);

  auto sh = bogoliubov::shale_trace(b);
  rep.check_le("shale_trace_identity", std::abs(sh.direct - sh.identity) / std::max(1.0, sh.direct), 1e-8);
  if (m.lambda >= 0.0)
    rep.check("shale_trace_bound", sh.direct <= sh.bound + 1e-9,
              {{"trace", sh.direct}, {"bound", sh.bound}});

  auto ti = bogoliubov::pivotal_trace_identity(b);
  rep.check_le("pivotal_trace_identity", std::abs(ti.lhs - ti.rhs) / std::max(1.0, std::abs(ti.rhs)), 1e-7,
               {{"lhs", ti.lhs}, {"rhs", ti.rhs}, {"analytic", ti.analytic}});

  double e = bogoliubov::ground_energy(b);
  auto ft = bogoliubov::formal_trace(m, cfg.formal_tau);
  rep.check_le("ground_energy_vs_trace_integral", std::abs(2 * e - ft.value) / std::max(1.0, std::abs(2 * e)), 1e-6,
               {{"two_E", 2 * e}, {"integral", ft.value}});

  res["ground_energy"] = e;
  res["shale_trace"] = sh.direct;
  res["shale_bound"] = number(sh.bound);
  res["xi_min"] = b.xi_spec.values(0);
  res["xi_max"] = b.xi_spec.values(m.size() - 1);
  if (m.size() == 1) {
    res["xi"] = b.xi(0, 0);
    res["U"] = b.U(0, 0);
    res["V"] = b.V(0, 0);
  }
  return out;
}

inline StudyOutput study_flow(const RunConfig& cfg, const Options&) {
  StudyOutput out{RunReport("flow"), {}, {}};
  auto& rep = out.report;
  auto& res = rep.payload();
  auto m = scenario_model(cfg);
  auto cut = model::cutoffs_for(cfg.scenario, m);
  auto fr = renorm::flow_run(m, cut, false);
  res["case"] = fr.flow_case;
  res["classification"] = model::to_string(fr.regularity.classification);
  res["f_in_H"] = fr.regularity.f_in_h;
  json ex = json::object(), nm = json::object();
  for (auto& [s, e] : fr.regularity.exponents) ex[format_number(s)] = e;
  for (auto& [s, v] : fr.regularity.norms) nm[format_number(s)] = v;
  res["exponents"] = ex;
  res["norms"] = nm;
  res["log_norm"] = fr.regularity.log_norm;
  res["cutoffs"] = numbers(cut);

  Table t{{"n", "lambda_n", "E_n", "resolvent_gap", "shale_n", "status"}, {}};
  for (auto& r : fr.records) t.rows.push_back({r.n, r.lambda_n, r.E_n, r.resolvent_gap, r.shale_n, r.status});
  out.flow = t;

  const auto& recs = fr.records;
  double last = recs.back().resolvent_gap / fr.reference_norm;
  rep.check_le("resolvent_gap_at_top_cutoff", last, 1e-6);
  bool tail = true;
  for (std::size_t i = 1; i < recs.size(); ++i)
    if (recs[i].resolvent_gap > recs[i - 1].resolvent_gap * (1 + 1e-9) + 1e-15) tail = false;
  rep.check("resolvent_gap_nonincreasing", tail);

  if (fr.flow_case != "2") {
    bool ok = true;
    for (auto& r : recs) ok = ok && r.shale_n <= fr.shale_bound + 1e-9;
    rep.check("shale_bounded", ok, {{"bound", fr.shale_bound}});
    auto ft = bogoliubov::formal_trace(m, cfg.formal_tau);
    res["formal_trace"] = {{"value", ft.value},
                           {"tau", numbers(ft.tau)},
                           {"partial", numbers(ft.partial)},
                           {"exponent", ft.exponent},
                           {"divergent", ft.divergent}};
    if (fr.flow_case == "1a") {
      double e = bogoliubov::ground_energy(bogoliubov::build_blocks(m, bogoliubov::XiMode::direct));
      rep.check("trace_infinity_finite", !ft.divergent, {{"exponent", ft.exponent}});
      rep.check_le("trace_infinity_vs_energy", std::abs(ft.value - 2 * e) / std::max(1.0, std::abs(2 * e)), 1e-6);
      res["trace_infinity"] = ft.value;
    } else {
      bool grow = true;
      for (std::size_t i = 1; i < recs.size(); ++i) grow = grow && std::abs(recs[i].E_n) > std::abs(recs[i - 1].E_n);
      rep.check("energy_counterterm_diverging", grow);
      rep.check("formal_trace_divergent", ft.divergent, {{"exponent", ft.exponent}});
    }
  } else {
    bool ok = true;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      ok = ok && recs[i].lambda_n < 0.0 && recs[i].lambda_n > m.lambda;
      if (i > 0) ok = ok && recs[i].lambda_n > recs[i - 1].lambda_n;
    }
    rep.check("coupling_flow_to_zero", ok);
  }
  return out;
}

// shale trace of the renormalized diagonalization on growing grids with
// omega^{-1} f outside H
inline std::pair<std::vector<double>, double> grid_shale_growth(const ProbeConfig& p) {
  std::vector<double> kmax, tr;
  for (int n : p.grid_sizes) {
    model::ScenarioConfig sc;
    sc.omega.kind = model::OmegaSpec::Kind::power;
    sc.f.kind = model::FormFactorSpec::Kind::power;
    sc.f.exponent = p.grid_alpha;
    sc.grid.k_min = 1.0;
    sc.grid.k_max = n;
    sc.grid.nodes = n;
    sc.lambda = p.lambda;
    auto m = model::build_model(sc);
    auto b = bogoliubov::build_blocks(m, bogoliubov::XiMode::renormalized);
    kmax.push_back(n);
    tr.push_back(bogoliubov::shale_trace(b).direct);
  }
  return {tr, model::fit_exponent(kmax, tr)};
}

inline StudyOutput study_shale_scan(const RunConfig& cfg, const Options&) {
  StudyOutput out{RunReport("shale-scan"), {}, {}};
  auto& rep = out.report;
  auto& res = rep.payload();
  const auto& pc = cfg.probe;
  Table t{{"alpha", "tau", "I_tau", "U_tau", "shale_partial", "status"}, {}};
  json probes = json::array();
  std::vector<double> i0;
  for (double a : pc.alphas) {
    auto p = renorm::divergence_probe(a, pc.lambda, pc.tau);
    for (std::size_t i = 0; i < p.tau.size(); ++i)
      t.rows.push_back({a, p.tau[i], p.I_tau[i], p.U_tau[i], renorm::probe_shale_partial(pc.lambda, p.U_tau[i]),
                        p.status});
    probes.push_back({{"alpha", a},
                      {"I0_est", p.I0_est},
                      {"I0_quad", p.I0_quad},
                      {"u_slope", p.u_slope},
                      {"u_I0_est", number(p.u_I0_est)},
                      {"status", p.status}});
    std::string tag = "alpha=" + format_number(a);
    if (a == 0.0) {
      rep.check_le("probe_slope_zero[" + tag + "]", std::abs(p.I0_est), 1e-3);
      rep.check_le("probe_shale_slope_zero[" + tag + "]", std::abs(p.u_slope), 1e-3);
    } else {
      rep.check_le("probe_slope_vs_I0[" + tag + "]", std::abs(p.I0_est - p.I0_quad) / p.I0_quad, 0.1,
                   {{"I0_est", p.I0_est}, {"I0_quad", p.I0_quad}});
      // the Shale integrand reaches its logarithmic regime only once
      // tau^{-2 alpha} / (2 alpha I) is small
      double I = 0.5 * std::numbers::pi / std::sin(std::numbers::pi * a);
      double lag = std::pow(p.tau.front(), -2 * a) / (2 * a * I);
      double dev = std::abs(p.u_I0_est - p.I0_quad) / p.I0_quad;
      json det = {{"u_I0_est", p.u_I0_est}, {"value", dev}, {"tolerance", 0.1}, {"preasymptotic", lag}};
      if (lag > 0.05)
        rep.check("probe_shale_slope_vs_I0[" + tag + "]", CheckStatus::inconclusive, det);
      else
        rep.check("probe_shale_slope_vs_I0[" + tag + "]", dev <= 0.1, det);
    }
    bool head = true;
    for (std::size_t i = 0; i < p.head_T.size(); ++i) head = head && std::abs(p.head_value[i]) <= p.head_bound[i];
    rep.check("probe_head_bounded[" + tag + "]", head);
    i0.push_back(p.I0_quad);
  }
  bool mono = true;
  for (std::size_t i = 1; i < i0.size(); ++i)
    if (pc.alphas[i] > pc.alphas[i - 1]) mono = mono && i0[i] > i0[i - 1];
  rep.check("I0_monotone_in_alpha", mono);
  res["probes"] = probes;
  out.probe = t;

  auto [tr, ex] = grid_shale_growth(pc);
  res["grid_shale"] = {{"sizes", pc.grid_sizes}, {"trace", numbers(tr)}, {"exponent", ex}};
  rep.check("grid_shale_growth", ex > 0.05, {{"exponent", ex}});
  return out;
}

inline model::DiscretizedModel explicit_modes(const std::vector<double>& omega, const std::vector<double>& f,
                                              double lambda) {
  model::DiscretizedModel m;
  const Eigen::Index d = omega.size();
  m.k = Vector::LinSpaced(d, 1.0, double(d));
  m.w = Vector::Ones(d);
  m.omega = Eigen::Map<const Vector>(omega.data(), d);
  m.f = Eigen::Map<const Vector>(f.data(), d).cast<cplx>();
  m.lambda = lambda;
  return m;
}

inline StudyOutput study_fock(const RunConfig& cfg, const Options& opt) {
  StudyOutput out{RunReport("fock"), {}, {}};
  auto& rep = out.report;
  auto& res = rep.payload();
  const auto& fc = cfg.fock;

  {
    auto m = explicit_modes({1.0}, {1.0}, 2.0);
    fock::FockBasis b(1, 60);
    auto h = fock::build_hamiltonian<double>(b, m.omega, m.fhat(), m.lambda);
    double e0 = fock::dense_eig(h.quadratic).eigenvalues()(0);
    auto blk = bogoliubov::build_blocks(m, bogoliubov::XiMode::direct, rankone::Method::eig);
    rep.check_le("single_mode_ground_energy", std::abs(e0 + 1.0), 1e-6, {{"fock", e0}});
    rep.check_le("single_mode_blocks",
                 std::max({std::abs(blk.xi(0, 0) - 3.0), std::abs(blk.U(0, 0) - 2.0 / std::sqrt(3.0)),
                           std::abs(blk.V(0, 0) + 1.0 / std::sqrt(3.0)),
                           std::abs(bogoliubov::ground_energy(blk) + 1.0)}),
                 1e-12);
    res["single_mode"] = {{"E0", e0}, {"xi", blk.xi(0, 0)}, {"U", blk.U(0, 0)}, {"V", blk.V(0, 0)}};
  }

  auto m = explicit_modes(fc.omega, fc.f, fc.lambda);
  const int d = static_cast<int>(fc.omega.size());
  fock::FockBasis basis(d, fc.nmax);
  res["dimension"] = basis.size();
  Vector fh = m.fhat();

  auto h = fock::build_hamiltonian<double>(basis, m.omega, fh, m.lambda);
  rep.check_le("hamiltonian_routes_agree", Matrix(h.quadratic.matrix - h.normal_ordered.matrix).cwiseAbs().maxCoeff(),
               1e-12);

  {
    auto h0 = fock::build_hamiltonian<double>(basis, m.omega, fh, 0.0);
    Vector ev = fock::dense_eig(h0.quadratic).eigenvalues();
    std::vector<double> exact;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      double e = 0;
      for (int j = 0; j < d; ++j) e += basis.state(i)[j] * m.omega(j);
      exact.push_back(e);
    }
    std::sort(exact.begin(), exact.end());
    double err = 0;
    for (std::size_t i = 0; i < exact.size(); ++i) err = std::max(err, std::abs(ev(i) - exact[i]));
    rep.check_le("zero_coupling_spectrum", err, 1e-12);
  }

  rep.check_le("ccr_residual", fock::ccr_residual<double>(basis, fh, Vector(fh.reverse())), 1e-12);

  {
    numerics::CVector fcpx(d);
    for (int j = 0; j < d; ++j) fcpx(j) = fh(j) * std::polar(1.0, fc.theta * (j + 1));
    fock::FockBasis gb(d, std::min(fc.nmax, 6));
    rep.check_le("gauge_equivalence", fock::gauge_equivalence(gb, m.omega, fcpx, m.lambda), 1e-10);
  }

  auto sc = fock::spectral_compare(basis, m, fc.levels, fc.tolerance);
  rep.check("spectral_compare",
            sc.status == fock::Status::pass ? CheckStatus::pass
            : sc.status == fock::Status::fail ? CheckStatus::fail
                                               : CheckStatus::inconclusive,
            {{"max_gap", sc.max_gap}, {"truncation_change", sc.truncation_change}, {"tolerance", fc.tolerance}});
  res["levels"] = {{"fock", numbers(sc.fock_levels)}, {"predicted", numbers(sc.predicted_levels)}};

  auto vn = fock::vacuum_number_expectation(fock::FockBasis(d, fc.number_nmax), m);
  rep.check_le("vacuum_number_vs_shale", std::abs(vn.fock - vn.shale), 5e-3,
               {{"fock", vn.fock}, {"shale", vn.shale}});

  double e0 = sc.fock_levels.front();
  double lower = -std::max(m.lambda, 0.0) * fh.squaredNorm();
  rep.check("form_bound", e0 >= lower - 1e-12 && e0 <= 1e-12, {{"E0", e0}, {"lower", lower}});

  {
    std::vector<double> om(fc.omega.begin(), fc.omega.begin() + std::min(d, fc.bound_modes));
    std::vector<double> ff(fc.f.begin(), fc.f.begin() + om.size());
    auto mb = explicit_modes(om, ff, fc.lambda);
    fock::FockBasis bb(static_cast<int>(om.size()), fc.bound_nmax);
    auto rb = fock::relative_bound_check(bb, mb.fhat(), fc.trials, opt.seed);
    rep.check("relative_bound_sqrt6", rb.sqrt6_violations == 0,
              {{"trials", rb.trials}, {"violations", rb.sqrt6_violations}, {"worst_ratio", rb.worst_sqrt6_ratio}});
    rep.check("relative_bound_components", rb.component_violations == 0 && rb.safe_violations == 0);
  }
  return out;
}

inline StudyOutput run_study(const std::string& name, const RunConfig& cfg, const Options& opt) {
  if (name == "identities") return study_identities(cfg, opt);
  if (name == "diagonalize") return study_diagonalize(cfg, opt);
  if (name == "flow") return study_flow(cfg, opt);
  if (name == "shale-scan") return study_shale_scan(cfg, opt);
  if (name == "fock") return study_fock(cfg, opt);
  if (name == "all") {
    StudyOutput all{RunReport("all"), {}, {}};
    for (const char* s : {"identities", "diagonalize", "flow", "shale-scan", "fock"}) {
      auto o = run_study(s, cfg, opt);
      all.report.merge(o.report);
      if (o.flow) all.flow = o.flow;
      if (o.probe) all.probe = o.probe;
    }
    return all;
  }
  throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace qbren::cli
