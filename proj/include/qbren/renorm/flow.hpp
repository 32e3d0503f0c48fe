#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qbren/bogoliubov.hpp"
#include "qbren/model.hpp"
#include "qbren/renorm/resolvent.hpp"

namespace qbren::renorm {

// lambda_n = 1 / (1/lambda - 4 <f_n|omega^{-1} f_n>)
inline std::vector<double> coupling_flow(const model::DiscretizedModel& m, double lambda,
                                         const std::vector<double>& cutoffs) {
  if (lambda > 0.0) throw DomainError("coupling flow is defined for lambda <= 0");
  std::vector<double> out;
  for (double n : cutoffs) out.push_back(renormalized_coupling(lambda, inverse_omega_norm(model::cutoff_project(m, n))));
  return out;
}

// (1/2) tr(xi_n - h_n) at coupling lambda_n
inline double energy_counterterm(const model::DiscretizedModel& m, double n, double lambda_n) {
  auto mn = model::cutoff_project(m, n);
  mn.lambda = lambda_n;
  return bogoliubov::ground_energy(bogoliubov::build_blocks(mn, bogoliubov::XiMode::direct));
}

struct FlowRecord {
  double n = 0.0;
  double lambda_n = 0.0;
  double E_n = 0.0;
  double resolvent_gap = 0.0;  // ||R_{-1}(xi_n) - R_{-1}(xi)||
  double shale_n = 0.0;        // tr(V_n V_n^T)
  std::string status;
};

struct FlowResult {
  std::string flow_case;  // "1a", "1b" or "2"
  model::RegularityReport regularity;
  std::vector<FlowRecord> records;
  double reference_norm = 0.0;  // ||R_{-1}(xi)||
  double shale_bound = std::numeric_limits<double>::quiet_NaN();
  std::optional<bogoliubov::FormalTrace> formal;
};

inline Matrix shifted_inverse(const bogoliubov::BogoliubovBlocks& b) {
  return numerics::apply(b.xi_spec, [](double x) { return 1.0 / (x + 1.0); });
}

inline FlowResult flow_run(const model::DiscretizedModel& m, const std::vector<double>& cutoffs,
                           bool with_formal_trace = true) {
  FlowResult out;
  out.regularity = model::regularity_scan(m, cutoffs);
  using model::Regularity;
  switch (out.regularity.classification) {
    case Regularity::h_regular:
      out.flow_case = "1a";
      break;
    case Regularity::needs_energy_renorm:
      out.flow_case = "1b";
      break;
    case Regularity::needs_charge_renorm:
      out.flow_case = "2";
      break;
    case Regularity::out_of_theory:
      throw DomainError("form factor outside the treated classes (omega^{-3/2} f not square integrable)");
  }
  const bool charge = out.flow_case == "2";
  if (charge && !(m.lambda < 0.0)) throw DomainError("charge renormalization needs lambda < 0");
  if (!charge && m.lambda < 0.0) throw DomainError("cases 1a/1b are run with lambda >= 0");

  auto ref = bogoliubov::build_blocks(m, charge ? bogoliubov::XiMode::renormalized : bogoliubov::XiMode::direct);
  Matrix rref = shifted_inverse(ref);
  out.reference_norm = 1.0 / (1.0 + ref.xi_spec.values(0));
  if (!charge) out.shale_bound = 0.5 * m.lambda * std::pow(m.norm(0.5), 2);

  for (double n : cutoffs) {
    FlowRecord r;
    r.n = n;
    auto mn = model::cutoff_project(m, n);
    r.lambda_n = charge ? renormalized_coupling(m.lambda, inverse_omega_norm(mn)) : m.lambda;
    mn.lambda = r.lambda_n;
    auto b = bogoliubov::build_blocks(mn, bogoliubov::XiMode::direct);
    r.E_n = bogoliubov::ground_energy(b);
    r.resolvent_gap = numerics::spectral_norm_sym(shifted_inverse(b) - rref);
    r.shale_n = bogoliubov::shale_trace(b).direct;
    r.status = "case" + out.flow_case;
    out.records.push_back(r);
  }
  if (with_formal_trace && !charge) out.formal = bogoliubov::formal_trace(m);
  return out;
}

}  // namespace qbren::renorm
