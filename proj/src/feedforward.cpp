#include "lpvff/feedforward.hpp"

#include <algorithm>
#include <cmath>

#include "lpvff/csv.hpp"
#include "lpvff/errors.hpp"

namespace lpvff {

namespace {

// Shared static-law sample so the frozen, static and dynamic laws run the
// identical arithmetic; the degeneracy chain then holds bit-for-bit.
inline void static_law_sample(const ReferenceBundle& b, std::size_t k, double t1,
                              double t2, double t3, double& w_ff, double& u_ff) {
  w_ff = t1 * b.int_r.values[k] + t2 * b.r.values[k] + t3 * b.ddr.values[k];
  u_ff = t1 * b.dr.values[k] + t2 * b.ddr.values[k] + t3 * b.ddddr.values[k];
}

FeedforwardSignals make_outputs(const ReferenceBundle& b) {
  FeedforwardSignals ff;
  for (SampledSignal* s : {&ff.w_ff, &ff.u_ff, &ff.u_dyn}) {
    s->sample_period = b.r.sample_period;
    s->values.resize(b.r.size());
  }
  return ff;
}

void require_benchmark_theta(const ThetaFunctions& theta) {
  if (theta.size() != 3) {
    throw InvalidInput("the benchmark feedforward laws take exactly 3 theta "
                       "functions (integral, position, acceleration terms)");
  }
  for (const auto& t : theta) {
    if (!t.value || !t.deriv || !t.deriv2) {
      throw InvalidInput("theta function with missing value or derivative");
    }
  }
}

}  // namespace

void validate_basis(const BasisSet& basis) {
  if (basis.empty()) throw InvalidInput("basis set must be non-empty");
  for (const auto& op : basis) {
    if (op.kind == BasisOperator::Kind::Derivative && op.order < 1) {
      throw InvalidInput("derivative basis operator needs order >= 1");
    }
    if (op.kind != BasisOperator::Kind::Derivative && op.order != 0) {
      throw InvalidInput("only derivative operators carry an order");
    }
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      if (basis[i] == basis[j]) {
        throw InvalidInput("basis operators must be distinct");
      }
    }
  }
}

BasisSet benchmark_basis() {
  return {{BasisOperator::Kind::Integral, 0},
          {BasisOperator::Kind::Identity, 0},
          {BasisOperator::Kind::Derivative, 2}};
}

SampledSignal apply_basis_operator(const BasisOperator& op, const SampledSignal& s) {
  switch (op.kind) {
    case BasisOperator::Kind::Integral:
      return integrate(s, 0.0);
    case BasisOperator::Kind::Identity:
      return s;
    case BasisOperator::Kind::Derivative: {
      if (op.order < 1) throw InvalidInput("derivative basis operator needs order >= 1");
      SampledSignal out = s;
      for (int i = 0; i < op.order; ++i) out = differentiate(out);
      return out;
    }
  }
  throw InvalidInput("unknown basis operator");
}

std::string basis_operator_name(const BasisOperator& op) {
  switch (op.kind) {
    case BasisOperator::Kind::Integral: return "integral";
    case BasisOperator::Kind::Identity: return "identity";
    case BasisOperator::Kind::Derivative:
      return "derivative:" + std::to_string(op.order);
  }
  throw InvalidInput("unknown basis operator");
}

BasisOperator parse_basis_operator(const std::string& name) {
  if (name == "integral") return {BasisOperator::Kind::Integral, 0};
  if (name == "identity") return {BasisOperator::Kind::Identity, 0};
  if (name.rfind("derivative:", 0) == 0) {
    const int order = std::stoi(name.substr(11));
    if (order < 1) throw InvalidInput("derivative basis operator needs order >= 1");
    return {BasisOperator::Kind::Derivative, order};
  }
  throw InvalidInput("unknown basis operator name: " + name);
}

ThetaFunctions true_theta(const PlantParams& p) {
  validate_params(p);
  const double ea = p.E * p.A;
  const double L = p.L;
  const double c2 = p.c2;
  const double mm = p.m1 + p.m2;
  const double cc2 = p.c * p.c2;
  const double m1m2 = p.m1 * p.m2;
  ThetaFunctions theta(3);
  theta[0].value = [c2](double) { return c2; };
  theta[0].deriv = [](double) { return 0.0; };
  theta[0].deriv2 = [](double) { return 0.0; };
  theta[1].value = [mm, cc2, ea, L](double rho) {
    return mm + cc2 * rho * (L - rho) / ea;
  };
  theta[1].deriv = [cc2, ea, L](double rho) { return cc2 * (L - 2.0 * rho) / ea; };
  theta[1].deriv2 = [cc2, ea](double) { return -2.0 * cc2 / ea; };
  theta[2].value = [m1m2, ea, L](double rho) { return m1m2 * rho * (L - rho) / ea; };
  theta[2].deriv = [m1m2, ea, L](double rho) { return m1m2 * (L - 2.0 * rho) / ea; };
  theta[2].deriv2 = [m1m2, ea](double) { return -2.0 * m1m2 / ea; };
  return theta;
}

FeedforwardSignals ff_lti(const ReferenceBundle& bundle,
                          const std::array<double, 3>& theta_bar) {
  validate_bundle(bundle);
  FeedforwardSignals ff = make_outputs(bundle);
  for (std::size_t k = 0; k < bundle.r.size(); ++k) {
    static_law_sample(bundle, k, theta_bar[0], theta_bar[1], theta_bar[2],
                      ff.w_ff.values[k], ff.u_ff.values[k]);
    ff.u_dyn.values[k] = 0.0;
  }
  return ff;
}

FeedforwardSignals ff_static_lpv(const ReferenceBundle& bundle,
                                 const SchedulingSequence& sched,
                                 const ThetaFunctions& theta) {
  validate_bundle(bundle);
  require_same_grid(bundle.r, sched.rho);
  require_benchmark_theta(theta);
  FeedforwardSignals ff = make_outputs(bundle);
  for (std::size_t k = 0; k < bundle.r.size(); ++k) {
    const double rho = sched.rho.values[k];
    static_law_sample(bundle, k, theta[0].value(rho), theta[1].value(rho),
                      theta[2].value(rho), ff.w_ff.values[k], ff.u_ff.values[k]);
    ff.u_dyn.values[k] = 0.0;
  }
  return ff;
}

FeedforwardSignals ff_dynamic_lpv(const ReferenceBundle& bundle,
                                  const SchedulingSequence& sched,
                                  const ThetaFunctions& theta) {
  validate_bundle(bundle);
  require_same_grid(bundle.r, sched.rho);
  require_same_grid(bundle.r, sched.drho);
  require_same_grid(bundle.r, sched.ddrho);
  require_benchmark_theta(theta);
  FeedforwardSignals ff = make_outputs(bundle);
  for (std::size_t k = 0; k < bundle.r.size(); ++k) {
    const double rho = sched.rho.values[k];
    const double drho = sched.drho.values[k];
    const double ddrho = sched.ddrho.values[k];
    double w_ff, u_static;
    static_law_sample(bundle, k, theta[0].value(rho), theta[1].value(rho),
                      theta[2].value(rho), w_ff, u_static);
    const double d1 = theta[2].deriv(rho);
    const double d2 = theta[2].deriv2(rho);
    const double u_dyn = ddrho * d1 * bundle.ddr.values[k] +
                         drho * drho * d2 * bundle.ddr.values[k] +
                         2.0 * drho * d1 * bundle.dddr.values[k];
    ff.w_ff.values[k] = w_ff;
    ff.u_ff.values[k] = u_static + u_dyn;
    ff.u_dyn.values[k] = u_dyn;
  }
  return ff;
}

void write_ff_csv(const std::string& path, const FeedforwardSignals& ff) {
  write_csv_columns(path, {"w_ff", "u_ff", "u_dyn"},
                    {&ff.w_ff.values, &ff.u_ff.values, &ff.u_dyn.values},
                    ff.w_ff.sample_period);
}

}  // namespace lpvff
