#pragma once

/**
 * @file feedforward.hpp
 * @brief The three benchmark feedforward laws (frozen, static-scheduling,
 *        dynamic-scheduling) and the scalar parameter functions they share.
 *
 * All three laws realize u_ff as the second time derivative of
 * w_ff = theta1 * Int(r) + theta2 * r + theta3(rho) * r''. The frozen law
 * evaluates every theta at one scheduling point, the static law re-evaluates
 * them along rho(t) but ignores that rho moves, and the dynamic law adds the
 * chain-rule terms u_dyn that the product d^2/dt^2 [theta3(rho(t)) r''(t)]
 * produces:
 *   u_dyn = rho'' theta3'(rho) r'' + rho'^2 theta3''(rho) r'' +
 *           2 rho' theta3'(rho) r'''.
 */

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "lpvff/plant.hpp"
#include "lpvff/signals.hpp"
#include "lpvff/trajectory.hpp"

namespace lpvff {

/// Scalar operators applied to a sampled signal when building regressors.
struct BasisOperator {
  enum class Kind { Integral, Identity, Derivative };
  Kind kind = Kind::Identity;
  int order = 0;  ///< derivative order; meaningful only for Kind::Derivative

  bool operator==(const BasisOperator&) const = default;
};

/// Ordered, duplicate-free list of basis operators.
using BasisSet = std::vector<BasisOperator>;

/// Throws InvalidInput for an empty set, duplicate operators, or a
/// non-positive derivative order.
void validate_basis(const BasisSet& basis);

/// The benchmark triple {Integral, Identity, Derivative(2)}.
BasisSet benchmark_basis();

/// Applies one operator: trapezoidal integral from zero, identity copy, or
/// repeated second-order differentiation.
SampledSignal apply_basis_operator(const BasisOperator& op, const SampledSignal& s);

/// Round-trippable text form: "integral", "identity", "derivative:<n>".
std::string basis_operator_name(const BasisOperator& op);
BasisOperator parse_basis_operator(const std::string& name);

/// One scheduling-dependent parameter with its first two derivatives in rho.
struct ThetaFunction {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::function<double(double)> deriv2;
};

using ThetaFunctions = std::vector<ThetaFunction>;

/**
 * @brief The plant-derived benchmark parameters:
 *        theta1 = c2, theta2 = m1 + m2 + c*c2/k(rho), theta3 = m1*m2/k(rho).
 *
 * Since 1/k(rho) = rho*(L - rho)/(E*A), every function is polynomial in rho
 * and the derivatives are exact.
 */
ThetaFunctions true_theta(const PlantParams& p);

/// Output of one feedforward law on the bundle's grid.
struct FeedforwardSignals {
  SampledSignal w_ff;   ///< feedforward in the transformed input w
  SampledSignal u_ff;   ///< applied feedforward force
  SampledSignal u_dyn;  ///< chain-rule terms; zero except for the dynamic law
};

/// Frozen law: every theta a constant, u_dyn identically zero.
FeedforwardSignals ff_lti(const ReferenceBundle& bundle,
                          const std::array<double, 3>& theta_bar);

/// Static-scheduling law: thetas follow rho(t), no chain-rule terms.
FeedforwardSignals ff_static_lpv(const ReferenceBundle& bundle,
                                 const SchedulingSequence& sched,
                                 const ThetaFunctions& theta);

/// Dynamic-scheduling law: the static terms plus u_dyn from theta3's
/// analytic derivatives and the scheduling rates.
FeedforwardSignals ff_dynamic_lpv(const ReferenceBundle& bundle,
                                  const SchedulingSequence& sched,
                                  const ThetaFunctions& theta);

/// Writes "t,w_ff,u_ff,u_dyn" rows at full precision.
void write_ff_csv(const std::string& path, const FeedforwardSignals& ff);

}  // namespace lpvff
