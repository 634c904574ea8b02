#pragma once

/**
 * @file trajectory.hpp
 * @brief Fourth-order point-to-point motion profiles and the scheduling
 *        sequences derived from them.
 *
 * The planner builds the classic symmetric snap-limited profile: up to 15
 * phases of constant snap in {-s_max, 0, +s_max}, with jerk, acceleration and
 * velocity plateaus inserted as the bounds allow. All derivatives are
 * evaluated analytically from the piecewise-quartic position polynomial, so
 * the sampled bundle is exact to roundoff rather than to differencing error.
 */

#include <cstddef>
#include <string>

#include "lpvff/signals.hpp"

namespace lpvff {

/// Symmetric kinematic limits for point-to-point planning. All must be positive.
struct MotionBounds {
  double v_max = 0.0;  ///< velocity bound [m/s]
  double a_max = 0.0;  ///< acceleration bound [m/s^2]
  double j_max = 0.0;  ///< jerk bound [m/s^3]
  double s_max = 0.0;  ///< snap bound [m/s^4]
};

/// A reference trajectory with its analytic derivatives on one sample grid.
/// int_r is the running trapezoidal integral of r starting at zero.
struct ReferenceBundle {
  SampledSignal r;
  SampledSignal dr;
  SampledSignal ddr;
  SampledSignal dddr;
  SampledSignal ddddr;
  SampledSignal int_r;
};

/// Scheduling sequence rho(t) with its first two time derivatives.
struct SchedulingSequence {
  SampledSignal rho;
  SampledSignal drho;
  SampledSignal ddrho;
};

/// Throws InvalidInput unless all bounds are positive.
void validate_bounds(const MotionBounds& b);

/// Throws InvalidInput unless every member shares one grid.
void validate_bundle(const ReferenceBundle& b);

/**
 * @brief Plans a rest-to-rest fourth-order profile from start to end.
 *
 * The snap profile is bang-bang at +-s_max on its active phases. Phase
 * durations come from the standard cascade (jerk, acceleration, velocity and
 * stroke limits applied in that order, each with its closed form or a
 * monotone bisection). Any slack between the motion duration and the sampled
 * window is split evenly so the sampled velocity profile stays symmetric.
 *
 * Sampled snap at a switch instant that lands on a sample takes the mean of
 * the two adjacent phase values; the first and last samples take the inward
 * limit. This keeps cumulative trapezoidal integration exact across on-grid
 * switches and makes second differences of downstream signals consistent
 * with their analytic derivatives at jump samples.
 *
 * Throws PlanningError for zero displacement or when the move needs more
 * than max_samples samples; InvalidInput for bad bounds or sample period.
 */
ReferenceBundle plan_fourth_order(double start, double end, const MotionBounds& bounds,
                                  double sample_period,
                                  std::size_t max_samples = 4000000);

/**
 * @brief Scheduling taken directly from the reference: rho = r, drho = dr,
 *        ddrho = ddr (analytic, no differencing).
 *
 * Throws InvalidInput if r leaves the open interval (0, domain_length), where
 * the plant stiffness is undefined.
 */
SchedulingSequence scheduling_from_reference(const ReferenceBundle& bundle,
                                             double domain_length);

/// Writes "t,r,dr,ddr,dddr,ddddr,int_r" rows at full precision.
void write_bundle_csv(const std::string& path, const ReferenceBundle& b);

}  // namespace lpvff
