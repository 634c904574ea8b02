#pragma once

/**
 * @file plant.hpp
 * @brief Position-dependent two-mass-spring-damper benchmark plant: stiffness
 *        maps, lead compensator design, closed-loop simulation and an
 *        input-output consistency oracle.
 *
 * The plant is two masses coupled by a spring k(rho) and damper c, with a
 * damper c2 from the load mass to ground. The input u forces the motor mass
 * m1; the measured output y is the load position x2. The spring stiffness
 * varies with the scheduling position rho as k = E*A / (rho*(L - rho)).
 */

#include <complex>
#include <string>

#include "lpvff/signals.hpp"
#include "lpvff/trajectory.hpp"

namespace lpvff {

/// Physical plant constants. c2 may be zero (undamped load, used by the
/// rigid-body momentum check); everything else must be positive.
struct PlantParams {
  double m1 = 1.0;     ///< motor-side mass [kg]
  double m2 = 0.5;     ///< load-side mass [kg]
  double c = 1.0;      ///< coupling damper [N s/m]
  double c2 = 1e-4;    ///< load-to-ground damper [N s/m]
  double E = 0.24e9;   ///< Young's modulus [Pa]
  double A = 1e-5;     ///< cross section [m^2]
  double L = 1.0;      ///< rail length [m]
};

/// First-order lead compensator gain * (1 + s/zero_freq) / (1 + s/pole_freq),
/// implemented in the loop by Tustin discretization at the sample period.
struct LeadController {
  double gain = 0.0;       ///< [N/m]
  double zero_freq = 0.0;  ///< [rad/s]
  double pole_freq = 0.0;  ///< [rad/s]
};

/// One closed-loop run on a common sample grid. e = r - y and
/// u = u_fb + u_ff hold sample-wise exactly by construction.
struct SimulationRecord {
  SampledSignal r;
  SampledSignal y;
  SampledSignal e;
  SampledSignal u;
  SampledSignal u_fb;
  SampledSignal u_ff;
};

/// Fixed-step integration settings.
struct SimulationOptions {
  int oversampling = 10;      ///< RK4 substeps per controller sample
  double state_bound = 1e3;   ///< divergence threshold on |state| entries
  /// Hold each feedforward sample at the midpoint of its two endpoint values
  /// instead of the left sample. A left-sample hold lags the intended smooth
  /// input by half a sample, which injects an error proportional to the
  /// sample period times the feedforward rate; the midpoint hold cancels
  /// that first-order term and leaves only a second-order residue. The
  /// feedback path is unaffected, and rec.u_ff records the value actually
  /// applied so rec.u == rec.u_fb + rec.u_ff always holds.
  bool midpoint_feedforward = true;
};

void validate_params(const PlantParams& p);
void validate_controller(const LeadController& c);

/// Spring stiffness k(rho) = E*A/(rho*(L-rho)). Throws InvalidInput outside (0, L).
double stiffness(const PlantParams& p, double rho);
/// dk/drho.
double stiffness_d1(const PlantParams& p, double rho);
/// d2k/drho2.
double stiffness_d2(const PlantParams& p, double rho);

/// Frozen-scheduling transfer function G(s) from u to y at stiffness k(rho).
std::complex<double> frozen_transfer(const PlantParams& p, double rho,
                                     std::complex<double> s);

/// Largest real part over the closed-loop poles of the frozen plant at rho
/// under the continuous-time lead controller.
double closed_loop_spectral_abscissa(const PlantParams& p, const LeadController& c,
                                     double rho);

/**
 * @brief Lead controller with zero at crossover/zero_ratio and pole at
 *        pole_ratio*crossover, gain set for unity loop magnitude at the
 *        crossover on the frozen plant at rho_design.
 *
 * Verifies closed-loop stability on a grid of frozen scheduling points over
 * [rho_min, rho_max] (13 points) and throws InvalidInput if any fails.
 */
LeadController design_lead_controller(const PlantParams& p, double rho_design,
                                      double crossover, double zero_ratio,
                                      double pole_ratio, double rho_min,
                                      double rho_max);

/**
 * @brief Simulates the sampled-data loop: Tustin lead on e = r - y plus the
 *        supplied feedforward, total input held zero-order over each sample,
 *        plant states advanced by RK4 at oversampling substeps per sample.
 *
 * The feedforward value held over each interval is chosen per
 * SimulationOptions::midpoint_feedforward; the feedback value is always the
 * current controller output. The scheduling rho(t) is interpolated linearly
 * between its samples; the plant starts at rest with both masses at r(0).
 * Throws InstabilityError at the first sample whose state leaves
 * [-state_bound, state_bound].
 */
SimulationRecord simulate_closed_loop(const PlantParams& p, const LeadController& c,
                                      const ReferenceBundle& bundle,
                                      const SchedulingSequence& sched,
                                      const SampledSignal& u_ff,
                                      const SimulationOptions& opts = {});

/// Open-loop run from the all-zero state: u applied zero-order, rho(t)
/// interpolated linearly. Returns the load position y.
SampledSignal simulate_open_loop(const PlantParams& p, const SampledSignal& rho,
                                 const SampledSignal& u,
                                 const SimulationOptions& opts = {});

/**
 * @brief Relative RMS mismatch between both sides of the frozen-scheduling
 *        input-output relation, evaluated from data alone.
 *
 * Left side: m1*m2*y'' + (c*(m1+m2) + c2*m1)*y' + (k*(m1+m2) + c*c2)*y
 * + k*c2*Int(y); right side: c*Int(u) + k*DoubleInt(u). The output enters as
 * its deviation from the initial sample, so runs that start from rest at any
 * position are accepted. The input samples are taken as zero-order-hold
 * values (matching how the simulators apply them) and integrated exactly;
 * the smooth output uses trapezoidal integrals and central differences.
 * Returns 0 when both sides vanish.
 */
double io_residual(const PlantParams& p, double rho_bar, const SampledSignal& u,
                   const SampledSignal& y);

/// Writes "t,r,y,e,u,u_fb,u_ff" rows at full precision.
void write_record_csv(const std::string& path, const SimulationRecord& rec);

}  // namespace lpvff
