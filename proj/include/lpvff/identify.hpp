#pragma once

/**
 * @file identify.hpp
 * @brief Kernel-regularized identification of scheduling-dependent
 *        feedforward parameters from one input-output run.
 *
 * The regression lives in the twice-integrated input coordinate
 * w = iint u dt^2, so the target is formed by double integration of the
 * measured input and the regressors by applying the basis operators to the
 * measured output (in deviation form, i.e. with the initial value removed).
 * Each basis operator contributes one diagonal N x N block to the regressor
 * matrix, which keeps every downstream product cheap.
 *
 * The estimate solves
 *   min_Theta ||w_bar - Phi Theta||^2 + gamma ||Theta||_H^2
 * through its dual: alpha = (Phi K Phi^T + gamma I)^-1 w_bar and
 * Theta_hat = K Phi^T alpha. Values of the parameter functions anywhere in
 * the scheduling domain, and their first two derivatives, follow from the
 * representer expansion with the kernel's analytic derivatives.
 */

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lpvff/feedforward.hpp"
#include "lpvff/kernel.hpp"
#include "lpvff/signals.hpp"

namespace lpvff {

/// Regressor matrix with one diagonal block per basis operator.
struct RegressorMatrix {
  Eigen::MatrixXd dense;  ///< N x (n_theta * N)
  BasisSet basis;
  int n_theta = 0;
  Eigen::Index n_samples = 0;

  /// Diagonal of block `block` (the basis-filtered output signal).
  Eigen::VectorXd diagonal(int block) const;
};

/**
 * @brief Applies each basis operator to the output signal and packs the
 *        results as diagonal blocks. Pass the output in deviation form
 *        (initial value subtracted) so the integral operators share the
 *        zero-initial-condition convention of the target.
 */
RegressorMatrix build_regressors(const SampledSignal& y, const BasisSet& basis);

/// Twice-integrated input (trapezoidal, zero initial conditions).
Eigen::VectorXd build_target(const SampledSignal& u);

/**
 * @brief Twice-integrated input for data collected through a zero-order
 *        hold: the samples are the held values, so the staircase is
 *        integrated exactly instead of trapezoidally.
 *
 * The benchmark pipeline uses this variant because its simulator applies the
 * total input zero-order; the plain trapezoidal target would differ by
 * O(sample_period) in exactly the components the small parameters explain.
 */
Eigen::VectorXd build_target_held(const SampledSignal& u);

/// Everything needed to evaluate the identified parameter functions later.
struct IdentifiedModel {
  BasisSet basis;
  KernelSpec spec;
  double gamma = 0.0;
  SampledSignal rho_train;                      ///< scheduling at the training samples
  std::vector<Eigen::VectorXd> regressor_diag;  ///< per-block regressor diagonals
  Eigen::VectorXd dual;                         ///< alpha, length N
  Eigen::VectorXd theta_hat;                    ///< K Phi^T alpha, stacked block-wise
};

/**
 * @brief Solves the regularized regression in dual form.
 *
 * gamma == 0 is accepted only when Phi K Phi^T is numerically positive
 * definite on its own; otherwise NumericalError is thrown.
 */
IdentifiedModel solve(const RegressorMatrix& phi, const GramMatrix& k, double gamma,
                      const Eigen::VectorXd& w_bar, const KernelSpec& spec,
                      const SampledSignal& rho_train);

struct ThetaPrediction {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Representer evaluation of parameter function `block` at rho_star.
ThetaPrediction predict_theta(const IdentifiedModel& m, int block, double rho_star);

/// Wraps predict_theta into callable parameter functions, one per block.
ThetaFunctions identified_theta_functions(const IdentifiedModel& m);

/**
 * @brief Human-readable warnings for data that cannot identify the model:
 *        (near-)constant scheduling, or an identically zero regressor block.
 */
std::vector<std::string> excitation_warnings(const RegressorMatrix& phi,
                                             const std::vector<double>& rho_bar);

/// Writes the model as JSON. `config_hash` ties the file to the run config.
void save_model(const IdentifiedModel& m, const std::string& path,
                const std::string& config_hash);

/// Reads a model written by save_model and recomputes theta_hat from it.
IdentifiedModel load_model(const std::string& path, std::string* config_hash = nullptr);

}  // namespace lpvff
