#pragma once

/**
 * @file kernel.hpp
 * @brief Block-diagonal kernels over the scheduling variable, their Gram
 *        matrices, and evidence-based hyperparameter selection.
 *
 * Each scheduling-dependent parameter gets its own kernel block; parameters
 * are a priori independent, so off-diagonal blocks are zero. A `constant`
 * block (sigma^2 times the all-ones matrix) models a parameter with no
 * scheduling dependence; `white` (sigma^2 times the identity over sample
 * indices) is the degenerate alternative that cannot generalize across rho;
 * `squared_exponential` models smooth dependence and carries analytic first
 * and second derivatives in its first argument, which the dynamic
 * feedforward law needs.
 */

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lpvff {

struct KernelBlock {
  enum class Kind { Constant, White, SquaredExponential };
  Kind kind = Kind::Constant;
  double sigma2 = 1.0;   ///< output variance
  double length = 1.0;   ///< SE length scale; ignored otherwise
  bool optimize = false; ///< include this block in the evidence search
};

/// One block per basis function, in basis order.
struct KernelSpec {
  std::vector<KernelBlock> blocks;
};

/// Dense Gram matrix with its block layout. Symmetric by construction.
struct GramMatrix {
  Eigen::MatrixXd m;
  int n_theta = 0;
  Eigen::Index n_samples = 0;
};

void validate_spec(const KernelSpec& spec);

/// k_SE(rho, rho') = sigma2 * exp(-(rho - rho')^2 / (2 length^2)).
double se_kernel(double rho, double rho_p, double sigma2, double length);
/// d/drho of se_kernel.
double se_kernel_d1(double rho, double rho_p, double sigma2, double length);
/// d^2/drho^2 of se_kernel.
double se_kernel_d2(double rho, double rho_p, double sigma2, double length);

/**
 * @brief Cross-kernel value of one block between a query point and a training
 *        point. White blocks correlate sample indices, not rho values, so
 *        their cross-kernel off the training set is zero.
 */
double block_kernel(const KernelBlock& b, double rho_star, double rho_train);
/// d/drho_star of block_kernel.
double block_kernel_d1(const KernelBlock& b, double rho_star, double rho_train);
/// d^2/drho_star^2 of block_kernel.
double block_kernel_d2(const KernelBlock& b, double rho_star, double rho_train);

/// Assembles the block-diagonal Gram matrix over the training scheduling.
GramMatrix build_gram(const KernelSpec& spec, const std::vector<double>& rho_bar);

/**
 * @brief Diagonals of the N x N blocks of a regressor matrix, or an empty
 *        vector if any block has a nonzero off-diagonal entry.
 */
std::vector<Eigen::VectorXd> regressor_block_diagonals(const Eigen::MatrixXd& phi, int n_theta);

/**
 * @brief Phi * K * Phi^T. When every N x N block of Phi is diagonal (the
 *        regressor structure used throughout), the product is formed
 *        blockwise in O(n_theta^2 N^2) without any dense GEMM.
 */
Eigen::MatrixXd sandwich(const Eigen::MatrixXd& phi, const GramMatrix& k);

/**
 * @brief Gaussian log evidence of the targets under the kernel prior:
 *        -1/2 w^T S^-1 w - 1/2 log det S - N/2 log(2 pi),
 *        with S = Phi K Phi^T + gamma I.
 *
 * Factorization failures retry once with a jitter of 1e-10 trace(S)/N on the
 * diagonal and then throw NumericalError.
 */
double log_marginal_likelihood(const KernelSpec& spec, const Eigen::MatrixXd& phi,
                               const Eigen::VectorXd& w_bar,
                               const std::vector<double>& rho_bar, double gamma);

/// Deterministic search settings: log-spaced grid plus coordinate descent.
struct HyperSearch {
  int grid_sigma2 = 25;
  int grid_length = 25;
  double sigma2_min = 1e-12;
  double sigma2_max = 1e2;
  double length_min = 1e-3;
  double length_max = 1e1;
  int refine_steps = 20;
};

/**
 * @brief Maximizes the log evidence over the blocks flagged `optimize`.
 *
 * Stage 1 sweeps each free block over the inclusive log-spaced grid (sigma2
 * x length for SE blocks, sigma2 alone otherwise), ties resolved toward the
 * smallest grid index. Stage 2 runs refine_steps rounds of coordinate
 * descent, shrinking the per-coordinate step whenever the center wins.
 * Candidates whose factorization fails are skipped. Fully deterministic.
 *
 * Returns the tuned spec and the log evidence it achieves.
 */
std::pair<KernelSpec, double> optimize_hyperparameters(
    const KernelSpec& spec, const Eigen::MatrixXd& phi, const Eigen::VectorXd& w_bar,
    const std::vector<double>& rho_bar, double gamma, const HyperSearch& search);

/**
 * @brief Cholesky solve of A X = B for symmetric positive definite A, with a
 *        single jitter retry (1e-10 trace(A)/dim) before giving up; the
 *        failure message carries a diagonal-based condition estimate.
 * Also returns log det A through the optional output.
 */
Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          double* log_det = nullptr, bool allow_jitter = true);

}  // namespace lpvff
