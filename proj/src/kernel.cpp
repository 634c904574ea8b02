#include "lpvff/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lpvff/errors.hpp"

namespace lpvff {

namespace {

bool is_finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

double grid_value(double lo, double hi, int i, int n) {
  if (n <= 1) return lo;
  const double t = static_cast<double>(i) / static_cast<double>(n - 1);
  return std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
}

}  // namespace

void validate_spec(const KernelSpec& spec) {
  if (spec.blocks.empty()) throw InvalidInput("kernel spec has no blocks");
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const KernelBlock& b = spec.blocks[i];
    if (!is_finite_positive(b.sigma2)) {
      throw InvalidInput("kernel block " + std::to_string(i) + ": sigma2 must be finite and > 0");
    }
    if (b.kind == KernelBlock::Kind::SquaredExponential && !is_finite_positive(b.length)) {
      throw InvalidInput("kernel block " + std::to_string(i) + ": length must be finite and > 0");
    }
  }
}

double se_kernel(double rho, double rho_p, double sigma2, double length) {
  if (!is_finite_positive(sigma2) || !is_finite_positive(length)) {
    throw InvalidInput("se_kernel: sigma2 and length must be finite and > 0");
  }
  const double d = rho - rho_p;
  return sigma2 * std::exp(-d * d / (2.0 * length * length));
}

double se_kernel_d1(double rho, double rho_p, double sigma2, double length) {
  const double d = rho - rho_p;
  return -d / (length * length) * se_kernel(rho, rho_p, sigma2, length);
}

double se_kernel_d2(double rho, double rho_p, double sigma2, double length) {
  const double d = rho - rho_p;
  const double l2 = length * length;
  return (d * d - l2) / (l2 * l2) * se_kernel(rho, rho_p, sigma2, length);
}

double block_kernel(const KernelBlock& b, double rho_star, double rho_train) {
  switch (b.kind) {
    case KernelBlock::Kind::Constant:
      return b.sigma2;
    case KernelBlock::Kind::White:
      return 0.0;  // index-coupled; no correlation off the training set
    case KernelBlock::Kind::SquaredExponential:
      return se_kernel(rho_star, rho_train, b.sigma2, b.length);
  }
  throw InvalidInput("unknown kernel block kind");
}

double block_kernel_d1(const KernelBlock& b, double rho_star, double rho_train) {
  if (b.kind == KernelBlock::Kind::SquaredExponential) {
    return se_kernel_d1(rho_star, rho_train, b.sigma2, b.length);
  }
  return 0.0;
}

double block_kernel_d2(const KernelBlock& b, double rho_star, double rho_train) {
  if (b.kind == KernelBlock::Kind::SquaredExponential) {
    return se_kernel_d2(rho_star, rho_train, b.sigma2, b.length);
  }
  return 0.0;
}

GramMatrix build_gram(const KernelSpec& spec, const std::vector<double>& rho_bar) {
  validate_spec(spec);
  if (rho_bar.empty()) throw InvalidInput("build_gram: empty scheduling sequence");
  for (double r : rho_bar) {
    if (!std::isfinite(r)) throw InvalidInput("build_gram: non-finite scheduling value");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rho_bar.size());
  const int nt = static_cast<int>(spec.blocks.size());
  GramMatrix g;
  g.n_theta = nt;
  g.n_samples = n;
  g.m = Eigen::MatrixXd::Zero(nt * n, nt * n);
  for (int b = 0; b < nt; ++b) {
    const KernelBlock& blk = spec.blocks[b];
    auto dst = g.m.block(static_cast<Eigen::Index>(b) * n, static_cast<Eigen::Index>(b) * n, n, n);
    if (blk.kind == KernelBlock::Kind::White) {
      dst.diagonal().setConstant(blk.sigma2);
      continue;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j; i < n; ++i) {
        const double v =
            block_kernel(blk, rho_bar[static_cast<std::size_t>(i)], rho_bar[static_cast<std::size_t>(j)]);
        dst(i, j) = v;
        dst(j, i) = v;
      }
    }
  }
  return g;
}

std::vector<Eigen::VectorXd> regressor_block_diagonals(const Eigen::MatrixXd& phi, int n_theta) {
  const Eigen::Index n = phi.rows();
  if (n_theta < 1 || phi.cols() != static_cast<Eigen::Index>(n_theta) * n) return {};
  std::vector<Eigen::VectorXd> diags;
  diags.reserve(static_cast<std::size_t>(n_theta));
  for (int b = 0; b < n_theta; ++b) {
    const auto block = phi.block(0, static_cast<Eigen::Index>(b) * n, n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i != j && block(i, j) != 0.0) return {};
      }
    }
    diags.emplace_back(block.diagonal());
  }
  return diags;
}

Eigen::MatrixXd sandwich(const Eigen::MatrixXd& phi, const GramMatrix& k) {
  const Eigen::Index n = phi.rows();
  const int nt = k.n_theta;
  if (phi.cols() != k.m.rows() || k.n_samples != n) {
    throw InvalidInput("sandwich: regressor and Gram dimensions disagree");
  }
  const std::vector<Eigen::VectorXd> diags = regressor_block_diagonals(phi, nt);
  if (static_cast<int>(diags.size()) == nt) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < nt; ++j) {
        const auto kij =
            k.m.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n, n);
        if (kij.isZero(0.0)) continue;
        s.noalias() += (diags[static_cast<std::size_t>(i)] *
                        diags[static_cast<std::size_t>(j)].transpose())
                           .cwiseProduct(kij);
      }
    }
    return s;
  }
  Eigen::MatrixXd tmp = phi * k.m;
  return tmp * phi.transpose();
}

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          double* log_det, bool allow_jitter) {
  auto attempt = [&](const Eigen::MatrixXd& m) -> std::pair<bool, Eigen::MatrixXd> {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return {false, {}};
    const auto& l = llt.matrixLLT();
    double ld = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      const double d = l(i, i);
      if (!(d > 0.0) || !std::isfinite(d)) return {false, {}};
      ld += std::log(d);
    }
    if (log_det != nullptr) *log_det = 2.0 * ld;
    return {true, llt.solve(b)};
  };
  auto [ok, x] = attempt(a);
  if (ok) return x;
  if (allow_jitter) {
    const double jitter = 1e-10 * a.trace() / static_cast<double>(a.rows());
    if (std::isfinite(jitter) && jitter > 0.0) {
      Eigen::MatrixXd aj = a;
      aj.diagonal().array() += jitter;
      auto [ok2, x2] = attempt(aj);
      if (ok2) return x2;
    }
  }
  const double dmax = a.diagonal().maxCoeff();
  const double dmin = a.diagonal().minCoeff();
  std::ostringstream msg;
  msg << "Cholesky factorization failed (dim " << a.rows() << ", diagonal range [" << dmin << ", "
      << dmax << "])";
  throw NumericalError(msg.str());
}

double log_marginal_likelihood(const KernelSpec& spec, const Eigen::MatrixXd& phi,
                               const Eigen::VectorXd& w_bar,
                               const std::vector<double>& rho_bar, double gamma) {
  const Eigen::Index n = phi.rows();
  if (w_bar.size() != n) throw InvalidInput("log_marginal_likelihood: target length mismatch");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidInput("log_marginal_likelihood: gamma must be finite and >= 0");
  }
  const GramMatrix k = build_gram(spec, rho_bar);
  Eigen::MatrixXd s = sandwich(phi, k);
  s.diagonal().array() += gamma;
  double log_det = 0.0;
  const Eigen::MatrixXd alpha = spd_solve(s, w_bar, &log_det);
  return -0.5 * w_bar.dot(alpha.col(0)) - 0.5 * log_det -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

std::pair<KernelSpec, double> optimize_hyperparameters(
    const KernelSpec& spec, const Eigen::MatrixXd& phi, const Eigen::VectorXd& w_bar,
    const std::vector<double>& rho_bar, double gamma, const HyperSearch& search) {
  validate_spec(spec);
  if (search.grid_sigma2 < 1 || search.grid_length < 1 || search.refine_steps < 0) {
    throw InvalidInput("hyperparameter search: grid sizes must be >= 1 and refine_steps >= 0");
  }
  if (!(search.sigma2_min > 0.0 && search.sigma2_max >= search.sigma2_min &&
        search.length_min > 0.0 && search.length_max >= search.length_min)) {
    throw InvalidInput("hyperparameter search: bounds must be positive and ordered");
  }

  KernelSpec current = spec;
  auto evaluate = [&](const KernelSpec& cand) -> double {
    try {
      return log_marginal_likelihood(cand, phi, w_bar, rho_bar, gamma);
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  double best = evaluate(current);

  // Stage 1: per-block grid sweep, earlier blocks settled before later ones.
  // Each free block ends on its best grid point (ties keep the smallest grid
  // index); the template values only seed blocks that are not searched, so a
  // degenerate one-point grid returns exactly that point.
  for (std::size_t b = 0; b < current.blocks.size(); ++b) {
    if (!current.blocks[b].optimize) continue;
    const bool has_length = current.blocks[b].kind == KernelBlock::Kind::SquaredExponential;
    const int nl = has_length ? search.grid_length : 1;
    double block_best = -std::numeric_limits<double>::infinity();
    KernelBlock winner = current.blocks[b];
    for (int is = 0; is < search.grid_sigma2; ++is) {
      for (int il = 0; il < nl; ++il) {
        KernelSpec cand = current;
        cand.blocks[b].sigma2 = grid_value(search.sigma2_min, search.sigma2_max, is, search.grid_sigma2);
        if (has_length) {
          cand.blocks[b].length = grid_value(search.length_min, search.length_max, il, search.grid_length);
        }
        const double v = evaluate(cand);
        if (v > block_best) {
          block_best = v;
          winner = cand.blocks[b];
        }
      }
    }
    if (std::isfinite(block_best)) {
      current.blocks[b] = winner;
      best = block_best;
    }
  }

  // Stage 2: coordinate descent on every free scalar, multiplicative steps.
  struct Coord {
    std::size_t block;
    bool is_length;
    double factor;
    double lo;
    double hi;
  };
  std::vector<Coord> coords;
  const double f_sigma =
      search.grid_sigma2 > 1
          ? std::exp(std::log(search.sigma2_max / search.sigma2_min) / (search.grid_sigma2 - 1))
          : 2.0;
  const double f_length =
      search.grid_length > 1
          ? std::exp(std::log(search.length_max / search.length_min) / (search.grid_length - 1))
          : 2.0;
  for (std::size_t b = 0; b < current.blocks.size(); ++b) {
    if (!current.blocks[b].optimize) continue;
    coords.push_back({b, false, f_sigma, search.sigma2_min, search.sigma2_max});
    if (current.blocks[b].kind == KernelBlock::Kind::SquaredExponential) {
      coords.push_back({b, true, f_length, search.length_min, search.length_max});
    }
  }
  if (coords.empty()) return {current, best};

  for (int step = 0; step < search.refine_steps; ++step) {
    for (Coord& c : coords) {
      const double x =
          c.is_length ? current.blocks[c.block].length : current.blocks[c.block].sigma2;
      double best_x = x;
      double best_v = best;
      for (const double cand_x : {x / c.factor, x * c.factor}) {
        if (cand_x < c.lo || cand_x > c.hi) continue;
        KernelSpec cand = current;
        (c.is_length ? cand.blocks[c.block].length : cand.blocks[c.block].sigma2) = cand_x;
        const double v = evaluate(cand);
        if (v > best_v) {
          best_v = v;
          best_x = cand_x;
        }
      }
      if (best_x == x) {
        c.factor = std::sqrt(c.factor);
      } else {
        (c.is_length ? current.blocks[c.block].length : current.blocks[c.block].sigma2) = best_x;
        best = best_v;
      }
    }
  }
  return {current, best};
}

}  // namespace lpvff
