#include "lpvff/identify.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "lpvff/errors.hpp"

namespace lpvff {

namespace {

/// theta = K Phi^T alpha computed block-wise from the regressor diagonals.
Eigen::VectorXd compute_theta_hat(const GramMatrix& k,
                                  const std::vector<Eigen::VectorXd>& diags,
                                  const Eigen::VectorXd& alpha) {
  const Eigen::Index n = k.n_samples;
  const int nt = k.n_theta;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nt) * n);
  for (int i = 0; i < nt; ++i) {
    auto dst = theta.segment(static_cast<Eigen::Index>(i) * n, n);
    for (int j = 0; j < nt; ++j) {
      const auto kij =
          k.m.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n, n);
      dst.noalias() += kij * diags[static_cast<std::size_t>(j)].cwiseProduct(alpha);
    }
  }
  return theta;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string kind_name(KernelBlock::Kind k) {
  switch (k) {
    case KernelBlock::Kind::Constant: return "constant";
    case KernelBlock::Kind::White: return "white";
    case KernelBlock::Kind::SquaredExponential: return "squared_exponential";
  }
  throw InvalidInput("unknown kernel block kind");
}

KernelBlock::Kind kind_from_name(const std::string& s) {
  if (s == "constant") return KernelBlock::Kind::Constant;
  if (s == "white") return KernelBlock::Kind::White;
  if (s == "squared_exponential") return KernelBlock::Kind::SquaredExponential;
  throw ConfigError("unknown kernel kind '" + s + "'");
}

}  // namespace

Eigen::VectorXd RegressorMatrix::diagonal(int block) const {
  if (block < 0 || block >= n_theta) throw InvalidInput("regressor block index out of range");
  return dense.block(0, static_cast<Eigen::Index>(block) * n_samples, n_samples, n_samples)
      .diagonal();
}

RegressorMatrix build_regressors(const SampledSignal& y, const BasisSet& basis) {
  validate_basis(basis);
  validate_signal(y, 3);
  const Eigen::Index n = static_cast<Eigen::Index>(y.size());
  const int nt = static_cast<int>(basis.size());
  RegressorMatrix phi;
  phi.basis = basis;
  phi.n_theta = nt;
  phi.n_samples = n;
  phi.dense = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(nt) * n);
  for (int b = 0; b < nt; ++b) {
    const SampledSignal col = apply_basis_operator(basis[static_cast<std::size_t>(b)], y);
    phi.dense.block(0, static_cast<Eigen::Index>(b) * n, n, n).diagonal() =
        Eigen::Map<const Eigen::VectorXd>(col.values.data(), n);
  }
  return phi;
}

Eigen::VectorXd build_target(const SampledSignal& u) {
  const SampledSignal w = double_integrate(u);
  return Eigen::Map<const Eigen::VectorXd>(w.values.data(), static_cast<Eigen::Index>(w.size()));
}

Eigen::VectorXd build_target_held(const SampledSignal& u) {
  const SampledSignal w = double_integrate_held(u);
  return Eigen::Map<const Eigen::VectorXd>(w.values.data(), static_cast<Eigen::Index>(w.size()));
}

IdentifiedModel solve(const RegressorMatrix& phi, const GramMatrix& k, double gamma,
                      const Eigen::VectorXd& w_bar, const KernelSpec& spec,
                      const SampledSignal& rho_train) {
  validate_spec(spec);
  if (static_cast<int>(spec.blocks.size()) != phi.n_theta) {
    throw InvalidInput("solve: kernel spec and regressor block counts disagree");
  }
  if (k.n_theta != phi.n_theta || k.n_samples != phi.n_samples) {
    throw InvalidInput("solve: Gram matrix does not match the regressor layout");
  }
  if (w_bar.size() != phi.n_samples) throw InvalidInput("solve: target length mismatch");
  if (static_cast<Eigen::Index>(rho_train.size()) != phi.n_samples) {
    throw InvalidInput("solve: scheduling length mismatch");
  }
  if (static_cast<int>(phi.basis.size()) != phi.n_theta) {
    throw InvalidInput("solve: regressor matrix must carry one basis entry per block");
  }
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw InvalidInput("solve: gamma must be finite and >= 0");
  }
  std::vector<Eigen::VectorXd> diags = regressor_block_diagonals(phi.dense, phi.n_theta);
  if (static_cast<int>(diags.size()) != phi.n_theta) {
    throw InvalidInput("solve: regressor blocks must be diagonal");
  }

  Eigen::MatrixXd s = sandwich(phi.dense, k);
  s.diagonal().array() += gamma;
  // With gamma == 0 the problem is well posed only if Phi K Phi^T is itself
  // positive definite, so no jitter rescue is allowed in that case.
  const Eigen::MatrixXd alpha_mat = spd_solve(s, w_bar, nullptr, gamma > 0.0);
  const Eigen::VectorXd alpha = alpha_mat.col(0);

  IdentifiedModel m;
  m.basis = phi.basis;
  m.spec = spec;
  m.gamma = gamma;
  m.rho_train = rho_train;
  m.regressor_diag = std::move(diags);
  m.dual = alpha;
  m.theta_hat = compute_theta_hat(k, m.regressor_diag, alpha);
  return m;
}

ThetaPrediction predict_theta(const IdentifiedModel& m, int block, double rho_star) {
  const int nt = static_cast<int>(m.spec.blocks.size());
  if (block < 0 || block >= nt) throw InvalidInput("predict_theta: block index out of range");
  if (!std::isfinite(rho_star)) throw InvalidInput("predict_theta: rho must be finite");
  const KernelBlock& b = m.spec.blocks[static_cast<std::size_t>(block)];
  const Eigen::VectorXd& d = m.regressor_diag[static_cast<std::size_t>(block)];
  ThetaPrediction p;
  for (std::size_t k = 0; k < m.rho_train.size(); ++k) {
    const double c = d(static_cast<Eigen::Index>(k)) * m.dual(static_cast<Eigen::Index>(k));
    const double r = m.rho_train.values[k];
    p.value += block_kernel(b, rho_star, r) * c;
    p.d1 += block_kernel_d1(b, rho_star, r) * c;
    p.d2 += block_kernel_d2(b, rho_star, r) * c;
  }
  return p;
}

ThetaFunctions identified_theta_functions(const IdentifiedModel& m) {
  const auto shared = std::make_shared<const IdentifiedModel>(m);
  ThetaFunctions fns;
  for (int b = 0; b < static_cast<int>(shared->spec.blocks.size()); ++b) {
    ThetaFunction f;
    f.value = [shared, b](double rho) { return predict_theta(*shared, b, rho).value; };
    f.deriv = [shared, b](double rho) { return predict_theta(*shared, b, rho).d1; };
    f.deriv2 = [shared, b](double rho) { return predict_theta(*shared, b, rho).d2; };
    fns.push_back(std::move(f));
  }
  return fns;
}

std::vector<std::string> excitation_warnings(const RegressorMatrix& phi,
                                             const std::vector<double>& rho_bar) {
  std::vector<std::string> out;
  if (rho_bar.size() != static_cast<std::size_t>(phi.n_samples)) {
    throw InvalidInput("excitation_warnings: scheduling length mismatch");
  }
  double lo = rho_bar.front();
  double hi = rho_bar.front();
  for (double r : rho_bar) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (hi - lo < 1e-6) {
    out.push_back(
        "scheduling stays (near-)constant over the run; scheduling-dependent "
        "kernel blocks cannot be identified from it");
  }
  for (int b = 0; b < phi.n_theta; ++b) {
    if (phi.diagonal(b).cwiseAbs().maxCoeff() == 0.0) {
      out.push_back("regressor block " + std::to_string(b) +
                    " is identically zero; its parameter is unidentifiable");
    }
  }
  return out;
}

void save_model(const IdentifiedModel& m, const std::string& path,
                const std::string& config_hash) {
  nlohmann::json j;
  j["format"] = "lpvff-model-v1";
  j["config_hash"] = config_hash;
  std::vector<std::string> basis_names;
  for (const BasisOperator& op : m.basis) basis_names.push_back(basis_operator_name(op));
  j["basis"] = basis_names;
  nlohmann::json blocks = nlohmann::json::array();
  for (const KernelBlock& b : m.spec.blocks) {
    blocks.push_back({{"kind", kind_name(b.kind)},
                      {"sigma2", b.sigma2},
                      {"length", b.length},
                      {"optimize", b.optimize}});
  }
  j["kernel"] = blocks;
  j["gamma"] = m.gamma;
  j["sample_period"] = m.rho_train.sample_period;
  j["rho_train"] = m.rho_train.values;
  j["dual"] = to_std(m.dual);
  nlohmann::json regrs = nlohmann::json::array();
  for (const Eigen::VectorXd& d : m.regressor_diag) regrs.push_back(to_std(d));
  j["regressors"] = regrs;

  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out.good()) throw InvalidInput("failed while writing '" + path + "'");
}

IdentifiedModel load_model(const std::string& path, std::string* config_hash) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "lpvff-model-v1") {
      throw ConfigError("model file '" + path + "' has an unsupported format tag");
    }
    IdentifiedModel m;
    for (const auto& name : j.at("basis")) {
      m.basis.push_back(parse_basis_operator(name.get<std::string>()));
    }
    for (const auto& jb : j.at("kernel")) {
      KernelBlock b;
      b.kind = kind_from_name(jb.at("kind").get<std::string>());
      b.sigma2 = jb.at("sigma2").get<double>();
      b.length = jb.at("length").get<double>();
      b.optimize = jb.at("optimize").get<bool>();
      m.spec.blocks.push_back(b);
    }
    m.gamma = j.at("gamma").get<double>();
    m.rho_train.sample_period = j.at("sample_period").get<double>();
    m.rho_train.values = j.at("rho_train").get<std::vector<double>>();
    m.dual = to_eigen(j.at("dual").get<std::vector<double>>());
    for (const auto& jd : j.at("regressors")) {
      m.regressor_diag.push_back(to_eigen(jd.get<std::vector<double>>()));
    }
    if (config_hash != nullptr) *config_hash = j.at("config_hash").get<std::string>();

    const Eigen::Index n = static_cast<Eigen::Index>(m.rho_train.size());
    if (n < 1 || m.dual.size() != n) {
      throw ConfigError("model file '" + path + "' has inconsistent sample counts");
    }
    if (m.spec.blocks.size() != m.basis.size() ||
        m.regressor_diag.size() != m.basis.size()) {
      throw ConfigError("model file '" + path + "' has inconsistent block counts");
    }
    for (const Eigen::VectorXd& d : m.regressor_diag) {
      if (d.size() != n) {
        throw ConfigError("model file '" + path + "' has inconsistent regressor lengths");
      }
    }
    validate_spec(m.spec);
    validate_basis(m.basis);
    validate_signal(m.rho_train, 1);
    if (!std::isfinite(m.gamma) || m.gamma < 0.0) {
      throw ConfigError("model file '" + path + "' has an invalid gamma");
    }

    const GramMatrix k = build_gram(m.spec, m.rho_train.values);
    m.theta_hat = compute_theta_hat(k, m.regressor_diag, m.dual);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model file '" + path + "' is missing fields: " + e.what());
  }
}

}  // namespace lpvff
