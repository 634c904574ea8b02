#include "lpvff/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "json.hpp"
#include "lpvff/errors.hpp"
#include "lpvff/csv.hpp"
#include "lpvff/feedforward.hpp"

namespace lpvff {

namespace {

namespace fs = std::filesystem;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory '" + dir + "': " + ec.message());
}

PlanResult make_motion(const ExperimentConfig& cfg) {
  PlanResult p;
  p.bundle = plan_fourth_order(cfg.stroke_start, cfg.stroke_end, cfg.bounds,
                               cfg.sample_period, cfg.max_samples);
  p.sched = scheduling_from_reference(p.bundle, cfg.plant.L);
  return p;
}

LeadController make_controller(const ExperimentConfig& cfg, const PlanResult& motion) {
  double lo = motion.sched.rho.values.front();
  double hi = lo;
  for (double r : motion.sched.rho.values) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double crossover = 2.0 * std::numbers::pi * cfg.crossover_hz;
  return design_lead_controller(cfg.plant, cfg.design_rho, crossover, cfg.zero_ratio,
                                cfg.pole_ratio, lo, hi);
}

SampledSignal zero_like(const SampledSignal& s) {
  SampledSignal z;
  z.sample_period = s.sample_period;
  z.values.assign(s.size(), 0.0);
  return z;
}

/// Feedforward injected during the training run, per training.feedforward.
SampledSignal training_feedforward_signal(const ExperimentConfig& cfg,
                                          const PlanResult& motion) {
  if (cfg.training_feedforward == "none") return zero_like(motion.bundle.r);
  const ThetaFunctions theta = true_theta(cfg.plant);
  if (cfg.training_feedforward == "lti") {
    const std::array<double, 3> bar = {theta[0].value(cfg.design_rho),
                                       theta[1].value(cfg.design_rho),
                                       theta[2].value(cfg.design_rho)};
    return ff_lti(motion.bundle, bar).u_ff;
  }
  if (cfg.training_feedforward == "static") {
    return ff_static_lpv(motion.bundle, motion.sched, theta).u_ff;
  }
  if (cfg.training_feedforward == "dynamic") {
    return ff_dynamic_lpv(motion.bundle, motion.sched, theta).u_ff;
  }
  throw ConfigError("training.feedforward must be none, lti, static, or dynamic");
}

/// trace(Phi K Phi^T)/N for a block-diagonal kernel reduces to
/// sum_i sigma2_i ||d_i||^2 / N because every block's diagonal is sigma2_i.
double trace_relative_gamma(const ExperimentConfig& cfg, const RegressorMatrix& phi,
                            const std::vector<Eigen::VectorXd>& diags) {
  if (cfg.gamma_policy == "fixed") return cfg.gamma_value;
  double tr = 0.0;
  for (int b = 0; b < phi.n_theta; ++b) {
    tr += cfg.kernel.blocks[static_cast<std::size_t>(b)].sigma2 *
          diags[static_cast<std::size_t>(b)].squaredNorm();
  }
  return cfg.gamma_value * tr / static_cast<double>(phi.n_samples);
}

struct DecimatedProblem {
  Eigen::MatrixXd phi;
  Eigen::VectorXd w_bar;
  std::vector<double> rho;
};

DecimatedProblem decimate(const RegressorMatrix& phi, const Eigen::VectorXd& w_bar,
                          const std::vector<double>& rho, int stride) {
  const Eigen::Index n = phi.n_samples;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < n; k += stride) keep.push_back(k);
  const Eigen::Index m = static_cast<Eigen::Index>(keep.size());
  DecimatedProblem d;
  d.phi = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(phi.n_theta) * m);
  for (int b = 0; b < phi.n_theta; ++b) {
    const Eigen::VectorXd diag = phi.diagonal(b);
    for (Eigen::Index i = 0; i < m; ++i) {
      d.phi(i, static_cast<Eigen::Index>(b) * m + i) = diag(keep[static_cast<std::size_t>(i)]);
    }
  }
  d.w_bar.resize(m);
  d.rho.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    d.w_bar(i) = w_bar(keep[static_cast<std::size_t>(i)]);
    d.rho[static_cast<std::size_t>(i)] = rho[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])];
  }
  return d;
}

void write_theta_grid_csv(const ExperimentConfig& cfg, const IdentifiedModel& model,
                          const std::string& path) {
  double lo = model.rho_train.values.front();
  double hi = lo;
  for (double r : model.rho_train.values) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const int n = cfg.theta_grid_points;
  const int nt = static_cast<int>(model.basis.size());
  const ThetaFunctions truth = cfg.compare_true_theta ? true_theta(cfg.plant) : ThetaFunctions{};

  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  names.push_back("rho");
  for (int b = 0; b < nt; ++b) {
    const std::string base = "theta" + std::to_string(b + 1);
    names.push_back(base);
    names.push_back(base + "_d1");
    names.push_back(base + "_d2");
    if (!truth.empty() && b < static_cast<int>(truth.size())) names.push_back(base + "_true");
  }
  cols.resize(names.size());
  for (int i = 0; i < n; ++i) {
    const double rho = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    std::size_t c = 0;
    cols[c++].push_back(rho);
    for (int b = 0; b < nt; ++b) {
      const ThetaPrediction p = predict_theta(model, b, rho);
      cols[c++].push_back(p.value);
      cols[c++].push_back(p.d1);
      cols[c++].push_back(p.d2);
      if (!truth.empty() && b < static_cast<int>(truth.size())) {
        cols[c++].push_back(truth[static_cast<std::size_t>(b)].value(rho));
      }
    }
  }

  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  for (std::size_t c = 0; c < names.size(); ++c) out << (c == 0 ? "" : ",") << names[c];
  out << '\n';
  char buf[40];
  for (int i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", cols[c][static_cast<std::size_t>(i)]);
      out << (c == 0 ? "" : ",") << buf;
    }
    out << '\n';
  }
  if (!out.good()) throw InvalidInput("failed while writing '" + path + "'");
}

SimulationOptions simulation_options(const ExperimentConfig& cfg) {
  SimulationOptions opts;
  opts.oversampling = cfg.oversampling;
  opts.state_bound = cfg.state_bound;
  opts.midpoint_feedforward = (cfg.ff_hold == "midpoint");
  return opts;
}

CompareRow evaluate_law(const std::string& name, const ExperimentConfig& cfg,
                        const LeadController& ctrl, const PlanResult& motion,
                        const FeedforwardSignals& ff, const std::string& out_dir) {
  const SimulationOptions opts = simulation_options(cfg);
  const SimulationRecord rec =
      simulate_closed_loop(cfg.plant, ctrl, motion.bundle, motion.sched, ff.u_ff, opts);
  write_record_csv(join_path(out_dir, "record_" + name + ".csv"), rec);
  write_ff_csv(join_path(out_dir, "ff_" + name + ".csv"), ff);
  CompareRow row;
  row.name = name;
  row.rms_error = rms(rec.e);
  double peak = 0.0;
  for (double e : rec.e.values) peak = std::max(peak, std::abs(e));
  row.max_abs_error = peak;
  return row;
}

void write_snap_contribution_csv(const ExperimentConfig& cfg, const PlanResult& motion,
                                 const ThetaFunctions& est, const SampledSignal& u_dyn_est,
                                 const std::string& path) {
  const std::size_t n = motion.bundle.r.size();
  std::vector<double> stat(n), dyn(n);
  std::vector<double> stat_true, dyn_true;
  const bool with_truth = cfg.compare_true_theta;
  ThetaFunctions truth;
  if (with_truth) {
    truth = true_theta(cfg.plant);
    stat_true.resize(n);
    dyn_true.resize(n);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double rho = motion.sched.rho[k];
    const double drho = motion.sched.drho[k];
    const double ddrho = motion.sched.ddrho[k];
    const double ddr = motion.bundle.ddr[k];
    const double dddr = motion.bundle.dddr[k];
    stat[k] = est[2].value(rho) * motion.bundle.ddddr[k];
    dyn[k] = stat[k] + u_dyn_est[k];
    if (with_truth) {
      stat_true[k] = truth[2].value(rho) * motion.bundle.ddddr[k];
      dyn_true[k] = stat_true[k] + ddrho * truth[2].deriv(rho) * ddr +
                    drho * drho * truth[2].deriv2(rho) * ddr +
                    2.0 * drho * truth[2].deriv(rho) * dddr;
    }
  }
  std::vector<std::string> names = {"static", "dynamic"};
  std::vector<const std::vector<double>*> cols = {&stat, &dyn};
  if (with_truth) {
    names.insert(names.end(), {"static_true", "dynamic_true"});
    cols.insert(cols.end(), {&stat_true, &dyn_true});
  }
  write_csv_columns(path, names, cols, motion.bundle.r.sample_period);
}

void write_surface_csv(const ExperimentConfig& cfg, const ThetaFunctions& est,
                       const std::string& path) {
  const bool with_truth = cfg.compare_true_theta;
  ThetaFunctions truth;
  if (with_truth) truth = true_theta(cfg.plant);
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  out << "rho,drho,u_dyn";
  if (with_truth) out << ",u_dyn_true";
  out << '\n';
  char buf[256];
  for (int i = 0; i < cfg.surface_rho_count; ++i) {
    const double rho =
        cfg.surface_rho_count == 1
            ? cfg.surface_rho_min
            : cfg.surface_rho_min + (cfg.surface_rho_max - cfg.surface_rho_min) *
                                        static_cast<double>(i) /
                                        static_cast<double>(cfg.surface_rho_count - 1);
    for (int j = 0; j < cfg.surface_drho_count; ++j) {
      const double drho =
          cfg.surface_drho_count == 1
              ? cfg.surface_drho_min
              : cfg.surface_drho_min + (cfg.surface_drho_max - cfg.surface_drho_min) *
                                           static_cast<double>(j) /
                                           static_cast<double>(cfg.surface_drho_count - 1);
      const double u_est = drho * drho * est[2].deriv2(rho) * cfg.surface_ddr +
                           2.0 * drho * est[2].deriv(rho) * cfg.surface_dddr;
      if (with_truth) {
        const double u_true = drho * drho * truth[2].deriv2(rho) * cfg.surface_ddr +
                              2.0 * drho * truth[2].deriv(rho) * cfg.surface_dddr;
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", rho, drho, u_est, u_true);
      } else {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", rho, drho, u_est);
      }
      out << buf;
    }
  }
  if (!out.good()) throw InvalidInput("failed while writing '" + path + "'");
}

}  // namespace

PlanResult run_plan(const ExperimentConfig& cfg, const std::string& out_dir) {
  validate_config(cfg);
  ensure_dir(out_dir);
  PlanResult motion = make_motion(cfg);
  write_bundle_csv(join_path(out_dir, "reference.csv"), motion.bundle);
  write_csv_columns(join_path(out_dir, "scheduling.csv"), {"rho", "drho", "ddrho"},
                    {&motion.sched.rho.values, &motion.sched.drho.values,
                     &motion.sched.ddrho.values},
                    motion.sched.rho.sample_period);

  const auto peak = [](const SampledSignal& s) {
    double m = 0.0;
    for (double v : s.values) m = std::max(m, std::abs(v));
    return m;
  };
  const std::size_t n = motion.bundle.r.size();
  std::cout << "plan: " << n << " samples at " << cfg.sample_period << " s ("
            << static_cast<double>(n - 1) * cfg.sample_period << " s window)\n";
  std::cout << "plan: stroke " << cfg.stroke_start << " -> " << cfg.stroke_end << " m\n";
  std::cout << "plan: peak |dr| " << peak(motion.bundle.dr) << " (bound " << cfg.bounds.v_max
            << "), |ddr| " << peak(motion.bundle.ddr) << " (bound " << cfg.bounds.a_max
            << "), |dddr| " << peak(motion.bundle.dddr) << " (bound " << cfg.bounds.j_max
            << "), |ddddr| " << peak(motion.bundle.ddddr) << " (bound " << cfg.bounds.s_max
            << ")\n";
  return motion;
}

IdentifyResult run_identify(const ExperimentConfig& cfg, const std::string& out_dir) {
  validate_config(cfg);
  ensure_dir(out_dir);
  const double t0 = now_seconds();

  const PlanResult motion = make_motion(cfg);
  const LeadController ctrl = make_controller(cfg, motion);
  const SampledSignal u_ff = training_feedforward_signal(cfg, motion);

  const SimulationOptions opts = simulation_options(cfg);
  const SimulationRecord rec =
      simulate_closed_loop(cfg.plant, ctrl, motion.bundle, motion.sched, u_ff, opts);
  write_record_csv(join_path(out_dir, "training_record.csv"), rec);

  // Regressors use the output's deviation from its initial sample so the
  // zero-initial-condition integral operators apply to runs starting at rest
  // anywhere on the rail.
  SampledSignal y_dev = rec.y;
  const double y0 = y_dev.values.front();
  for (double& v : y_dev.values) v -= y0;

  const RegressorMatrix phi = build_regressors(y_dev, cfg.basis);
  // The simulator applies the total input zero-order, so the target must use
  // the hold-exact double integral; a plain trapezoidal pass would differ by
  // a term of order the sample period in exactly the components the small
  // parameters explain.
  const Eigen::VectorXd w_bar = build_target_held(rec.u);
  const std::vector<double>& rho_bar = motion.sched.rho.values;

  std::vector<Eigen::VectorXd> diags;
  for (int b = 0; b < phi.n_theta; ++b) diags.push_back(phi.diagonal(b));
  const double gamma = trace_relative_gamma(cfg, phi, diags);

  // Hyperparameters are tuned on a decimated copy of the problem; gamma is
  // recomputed there under the same policy so its scale matches.
  const DecimatedProblem dec = decimate(phi, w_bar, rho_bar, cfg.search_decimation);
  double gamma_dec = cfg.gamma_value;
  if (cfg.gamma_policy == "trace_relative") {
    double tr = 0.0;
    const Eigen::Index m = dec.w_bar.size();
    for (int b = 0; b < phi.n_theta; ++b) {
      tr += cfg.kernel.blocks[static_cast<std::size_t>(b)].sigma2 *
            dec.phi.block(0, static_cast<Eigen::Index>(b) * m, m, m).diagonal().squaredNorm();
    }
    gamma_dec = cfg.gamma_value * tr / static_cast<double>(m);
  }
  const auto [tuned, evidence] =
      optimize_hyperparameters(cfg.kernel, dec.phi, dec.w_bar, dec.rho, gamma_dec, cfg.search);

  const GramMatrix gram = build_gram(tuned, rho_bar);
  IdentifyResult res;
  res.model = solve(phi, gram, gamma, w_bar, tuned, motion.sched.rho);
  res.log_evidence = evidence;
  res.warnings = excitation_warnings(phi, rho_bar);
  write_theta_grid_csv(cfg, res.model, join_path(out_dir, "theta_grid.csv"));
  save_model(res.model, join_path(out_dir, "model.json"), config_hash(cfg));
  res.runtime_seconds = now_seconds() - t0;

  std::cout << "identify: " << phi.n_samples << " samples, " << phi.n_theta
            << " parameter functions, gamma " << gamma << "\n";
  for (std::size_t b = 0; b < tuned.blocks.size(); ++b) {
    const KernelBlock& blk = tuned.blocks[b];
    std::cout << "identify: block " << (b + 1) << " sigma2 " << blk.sigma2;
    if (blk.kind == KernelBlock::Kind::SquaredExponential) {
      std::cout << " length " << blk.length;
    }
    std::cout << (blk.optimize ? " (tuned)" : " (fixed)") << "\n";
  }
  std::cout << "identify: log evidence (decimated) " << evidence << "\n";
  for (const std::string& w : res.warnings) std::cout << "identify: warning: " << w << "\n";
  std::cout << "identify: finished in " << res.runtime_seconds << " s\n";
  return res;
}

ResultsReport run_compare(const ExperimentConfig& cfg, const IdentifiedModel& model,
                          const IdentifyResult* identify, const std::string& out_dir) {
  validate_config(cfg);
  ensure_dir(out_dir);
  const double t0 = now_seconds();

  if (model.basis != benchmark_basis()) {
    throw ConfigError(
        "compare requires the benchmark basis 'integral,identity,derivative:2'");
  }

  const PlanResult motion = make_motion(cfg);
  const LeadController ctrl = make_controller(cfg, motion);
  const ThetaFunctions est = identified_theta_functions(model);

  ResultsReport rep;
  rep.kernel = model.spec;
  rep.gamma = model.gamma;
  rep.config_hash = config_hash(cfg);
  if (identify != nullptr) {
    rep.warnings = identify->warnings;
    rep.runtime_identify_seconds = identify->runtime_seconds;
  } else {
    rep.runtime_identify_seconds = -1.0;
  }

  const std::array<double, 3> bar = {est[0].value(cfg.design_rho),
                                     est[1].value(cfg.design_rho),
                                     est[2].value(cfg.design_rho)};
  const FeedforwardSignals ff_l = ff_lti(motion.bundle, bar);
  const FeedforwardSignals ff_s = ff_static_lpv(motion.bundle, motion.sched, est);
  const FeedforwardSignals ff_d = ff_dynamic_lpv(motion.bundle, motion.sched, est);

  rep.rows.push_back(evaluate_law("lti", cfg, ctrl, motion, ff_l, out_dir));
  rep.rows.push_back(evaluate_law("static", cfg, ctrl, motion, ff_s, out_dir));
  rep.rows.push_back(evaluate_law("dynamic", cfg, ctrl, motion, ff_d, out_dir));
  rep.ratio_lti_over_static = rep.rows[0].rms_error / rep.rows[1].rms_error;
  rep.ratio_static_over_dynamic = rep.rows[1].rms_error / rep.rows[2].rms_error;

  if (cfg.compare_true_theta) {
    const ThetaFunctions truth = true_theta(cfg.plant);
    const std::array<double, 3> bar_true = {truth[0].value(cfg.design_rho),
                                            truth[1].value(cfg.design_rho),
                                            truth[2].value(cfg.design_rho)};
    rep.rows.push_back(evaluate_law("lti_true", cfg, ctrl, motion,
                                    ff_lti(motion.bundle, bar_true), out_dir));
    rep.rows.push_back(evaluate_law("static_true", cfg, ctrl, motion,
                                    ff_static_lpv(motion.bundle, motion.sched, truth),
                                    out_dir));
    rep.rows.push_back(evaluate_law("dynamic_true", cfg, ctrl, motion,
                                    ff_dynamic_lpv(motion.bundle, motion.sched, truth),
                                    out_dir));

    // Parameter fit on the scheduling grid spanned by the training data.
    double lo = model.rho_train.values.front();
    double hi = lo;
    for (double r : model.rho_train.values) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    for (int b = 0; b < 3; ++b) {
      double se = 0.0;
      double st = 0.0;
      const int n = cfg.theta_grid_points;
      for (int i = 0; i < n; ++i) {
        const double rho = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double tv = truth[static_cast<std::size_t>(b)].value(rho);
        const double ev = est[static_cast<std::size_t>(b)].value(rho);
        se += (ev - tv) * (ev - tv);
        st += tv * tv;
      }
      ThetaFitRow row;
      row.block = b + 1;
      row.rms_error = std::sqrt(se / n);
      row.rms_true = std::sqrt(st / n);
      rep.theta_fit.push_back(row);
    }
  }

  write_snap_contribution_csv(cfg, motion, est, ff_d.u_dyn,
                              join_path(out_dir, "snap_contribution.csv"));
  write_surface_csv(cfg, est, join_path(out_dir, "udyn_surface.csv"));

  rep.runtime_compare_seconds = now_seconds() - t0;
  write_report_json(rep, join_path(out_dir, "report.json"));

  std::cout << "compare: RMS tracking error per law\n";
  for (const CompareRow& row : rep.rows) {
    std::cout << "compare:   " << row.name << "  rms " << row.rms_error << " m, peak "
              << row.max_abs_error << " m\n";
  }
  std::cout << "compare: rms(lti)/rms(static) = " << rep.ratio_lti_over_static << "\n";
  std::cout << "compare: rms(static)/rms(dynamic) = " << rep.ratio_static_over_dynamic << "\n";
  for (const ThetaFitRow& row : rep.theta_fit) {
    std::cout << "compare: theta" << row.block << " rms error " << row.rms_error
              << " (scale " << row.rms_true << ")\n";
  }
  std::cout << "compare: finished in " << rep.runtime_compare_seconds << " s\n";
  return rep;
}

void write_report_json(const ResultsReport& report, const std::string& path) {
  nlohmann::json j;
  j["format"] = "lpvff-report-v1";
  j["config_hash"] = report.config_hash;
  j["gamma"] = report.gamma;
  nlohmann::json blocks = nlohmann::json::array();
  for (const KernelBlock& b : report.kernel.blocks) {
    std::string kind;
    switch (b.kind) {
      case KernelBlock::Kind::Constant: kind = "constant"; break;
      case KernelBlock::Kind::White: kind = "white"; break;
      case KernelBlock::Kind::SquaredExponential: kind = "squared_exponential"; break;
    }
    blocks.push_back({{"kind", kind},
                      {"sigma2", b.sigma2},
                      {"length", b.length},
                      {"optimize", b.optimize}});
  }
  j["kernel"] = blocks;
  nlohmann::json controllers = nlohmann::json::object();
  for (const CompareRow& row : report.rows) {
    controllers[row.name] = {{"rms_error", row.rms_error},
                             {"max_abs_error", row.max_abs_error}};
  }
  j["controllers"] = controllers;
  j["ratios"] = {{"lti_over_static", report.ratio_lti_over_static},
                 {"static_over_dynamic", report.ratio_static_over_dynamic}};
  nlohmann::json fits = nlohmann::json::array();
  for (const ThetaFitRow& row : report.theta_fit) {
    fits.push_back({{"block", row.block},
                    {"rms_error", row.rms_error},
                    {"rms_true", row.rms_true}});
  }
  j["theta_fit"] = fits;
  j["warnings"] = report.warnings;
  nlohmann::json runtime = nlohmann::json::object();
  if (report.runtime_identify_seconds >= 0.0) {
    runtime["identify_seconds"] = report.runtime_identify_seconds;
  }
  runtime["compare_seconds"] = report.runtime_compare_seconds;
  j["runtime"] = runtime;

  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out.good()) throw InvalidInput("failed while writing '" + path + "'");
}

}  // namespace lpvff
