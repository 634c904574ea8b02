#pragma once

/**
 * @file experiment.hpp
 * @brief End-to-end benchmark stages: plan the motion, identify the
 *        parameter functions from a closed-loop run, and compare the three
 *        feedforward laws. Each stage writes its artifacts under an output
 *        directory and returns its results for in-process use.
 */

#include <string>
#include <vector>

#include "lpvff/config.hpp"
#include "lpvff/identify.hpp"
#include "lpvff/plant.hpp"
#include "lpvff/trajectory.hpp"

namespace lpvff {

struct PlanResult {
  ReferenceBundle bundle;
  SchedulingSequence sched;
};

struct IdentifyResult {
  IdentifiedModel model;
  double log_evidence = 0.0;
  std::vector<std::string> warnings;
  double runtime_seconds = 0.0;
};

/// RMS and peak tracking error of one closed-loop run.
struct CompareRow {
  std::string name;
  double rms_error = 0.0;
  double max_abs_error = 0.0;
};

/// Per-parameter fit quality on a scheduling grid.
struct ThetaFitRow {
  int block = 0;
  double rms_error = 0.0;  ///< RMS(identified - analytic)
  double rms_true = 0.0;   ///< RMS(analytic), for scale
};

struct ResultsReport {
  std::vector<CompareRow> rows;
  double ratio_lti_over_static = 0.0;
  double ratio_static_over_dynamic = 0.0;
  std::vector<ThetaFitRow> theta_fit;  ///< empty unless compare.true_theta
  KernelSpec kernel;
  double gamma = 0.0;
  std::string config_hash;
  std::vector<std::string> warnings;
  double runtime_identify_seconds = 0.0;  ///< < 0 when the model was loaded
  double runtime_compare_seconds = 0.0;
};

/// Plans the benchmark motion and writes reference.csv and scheduling.csv.
PlanResult run_plan(const ExperimentConfig& cfg, const std::string& out_dir);

/**
 * @brief Runs the training experiment and identifies the parameter
 *        functions.
 *
 * Writes training_record.csv, theta_grid.csv and model.json. The evidence
 * search runs on every search.decimation-th sample; the final solve uses all
 * of them.
 */
IdentifyResult run_identify(const ExperimentConfig& cfg, const std::string& out_dir);

/**
 * @brief Simulates the three feedforward laws built from the identified
 *        model (plus analytic-parameter oracle runs when configured) and
 *        writes the comparison artifacts and report.json.
 *
 * `identify` may be null when the model came from a file; its metadata is
 * then omitted from the report.
 */
ResultsReport run_compare(const ExperimentConfig& cfg, const IdentifiedModel& model,
                          const IdentifyResult* identify, const std::string& out_dir);

/// Writes the report as report.json under out_dir.
void write_report_json(const ResultsReport& report, const std::string& path);

}  // namespace lpvff
