// Command-line front end: plan the benchmark motion, identify the
// scheduling-dependent feedforward parameters, or run the three-law
// comparison. Exit codes: 0 success, 2 invalid configuration or input,
// 3 numerical failure, 4 closed-loop divergence.

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lpvff/config.hpp"
#include "lpvff/errors.hpp"
#include "lpvff/experiment.hpp"

namespace {

lpvff::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return lpvff::ExperimentConfig{};
  return lpvff::parse_config_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling-dependent feedforward identification benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string model_path;
  bool echo = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Configuration file (defaults apply if omitted)");
    sub->add_option("--out", out_dir, "Output directory (default: out)");
    sub->add_flag("--echo-config", echo, "Print the fully resolved configuration and exit");
  };

  CLI::App* plan = app.add_subcommand("plan", "Plan the benchmark motion and write its CSVs");
  add_common(plan);
  CLI::App* identify =
      app.add_subcommand("identify", "Run the training experiment and fit the model");
  add_common(identify);
  CLI::App* compare =
      app.add_subcommand("compare", "Simulate the three feedforward laws and report errors");
  add_common(compare);
  compare->add_option("--model", model_path,
                      "Model file (default: <out>/model.json; identify runs first if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const lpvff::ExperimentConfig cfg = load_config(config_path);
    if (echo) {
      std::cout << lpvff::serialize_config(cfg);
      return 0;
    }
    if (plan->parsed()) {
      lpvff::run_plan(cfg, out_dir);
    } else if (identify->parsed()) {
      lpvff::run_identify(cfg, out_dir);
    } else if (compare->parsed()) {
      const std::string path =
          model_path.empty() ? (std::filesystem::path(out_dir) / "model.json").string()
                             : model_path;
      if (std::filesystem::exists(path)) {
        const lpvff::IdentifiedModel model = lpvff::load_model(path);
        lpvff::run_compare(cfg, model, nullptr, out_dir);
      } else if (!model_path.empty()) {
        throw lpvff::ConfigError("model file '" + path + "' does not exist");
      } else {
        std::cout << "compare: no model at '" << path << "', running identify first\n";
        const lpvff::IdentifyResult ident = lpvff::run_identify(cfg, out_dir);
        lpvff::run_compare(cfg, ident.model, &ident, out_dir);
      }
    }
    return 0;
  } catch (const lpvff::InstabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const lpvff::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const lpvff::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const lpvff::PlanningError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const lpvff::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
