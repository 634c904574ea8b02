#include "lpvff/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "lpvff/errors.hpp"

namespace lpvff {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a number");
  }
  if (trim(value.substr(pos)) != "") {
    throw ConfigError("key '" + key + "': trailing characters in '" + value + "'");
  }
  if (!std::isfinite(v)) throw ConfigError("key '" + key + "': value must be finite");
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + value + "' as an integer");
  }
  if (trim(value.substr(pos)) != "") {
    throw ConfigError("key '" + key + "': trailing characters in '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("key '" + key + "': expected 'true' or 'false', got '" + value + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string kernel_kind_name(KernelBlock::Kind k) {
  switch (k) {
    case KernelBlock::Kind::Constant: return "constant";
    case KernelBlock::Kind::White: return "white";
    case KernelBlock::Kind::SquaredExponential: return "squared_exponential";
  }
  throw ConfigError("unknown kernel kind");
}

KernelBlock::Kind kernel_kind_from_name(const std::string& key, const std::string& s) {
  if (s == "constant") return KernelBlock::Kind::Constant;
  if (s == "white") return KernelBlock::Kind::White;
  if (s == "squared_exponential") return KernelBlock::Kind::SquaredExponential;
  throw ConfigError("key '" + key + "': unknown kernel kind '" + s + "'");
}

BasisSet parse_basis_list(const std::string& value) {
  BasisSet basis;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string name = trim(item);
    if (name.empty()) throw ConfigError("key 'basis': empty entry in list");
    try {
      basis.push_back(parse_basis_operator(name));
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("key 'basis': ") + e.what());
    }
  }
  if (basis.empty()) throw ConfigError("key 'basis': list is empty");
  return basis;
}

std::string basis_list_string(const BasisSet& basis) {
  std::string out;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (i > 0) out += ",";
    out += basis_operator_name(basis[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  kernel.blocks.resize(3);
  kernel.blocks[0] = {KernelBlock::Kind::Constant, 1.0, 1.0, false};
  kernel.blocks[1] = {KernelBlock::Kind::Constant, 1.0, 1.0, false};
  kernel.blocks[2] = {KernelBlock::Kind::SquaredExponential, 1e-6, 0.2, true};
}

ExperimentConfig parse_config_text(const std::string& text) {
  // First pass: collect pairs, rejecting duplicates so typos cannot hide.
  std::vector<std::pair<std::string, std::string>> pairs;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (seen.count(key) != 0) {
      throw ConfigError("duplicate key '" + key + "' (lines " + std::to_string(seen[key]) +
                        " and " + std::to_string(line_no) + ")");
    }
    seen[key] = line_no;
    pairs.emplace_back(key, value);
  }

  ExperimentConfig cfg;

  // The basis determines how many kernel blocks exist, so it is applied
  // before any kernel.blockN key. A basis of a different size resets the
  // kernel to all-constant blocks that the file can then override.
  for (const auto& [key, value] : pairs) {
    if (key == "basis") {
      cfg.basis = parse_basis_list(value);
      if (cfg.basis.size() != cfg.kernel.blocks.size()) {
        cfg.kernel.blocks.assign(cfg.basis.size(),
                                 KernelBlock{KernelBlock::Kind::Constant, 1.0, 1.0, false});
      }
    }
  }

  for (const auto& [key, value] : pairs) {
    if (key == "basis") {
      continue;
    } else if (key == "sample_period") {
      cfg.sample_period = parse_double(key, value);
    } else if (key == "stroke.start") {
      cfg.stroke_start = parse_double(key, value);
    } else if (key == "stroke.end") {
      cfg.stroke_end = parse_double(key, value);
    } else if (key == "bounds.velocity") {
      cfg.bounds.v_max = parse_double(key, value);
    } else if (key == "bounds.acceleration") {
      cfg.bounds.a_max = parse_double(key, value);
    } else if (key == "bounds.jerk") {
      cfg.bounds.j_max = parse_double(key, value);
    } else if (key == "bounds.snap") {
      cfg.bounds.s_max = parse_double(key, value);
    } else if (key == "trajectory.max_samples") {
      const long long v = parse_int(key, value);
      if (v < 3) throw ConfigError("key '" + key + "': must be >= 3");
      cfg.max_samples = static_cast<std::size_t>(v);
    } else if (key == "plant.m1") {
      cfg.plant.m1 = parse_double(key, value);
    } else if (key == "plant.m2") {
      cfg.plant.m2 = parse_double(key, value);
    } else if (key == "plant.c") {
      cfg.plant.c = parse_double(key, value);
    } else if (key == "plant.c2") {
      cfg.plant.c2 = parse_double(key, value);
    } else if (key == "plant.E") {
      cfg.plant.E = parse_double(key, value);
    } else if (key == "plant.A") {
      cfg.plant.A = parse_double(key, value);
    } else if (key == "plant.L") {
      cfg.plant.L = parse_double(key, value);
    } else if (key == "controller.crossover_hz") {
      cfg.crossover_hz = parse_double(key, value);
    } else if (key == "controller.zero_ratio") {
      cfg.zero_ratio = parse_double(key, value);
    } else if (key == "controller.pole_ratio") {
      cfg.pole_ratio = parse_double(key, value);
    } else if (key == "controller.design_rho") {
      cfg.design_rho = parse_double(key, value);
    } else if (key == "simulation.oversampling") {
      cfg.oversampling = static_cast<int>(parse_int(key, value));
    } else if (key == "simulation.state_bound") {
      cfg.state_bound = parse_double(key, value);
    } else if (key == "simulation.ff_hold") {
      cfg.ff_hold = value;
    } else if (key == "training.feedforward") {
      cfg.training_feedforward = value;
    } else if (key == "gamma.policy") {
      cfg.gamma_policy = value;
    } else if (key == "gamma.value") {
      cfg.gamma_value = parse_double(key, value);
    } else if (key == "search.sigma2_grid") {
      cfg.search.grid_sigma2 = static_cast<int>(parse_int(key, value));
    } else if (key == "search.length_grid") {
      cfg.search.grid_length = static_cast<int>(parse_int(key, value));
    } else if (key == "search.sigma2_min") {
      cfg.search.sigma2_min = parse_double(key, value);
    } else if (key == "search.sigma2_max") {
      cfg.search.sigma2_max = parse_double(key, value);
    } else if (key == "search.length_min") {
      cfg.search.length_min = parse_double(key, value);
    } else if (key == "search.length_max") {
      cfg.search.length_max = parse_double(key, value);
    } else if (key == "search.refine_steps") {
      cfg.search.refine_steps = static_cast<int>(parse_int(key, value));
    } else if (key == "search.decimation") {
      cfg.search_decimation = static_cast<int>(parse_int(key, value));
    } else if (key == "outputs.theta_grid_points") {
      cfg.theta_grid_points = static_cast<int>(parse_int(key, value));
    } else if (key == "compare.true_theta") {
      cfg.compare_true_theta = parse_bool(key, value);
    } else if (key == "surface.rho_min") {
      cfg.surface_rho_min = parse_double(key, value);
    } else if (key == "surface.rho_max") {
      cfg.surface_rho_max = parse_double(key, value);
    } else if (key == "surface.rho_count") {
      cfg.surface_rho_count = static_cast<int>(parse_int(key, value));
    } else if (key == "surface.drho_min") {
      cfg.surface_drho_min = parse_double(key, value);
    } else if (key == "surface.drho_max") {
      cfg.surface_drho_max = parse_double(key, value);
    } else if (key == "surface.drho_count") {
      cfg.surface_drho_count = static_cast<int>(parse_int(key, value));
    } else if (key == "surface.ddr") {
      cfg.surface_ddr = parse_double(key, value);
    } else if (key == "surface.dddr") {
      cfg.surface_dddr = parse_double(key, value);
    } else if (key.rfind("kernel.block", 0) == 0) {
      const std::string rest = key.substr(std::string("kernel.block").size());
      const auto dot = rest.find('.');
      if (dot == std::string::npos) {
        throw ConfigError("key '" + key + "': expected kernel.block<N>.<field>");
      }
      long long idx = 0;
      try {
        std::size_t pos = 0;
        idx = std::stoll(rest.substr(0, dot), &pos);
        if (pos != dot) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': bad block number");
      }
      if (idx < 1 || static_cast<std::size_t>(idx) > cfg.kernel.blocks.size()) {
        throw ConfigError("key '" + key + "': block number out of range (basis has " +
                          std::to_string(cfg.kernel.blocks.size()) + " entries)");
      }
      KernelBlock& blk = cfg.kernel.blocks[static_cast<std::size_t>(idx - 1)];
      const std::string field = rest.substr(dot + 1);
      if (field == "kind") {
        blk.kind = kernel_kind_from_name(key, value);
      } else if (field == "sigma2") {
        blk.sigma2 = parse_double(key, value);
      } else if (field == "length") {
        blk.length = parse_double(key, value);
      } else if (field == "optimize") {
        blk.optimize = parse_bool(key, value);
      } else {
        throw ConfigError("key '" + key + "': unknown field '" + field + "'");
      }
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }

  validate_config(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "sample_period = " << fmt(cfg.sample_period) << '\n';
  out << "stroke.start = " << fmt(cfg.stroke_start) << '\n';
  out << "stroke.end = " << fmt(cfg.stroke_end) << '\n';
  out << "bounds.velocity = " << fmt(cfg.bounds.v_max) << '\n';
  out << "bounds.acceleration = " << fmt(cfg.bounds.a_max) << '\n';
  out << "bounds.jerk = " << fmt(cfg.bounds.j_max) << '\n';
  out << "bounds.snap = " << fmt(cfg.bounds.s_max) << '\n';
  out << "trajectory.max_samples = " << cfg.max_samples << '\n';
  out << "plant.m1 = " << fmt(cfg.plant.m1) << '\n';
  out << "plant.m2 = " << fmt(cfg.plant.m2) << '\n';
  out << "plant.c = " << fmt(cfg.plant.c) << '\n';
  out << "plant.c2 = " << fmt(cfg.plant.c2) << '\n';
  out << "plant.E = " << fmt(cfg.plant.E) << '\n';
  out << "plant.A = " << fmt(cfg.plant.A) << '\n';
  out << "plant.L = " << fmt(cfg.plant.L) << '\n';
  out << "controller.crossover_hz = " << fmt(cfg.crossover_hz) << '\n';
  out << "controller.zero_ratio = " << fmt(cfg.zero_ratio) << '\n';
  out << "controller.pole_ratio = " << fmt(cfg.pole_ratio) << '\n';
  out << "controller.design_rho = " << fmt(cfg.design_rho) << '\n';
  out << "simulation.oversampling = " << cfg.oversampling << '\n';
  out << "simulation.state_bound = " << fmt(cfg.state_bound) << '\n';
  out << "simulation.ff_hold = " << cfg.ff_hold << '\n';
  out << "training.feedforward = " << cfg.training_feedforward << '\n';
  out << "basis = " << basis_list_string(cfg.basis) << '\n';
  for (std::size_t i = 0; i < cfg.kernel.blocks.size(); ++i) {
    const KernelBlock& b = cfg.kernel.blocks[i];
    const std::string p = "kernel.block" + std::to_string(i + 1) + ".";
    out << p << "kind = " << kernel_kind_name(b.kind) << '\n';
    out << p << "sigma2 = " << fmt(b.sigma2) << '\n';
    out << p << "length = " << fmt(b.length) << '\n';
    out << p << "optimize = " << (b.optimize ? "true" : "false") << '\n';
  }
  out << "gamma.policy = " << cfg.gamma_policy << '\n';
  out << "gamma.value = " << fmt(cfg.gamma_value) << '\n';
  out << "search.sigma2_grid = " << cfg.search.grid_sigma2 << '\n';
  out << "search.length_grid = " << cfg.search.grid_length << '\n';
  out << "search.sigma2_min = " << fmt(cfg.search.sigma2_min) << '\n';
  out << "search.sigma2_max = " << fmt(cfg.search.sigma2_max) << '\n';
  out << "search.length_min = " << fmt(cfg.search.length_min) << '\n';
  out << "search.length_max = " << fmt(cfg.search.length_max) << '\n';
  out << "search.refine_steps = " << cfg.search.refine_steps << '\n';
  out << "search.decimation = " << cfg.search_decimation << '\n';
  out << "outputs.theta_grid_points = " << cfg.theta_grid_points << '\n';
  out << "compare.true_theta = " << (cfg.compare_true_theta ? "true" : "false") << '\n';
  out << "surface.rho_min = " << fmt(cfg.surface_rho_min) << '\n';
  out << "surface.rho_max = " << fmt(cfg.surface_rho_max) << '\n';
  out << "surface.rho_count = " << cfg.surface_rho_count << '\n';
  out << "surface.drho_min = " << fmt(cfg.surface_drho_min) << '\n';
  out << "surface.drho_max = " << fmt(cfg.surface_drho_max) << '\n';
  out << "surface.drho_count = " << cfg.surface_drho_count << '\n';
  out << "surface.ddr = " << fmt(cfg.surface_ddr) << '\n';
  out << "surface.dddr = " << fmt(cfg.surface_dddr) << '\n';
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_config(const ExperimentConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  try {
    validate_params(cfg.plant);
    validate_bounds(cfg.bounds);
    validate_basis(cfg.basis);
    validate_spec(cfg.kernel);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  require(std::isfinite(cfg.sample_period) && cfg.sample_period > 0.0,
          "sample_period must be finite and > 0");
  require(cfg.kernel.blocks.size() == cfg.basis.size(),
          "kernel must define exactly one block per basis entry");
  require(cfg.stroke_start > 0.0 && cfg.stroke_start < cfg.plant.L,
          "stroke.start must lie strictly inside (0, plant.L)");
  require(cfg.stroke_end > 0.0 && cfg.stroke_end < cfg.plant.L,
          "stroke.end must lie strictly inside (0, plant.L)");
  require(cfg.stroke_end != cfg.stroke_start,
          "stroke.end must differ from stroke.start (zero-length strokes cannot be planned)");
  require(cfg.max_samples >= 3, "trajectory.max_samples must be >= 3");
  require(std::isfinite(cfg.crossover_hz) && cfg.crossover_hz > 0.0,
          "controller.crossover_hz must be finite and > 0");
  require(std::isfinite(cfg.zero_ratio) && cfg.zero_ratio > 0.0,
          "controller.zero_ratio must be finite and > 0");
  require(std::isfinite(cfg.pole_ratio) && cfg.pole_ratio > 0.0,
          "controller.pole_ratio must be finite and > 0");
  require(cfg.design_rho > 0.0 && cfg.design_rho < cfg.plant.L,
          "controller.design_rho must lie strictly inside (0, plant.L)");
  require(cfg.oversampling >= 1, "simulation.oversampling must be >= 1");
  require(std::isfinite(cfg.state_bound) && cfg.state_bound > 0.0,
          "simulation.state_bound must be finite and > 0");
  require(cfg.ff_hold == "midpoint" || cfg.ff_hold == "sample",
          "simulation.ff_hold must be midpoint or sample");
  require(cfg.training_feedforward == "none" || cfg.training_feedforward == "lti" ||
              cfg.training_feedforward == "static" || cfg.training_feedforward == "dynamic",
          "training.feedforward must be none, lti, static, or dynamic");
  require(cfg.gamma_policy == "trace_relative" || cfg.gamma_policy == "fixed",
          "gamma.policy must be trace_relative or fixed");
  require(std::isfinite(cfg.gamma_value) && cfg.gamma_value >= 0.0,
          "gamma.value must be finite and >= 0");
  require(cfg.search.grid_sigma2 >= 1 && cfg.search.grid_length >= 1,
          "search grid sizes must be >= 1");
  require(cfg.search.sigma2_min > 0.0 && cfg.search.sigma2_max >= cfg.search.sigma2_min,
          "search sigma2 bounds must be positive and ordered");
  require(cfg.search.length_min > 0.0 && cfg.search.length_max >= cfg.search.length_min,
          "search length bounds must be positive and ordered");
  require(cfg.search.refine_steps >= 0, "search.refine_steps must be >= 0");
  require(cfg.search_decimation >= 1, "search.decimation must be >= 1");
  require(cfg.theta_grid_points >= 2, "outputs.theta_grid_points must be >= 2");
  require(cfg.surface_rho_count >= 1 && cfg.surface_drho_count >= 1,
          "surface grid counts must be >= 1");
  require(cfg.surface_rho_min > 0.0 && cfg.surface_rho_max < cfg.plant.L &&
              cfg.surface_rho_max >= cfg.surface_rho_min,
          "surface rho range must be ordered and strictly inside (0, plant.L)");
  require(std::isfinite(cfg.surface_drho_min) && std::isfinite(cfg.surface_drho_max) &&
              cfg.surface_drho_max >= cfg.surface_drho_min,
          "surface drho range must be ordered and finite");
  require(std::isfinite(cfg.surface_ddr) && std::isfinite(cfg.surface_dddr),
          "surface.ddr and surface.dddr must be finite");
}

}  // namespace lpvff
