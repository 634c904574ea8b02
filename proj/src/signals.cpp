#include "lpvff/signals.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lpvff/errors.hpp"

namespace lpvff {

void validate_signal(const SampledSignal& s, std::size_t min_samples) {
  if (!(s.sample_period > 0.0)) {
    throw InvalidInput("signal sample_period must be positive");
  }
  if (s.values.size() < min_samples) {
    throw InvalidInput("signal too short: need at least " +
                       std::to_string(min_samples) + " samples, got " +
                       std::to_string(s.values.size()));
  }
}

void require_same_grid(const SampledSignal& a, const SampledSignal& b) {
  if (a.values.size() != b.values.size()) {
    throw InvalidInput("signals differ in length");
  }
  if (a.sample_period != b.sample_period) {
    throw InvalidInput("signals differ in sample period");
  }
}

SampledSignal differentiate(const SampledSignal& s) {
  validate_signal(s, 3);
  const double h = s.sample_period;
  const std::size_t n = s.values.size();
  SampledSignal d;
  d.sample_period = h;
  d.values.resize(n);
  d.values[0] = (-3.0 * s.values[0] + 4.0 * s.values[1] - s.values[2]) / (2.0 * h);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    d.values[k] = (s.values[k + 1] - s.values[k - 1]) / (2.0 * h);
  }
  d.values[n - 1] =
      (3.0 * s.values[n - 1] - 4.0 * s.values[n - 2] + s.values[n - 3]) / (2.0 * h);
  return d;
}

SampledSignal integrate(const SampledSignal& s, double initial) {
  validate_signal(s, 1);
  const double h = s.sample_period;
  SampledSignal out;
  out.sample_period = h;
  out.values.resize(s.values.size());
  out.values[0] = initial;
  for (std::size_t k = 1; k < s.values.size(); ++k) {
    out.values[k] = out.values[k - 1] + 0.5 * h * (s.values[k - 1] + s.values[k]);
  }
  return out;
}

SampledSignal double_integrate(const SampledSignal& s) {
  return integrate(integrate(s, 0.0), 0.0);
}

SampledSignal integrate_held(const SampledSignal& s) {
  validate_signal(s, 1);
  const double h = s.sample_period;
  SampledSignal out;
  out.sample_period = h;
  out.values.resize(s.values.size());
  out.values[0] = 0.0;
  for (std::size_t k = 1; k < s.values.size(); ++k) {
    out.values[k] = out.values[k - 1] + h * s.values[k - 1];
  }
  return out;
}

SampledSignal double_integrate_held(const SampledSignal& s) {
  // The running integral of a staircase is piecewise linear, so the second
  // integration by the trapezoidal rule is exact as well.
  return integrate(integrate_held(s), 0.0);
}

double rms(const SampledSignal& s) {
  if (s.values.empty()) {
    throw InvalidInput("rms of an empty signal");
  }
  double acc = 0.0;
  for (double v : s.values) acc += v * v;
  return std::sqrt(acc / static_cast<double>(s.values.size()));
}

void write_signal_csv(const std::string& path, const std::string& name,
                      const SampledSignal& s) {
  validate_signal(s, 1);
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot open for writing: " + path);
  f << "t," << name << "\n";
  char row[80];
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    std::snprintf(row, sizeof(row), "%.17g,%.17g\n", s.time(k), s.values[k]);
    f << row;
  }
}

std::pair<std::string, SampledSignal> read_signal_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open for reading: " + path);
  std::string header;
  if (!std::getline(f, header)) throw InvalidInput("empty CSV: " + path);
  const auto comma = header.find(',');
  if (comma == std::string::npos || header.substr(0, comma) != "t") {
    throw InvalidInput("expected header 't,<name>' in " + path);
  }
  const std::string name = header.substr(comma + 1);

  std::vector<double> t, v;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double ti = 0.0, vi = 0.0;
    char sep = 0;
    if (!(ls >> ti >> sep >> vi) || sep != ',') {
      throw InvalidInput("bad CSV row in " + path + ": " + line);
    }
    t.push_back(ti);
    v.push_back(vi);
  }
  if (v.size() < 2) throw InvalidInput("CSV has fewer than 2 rows: " + path);

  SampledSignal s;
  s.sample_period = t[1] - t[0];
  s.values = std::move(v);
  validate_signal(s, 2);
  return {name, s};
}

}  // namespace lpvff
