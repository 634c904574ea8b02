#pragma once

/**
 * @file signals.hpp
 * @brief Uniformly sampled scalar signals and the numerical calculus used
 *        throughout the library (finite differences, trapezoidal integrals).
 */

#include <cstddef>
#include <string>
#include <vector>

namespace lpvff {

/// A scalar signal sampled at a fixed period. Sample k lives at t = k * sample_period.
struct SampledSignal {
  std::vector<double> values;
  double sample_period = 0.0;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
  double& operator[](std::size_t k) { return values[k]; }
  double time(std::size_t k) const { return static_cast<double>(k) * sample_period; }
};

/// Throws InvalidInput unless the signal has a positive period and at least min_samples samples.
void validate_signal(const SampledSignal& s, std::size_t min_samples = 1);

/// Throws InvalidInput unless a and b share length and sample period exactly.
void require_same_grid(const SampledSignal& a, const SampledSignal& b);

/**
 * @brief Second-order time derivative estimate.
 *
 * Central differences at interior samples, one-sided three-point stencils at
 * both ends; needs at least 3 samples. The result keeps the input grid.
 */
SampledSignal differentiate(const SampledSignal& s);

/**
 * @brief Cumulative trapezoidal integral with output[0] = initial.
 *
 * Exact for signals that are piecewise linear between samples, which the
 * trajectory module relies on. No detrending of any kind.
 */
SampledSignal integrate(const SampledSignal& s, double initial);

/// integrate applied twice with zero initial values: w(t) = double integral of s.
SampledSignal double_integrate(const SampledSignal& s);

/**
 * @brief Running integral of the zero-order-hold reconstruction of s: the
 *        samples are taken as the value held over [k, k+1) * sample_period,
 *        so output[k] = sample_period * (s[0] + ... + s[k-1]), exactly.
 *
 * Use this instead of integrate() when s is a force or command sequence that
 * a simulator or DAC applies piecewise constant.
 */
SampledSignal integrate_held(const SampledSignal& s);

/// integrate_held followed by an (exact) trapezoidal pass: the double
/// integral of the zero-order-hold reconstruction at the sample instants.
SampledSignal double_integrate_held(const SampledSignal& s);

/// Root-mean-square of the samples. Empty input throws InvalidInput.
double rms(const SampledSignal& s);

/// Writes "t,<name>" rows at full round-trip precision.
void write_signal_csv(const std::string& path, const std::string& name,
                      const SampledSignal& s);

/// Reads a two-column CSV written by write_signal_csv; returns {name, signal}.
std::pair<std::string, SampledSignal> read_signal_csv(const std::string& path);

}  // namespace lpvff
