#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "lpvff/errors.hpp"
#include "lpvff/feedforward.hpp"
#include "lpvff/plant.hpp"
#include "lpvff/signals.hpp"
#include "lpvff/trajectory.hpp"

using namespace lpvff;

namespace {

const MotionBounds kBounds{0.4, 2.5, 50.0, 2000.0};

const ReferenceBundle& benchmark_bundle() {
  static const ReferenceBundle b = plan_fourth_order(0.2, 0.8, kBounds, 1e-3);
  return b;
}

const SchedulingSequence& benchmark_sched() {
  static const SchedulingSequence s = scheduling_from_reference(benchmark_bundle(), 1.0);
  return s;
}

LeadController benchmark_controller() {
  return design_lead_controller(PlantParams{}, 0.5, 2.0 * M_PI * 2.0, 3.0, 3.0, 0.2,
                                0.8);
}

SampledSignal zeros_like(const SampledSignal& s) {
  SampledSignal z;
  z.sample_period = s.sample_period;
  z.values.assign(s.size(), 0.0);
  return z;
}

ReferenceBundle constant_bundle(double level, std::size_t n, double ts) {
  ReferenceBundle b;
  for (SampledSignal* s : {&b.r, &b.dr, &b.ddr, &b.dddr, &b.ddddr, &b.int_r}) {
    s->sample_period = ts;
    s->values.assign(n, 0.0);
  }
  b.r.values.assign(n, level);
  for (std::size_t k = 0; k < n; ++k) b.int_r.values[k] = level * k * ts;
  return b;
}

SampledSignal chirp(double amplitude, double f0, double f1, double duration, double ts) {
  SampledSignal u;
  u.sample_period = ts;
  const std::size_t n = static_cast<std::size_t>(std::lround(duration / ts)) + 1;
  u.values.resize(n);
  const double rate = (f1 - f0) / duration;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = k * ts;
    u.values[k] = amplitude * std::sin(2.0 * M_PI * (f0 * t + 0.5 * rate * t * t));
  }
  return u;
}

}  // namespace

TEST_CASE("stiffness matches the closed form and its derivatives") {
  const PlantParams p;
  CHECK(stiffness(p, 0.5) == doctest::Approx(9600.0).epsilon(1e-12));
  CHECK(stiffness_d1(p, 0.5) == doctest::Approx(0.0).scale(9600.0).epsilon(1e-12));
  CHECK(stiffness_d1(p, 0.3) == doctest::Approx(-2.17687e4).epsilon(1e-4));

  // Central finite differences of the value and slope confirm both analytic
  // derivatives.
  const double h = 1e-6;
  for (double rho : {0.25, 0.4, 0.62, 0.75}) {
    const double fd1 = (stiffness(p, rho + h) - stiffness(p, rho - h)) / (2.0 * h);
    CHECK(stiffness_d1(p, rho) == doctest::Approx(fd1).epsilon(1e-6));
    const double fd2 = (stiffness_d1(p, rho + h) - stiffness_d1(p, rho - h)) / (2.0 * h);
    CHECK(stiffness_d2(p, rho) == doctest::Approx(fd2).epsilon(1e-6));
  }
}

TEST_CASE("stiffness rejects positions at or beyond the rail ends") {
  const PlantParams p;
  CHECK_THROWS_AS(stiffness(p, 0.0), InvalidInput);
  CHECK_THROWS_AS(stiffness(p, 1.0), InvalidInput);
  CHECK_THROWS_AS(stiffness(p, -0.1), InvalidInput);
}

TEST_CASE("parameter and controller validation") {
  PlantParams p;
  p.m1 = 0.0;
  CHECK_THROWS_AS(validate_params(p), InvalidInput);
  LeadController c{10.0, 50.0, 20.0};  // zero above pole: no phase lead
  CHECK_THROWS_AS(validate_controller(c), InvalidInput);
  c = LeadController{-1.0, 10.0, 90.0};
  CHECK_THROWS_AS(validate_controller(c), InvalidInput);
}

TEST_CASE("designed lead controller crosses unity at the requested frequency") {
  const PlantParams p;
  const double wc = 2.0 * M_PI * 2.0;
  const LeadController c = design_lead_controller(p, 0.5, wc, 3.0, 3.0, 0.2, 0.8);
  CHECK(c.zero_freq == doctest::Approx(wc / 3.0));
  CHECK(c.pole_freq == doctest::Approx(wc * 3.0));
  const std::complex<double> s(0.0, wc);
  const std::complex<double> lead =
      c.gain * (1.0 + s / c.zero_freq) / (1.0 + s / c.pole_freq);
  const double loop_mag = std::abs(lead * frozen_transfer(p, 0.5, s));
  CHECK(loop_mag == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("designed controller stabilizes the frozen plant across the stroke") {
  const PlantParams p;
  const LeadController c = benchmark_controller();
  for (int i = 0; i <= 12; ++i) {
    const double rho = 0.2 + 0.6 * i / 12.0;
    CHECK(closed_loop_spectral_abscissa(p, c, rho) < 0.0);
  }
}

TEST_CASE("lead design refuses crossovers that cannot clear the flexible mode") {
  // The resonance sits near 27-34 Hz with very little damping, so a plain
  // lead cannot hold the loop gain under unity there once the crossover gets
  // close; the stability sweep must reject such a request.
  const PlantParams p;
  CHECK_THROWS_AS(design_lead_controller(p, 0.5, 2.0 * M_PI * 10.0, 3.0, 3.0, 0.2, 0.8),
                  InvalidInput);
}

TEST_CASE("closed loop at equilibrium produces identically zero error and input") {
  const PlantParams p;
  const LeadController c = benchmark_controller();
  const ReferenceBundle b = constant_bundle(0.2, 64, 1e-3);
  const SchedulingSequence sched = scheduling_from_reference(b, 1.0);
  const SimulationRecord rec = simulate_closed_loop(p, c, b, sched, zeros_like(b.r));
  for (std::size_t k = 0; k < b.r.size(); ++k) {
    CHECK(rec.y.values[k] == 0.2);
    CHECK(rec.e.values[k] == 0.0);
    CHECK(rec.u.values[k] == 0.0);
  }
}

TEST_CASE("record keeps the defining identities sample-wise") {
  const PlantParams p;
  const LeadController c = benchmark_controller();
  const ThetaFunctions theta = true_theta(p);
  const FeedforwardSignals ff =
      ff_dynamic_lpv(benchmark_bundle(), benchmark_sched(), theta);
  const SimulationRecord rec =
      simulate_closed_loop(p, c, benchmark_bundle(), benchmark_sched(), ff.u_ff);
  for (std::size_t k = 0; k < rec.r.size(); ++k) {
    CHECK(rec.u.values[k] == rec.u_fb.values[k] + rec.u_ff.values[k]);
    CHECK(rec.e.values[k] == rec.r.values[k] - rec.y.values[k]);
  }
}

TEST_CASE("feedforward from the true parameters beats feedback alone by 10x") {
  const PlantParams p;
  const LeadController c = benchmark_controller();
  const FeedforwardSignals ff =
      ff_dynamic_lpv(benchmark_bundle(), benchmark_sched(), true_theta(p));
  const SimulationRecord with_ff =
      simulate_closed_loop(p, c, benchmark_bundle(), benchmark_sched(), ff.u_ff);
  const SimulationRecord without = simulate_closed_loop(
      p, c, benchmark_bundle(), benchmark_sched(), zeros_like(benchmark_bundle().r));
  CHECK(rms(with_ff.e) * 10.0 < rms(without.e));
}

TEST_CASE("simulation is deterministic") {
  const PlantParams p;
  const LeadController c = benchmark_controller();
  const FeedforwardSignals ff =
      ff_static_lpv(benchmark_bundle(), benchmark_sched(), true_theta(p));
  const SimulationRecord a =
      simulate_closed_loop(p, c, benchmark_bundle(), benchmark_sched(), ff.u_ff);
  const SimulationRecord b =
      simulate_closed_loop(p, c, benchmark_bundle(), benchmark_sched(), ff.u_ff);
  for (std::size_t k = 0; k < a.y.size(); ++k) {
    CHECK(a.y.values[k] == b.y.values[k]);
    CHECK(a.u.values[k] == b.u.values[k]);
  }
}

TEST_CASE("midpoint feedforward hold averages the endpoint samples") {
  const PlantParams p;
  const LeadController c = benchmark_controller();
  const FeedforwardSignals ff =
      ff_dynamic_lpv(benchmark_bundle(), benchmark_sched(), true_theta(p));
  SimulationOptions sample_hold;
  sample_hold.midpoint_feedforward = false;
  const SimulationRecord mid =
      simulate_closed_loop(p, c, benchmark_bundle(), benchmark_sched(), ff.u_ff);
  const SimulationRecord left = simulate_closed_loop(p, c, benchmark_bundle(),
                                                     benchmark_sched(), ff.u_ff,
                                                     sample_hold);
  const std::size_t n = ff.u_ff.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    CHECK(mid.u_ff.values[k] == 0.5 * (ff.u_ff.values[k] + ff.u_ff.values[k + 1]));
    CHECK(left.u_ff.values[k] == ff.u_ff.values[k]);
  }
  CHECK(mid.u_ff.values[n - 1] == ff.u_ff.values[n - 1]);
  // Cancelling the half-sample lag must pay off in tracking error.
  CHECK(rms(mid.e) < rms(left.e));
}

TEST_CASE("diverging states raise an instability error naming the sample") {
  const PlantParams p;
  LeadController c = benchmark_controller();
  c.gain *= 1e5;  // deliberately wreck the loop
  SimulationOptions opts;
  opts.state_bound = 10.0;
  bool threw = false;
  try {
    simulate_closed_loop(p, c, benchmark_bundle(), benchmark_sched(),
                         zeros_like(benchmark_bundle().r), opts);
  } catch (const InstabilityError& e) {
    threw = true;
    CHECK(e.first_divergent_sample > 0);
  }
  CHECK(threw);
}

TEST_CASE("frozen-position response satisfies the input-output relation") {
  const PlantParams p;
  const double ts = 1e-4;
  const SampledSignal u = chirp(1.0, 0.2, 10.0, 2.0, ts);
  SampledSignal rho;
  rho.sample_period = ts;
  rho.values.assign(u.size(), 0.5);
  const SampledSignal y = simulate_open_loop(p, rho, u);
  CHECK(io_residual(p, 0.5, u, y) <= 1e-6);
}

TEST_CASE("input-output residual flags corrupted data and guards zero signals") {
  const PlantParams p;
  const double ts = 1e-4;
  const SampledSignal u = chirp(1.0, 0.2, 10.0, 2.0, ts);
  SampledSignal rho;
  rho.sample_period = ts;
  rho.values.assign(u.size(), 0.5);
  SampledSignal y = simulate_open_loop(p, rho, u);
  for (double& v : y.values) v *= 1.01;
  CHECK(io_residual(p, 0.5, u, y) > 1e-3);

  SampledSignal z;
  z.sample_period = ts;
  z.values.assign(100, 0.0);
  CHECK(io_residual(p, 0.5, z, z) == 0.0);
}

TEST_CASE("with no ground damper a constant force obeys momentum balance") {
  PlantParams p;
  p.c2 = 0.0;
  const double ts = 1e-3;
  const double force = 0.5;
  SampledSignal u, rho;
  u.sample_period = rho.sample_period = ts;
  u.values.assign(2001, force);
  rho.values.assign(2001, 0.5);
  const SampledSignal y = simulate_open_loop(p, rho, u);
  // Mean acceleration over the run = velocity gain / duration; velocity via
  // one-sided differences at the last samples.
  const std::size_t n = y.size();
  const double v_end =
      (3.0 * y.values[n - 1] - 4.0 * y.values[n - 2] + y.values[n - 3]) / (2.0 * ts);
  const double duration = (n - 1) * ts;
  const double mean_acc = v_end / duration;
  const double expected = force / (p.m1 + p.m2);
  CHECK(mean_acc == doctest::Approx(expected).epsilon(0.01));
}
