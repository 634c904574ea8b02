#include "lpvff/plant.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>

#include "lpvff/csv.hpp"
#include "lpvff/errors.hpp"

namespace lpvff {

namespace {

// Denominator polynomial of G(s) beyond the free integrator:
// D3(s) = m1*m2*s^3 + (c*(m1+m2) + c2*m1)*s^2 + (k*(m1+m2) + c*c2)*s + k*c2,
// so that (s * D3(s)) y = (c*s + k) u at frozen scheduling.
std::array<double, 4> d3_coeffs(const PlantParams& p, double k) {
  return {p.m1 * p.m2,
          p.c * (p.m1 + p.m2) + p.c2 * p.m1,
          k * (p.m1 + p.m2) + p.c * p.c2,
          k * p.c2};
}

// Plant state derivative. x = [x1, v1, x2, v2]; u forces m1.
inline void dynamics(const PlantParams& p, double k, double u, const double x[4],
                     double dx[4]) {
  const double fs = k * (x[0] - x[2]) + p.c * (x[1] - x[3]);
  dx[0] = x[1];
  dx[1] = (u - fs) / p.m1;
  dx[2] = x[3];
  dx[3] = (fs - p.c2 * x[3]) / p.m2;
}

// One RK4 step of length h. rho is sampled by the caller-provided linear
// interpolant at the substep times; u is constant over the step.
template <typename RhoAt>
inline void rk4_step(const PlantParams& p, const RhoAt& rho_at, double t, double h,
                     double u, double x[4]) {
  double k1[4], k2[4], k3[4], k4[4], xt[4];
  dynamics(p, stiffness(p, rho_at(t)), u, x, k1);
  for (int i = 0; i < 4; ++i) xt[i] = x[i] + 0.5 * h * k1[i];
  const double k_mid = stiffness(p, rho_at(t + 0.5 * h));
  dynamics(p, k_mid, u, xt, k2);
  for (int i = 0; i < 4; ++i) xt[i] = x[i] + 0.5 * h * k2[i];
  dynamics(p, k_mid, u, xt, k3);
  for (int i = 0; i < 4; ++i) xt[i] = x[i] + h * k3[i];
  dynamics(p, stiffness(p, rho_at(t + h)), u, xt, k4);
  for (int i = 0; i < 4; ++i) {
    x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

void check_state(const double x[4], double bound, std::size_t sample) {
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(x[i]) || std::abs(x[i]) > bound) {
      throw InstabilityError(
          "simulation diverged: state component " + std::to_string(i) +
              " left [-" + std::to_string(bound) + ", " + std::to_string(bound) +
              "] at sample " + std::to_string(sample),
          static_cast<long>(sample));
    }
  }
}

void validate_options(const SimulationOptions& o) {
  if (o.oversampling < 1) throw InvalidInput("oversampling must be at least 1");
  if (!(o.state_bound > 0.0)) throw InvalidInput("state_bound must be positive");
}

}  // namespace

void validate_params(const PlantParams& p) {
  if (!(p.m1 > 0.0 && p.m2 > 0.0 && p.c > 0.0 && p.E > 0.0 && p.A > 0.0 &&
        p.L > 0.0)) {
    throw InvalidInput("plant parameters m1, m2, c, E, A, L must be positive");
  }
  if (p.c2 < 0.0) throw InvalidInput("ground damper c2 must be non-negative");
}

void validate_controller(const LeadController& c) {
  if (!(c.gain > 0.0)) throw InvalidInput("controller gain must be positive");
  if (!(c.zero_freq > 0.0 && c.zero_freq < c.pole_freq)) {
    throw InvalidInput("lead controller needs 0 < zero_freq < pole_freq");
  }
}

double stiffness(const PlantParams& p, double rho) {
  if (!(rho > 0.0 && rho < p.L)) {
    throw InvalidInput("stiffness undefined outside the open interval (0, L)");
  }
  return p.E * p.A / (rho * (p.L - rho));
}

double stiffness_d1(const PlantParams& p, double rho) {
  if (!(rho > 0.0 && rho < p.L)) {
    throw InvalidInput("stiffness undefined outside the open interval (0, L)");
  }
  const double g = rho * (p.L - rho);
  return -p.E * p.A * (p.L - 2.0 * rho) / (g * g);
}

double stiffness_d2(const PlantParams& p, double rho) {
  if (!(rho > 0.0 && rho < p.L)) {
    throw InvalidInput("stiffness undefined outside the open interval (0, L)");
  }
  const double g = rho * (p.L - rho);
  const double gp = p.L - 2.0 * rho;
  return 2.0 * p.E * p.A * (g + gp * gp) / (g * g * g);
}

std::complex<double> frozen_transfer(const PlantParams& p, double rho,
                                     std::complex<double> s) {
  const double k = stiffness(p, rho);
  const auto d3 = d3_coeffs(p, k);
  const std::complex<double> num = p.c * s + k;
  const std::complex<double> den =
      s * (((d3[0] * s + d3[1]) * s + d3[2]) * s + d3[3]);
  return num / den;
}

double closed_loop_spectral_abscissa(const PlantParams& p, const LeadController& c,
                                     double rho) {
  validate_params(p);
  validate_controller(c);
  const double k = stiffness(p, rho);
  const auto d3 = d3_coeffs(p, k);

  // Characteristic polynomial (s*D3(s))*(1 + s/wp) + K*(1 + s/wz)*(c*s + k),
  // degree 5 in s.
  const double wz = c.zero_freq, wp = c.pole_freq, K = c.gain;
  double a[6] = {0, 0, 0, 0, 0, 0};  // a[i] multiplies s^i
  // s*D3(s) = d3[0] s^4 + d3[1] s^3 + d3[2] s^2 + d3[3] s
  for (int i = 0; i < 4; ++i) {
    a[4 - i] += d3[i];           // * 1
    a[5 - i] += d3[i] / wp;      // * s/wp
  }
  // K*(1 + s/wz)*(c s + k) = K*(c s + k) + K*(c s^2 + k s)/wz
  a[1] += K * p.c;
  a[0] += K * k;
  a[2] += K * p.c / wz;
  a[1] += K * k / wz;

  Eigen::Matrix<double, 5, 5> companion = Eigen::Matrix<double, 5, 5>::Zero();
  for (int i = 0; i < 4; ++i) companion(i + 1, i) = 1.0;
  for (int i = 0; i < 5; ++i) companion(i, 4) = -a[i] / a[5];
  const auto eig = companion.eigenvalues();
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 5; ++i) worst = std::max(worst, eig(i).real());
  return worst;
}

LeadController design_lead_controller(const PlantParams& p, double rho_design,
                                      double crossover, double zero_ratio,
                                      double pole_ratio, double rho_min,
                                      double rho_max) {
  validate_params(p);
  if (!(crossover > 0.0 && zero_ratio > 1.0 && pole_ratio > 1.0)) {
    throw InvalidInput("lead design needs positive crossover and ratios above 1");
  }
  LeadController c;
  c.zero_freq = crossover / zero_ratio;
  c.pole_freq = crossover * pole_ratio;
  const std::complex<double> jw(0.0, crossover);
  const std::complex<double> shape =
      (1.0 + jw / c.zero_freq) / (1.0 + jw / c.pole_freq);
  const double loop_mag = std::abs(frozen_transfer(p, rho_design, jw) * shape);
  if (!(loop_mag > 0.0) || !std::isfinite(loop_mag)) {
    throw NumericalError("lead design: loop magnitude at crossover is degenerate");
  }
  c.gain = 1.0 / loop_mag;

  constexpr int kSweepPoints = 13;
  for (int i = 0; i < kSweepPoints; ++i) {
    const double rho =
        rho_min + (rho_max - rho_min) * static_cast<double>(i) / (kSweepPoints - 1);
    if (closed_loop_spectral_abscissa(p, c, rho) >= 0.0) {
      throw InvalidInput("configured lead controller fails the frozen-scheduling "
                         "stability sweep at rho = " + std::to_string(rho));
    }
  }
  return c;
}

SimulationRecord simulate_closed_loop(const PlantParams& p, const LeadController& c,
                                      const ReferenceBundle& bundle,
                                      const SchedulingSequence& sched,
                                      const SampledSignal& u_ff,
                                      const SimulationOptions& opts) {
  validate_params(p);
  validate_controller(c);
  validate_bundle(bundle);
  validate_options(opts);
  require_same_grid(bundle.r, sched.rho);
  require_same_grid(bundle.r, u_ff);
  validate_signal(bundle.r, 2);

  const std::size_t n = bundle.r.size();
  const double Ts = bundle.r.sample_period;
  const auto& rho = sched.rho.values;
  auto rho_at = [&](double t) {
    const double idx = t / Ts;
    std::size_t k = static_cast<std::size_t>(idx);
    if (k >= n - 1) return rho[n - 1];
    const double frac = idx - static_cast<double>(k);
    return rho[k] + frac * (rho[k + 1] - rho[k]);
  };

  // Tustin discretization of gain*(1 + s/wz)/(1 + s/wp).
  const double az = 2.0 / (Ts * c.zero_freq);
  const double ap = 2.0 / (Ts * c.pole_freq);

  SimulationRecord rec;
  for (SampledSignal* s : {&rec.r, &rec.y, &rec.e, &rec.u, &rec.u_fb, &rec.u_ff}) {
    s->sample_period = Ts;
    s->values.resize(n);
  }
  rec.r = bundle.r;

  // Value held over [k*Ts, (k+1)*Ts): midpoint of the two endpoint samples
  // when requested (cancels the half-sample lag of a left-sample hold), the
  // left sample otherwise. The final sample has no following interval.
  auto ff_at = [&](std::size_t k) {
    if (opts.midpoint_feedforward && k + 1 < n) {
      return 0.5 * (u_ff.values[k] + u_ff.values[k + 1]);
    }
    return u_ff.values[k];
  };

  double x[4] = {bundle.r.values[0], 0.0, bundle.r.values[0], 0.0};
  double e_prev = 0.0, ufb_prev = 0.0;
  const double h = Ts / opts.oversampling;

  for (std::size_t k = 0; k < n; ++k) {
    rec.y.values[k] = x[2];
    const double e = bundle.r.values[k] - x[2];
    rec.e.values[k] = e;
    const double ufb =
        (c.gain * ((1.0 + az) * e + (1.0 - az) * e_prev) - (1.0 - ap) * ufb_prev) /
        (1.0 + ap);
    rec.u_fb.values[k] = ufb;
    const double uff = ff_at(k);
    rec.u_ff.values[k] = uff;
    const double u = ufb + uff;
    rec.u.values[k] = u;
    e_prev = e;
    ufb_prev = ufb;

    if (k + 1 < n) {
      const double t_k = static_cast<double>(k) * Ts;
      for (int m = 0; m < opts.oversampling; ++m) {
        rk4_step(p, rho_at, t_k + m * h, h, u, x);
      }
      check_state(x, opts.state_bound, k + 1);
    }
  }
  return rec;
}

SampledSignal simulate_open_loop(const PlantParams& p, const SampledSignal& rho,
                                 const SampledSignal& u,
                                 const SimulationOptions& opts) {
  validate_params(p);
  validate_options(opts);
  require_same_grid(rho, u);
  validate_signal(rho, 2);

  const std::size_t n = rho.size();
  const double Ts = rho.sample_period;
  auto rho_at = [&](double t) {
    const double idx = t / Ts;
    std::size_t k = static_cast<std::size_t>(idx);
    if (k >= n - 1) return rho.values[n - 1];
    const double frac = idx - static_cast<double>(k);
    return rho.values[k] + frac * (rho.values[k + 1] - rho.values[k]);
  };

  SampledSignal y;
  y.sample_period = Ts;
  y.values.resize(n);
  double x[4] = {0.0, 0.0, 0.0, 0.0};
  const double h = Ts / opts.oversampling;
  for (std::size_t k = 0; k < n; ++k) {
    y.values[k] = x[2];
    if (k + 1 < n) {
      const double t_k = static_cast<double>(k) * Ts;
      for (int m = 0; m < opts.oversampling; ++m) {
        rk4_step(p, rho_at, t_k + m * h, h, u.values[k], x);
      }
      check_state(x, opts.state_bound, k + 1);
    }
  }
  return y;
}

double io_residual(const PlantParams& p, double rho_bar, const SampledSignal& u,
                   const SampledSignal& y) {
  validate_params(p);
  require_same_grid(u, y);
  validate_signal(y, 3);
  const double k = stiffness(p, rho_bar);

  SampledSignal ydev = y;
  const double y0 = y.values[0];
  for (double& v : ydev.values) v -= y0;

  const SampledSignal dy = differentiate(ydev);
  const SampledSignal ddy = differentiate(dy);
  const SampledSignal iy = integrate(ydev, 0.0);
  // The input samples are the values a zero-order hold applies, so their
  // staircase is integrated exactly; the smooth output uses the trapezoid.
  const SampledSignal iu = integrate_held(u);
  const SampledSignal w = integrate(iu, 0.0);

  const std::size_t n = y.size();
  SampledSignal lhs, rhs, diff;
  lhs.sample_period = rhs.sample_period = diff.sample_period = y.sample_period;
  lhs.values.resize(n);
  rhs.values.resize(n);
  diff.values.resize(n);
  const double b2 = p.m1 * p.m2;
  const double b1 = p.c * (p.m1 + p.m2) + p.c2 * p.m1;
  const double b0 = k * (p.m1 + p.m2) + p.c * p.c2;
  for (std::size_t i = 0; i < n; ++i) {
    lhs.values[i] = b2 * ddy.values[i] + b1 * dy.values[i] + b0 * ydev.values[i] +
                    k * p.c2 * iy.values[i];
    rhs.values[i] = p.c * iu.values[i] + k * w.values[i];
    diff.values[i] = lhs.values[i] - rhs.values[i];
  }
  const double denom = std::max(rms(lhs), rms(rhs));
  if (denom == 0.0) return 0.0;
  return rms(diff) / denom;
}

void write_record_csv(const std::string& path, const SimulationRecord& rec) {
  write_csv_columns(path, {"r", "y", "e", "u", "u_fb", "u_ff"},
                    {&rec.r.values, &rec.y.values, &rec.e.values, &rec.u.values,
                     &rec.u_fb.values, &rec.u_ff.values},
                    rec.r.sample_period);
}

}  // namespace lpvff
