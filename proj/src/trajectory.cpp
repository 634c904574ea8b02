#include "lpvff/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "lpvff/csv.hpp"
#include "lpvff/errors.hpp"

namespace lpvff {

namespace {

// Samples that fall within this window of a phase switch are treated as
// sitting exactly on it. Switch instants below are sums of phase durations,
// so they carry a few ulps of drift against the k*T_s grid.
constexpr double kSwitchTol = 1e-9;

struct PhaseState {
  double p = 0.0, v = 0.0, a = 0.0, j = 0.0;
};

struct Phase {
  double duration = 0.0;
  double snap = 0.0;
  PhaseState start;
};

struct Profile {
  std::array<Phase, 15> phases;
  double total_time = 0.0;
  PhaseState end;
};

struct Durations {
  double ts, tj, ta, tv;      // snap, jerk, acceleration, velocity phase times
  double j_hat, a_hat, v_hat; // achieved peaks, clamped to the bounds
};

// Largest t_j meeting the stroke with t_a = t_v = 0; the stroke
// 2*s*ts*(ts+tj)*(2ts+tj)^2 is monotone in t_j, so bisection is exact
// to the last bit of the bracket.
double solve_tj_for_stroke(double s, double ts, double d) {
  auto stroke = [&](double tj) {
    const double u = 2.0 * ts + tj;
    return 2.0 * s * ts * (ts + tj) * u * u;
  };
  double lo = 0.0;
  double hi = std::max(ts, 1.0);
  int guard = 0;
  while (stroke(hi) < d) {
    hi *= 2.0;
    if (++guard > 200) throw PlanningError("stroke bracketing failed");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (stroke(mid) < d ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Durations plan_durations(double d, const MotionBounds& b) {
  const double s = b.s_max;
  const double ts = std::min(std::min(b.j_max / s, std::sqrt(b.a_max / s)),
                             std::min(std::cbrt(b.v_max / (2.0 * s)),
                                      std::pow(d / (8.0 * s), 0.25)));

  const double tj_acc = b.a_max / (s * ts) - ts;
  const double tj_vel =
      0.5 * (-3.0 * ts + std::sqrt(ts * ts + 4.0 * b.v_max / (s * ts)));
  const double tj_str = solve_tj_for_stroke(s, ts, d);
  const double tj = std::max(0.0, std::min({tj_acc, tj_vel, tj_str}));

  const double a_hat = std::min(s * ts * (ts + tj), b.a_max);
  const double ta_vel = b.v_max / a_hat - (2.0 * ts + tj);
  const double p = 2.0 * ts + tj;
  const double q = 4.0 * ts + 2.0 * tj;
  const double ta_str =
      0.5 * (-(p + q) + std::sqrt((p - q) * (p - q) + 4.0 * d / a_hat));
  const double ta = std::max(0.0, std::min(ta_vel, ta_str));

  const double v_hat = std::min(a_hat * (2.0 * ts + tj + ta), b.v_max);
  const double tv = std::max(0.0, d / v_hat - (4.0 * ts + 2.0 * tj + ta));
  const double j_hat = std::min(s * ts, b.j_max);
  return {ts, tj, ta, tv, j_hat, a_hat, v_hat};
}

Profile build_profile(const Durations& du, double s) {
  const double dur[15] = {du.ts, du.tj, du.ts, du.ta, du.ts, du.tj, du.ts, du.tv,
                          du.ts, du.tj, du.ts, du.ta, du.ts, du.tj, du.ts};
  const double sgn[15] = {+1, 0, -1, 0, -1, 0, +1, 0, -1, 0, +1, 0, +1, 0, -1};
  Profile pr;
  PhaseState st;
  double t = 0.0;
  for (int i = 0; i < 15; ++i) {
    // Pin the analytically known entry values. Accumulated ulp drift would
    // otherwise leak across long plateaus and break exact bound compliance.
    switch (i) {
      case 1: case 2:   st.j = du.j_hat; break;
      case 3: case 4:   st.j = 0.0; st.a = du.a_hat; break;
      case 5: case 6:   st.j = -du.j_hat; break;
      case 7: case 8:   st.j = 0.0; st.a = 0.0; st.v = du.v_hat; break;
      case 9: case 10:  st.j = -du.j_hat; break;
      case 11: case 12: st.j = 0.0; st.a = -du.a_hat; break;
      case 13: case 14: st.j = du.j_hat; break;
      default: break;
    }
    const double T = dur[i];
    const double sn = sgn[i] * s;
    pr.phases[i] = Phase{T, sn, st};
    PhaseState nx;
    nx.p = st.p + st.v * T + st.a * T * T / 2.0 + st.j * T * T * T / 6.0 +
           sn * T * T * T * T / 24.0;
    nx.v = st.v + st.a * T + st.j * T * T / 2.0 + sn * T * T * T / 6.0;
    nx.a = st.a + st.j * T + sn * T * T / 2.0;
    nx.j = st.j + sn * T;
    st = nx;
    t += T;
  }
  st.j = 0.0;
  st.a = 0.0;
  st.v = 0.0;  // exact terminal rest
  pr.end = st;
  pr.total_time = t;
  return pr;
}

struct ActivePhase {
  double t_start = 0.0;
  double duration = 0.0;
  double snap = 0.0;
  PhaseState st;
};

// A switch instant with the snap value on each side of it.
struct Switch {
  double t = 0.0;
  double snap_left = 0.0;
  double snap_right = 0.0;
};

}  // namespace

void validate_bounds(const MotionBounds& b) {
  if (!(b.v_max > 0.0 && b.a_max > 0.0 && b.j_max > 0.0 && b.s_max > 0.0)) {
    throw InvalidInput("motion bounds must all be positive");
  }
}

void validate_bundle(const ReferenceBundle& b) {
  validate_signal(b.r, 1);
  require_same_grid(b.r, b.dr);
  require_same_grid(b.r, b.ddr);
  require_same_grid(b.r, b.dddr);
  require_same_grid(b.r, b.ddddr);
  require_same_grid(b.r, b.int_r);
}

ReferenceBundle plan_fourth_order(double start, double end, const MotionBounds& bounds,
                                  double sample_period, std::size_t max_samples) {
  validate_bounds(bounds);
  if (!(sample_period > 0.0)) throw InvalidInput("sample_period must be positive");
  const double d = std::abs(end - start);
  if (d == 0.0) throw PlanningError("zero displacement: nothing to plan");
  const double sign = (end > start) ? 1.0 : -1.0;

  const Durations du = plan_durations(d, bounds);
  const Profile pr = build_profile(du, bounds.s_max);
  if (std::abs(pr.end.p - d) > 1e-9) {
    throw PlanningError("planned stroke misses the target displacement");
  }

  const double T = pr.total_time;
  if (T > static_cast<double>(max_samples) * sample_period) {
    throw PlanningError("move needs more than the configured maximum of " +
                        std::to_string(max_samples) + " samples");
  }
  std::size_t n = static_cast<std::size_t>(std::ceil(T / sample_period - 1e-9)) + 1;
  if (n < 3) n = 3;
  if (n > max_samples) {
    throw PlanningError("move needs more than the configured maximum of " +
                        std::to_string(max_samples) + " samples");
  }

  // Center the motion in the sampled window: the sampled velocity profile
  // then shares the window's midpoint symmetry axis, so dr(k) = dr(n-1-k)
  // holds to roundoff rather than to one sample of slack.
  const double window = static_cast<double>(n - 1) * sample_period;
  const double t0 = 0.5 * (window - T);

  std::vector<ActivePhase> act;
  std::vector<Switch> sw;
  {
    double t = 0.0;
    double prev_snap = 0.0;
    for (const auto& ph : pr.phases) {
      if (!(ph.duration > 0.0)) continue;
      sw.push_back({t, prev_snap, ph.snap});
      act.push_back({t, ph.duration, ph.snap, ph.start});
      prev_snap = ph.snap;
      t += ph.duration;
    }
    sw.push_back({t, prev_snap, 0.0});  // motion end into rest
  }

  ReferenceBundle b;
  for (SampledSignal* s : {&b.r, &b.dr, &b.ddr, &b.dddr, &b.ddddr}) {
    s->sample_period = sample_period;
    s->values.resize(n);
  }

  std::size_t phase_cursor = 0;
  std::size_t switch_cursor = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double tl = static_cast<double>(k) * sample_period - t0;
    while (switch_cursor + 1 < sw.size() && sw[switch_cursor].t < tl - kSwitchTol) {
      ++switch_cursor;
    }

    double p, v, a, j, snap;
    if (std::abs(tl - sw[switch_cursor].t) < kSwitchTol) {
      const Switch& s = sw[switch_cursor];
      if (switch_cursor < act.size()) {
        const PhaseState& st = act[switch_cursor].st;
        p = st.p; v = st.v; a = st.a; j = st.j;
      } else {
        p = pr.end.p; v = 0.0; a = 0.0; j = 0.0;
      }
      // Interior jump samples carry the mean of both one-sided limits; the
      // window edges keep the inward limit so one-sided stencils stay clean.
      snap = (k == 0) ? s.snap_right
                      : (k == n - 1) ? s.snap_left
                                     : 0.5 * (s.snap_left + s.snap_right);
    } else if (tl < 0.0) {
      p = 0.0; v = 0.0; a = 0.0; j = 0.0; snap = 0.0;
    } else if (tl > T) {
      p = pr.end.p; v = 0.0; a = 0.0; j = 0.0; snap = 0.0;
    } else {
      while (phase_cursor + 1 < act.size() &&
             act[phase_cursor].t_start + act[phase_cursor].duration <= tl) {
        ++phase_cursor;
      }
      const ActivePhase& A = act[phase_cursor];
      const double tau = tl - A.t_start;
      const PhaseState& st = A.st;
      p = st.p + st.v * tau + st.a * tau * tau / 2.0 + st.j * tau * tau * tau / 6.0 +
          A.snap * tau * tau * tau * tau / 24.0;
      v = st.v + st.a * tau + st.j * tau * tau / 2.0 + A.snap * tau * tau * tau / 6.0;
      a = st.a + st.j * tau + A.snap * tau * tau / 2.0;
      j = st.j + A.snap * tau;
      snap = A.snap;
    }

    b.r.values[k] = start + sign * p;
    b.dr.values[k] = sign * v;
    b.ddr.values[k] = sign * a;
    b.dddr.values[k] = sign * j;
    b.ddddr.values[k] = sign * snap;
  }
  b.int_r = integrate(b.r, 0.0);
  return b;
}

SchedulingSequence scheduling_from_reference(const ReferenceBundle& bundle,
                                             double domain_length) {
  validate_bundle(bundle);
  if (!(domain_length > 0.0)) throw InvalidInput("domain_length must be positive");
  for (double rk : bundle.r.values) {
    if (!(rk > 0.0 && rk < domain_length)) {
      throw InvalidInput("reference leaves the open scheduling domain (0, L)");
    }
  }
  return SchedulingSequence{bundle.r, bundle.dr, bundle.ddr};
}

void write_bundle_csv(const std::string& path, const ReferenceBundle& b) {
  validate_bundle(b);
  write_csv_columns(path, {"r", "dr", "ddr", "dddr", "ddddr", "int_r"},
                    {&b.r.values, &b.dr.values, &b.ddr.values, &b.dddr.values,
                     &b.ddddr.values, &b.int_r.values},
                    b.r.sample_period);
}

}  // namespace lpvff
