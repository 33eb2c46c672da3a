#include "memarith/programmer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "memarith/errors.hpp"

namespace memarith {

namespace {

// Worst-case |dM|/dt under full drive, ohms per second.
double slew_rate(double a, const DeviceParams& params) {
  return (params.r_off - params.r_on) * params.k_mob() * a;
}

struct Decision {
  double v_cmp;    // selected rail, volts
  int drive_sign;  // +1 pushes M up
  double current;  // A through the device
};

Decision decide(const ProgrammerConfig& cfg, const DeviceParams& params, double m,
                double target) {
  const double v_cmp = comparator(cfg.a * m, cfg.a * target, cfg.rail_low, cfg.rail_high);
  const int drive_sign = (v_cmp == cfg.rail_low) ? +1 : -1;
  // Raising M shrinks the doped region, so the current runs against polarity.
  const double current = -drive_sign * cfg.a * params.polarity;
  return {v_cmp, drive_sign, current};
}

}  // namespace

void ProgrammerConfig::validate(const DeviceParams& params) const {
  params.validate();
  if (!(a > 0.0)) throw std::invalid_argument("programmer: a must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("programmer: tol must be positive");
  if (!(rail_low < rail_high))
    throw std::invalid_argument("programmer: rail_low must be below rail_high");
  if (!(max_time > 0.0)) throw std::invalid_argument("programmer: max_time must be positive");
  if (dt < 0.0) throw std::invalid_argument("programmer: dt must be non-negative");
  if (dt > 0.0 && slew_rate(a, params) * dt > tol)
    throw std::invalid_argument(
        "programmer: per-step |dM| exceeds tol; the loop could cycle around the target");
}

double choose_dt(double a, const DeviceParams& params, double tol) {
  if (!(a > 0.0)) throw std::invalid_argument("choose_dt: a must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("choose_dt: tol must be positive");
  return 0.5 * tol / slew_rate(a, params);
}

double comparator(double sense, double reference, double rail_low, double rail_high) {
  return sense < reference ? rail_low : rail_high;
}

std::pair<DeviceState, TraceSample> programmer_step(const ProgrammerConfig& cfg,
                                                    const DeviceParams& params,
                                                    DeviceState state, double target,
                                                    double t) {
  const double dt = cfg.dt > 0.0 ? cfg.dt : choose_dt(cfg.a, params, cfg.tol);
  const double m = memristance(params, state);
  const Decision d = decide(cfg, params, m, target);
  const TraceSample sample{t, m, cfg.a * m, d.v_cmp, d.drive_sign};
  return {step(params, state, d.current, dt), sample};
}

ProgramTrace program(const ProgrammerConfig& cfg, const DeviceParams& params,
                     DeviceState initial, double target, int record_every) {
  cfg.validate(params);
  if (record_every < 1) throw std::invalid_argument("program: record_every must be >= 1");
  const double lo = params.r_on + cfg.tol;
  const double hi = params.r_off - cfg.tol;
  if (!(target >= lo && target <= hi)) throw TargetOutOfRangeError(target, lo, hi);

  const double dt = cfg.dt > 0.0 ? cfg.dt : choose_dt(cfg.a, params, cfg.tol);
  ProgramTrace trace;
  DeviceState s = initial;
  long long n = 0;
  for (;;) {
    const double m = memristance(params, s);
    const double t = static_cast<double>(n) * dt;
    if (std::fabs(m - target) <= cfg.tol) {
      trace.converged = true;
    } else if (t <= cfg.max_time) {
      const Decision d = decide(cfg, params, m, target);
      if (n % record_every == 0)
        trace.samples.push_back({t, m, cfg.a * m, d.v_cmp, d.drive_sign});
      s = step(params, s, d.current, dt);
      ++n;
      continue;
    }
    // Converged or out of time: disconnect the drive and close the trace.
    const Decision d = decide(cfg, params, m, target);
    trace.samples.push_back({t, m, cfg.a * m, d.v_cmp, d.drive_sign});
    trace.final_m = m;
    trace.final_state = s;
    trace.elapsed = t;
    return trace;
  }
}

}  // namespace memarith
