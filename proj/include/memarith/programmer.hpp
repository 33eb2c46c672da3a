#pragma once

#include <utility>
#include <vector>

#include "memarith/device.hpp"

namespace memarith {

// Feedback-programming configuration.  `a` plays two unified roles: the
// sense branch drops a*M volts across a comparator input whose reference is
// a*target, and the selected rail steers a drive current of magnitude `a`
// amperes through the device.  Bang-bang control: whichever side of the
// reference the sensed drop is on picks the rail that pushes M back.
struct ProgrammerConfig {
  double a = 0.01;          // sense coefficient (V/ohm) and drive magnitude (A)
  double rail_low = 0.0;    // volts, comparator output that raises M
  double rail_high = 5.0;   // volts, comparator output that lowers M
  double tol = 0.1;         // ohms, convergence band half-width
  double dt = 0.0;          // s, control step; 0 selects choose_dt()
  double max_time = 20e-3;  // s, give-up horizon

  // Throws std::invalid_argument on a non-runnable configuration, including
  // an explicit dt whose per-step |dM| exceeds tol (limit-cycle hazard).
  void validate(const DeviceParams& params) const;
};

// One recorded control step.  v_drop is the sensed a*M; comparator is the
// selected rail voltage; drive_sign is +1 when the drive pushes M up.
struct TraceSample {
  double t;           // s
  double m;           // ohms
  double v_drop;      // volts
  double comparator;  // volts
  int drive_sign;     // +1 or -1
};

struct ProgramTrace {
  std::vector<TraceSample> samples;  // never empty; last sample holds final m
  bool converged = false;
  double final_m = 0.0;  // ohms
  DeviceState final_state{};
  double elapsed = 0.0;  // s spent driving
};

// Largest control step whose worst-case per-step |dM| stays at or below
// tol/2, i.e. dt = tol / (2 (r_off - r_on) k_mob a).
double choose_dt(double a, const DeviceParams& params, double tol);

// sense < reference selects the low rail (M-increasing source); above or
// equal selects the high rail.  Returns the selected rail voltage.
double comparator(double sense, double reference, double rail_low = 0.0,
                  double rail_high = 5.0);

// One comparator evaluation plus one Euler step of duration cfg.dt (resolved
// through choose_dt when 0).  Returns the new state and the sample taken at
// time t before stepping.
std::pair<DeviceState, TraceSample> programmer_step(const ProgrammerConfig& cfg,
                                                    const DeviceParams& params,
                                                    DeviceState state,
                                                    double target, double t = 0.0);

// Drive the device until |M - target| <= tol (converged) or cfg.max_time
// elapses (converged = false; the drive is then disconnected either way).
// Throws TargetOutOfRangeError unless target lies in [r_on+tol, r_off-tol].
// record_every > 1 thins the stored samples; the final sample is always kept.
ProgramTrace program(const ProgrammerConfig& cfg, const DeviceParams& params,
                     DeviceState initial, double target, int record_every = 1);

}  // namespace memarith
