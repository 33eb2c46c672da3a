#pragma once

#include <vector>

namespace memarith {

// Dopant-drift window applied to dx/dt.  Hard is the bare linear law and
// relies on the clamp in step(); Joglekar multiplies the drift rate by
// 1 - (2x - 1)^(2p), which vanishes smoothly at both film boundaries and
// approaches the hard window as p grows.
struct WindowKind {
  enum Kind { Hard, Joglekar };
  Kind kind = Hard;
  int p = 1;  // Joglekar exponent, >= 1

  static WindowKind hard() { return {Hard, 1}; }
  static WindowKind joglekar(int p) { return {Joglekar, p}; }
};

// Physical constants of one device: a film of thickness d split into a doped
// low-resistance region and an undoped high-resistance remainder.
struct DeviceParams {
  double r_on = 100.0;   // ohms, fully doped film
  double r_off = 16e3;   // ohms, fully undoped film
  double d = 10e-9;      // m, film thickness
  double mu_v = 1e-14;   // m^2 s^-1 V^-1, dopant mobility
  WindowKind window{};
  int polarity = +1;     // +1: positive current grows the doped region (x up, M down)

  // Rate constant of the drift law, in 1/(A s).  Defaults give 1e4.
  double k_mob() const { return mu_v * r_on / (d * d); }

  // Throws std::invalid_argument on a non-physical parameter set.
  void validate() const;
};

// Normalized doped fraction w/D.  Every state update clamps x to [0, 1].
struct DeviceState {
  double x = 0.5;
};

// M(x) = r_off - x (r_off - r_on); linear between the two limiting values.
double memristance(const DeviceParams& params, DeviceState state);

// Inverse of memristance(), clamped to a valid state.
DeviceState state_for_memristance(const DeviceParams& params, double m);

// Window value at x.  drive_sign (+1 for x increasing, -1 for decreasing,
// 0 unknown) is accepted for windows that care about direction; neither of
// the two implemented kinds does.
double window_factor(WindowKind window, double x, int drive_sign = 0);

// dx/dt = polarity * k_mob * i * window_factor(x).
double drift_rate(const DeviceParams& params, DeviceState state, double i);

// One forward-Euler step of the drift law under constant current i, with the
// hard clamp to [0, 1] applied afterwards.  i == 0 returns state unchanged,
// bit for bit.
DeviceState step(const DeviceParams& params, DeviceState state, double i, double dt);

// Closed-form state after a total charge q has passed, valid for the hard
// window only: x = clamp(x0 + polarity * k_mob * q, 0, 1).  Exact for any
// current waveform with the given total charge; the Euler integrator is
// tested against it.  Throws Error for a Joglekar window.
double charge_oracle(const DeviceParams& params, double x0, double q);

// Constant-current trajectory sampled every dt from t = 0 to t_end
// (one row per step plus the initial point).
struct SweepSample {
  double t;  // s
  double x;
  double m;  // ohms
  double i;  // A
};
std::vector<SweepSample> sweep(const DeviceParams& params, DeviceState initial,
                               double i, double dt, double t_end);

}  // namespace memarith
