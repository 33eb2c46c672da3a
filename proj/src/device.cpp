#include "memarith/device.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memarith/errors.hpp"

namespace memarith {

void DeviceParams::validate() const {
  if (!(r_on > 0.0) || !(r_off > r_on))
    throw std::invalid_argument("device: need 0 < r_on < r_off");
  if (!(d > 0.0)) throw std::invalid_argument("device: film thickness d must be positive");
  if (!(mu_v > 0.0)) throw std::invalid_argument("device: mobility mu_v must be positive");
  if (!std::isfinite(k_mob()) || !(k_mob() > 0.0))
    throw std::invalid_argument("device: rate constant mu_v*r_on/d^2 must be finite and positive");
  if (window.kind == WindowKind::Joglekar && window.p < 1)
    throw std::invalid_argument("device: Joglekar exponent p must be >= 1");
  if (polarity != 1 && polarity != -1)
    throw std::invalid_argument("device: polarity must be +1 or -1");
}

double memristance(const DeviceParams& params, DeviceState state) {
  return params.r_off - state.x * (params.r_off - params.r_on);
}

DeviceState state_for_memristance(const DeviceParams& params, double m) {
  const double x = (params.r_off - m) / (params.r_off - params.r_on);
  return {std::clamp(x, 0.0, 1.0)};
}

double window_factor(WindowKind window, double x, int /*drive_sign*/) {
  switch (window.kind) {
    case WindowKind::Hard:
      return 1.0;
    case WindowKind::Joglekar:
      return 1.0 - std::pow(2.0 * x - 1.0, 2 * window.p);
  }
  return 1.0;  // unreachable
}

double drift_rate(const DeviceParams& params, DeviceState state, double i) {
  const int dir = (i == 0.0) ? 0 : ((i > 0.0) == (params.polarity > 0) ? +1 : -1);
  return params.polarity * params.k_mob() * i * window_factor(params.window, state.x, dir);
}

DeviceState step(const DeviceParams& params, DeviceState state, double i, double dt) {
  if (i == 0.0) return state;  // nothing drives the dopants; keep x bit-exact
  const double x = state.x + drift_rate(params, state, i) * dt;
  return {std::clamp(x, 0.0, 1.0)};
}

double charge_oracle(const DeviceParams& params, double x0, double q) {
  if (params.window.kind != WindowKind::Hard)
    throw Error("charge_oracle: closed form only holds for the hard window");
  return std::clamp(x0 + params.polarity * params.k_mob() * q, 0.0, 1.0);
}

std::vector<SweepSample> sweep(const DeviceParams& params, DeviceState initial,
                               double i, double dt, double t_end) {
  if (!(dt > 0.0)) throw std::invalid_argument("sweep: dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("sweep: t_end must be non-negative");
  const auto steps = static_cast<long long>(std::floor(t_end / dt + 1e-9));
  std::vector<SweepSample> rows;
  rows.reserve(static_cast<std::size_t>(steps) + 1);
  DeviceState s = initial;
  rows.push_back({0.0, s.x, memristance(params, s), i});
  for (long long n = 1; n <= steps; ++n) {
    s = step(params, s, i, dt);
    rows.push_back({static_cast<double>(n) * dt, s.x, memristance(params, s), i});
  }
  return rows;
}

}  // namespace memarith
