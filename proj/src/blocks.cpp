#include "memarith/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memarith/errors.hpp"

namespace memarith {

namespace {

constexpr int kReadSubsteps = 64;  // pulse integration resolution

double clamp_rails(double v, const OpampModel& op) {
  return std::clamp(v, op.v_low, op.v_high);
}

// Closed-loop inverting stage with input impedance zi, feedback zf.
// Ideal: -zf/zi * vin.  Finite gain A divides by 1 + (1 + zf/zi)/A.
double inverting_stage(double vin, double zi, double zf, const OpampModel& op) {
  const double g = zf / zi;
  double v = -g * vin;
  if (!op.ideal_gain()) v /= 1.0 + (1.0 + g) / op.gain;
  return clamp_rails(v, op);
}

// Integrate one device under a constant branch current for the pulse width.
DeviceState integrate_pulse(const DeviceParams& params, DeviceState state, double i,
                            double width) {
  const double dt = width / kReadSubsteps;
  for (int n = 0; n < kReadSubsteps; ++n) state = step(params, state, i, dt);
  return state;
}

// Wiring defaults chosen so the conventional excitation drives x upward on
// both devices (the divider's -1 V read makes its branch current negative,
// hence the flipped entries).
void default_orientation(BlockKind kind, int& o1, int& o2) {
  switch (kind) {
    case BlockKind::Add: o1 = +1; o2 = +1; break;
    case BlockKind::Sub: o1 = +1; o2 = -1; break;
    case BlockKind::Div: o1 = -1; o2 = -1; break;
    case BlockKind::Mul: o1 = +1; o2 = -1; break;
  }
}

}  // namespace

double default_excitation(BlockKind kind) {
  switch (kind) {
    case BlockKind::Add:
    case BlockKind::Sub: return 1e-3;   // A
    case BlockKind::Div: return -1.0;   // V
    case BlockKind::Mul: return +1.0;   // V
  }
  return 0.0;  // unreachable
}

bool OpampModel::unbounded() const {
  return v_low == -std::numeric_limits<double>::infinity() &&
         v_high == std::numeric_limits<double>::infinity();
}

void OpampModel::validate() const {
  if (!ideal_gain() && !(gain > 0.0))
    throw std::invalid_argument("opamp: finite gain must be positive");
  if (!(v_low < v_high)) throw std::invalid_argument("opamp: v_low must be below v_high");
}

BlockResult adder_read(double m1, double m2, const ReadPulse& pulse) {
  BlockResult r;
  r.numeric_value = m1 + m2;
  r.v_out = pulse.amplitude * r.numeric_value;
  return r;
}

double nic_impedance(double r1, double r2, double m, const OpampModel& opamp) {
  if (opamp.ideal_gain()) return -(r1 / r2) * m;
  const double a = opamp.gain;
  // Node algebra of the converter with v_out = A (v+ - v-), written so m = 0
  // stays finite.
  return r1 * ((a + 1.0) * m + r2) / (m + r2 * (1.0 - a));
}

BlockResult subtractor_read(double m1, double m2, const ReadPulse& pulse,
                            const BlockCircuit& circuit) {
  BlockResult r;
  const double series = m1 + nic_impedance(circuit.r1, circuit.r2, m2, circuit.opamp);
  const double v = pulse.amplitude * series;
  r.v_out = clamp_rails(v, circuit.opamp);
  // While no rail clips, report the series value exactly; a clipped output
  // is re-extracted the way a meter would see it.
  r.numeric_value = (r.v_out == v || pulse.amplitude == 0.0)
                        ? series
                        : r.v_out / pulse.amplitude;
  return r;
}

BlockResult divider_read(double m1, double m2, const ReadPulse& pulse,
                         const OpampModel& opamp) {
  BlockResult r;
  const double ratio = m2 / m1;
  const double v = opamp.ideal_gain()
                       ? -ratio * pulse.amplitude
                       : inverting_stage(pulse.amplitude, m1, m2, opamp);
  r.v_out = clamp_rails(v, opamp);
  r.numeric_value = (opamp.ideal_gain() && r.v_out == v)
                        ? ratio
                        : (pulse.amplitude != 0.0 ? -r.v_out / pulse.amplitude : 0.0);
  return r;
}

BlockResult multiplier_read(double m1, double m2, const ReadPulse& pulse, double ra,
                            double rb, const OpampModel& opamp) {
  BlockResult r;
  if (opamp.ideal_gain() && opamp.unbounded()) {
    r.numeric_value = m1 * m2;
    r.v_out = r.numeric_value / (ra * rb) * pulse.amplitude;
    return r;
  }
  const double v1 = inverting_stage(pulse.amplitude, ra, m1, opamp);
  r.v_out = inverting_stage(v1, rb, m2, opamp);
  r.numeric_value = pulse.amplitude != 0.0 ? r.v_out * (ra * rb) / pulse.amplitude : 0.0;
  return r;
}

BlockResult block_read(BlockKind kind, double m1, double m2, const ReadPulse& pulse,
                       const BlockCircuit& circuit) {
  switch (kind) {
    case BlockKind::Add: return adder_read(m1, m2, pulse);
    case BlockKind::Sub: return subtractor_read(m1, m2, pulse, circuit);
    case BlockKind::Div: return divider_read(m1, m2, pulse, circuit.opamp);
    case BlockKind::Mul:
      return multiplier_read(m1, m2, pulse, circuit.ra, circuit.rb, circuit.opamp);
  }
  throw std::invalid_argument("block_read: unknown block kind");
}

PhysicalReadResult physical_read(BlockKind kind, const std::array<DeviceParams, 2>& params,
                                 const std::array<DeviceState, 2>& state,
                                 const ReadPulse& pulse, const BlockCircuit& circuit) {
  if (!(pulse.width > 0.0)) throw Error("physical_read: pulse width must be positive");
  const double m1 = memristance(params[0], state[0]);
  const double m2 = memristance(params[1], state[1]);

  // Output is taken from the operating point at pulse start; the pulse is
  // assumed narrow enough that the drift below does not feed back into it.
  PhysicalReadResult out{block_read(kind, m1, m2, pulse, circuit), state};

  // Ideal-opamp branch currents at that operating point.
  double i1 = 0.0, i2 = 0.0;
  switch (kind) {
    case BlockKind::Add:
      i1 = i2 = pulse.amplitude;
      break;
    case BlockKind::Sub:
      i1 = pulse.amplitude;
      i2 = -(circuit.r1 / circuit.r2) * pulse.amplitude;
      break;
    case BlockKind::Div:
      i1 = i2 = pulse.amplitude / m1;
      break;
    case BlockKind::Mul:
      i1 = pulse.amplitude / circuit.ra;
      i2 = -(m1 / circuit.ra) * pulse.amplitude / circuit.rb;
      break;
  }
  int o1 = circuit.orient1, o2 = circuit.orient2;
  if (o1 == 0 || o2 == 0) {
    int d1, d2;
    default_orientation(kind, d1, d2);
    if (o1 == 0) o1 = d1;
    if (o2 == 0) o2 = d2;
  }

  out.state_after[0] = integrate_pulse(params[0], state[0], o1 * i1, pulse.width);
  out.state_after[1] = integrate_pulse(params[1], state[1], o2 * i2, pulse.width);
  out.result.disturb[0] = memristance(params[0], out.state_after[0]) - m1;
  out.result.disturb[1] = memristance(params[1], out.state_after[1]) - m2;
  return out;
}

}  // namespace memarith
