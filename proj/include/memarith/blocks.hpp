#pragma once

#include <array>
#include <limits>

#include "memarith/device.hpp"

namespace memarith {

enum class BlockKind { Add, Sub, Div, Mul };

// Frozen treats memristances as fixed resistors and returns the exact
// transfer function; Physical additionally integrates the read current
// through each device over the pulse and reports the drift it causes.
enum class ReadMode { Frozen, Physical };

// One read-out excitation: volts for the voltage-driven blocks (div, mul),
// amperes for the current-driven ones (add, sub).
struct ReadPulse {
  double amplitude = 0.0;
  double width = 1e-6;  // s
  ReadMode mode = ReadMode::Frozen;
};

// Conventional read excitation per block: -1 V for the divider, +1 V for the
// multiplier, 1 mA for the current-driven adder and subtractor.
double default_excitation(BlockKind kind);

// Opamp abstraction for the compute blocks: infinite gain and unbounded
// rails by default.  A finite gain switches the read-outs to the closed-loop
// formulas; bounded rails clamp every stage output (saturation corrupts the
// extracted numeric value, which is the point of modelling them).
struct OpampModel {
  double gain = std::numeric_limits<double>::infinity();
  double v_low = -std::numeric_limits<double>::infinity();   // volts
  double v_high = std::numeric_limits<double>::infinity();   // volts

  bool ideal_gain() const { return !(gain < std::numeric_limits<double>::infinity()); }
  bool unbounded() const;
  void validate() const;  // throws std::invalid_argument
};

struct BlockResult {
  double v_out = 0.0;          // volts
  double numeric_value = 0.0;  // operand-domain result (dimensionless, see each block)
  std::array<double, 2> disturb{0.0, 0.0};  // per-device dM in ohms; zero when frozen
};

// Component values around the blocks.
struct BlockCircuit {
  double r1 = 1e3;  // ohms, NIC resistor pair; r1 == r2 negates M2 exactly
  double r2 = 1e3;
  double ra = 1e3;  // ohms, multiplier stage input resistors
  double rb = 1e3;
  OpampModel opamp{};
  // +-1 flips how a device is wired into its branch; 0 keeps the per-block
  // default, which makes the default excitation increase x on both devices.
  int orient1 = 0;
  int orient2 = 0;
};

// Two memristors in series, driven by a current I = pulse.amplitude:
// v_out = I (m1 + m2), numeric_value = m1 + m2.
BlockResult adder_read(double m1, double m2, const ReadPulse& pulse);

// Input impedance of a negative-impedance converter around m:
// -(r1/r2) m for an ideal opamp.
double nic_impedance(double r1, double r2, double m, const OpampModel& opamp = {});

// m1 in series with a NIC-negated m2, driven by a current I:
// numeric_value = m1 - m2 at r1 == r2, v_out = I * numeric_value.
BlockResult subtractor_read(double m1, double m2, const ReadPulse& pulse,
                            const BlockCircuit& circuit = {});

// Inverting amplifier with m1 at the input and m2 in feedback:
// v_out = -(m2/m1) V_i, numeric_value = m2/m1 (read with V_i = -1).
BlockResult divider_read(double m1, double m2, const ReadPulse& pulse,
                         const OpampModel& opamp = {});

// Two cascaded inverting stages, m1 and m2 in feedback over ra and rb:
// v_out = (m1 m2 / (ra rb)) V_i, numeric_value = m1 m2.
BlockResult multiplier_read(double m1, double m2, const ReadPulse& pulse,
                            double ra = 1e3, double rb = 1e3,
                            const OpampModel& opamp = {});

// Dispatch on kind with the component values from `circuit`.
BlockResult block_read(BlockKind kind, double m1, double m2,
                       const ReadPulse& pulse, const BlockCircuit& circuit = {});

struct PhysicalReadResult {
  BlockResult result;
  std::array<DeviceState, 2> state_after;
};

// Read with live devices: the output is computed from the memristances at
// pulse start, then each device is integrated over the pulse width under its
// ideal-opamp branch current (divider: V_i/m1 through both; multiplier:
// V_i/ra and -(m1/ra)V_i/rb; adder/subtractor: the drive current, negated
// through the NIC).  disturb reports the resulting per-device dM.  States
// are returned, not mutated.
PhysicalReadResult physical_read(BlockKind kind,
                                 const std::array<DeviceParams, 2>& params,
                                 const std::array<DeviceState, 2>& state,
                                 const ReadPulse& pulse,
                                 const BlockCircuit& circuit = {});

}  // namespace memarith
