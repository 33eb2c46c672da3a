#include <cmath>
#include <string>
#include <vector>

#include "memarith/compiler.hpp"
#include "memarith/errors.hpp"

namespace memarith {

namespace {

// tol -> 0 stand-in: land on the target exactly and synthesize the
// one-sample trace a real converged run would end with.
ProgramTrace exact_store(const ProgrammerConfig& cfg, const DeviceParams& params,
                         double target) {
  ProgramTrace t;
  t.final_state = state_for_memristance(params, target);
  t.final_m = memristance(params, t.final_state);
  t.converged = true;
  t.samples.push_back({0.0, t.final_m, cfg.a * t.final_m,
                       comparator(cfg.a * t.final_m, cfg.a * target, cfg.rail_low,
                                  cfg.rail_high),
                       -1});
  return t;
}

}  // namespace

ExecutionResult execute(const Plan& plan, const ExecOptions& options) {
  validate(plan);
  options.dev.validate();

  std::vector<DeviceState> state(static_cast<std::size_t>(plan.registers),
                                 DeviceState{options.fresh_x});
  ExecutionResult res;

  auto store = [&](int reg, double target_ohms, const char* what) {
    if (options.exact_program) {
      state[reg] = state_for_memristance(options.dev, target_ohms);
      res.program_traces.push_back(exact_store(options.prog, options.dev, target_ohms));
      return;
    }
    ProgramTrace t =
        program(options.prog, options.dev, state[reg], target_ohms, options.record_every);
    if (!t.converged)
      throw TimeoutError(std::string(what) + ": programming register r" +
                         std::to_string(reg) + " to " + std::to_string(target_ohms) +
                         " ohms exceeded max_time");
    state[reg] = t.final_state;
    res.program_traces.push_back(std::move(t));
  };

  const double gamma = plan.gamma;
  for (const PlanStep& s : plan.steps) {
    if (s.kind == PlanStep::Program) {
      store(s.reg, s.target_ohms, "program step");
      continue;
    }
    ReadPulse pulse{default_excitation(s.block), options.pulse_width, options.mode};
    const double m1 = memristance(options.dev, state[s.src1]);
    const double m2 = memristance(options.dev, state[s.src2]);
    BlockResult read;
    if (options.mode == ReadMode::Physical) {
      PhysicalReadResult pr =
          physical_read(s.block, {options.dev, options.dev},
                        {state[s.src1], state[s.src2]}, pulse, options.circuit);
      read = pr.result;
      state[s.src1] = pr.state_after[0];  // the read disturbs the sources
      state[s.src2] = pr.state_after[1];
    } else {
      read = block_read(s.block, m1, m2, pulse, options.circuit);
    }
    // Operand-domain value with the plan's static signs restored.
    // numeric_value is M1+M2 / M1-M2 in ohms, M1*M2 in ohms^2, or the
    // ratio M2/M1.  The adder and subtractor were chosen so that the
    // effective sign of both branches is sign1.
    double value = 0.0;
    switch (s.block) {
      case BlockKind::Add:
      case BlockKind::Sub:
        value = s.sign1 * read.numeric_value / gamma;
        break;
      case BlockKind::Mul:
        value = s.sign1 * s.sign2 * read.numeric_value / (gamma * gamma);
        break;
      case BlockKind::Div:
        value = s.sign1 * s.sign2 * read.numeric_value;
        break;
    }
    res.reads.push_back({s.block, s.src1, s.src2, s.dst, m1, m2, pulse.amplitude, read, value});
    store(s.dst, std::fabs(value) * gamma, "compute step");
  }

  res.value = plan.result_sign *
              memristance(options.dev, state[plan.result_register]) / gamma;
  return res;
}

double evaluate_expression(const std::string& text, double gamma, double margin,
                           const ExecOptions& options) {
  return execute(compile_expression(text, gamma, margin, options.dev), options).value;
}

}  // namespace memarith
