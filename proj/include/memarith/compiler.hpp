#pragma once

#include <memory>
#include <string>
#include <vector>

#include "memarith/blocks.hpp"
#include "memarith/device.hpp"
#include "memarith/programmer.hpp"

namespace memarith {

enum class AstOp { Add, Sub, Mul, Div };

// Expression tree.  Literals are non-negative decimals straight from the
// source; negation is an explicit node so devices only ever store magnitudes.
struct AstNode {
  enum Kind { Literal, Neg, Binary };
  Kind kind = Literal;
  double value = 0.0;                    // Literal
  AstOp op = AstOp::Add;                 // Binary
  std::unique_ptr<AstNode> left, right;  // Binary; Neg uses left only
  std::size_t begin = 0, end = 0;        // source byte span

  // Filled in by check_ranges():
  double exact = 0.0;        // preview value from ordinary arithmetic
  double target_ohms = 0.0;  // |exact| * gamma
};

struct Ast {
  std::string text;
  std::unique_ptr<AstNode> root;
};

// Grammar:  expr   := term (('+'|'-') term)*
//           term   := factor (('*'|'/') factor)*
//           factor := NUMBER | '-' factor | '(' expr ')'
// Throws SyntaxError with the byte offset of the problem.
Ast parse(const std::string& text);

// Evaluate every node by ordinary arithmetic (the preview that execution is
// later compared against) and annotate the memristance |value|*gamma it will
// occupy.  Every annotation must fit [r_on+margin, r_off-margin].  Throws
// DivideByZeroError (checked first, over the whole tree) or RangeError
// naming the offending subexpression.
void check_ranges(Ast& ast, double gamma, double margin, const DeviceParams& params);

// One plan instruction.  Program stores a magnitude into a fresh register;
// Compute reads two registers through a block and stores the result.
// src1/src2 are the block's M1/M2 roles: for div, src1 is the divisor.
// Registers hold magnitudes only, so each Compute carries the static signs
// of the values its sources stand for (negations folded in); they are what
// the lowering used to pick the block and what execution uses to restore
// the signed value.
struct PlanStep {
  enum Kind { Program, Compute };
  Kind kind = Program;
  // Program:
  int reg = -1;
  double target_ohms = 0.0;
  // Compute:
  BlockKind block = BlockKind::Add;
  int src1 = -1, src2 = -1, dst = -1;
  int sign1 = +1, sign2 = +1;
};

struct Plan {
  double gamma = 100.0;     // ohms per operand unit
  int registers = 0;        // fresh devices used
  int result_register = -1;
  int result_sign = +1;
  std::vector<PlanStep> steps;
};

// Post-order lowering of a range-checked tree.  Signs are tracked
// symbolically from the preview annotations: a mixed-sign '+' lowers to the
// subtractor, a mixed-sign '-' to the adder, so registers only ever hold
// magnitudes.  Requires check_ranges() to have run on the same tree.
Plan lower(const Ast& ast, double gamma);

// Static safety check: every register is written exactly once, before any
// read, and the result register is written.  Throws Error on violation.
void validate(const Plan& plan);

std::string to_json(const Plan& plan);       // stable field order
Plan plan_from_json(const std::string& text);  // throws ConfigError

// parse + check_ranges + lower + validate in one call.
Plan compile_expression(const std::string& text, double gamma, double margin,
                        const DeviceParams& params);

// One executed Compute step: the block read-out plus the signed
// operand-domain value that was stored into dst.
struct ComputeRecord {
  BlockKind block = BlockKind::Add;
  int src1 = -1, src2 = -1, dst = -1;
  double m1 = 0.0, m2 = 0.0;  // memristances as the read saw them, ohms
  double excitation = 0.0;    // V or A, depending on the block
  BlockResult result{};
  double value = 0.0;
};

struct ExecOptions {
  ReadMode mode = ReadMode::Frozen;
  ProgrammerConfig prog{};
  DeviceParams dev{};
  BlockCircuit circuit{};
  double pulse_width = 1e-6;   // s, read pulse width
  double fresh_x = 0.5;        // initial doped fraction of every fresh register
  int record_every = 64;       // trace thinning for the stored program traces
  bool exact_program = false;  // store targets exactly; models the tol -> 0 limit
};

struct ExecutionResult {
  double value = 0.0;  // result_sign * M(result_register) / gamma
  std::vector<ProgramTrace> program_traces;  // one per store, in step order
  std::vector<ComputeRecord> reads;          // one per Compute step
};

// Run the plan on fresh devices.  Program steps go through the feedback
// programmer (TimeoutError if one fails to converge; TargetOutOfRangeError
// if a target does not fit the device); Compute steps read a block in the
// selected mode and program the result register.
ExecutionResult execute(const Plan& plan, const ExecOptions& options);

// Convenience: compile and execute in one call.
double evaluate_expression(const std::string& text, double gamma, double margin,
                           const ExecOptions& options);

}  // namespace memarith
