// memarith: program memristors with a feedback loop, read them out through
// analog arithmetic blocks, and run compiled expression plans.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "memarith/blocks.hpp"
#include "memarith/compiler.hpp"
#include "memarith/device.hpp"
#include "memarith/errors.hpp"
#include "memarith/io.hpp"
#include "memarith/programmer.hpp"

namespace {

using namespace memarith;

// Keys every subcommand accepts; flags win over --config, which wins over
// the file named by MEMARITH_CONFIG.
struct CommonOpts {
  std::string config;
  const CLI::Option* config_opt = nullptr;
  std::optional<double> r_on, r_off, d, mu_v;
  std::optional<std::string> window;
  std::optional<int> p, polarity;
  std::optional<double> a, tol, dt, max_time;
  std::optional<double> gamma;
};

// A path flag that was given but empty is a mistake, not an absent flag.
void reject_empty_path(const CLI::Option* opt, const std::string& value) {
  if (opt != nullptr && opt->count() > 0 && value.empty())
    throw ConfigError("empty path for " + opt->get_name());
}

// programmer_keys is false for subcommands that never program a device
// (sweep keeps --dt for its own integration step).
void add_common(CLI::App* cmd, CommonOpts& o, bool programmer_keys = true) {
  o.config_opt = cmd->add_option("--config", o.config, "flat key = value config file");
  cmd->add_option("--r-on", o.r_on, "fully doped resistance, ohms");
  cmd->add_option("--r-off", o.r_off, "fully undoped resistance, ohms");
  cmd->add_option("--d", o.d, "film thickness, m");
  cmd->add_option("--mu-v", o.mu_v, "dopant mobility, m^2/(V s)");
  cmd->add_option("--window", o.window, "dopant window: hard or joglekar")
      ->check(CLI::IsMember({"hard", "joglekar"}));
  cmd->add_option("--p", o.p, "joglekar exponent");
  cmd->add_option("--polarity", o.polarity, "current sign that grows x: +1 or -1");
  if (programmer_keys) {
    cmd->add_option("--a", o.a, "programmer sense/drive coefficient");
    cmd->add_option("--tol", o.tol, "programming tolerance, ohms");
    cmd->add_option("--dt", o.dt, "programmer control step, s (0 = auto)");
    cmd->add_option("--max-time", o.max_time, "programming give-up horizon, s");
  }
  cmd->add_option("--gamma", o.gamma, "ohms per operand unit for expressions");
}

Config resolve_config(const CommonOpts& o) {
  Config cfg;
  reject_empty_path(o.config_opt, o.config);
  if (const char* env = std::getenv("MEMARITH_CONFIG"); env && *env) cfg = load_config(env);
  if (!o.config.empty()) cfg = load_config(o.config);
  if (o.r_on) cfg.device.r_on = *o.r_on;
  if (o.r_off) cfg.device.r_off = *o.r_off;
  if (o.d) cfg.device.d = *o.d;
  if (o.mu_v) cfg.device.mu_v = *o.mu_v;
  if (o.window)
    cfg.device.window.kind = *o.window == "hard" ? WindowKind::Hard : WindowKind::Joglekar;
  if (o.p) cfg.device.window.p = *o.p;
  if (o.polarity) cfg.device.polarity = *o.polarity;
  if (o.a) cfg.programmer.a = *o.a;
  if (o.tol) cfg.programmer.tol = *o.tol;
  if (o.dt) cfg.programmer.dt = *o.dt;
  if (o.max_time) cfg.programmer.max_time = *o.max_time;
  if (o.gamma) cfg.gamma = *o.gamma;
  cfg.device.validate();
  return cfg;
}

// Final printed values are rounded for humans; files keep full precision.
void print_value(double v) { std::printf("%.4g\n", v); }

ReadMode mode_from_name(const std::string& name) {
  return name == "physical" ? ReadMode::Physical : ReadMode::Frozen;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"memristance-domain analog arithmetic simulator"};
  app.require_subcommand(1);

  // --- sweep ---------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "constant-current device trajectory");
  CommonOpts sweep_common;
  add_common(sweep_cmd, sweep_common, /*programmer_keys=*/false);
  double sweep_i = 0.0, sweep_tend = 0.0, sweep_dt = 1e-6, sweep_x0 = 0.5;
  std::string sweep_out;
  sweep_cmd->add_option("--i", sweep_i, "drive current, A")->required();
  sweep_cmd->add_option("--t-end", sweep_tend, "duration, s")->required();
  sweep_cmd->add_option("--dt", sweep_dt, "integration step, s");
  sweep_cmd->add_option("--x0", sweep_x0, "initial doped fraction");
  auto* sweep_out_opt = sweep_cmd->add_option("-o,--out", sweep_out, "CSV path (stdout when omitted)");

  // --- program -------------------------------------------------------
  auto* prog_cmd = app.add_subcommand("program", "drive a device to a target memristance");
  CommonOpts prog_common;
  add_common(prog_cmd, prog_common);
  double prog_target = 0.0;
  std::optional<double> prog_x0, prog_m0;
  int prog_record = 1;
  std::string prog_out;
  prog_cmd->add_option("--target", prog_target, "target memristance, ohms")->required();
  auto* opt_x0 = prog_cmd->add_option("--initial-x", prog_x0, "initial doped fraction");
  prog_cmd->add_option("--initial-m", prog_m0, "initial memristance, ohms")->excludes(opt_x0);
  prog_cmd->add_option("--record-every", prog_record, "store every Nth trace sample");
  auto* prog_out_opt = prog_cmd->add_option("-o,--out", prog_out, "trace CSV path");

  // --- block ---------------------------------------------------------
  auto* block_cmd = app.add_subcommand("block", "read one arithmetic block");
  CommonOpts block_common;
  add_common(block_cmd, block_common);
  std::string block_kind_name, block_mode = "frozen", block_csv;
  double block_m1 = 0.0, block_m2 = 0.0, block_width = 1e-6;
  std::optional<double> block_vi, block_iread;
  double block_ra = 1e3, block_rb = 1e3, block_r1 = 1e3, block_r2 = 1e3;
  block_cmd->add_option("kind", block_kind_name, "add | sub | div | mul")->required();
  block_cmd->add_option("--m1", block_m1, "first memristance, ohms")->required();
  block_cmd->add_option("--m2", block_m2, "second memristance, ohms")->required();
  auto* opt_vi = block_cmd->add_option("--vi", block_vi, "read voltage, V (div/mul)");
  block_cmd->add_option("--iread", block_iread, "read current, A (add/sub)")->excludes(opt_vi);
  block_cmd->add_option("--width", block_width, "pulse width, s");
  block_cmd->add_option("--mode", block_mode, "frozen | physical")
      ->check(CLI::IsMember({"frozen", "physical"}));
  block_cmd->add_option("--ra", block_ra, "multiplier stage 1 input resistor, ohms");
  block_cmd->add_option("--rb", block_rb, "multiplier stage 2 input resistor, ohms");
  block_cmd->add_option("--r1", block_r1, "NIC resistor r1, ohms");
  block_cmd->add_option("--r2", block_r2, "NIC resistor r2, ohms");
  auto* block_csv_opt = block_cmd->add_option("--csv", block_csv, "append-style one-line result CSV path");

  // --- compile -------------------------------------------------------
  auto* compile_cmd = app.add_subcommand("compile", "compile an expression to a plan");
  CommonOpts compile_common;
  add_common(compile_cmd, compile_common);
  std::string compile_expr, compile_out;
  double compile_margin = 10.0;
  compile_cmd->add_option("expr", compile_expr, "arithmetic expression")->required();
  auto* compile_out_opt =
      compile_cmd->add_option("-o,--out", compile_out, "plan JSON path (stdout when omitted)");
  compile_cmd->add_option("--margin", compile_margin, "range-check margin, ohms");

  // --- run -----------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "execute a compiled plan");
  CommonOpts run_common;
  add_common(run_cmd, run_common);
  std::string run_plan_path, run_mode = "frozen", run_outdir;
  int run_record = 64;
  run_cmd->add_option("plan", run_plan_path, "plan JSON path")->required();
  run_cmd->add_option("--mode", run_mode, "frozen | physical")
      ->check(CLI::IsMember({"frozen", "physical"}));
  auto* run_outdir_opt = run_cmd->add_option("-o,--outdir", run_outdir, "directory for trace CSVs");
  run_cmd->add_option("--record-every", run_record, "store every Nth trace sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n";
    for (const auto* sub : app.get_subcommands())
      std::cerr << sub->help();
    if (app.get_subcommands().empty()) std::cerr << app.help();
    return 1;
  }

  if (sweep_cmd->parsed()) {
    const Config cfg = resolve_config(sweep_common);
    reject_empty_path(sweep_out_opt, sweep_out);
    const auto rows = sweep(cfg.device, DeviceState{sweep_x0}, sweep_i, sweep_dt, sweep_tend);
    if (sweep_out.empty()) write_sweep_csv(std::cout, rows);
    else write_sweep_csv(sweep_out, rows);
    return 0;
  }

  if (prog_cmd->parsed()) {
    const Config cfg = resolve_config(prog_common);
    reject_empty_path(prog_out_opt, prog_out);
    DeviceState initial{prog_x0.value_or(0.5)};
    if (prog_m0) initial = state_for_memristance(cfg.device, *prog_m0);
    const ProgramTrace trace =
        program(cfg.programmer, cfg.device, initial, prog_target, prog_record);
    if (!prog_out.empty()) write_program_trace_csv(prog_out, trace);
    if (!trace.converged)
      throw TimeoutError("programming did not converge within max_time");
    print_value(trace.final_m);
    return 0;
  }

  if (block_cmd->parsed()) {
    const Config cfg = resolve_config(block_common);
    reject_empty_path(block_csv_opt, block_csv);
    const BlockKind kind = block_from_name(block_kind_name);
    double excitation = default_excitation(kind);
    if (block_vi) excitation = *block_vi;
    if (block_iread) excitation = *block_iread;
    BlockCircuit circuit;
    circuit.ra = block_ra;
    circuit.rb = block_rb;
    circuit.r1 = block_r1;
    circuit.r2 = block_r2;
    const ReadPulse pulse{excitation, block_width, mode_from_name(block_mode)};
    BlockResult result;
    if (pulse.mode == ReadMode::Physical) {
      const std::array<DeviceState, 2> st{state_for_memristance(cfg.device, block_m1),
                                          state_for_memristance(cfg.device, block_m2)};
      result = physical_read(kind, {cfg.device, cfg.device}, st, pulse, circuit).result;
    } else {
      result = block_read(kind, block_m1, block_m2, pulse, circuit);
    }
    if (!block_csv.empty()) {
      std::ofstream out(block_csv);
      if (!out) throw ConfigError("cannot open '" + block_csv + "' for writing");
      write_block_csv_header(out);
      write_block_csv_row(out, kind, block_m1, block_m2, excitation, result);
    }
    print_value(result.numeric_value);
    return 0;
  }

  if (compile_cmd->parsed()) {
    const Config cfg = resolve_config(compile_common);
    reject_empty_path(compile_out_opt, compile_out);
    const Plan plan = compile_expression(compile_expr, cfg.gamma, compile_margin, cfg.device);
    const std::string json = to_json(plan);
    if (compile_out.empty()) {
      std::cout << json;
    } else {
      std::ofstream out(compile_out);
      if (!out) throw ConfigError("cannot open '" + compile_out + "' for writing");
      out << json;
      if (!out.good()) throw ConfigError("write failed on '" + compile_out + "'");
    }
    return 0;
  }

  if (run_cmd->parsed()) {
    const Config cfg = resolve_config(run_common);
    reject_empty_path(run_outdir_opt, run_outdir);
    std::ifstream in(run_plan_path);
    if (!in) throw ConfigError("cannot open plan '" + run_plan_path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const Plan plan = plan_from_json(text);
    ExecOptions options;
    options.mode = mode_from_name(run_mode);
    options.prog = cfg.programmer;
    options.dev = cfg.device;
    options.record_every = run_record;
    const ExecutionResult result = execute(plan, options);
    if (!run_outdir.empty()) {
      std::filesystem::create_directories(run_outdir);
      const std::filesystem::path dir(run_outdir);
      // One trace per store, named by plan step; one CSV for all block reads.
      std::size_t trace_idx = 0;
      char name[64];
      for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const PlanStep& s = plan.steps[i];
        const int reg = s.kind == PlanStep::Program ? s.reg : s.dst;
        std::snprintf(name, sizeof name, "step%02zu_r%d.csv", i, reg);
        write_program_trace_csv((dir / name).string(),
                                result.program_traces.at(trace_idx++));
      }
      std::ofstream reads((dir / "reads.csv").string());
      if (!reads) throw ConfigError("cannot open reads.csv for writing");
      write_block_csv_header(reads);
      for (const ComputeRecord& r : result.reads)
        write_block_csv_row(reads, r.block, r.m1, r.m2, r.excitation, r.result);
    }
    print_value(result.value);
    return 0;
  }

  return 1;  // unreachable: require_subcommand(1)
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
