#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "memarith/blocks.hpp"
#include "memarith/compiler.hpp"
#include "memarith/device.hpp"
#include "memarith/errors.hpp"
#include "memarith/io.hpp"
#include "memarith/programmer.hpp"

namespace py = pybind11;
using namespace memarith;

PYBIND11_MODULE(_memarith, m) {
  m.doc() = "memristance-domain analog arithmetic simulator";

  // Domain errors; names avoid clashing with python builtins.
  auto err = py::register_exception<Error>(m, "MemarithError");
  py::register_exception<SyntaxError>(m, "ExpressionSyntaxError", err);
  py::register_exception<DivideByZeroError>(m, "DivideByZeroError", err);
  py::register_exception<RangeError>(m, "OperandRangeError", err);
  py::register_exception<TargetOutOfRangeError>(m, "TargetOutOfRangeError", err);
  py::register_exception<TimeoutError>(m, "ProgramTimeoutError", err);
  py::register_exception<ConfigError>(m, "ConfigFileError", err);

  // --- device --------------------------------------------------------
  py::class_<WindowKind> window(m, "WindowKind");
  py::enum_<WindowKind::Kind>(window, "Kind")
      .value("Hard", WindowKind::Hard)
      .value("Joglekar", WindowKind::Joglekar);
  window.def(py::init<>())
      .def_readwrite("kind", &WindowKind::kind)
      .def_readwrite("p", &WindowKind::p)
      .def_static("hard", &WindowKind::hard)
      .def_static("joglekar", &WindowKind::joglekar, py::arg("p"));

  py::class_<DeviceParams>(m, "DeviceParams")
      .def(py::init<>())
      .def_readwrite("r_on", &DeviceParams::r_on)
      .def_readwrite("r_off", &DeviceParams::r_off)
      .def_readwrite("d", &DeviceParams::d)
      .def_readwrite("mu_v", &DeviceParams::mu_v)
      .def_readwrite("window", &DeviceParams::window)
      .def_readwrite("polarity", &DeviceParams::polarity)
      .def("k_mob", &DeviceParams::k_mob)
      .def("validate", &DeviceParams::validate);

  py::class_<DeviceState>(m, "DeviceState")
      .def(py::init<>())
      .def(py::init([](double x) { return DeviceState{x}; }), py::arg("x"))
      .def_readwrite("x", &DeviceState::x);

  m.def("memristance", &memristance, py::arg("params"), py::arg("state"));
  m.def("state_for_memristance", &state_for_memristance, py::arg("params"), py::arg("m"));
  m.def("window_factor", &window_factor, py::arg("window"), py::arg("x"),
        py::arg("drive_sign") = 0);
  m.def("drift_rate", &drift_rate, py::arg("params"), py::arg("state"), py::arg("i"));
  m.def("step", &step, py::arg("params"), py::arg("state"), py::arg("i"), py::arg("dt"));
  m.def("charge_oracle", &charge_oracle, py::arg("params"), py::arg("x0"), py::arg("q"));

  py::class_<SweepSample>(m, "SweepSample")
      .def_readonly("t", &SweepSample::t)
      .def_readonly("x", &SweepSample::x)
      .def_readonly("m", &SweepSample::m)
      .def_readonly("i", &SweepSample::i);
  m.def("sweep", &sweep, py::arg("params"), py::arg("initial"), py::arg("i"),
        py::arg("dt"), py::arg("t_end"));

  // --- programmer ----------------------------------------------------
  py::class_<ProgrammerConfig>(m, "ProgrammerConfig")
      .def(py::init<>())
      .def_readwrite("a", &ProgrammerConfig::a)
      .def_readwrite("rail_low", &ProgrammerConfig::rail_low)
      .def_readwrite("rail_high", &ProgrammerConfig::rail_high)
      .def_readwrite("tol", &ProgrammerConfig::tol)
      .def_readwrite("dt", &ProgrammerConfig::dt)
      .def_readwrite("max_time", &ProgrammerConfig::max_time);

  py::class_<TraceSample>(m, "TraceSample")
      .def_readonly("t", &TraceSample::t)
      .def_readonly("m", &TraceSample::m)
      .def_readonly("v_drop", &TraceSample::v_drop)
      .def_readonly("comparator", &TraceSample::comparator)
      .def_readonly("drive_sign", &TraceSample::drive_sign);

  py::class_<ProgramTrace>(m, "ProgramTrace")
      .def_readonly("samples", &ProgramTrace::samples)
      .def_readonly("converged", &ProgramTrace::converged)
      .def_readonly("final_m", &ProgramTrace::final_m)
      .def_readonly("final_state", &ProgramTrace::final_state)
      .def_readonly("elapsed", &ProgramTrace::elapsed);

  m.def("choose_dt", &choose_dt, py::arg("a"), py::arg("params"), py::arg("tol"));
  m.def("comparator", &comparator, py::arg("sense"), py::arg("reference"),
        py::arg("rail_low") = 0.0, py::arg("rail_high") = 5.0);
  m.def("programmer_step", &programmer_step, py::arg("cfg"), py::arg("params"),
        py::arg("state"), py::arg("target"), py::arg("t") = 0.0);
  m.def("program", &program, py::arg("cfg"), py::arg("params"), py::arg("initial"),
        py::arg("target"), py::arg("record_every") = 1);

  // --- blocks --------------------------------------------------------
  py::enum_<BlockKind>(m, "BlockKind")
      .value("Add", BlockKind::Add)
      .value("Sub", BlockKind::Sub)
      .value("Div", BlockKind::Div)
      .value("Mul", BlockKind::Mul);
  py::enum_<ReadMode>(m, "ReadMode")
      .value("Frozen", ReadMode::Frozen)
      .value("Physical", ReadMode::Physical);

  py::class_<ReadPulse>(m, "ReadPulse")
      .def(py::init<>())
      .def(py::init([](double amplitude, double width, ReadMode mode) {
             return ReadPulse{amplitude, width, mode};
           }),
           py::arg("amplitude"), py::arg("width") = 1e-6,
           py::arg("mode") = ReadMode::Frozen)
      .def_readwrite("amplitude", &ReadPulse::amplitude)
      .def_readwrite("width", &ReadPulse::width)
      .def_readwrite("mode", &ReadPulse::mode);
  m.def("default_excitation", &default_excitation, py::arg("kind"));

  py::class_<OpampModel>(m, "OpampModel")
      .def(py::init<>())
      .def_readwrite("gain", &OpampModel::gain)
      .def_readwrite("v_low", &OpampModel::v_low)
      .def_readwrite("v_high", &OpampModel::v_high)
      .def("ideal_gain", &OpampModel::ideal_gain)
      .def("unbounded", &OpampModel::unbounded);

  py::class_<BlockResult>(m, "BlockResult")
      .def_readonly("v_out", &BlockResult::v_out)
      .def_readonly("numeric_value", &BlockResult::numeric_value)
      .def_readonly("disturb", &BlockResult::disturb);

  py::class_<BlockCircuit>(m, "BlockCircuit")
      .def(py::init<>())
      .def_readwrite("r1", &BlockCircuit::r1)
      .def_readwrite("r2", &BlockCircuit::r2)
      .def_readwrite("ra", &BlockCircuit::ra)
      .def_readwrite("rb", &BlockCircuit::rb)
      .def_readwrite("opamp", &BlockCircuit::opamp)
      .def_readwrite("orient1", &BlockCircuit::orient1)
      .def_readwrite("orient2", &BlockCircuit::orient2);

  m.def("adder_read", &adder_read, py::arg("m1"), py::arg("m2"), py::arg("pulse"));
  m.def("nic_impedance", &nic_impedance, py::arg("r1"), py::arg("r2"), py::arg("m"),
        py::arg("opamp") = OpampModel{});
  m.def("subtractor_read", &subtractor_read, py::arg("m1"), py::arg("m2"),
        py::arg("pulse"), py::arg("circuit") = BlockCircuit{});
  m.def("divider_read", &divider_read, py::arg("m1"), py::arg("m2"), py::arg("pulse"),
        py::arg("opamp") = OpampModel{});
  m.def("multiplier_read", &multiplier_read, py::arg("m1"), py::arg("m2"),
        py::arg("pulse"), py::arg("ra") = 1e3, py::arg("rb") = 1e3,
        py::arg("opamp") = OpampModel{});
  m.def("block_read", &block_read, py::arg("kind"), py::arg("m1"), py::arg("m2"),
        py::arg("pulse"), py::arg("circuit") = BlockCircuit{});

  py::class_<PhysicalReadResult>(m, "PhysicalReadResult")
      .def_readonly("result", &PhysicalReadResult::result)
      .def_readonly("state_after", &PhysicalReadResult::state_after);
  m.def("physical_read", &physical_read, py::arg("kind"), py::arg("params"),
        py::arg("state"), py::arg("pulse"), py::arg("circuit") = BlockCircuit{});

  // --- compiler ------------------------------------------------------
  py::class_<PlanStep> plan_step(m, "PlanStep");
  py::enum_<PlanStep::Kind>(plan_step, "Kind")
      .value("Program", PlanStep::Program)
      .value("Compute", PlanStep::Compute);
  plan_step.def_readonly("kind", &PlanStep::kind)
      .def_readonly("reg", &PlanStep::reg)
      .def_readonly("target_ohms", &PlanStep::target_ohms)
      .def_readonly("block", &PlanStep::block)
      .def_readonly("src1", &PlanStep::src1)
      .def_readonly("src2", &PlanStep::src2)
      .def_readonly("dst", &PlanStep::dst)
      .def_readonly("sign1", &PlanStep::sign1)
      .def_readonly("sign2", &PlanStep::sign2);

  py::class_<Plan>(m, "Plan")
      .def_readonly("gamma", &Plan::gamma)
      .def_readonly("registers", &Plan::registers)
      .def_readonly("result_register", &Plan::result_register)
      .def_readonly("result_sign", &Plan::result_sign)
      .def_readonly("steps", &Plan::steps)
      .def("to_json", [](const Plan& p) { return to_json(p); });
  m.def("plan_from_json", &plan_from_json, py::arg("text"));
  m.def("compile_expression", &compile_expression, py::arg("text"),
        py::arg("gamma") = 100.0, py::arg("margin") = 10.0,
        py::arg("params") = DeviceParams{});

  py::class_<ComputeRecord>(m, "ComputeRecord")
      .def_readonly("block", &ComputeRecord::block)
      .def_readonly("src1", &ComputeRecord::src1)
      .def_readonly("src2", &ComputeRecord::src2)
      .def_readonly("dst", &ComputeRecord::dst)
      .def_readonly("m1", &ComputeRecord::m1)
      .def_readonly("m2", &ComputeRecord::m2)
      .def_readonly("excitation", &ComputeRecord::excitation)
      .def_readonly("result", &ComputeRecord::result)
      .def_readonly("value", &ComputeRecord::value);

  py::class_<ExecOptions>(m, "ExecOptions")
      .def(py::init<>())
      .def_readwrite("mode", &ExecOptions::mode)
      .def_readwrite("prog", &ExecOptions::prog)
      .def_readwrite("dev", &ExecOptions::dev)
      .def_readwrite("circuit", &ExecOptions::circuit)
      .def_readwrite("pulse_width", &ExecOptions::pulse_width)
      .def_readwrite("fresh_x", &ExecOptions::fresh_x)
      .def_readwrite("record_every", &ExecOptions::record_every)
      .def_readwrite("exact_program", &ExecOptions::exact_program);

  py::class_<ExecutionResult>(m, "ExecutionResult")
      .def_readonly("value", &ExecutionResult::value)
      .def_readonly("program_traces", &ExecutionResult::program_traces)
      .def_readonly("reads", &ExecutionResult::reads);

  m.def("execute", &execute, py::arg("plan"), py::arg("options") = ExecOptions{});
  m.def("evaluate_expression", &evaluate_expression, py::arg("text"),
        py::arg("gamma") = 100.0, py::arg("margin") = 10.0,
        py::arg("options") = ExecOptions{});

  // --- io ------------------------------------------------------------
  py::class_<Config>(m, "Config")
      .def(py::init<>())
      .def_readwrite("device", &Config::device)
      .def_readwrite("programmer", &Config::programmer)
      .def_readwrite("gamma", &Config::gamma);
  m.def("load_config", &load_config, py::arg("path"));
  m.def("load_device_params", &load_device_params, py::arg("path"));
}
