#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "memarith/blocks.hpp"
#include "memarith/compiler.hpp"
#include "memarith/device.hpp"
#include "memarith/programmer.hpp"

namespace memarith {

// Everything a run can pick up from a flat key = value file.  Device keys:
// r_on, r_off, d, mu_v, window (hard|joglekar), p, polarity.  Programmer
// keys: a, tol, dt, max_time.  Plus gamma.  '#' starts a comment.
struct Config {
  DeviceParams device{};
  ProgrammerConfig programmer{};
  double gamma = 100.0;
};

Config parse_config(std::istream& in, const std::string& name);
Config load_config(const std::string& path);             // throws ConfigError
DeviceParams load_device_params(const std::string& path);  // same format

// Full-precision decimal ("%.17g"): parses back to the same double.
std::string format_full(double v);

const char* block_name(BlockKind kind);            // "add" | "sub" | "div" | "mul"
BlockKind block_from_name(const std::string& name);  // throws ConfigError

// CSV writers.  Headers are fixed; numbers are written with format_full().
void write_sweep_csv(std::ostream& out, const std::vector<SweepSample>& rows);
void write_program_trace_csv(std::ostream& out, const ProgramTrace& trace);
void write_block_csv_header(std::ostream& out);
void write_block_csv_row(std::ostream& out, BlockKind kind, double m1, double m2,
                         double excitation, const BlockResult& result);

// Path variants; throw ConfigError when the file cannot be written.
void write_sweep_csv(const std::string& path, const std::vector<SweepSample>& rows);
void write_program_trace_csv(const std::string& path, const ProgramTrace& trace);

}  // namespace memarith
