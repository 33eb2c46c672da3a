#include "memarith/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "memarith/errors.hpp"

namespace memarith {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_number(const std::string& where, const std::string& value) {
  std::string v = trim(value);
  if (!v.empty() && v[0] == '+') v.erase(0, 1);  // from_chars rejects a leading '+'
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError(where + ": expected a number, got '" + trim(value) + "'");
  return out;
}

int parse_int(const std::string& where, const std::string& value) {
  std::string v = trim(value);
  if (!v.empty() && v[0] == '+') v.erase(0, 1);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError(where + ": expected an integer, got '" + trim(value) + "'");
  return out;
}

void apply_key(Config& cfg, const std::string& where, const std::string& key,
               const std::string& value) {
  if (key == "r_on") cfg.device.r_on = parse_number(where, value);
  else if (key == "r_off") cfg.device.r_off = parse_number(where, value);
  else if (key == "d") cfg.device.d = parse_number(where, value);
  else if (key == "mu_v") cfg.device.mu_v = parse_number(where, value);
  else if (key == "p") cfg.device.window.p = parse_int(where, value);
  else if (key == "polarity") cfg.device.polarity = parse_int(where, value);
  else if (key == "window") {
    const std::string v = trim(value);
    if (v == "hard") cfg.device.window.kind = WindowKind::Hard;
    else if (v == "joglekar") cfg.device.window.kind = WindowKind::Joglekar;
    else throw ConfigError(where + ": window must be 'hard' or 'joglekar', got '" + v + "'");
  } else if (key == "a") cfg.programmer.a = parse_number(where, value);
  else if (key == "tol") cfg.programmer.tol = parse_number(where, value);
  else if (key == "dt") cfg.programmer.dt = parse_number(where, value);
  else if (key == "max_time") cfg.programmer.max_time = parse_number(where, value);
  else if (key == "gamma") cfg.gamma = parse_number(where, value);
  else throw ConfigError(where + ": unknown key '" + key + "'");
}

}  // namespace

Config parse_config(std::istream& in, const std::string& name) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    // key = value, or key value
    std::size_t sep = stripped.find('=');
    std::string key, value;
    if (sep != std::string::npos) {
      key = trim(stripped.substr(0, sep));
      value = stripped.substr(sep + 1);
    } else {
      sep = stripped.find_first_of(" \t");
      if (sep == std::string::npos)
        throw ConfigError(where + ": expected 'key = value'");
      key = stripped.substr(0, sep);
      value = stripped.substr(sep + 1);
    }
    if (key.empty()) throw ConfigError(where + ": missing key");
    apply_key(cfg, where, key, value);
  }
  try {
    cfg.device.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(name + ": " + e.what());
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

DeviceParams load_device_params(const std::string& path) {
  return load_config(path).device;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* block_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::Add: return "add";
    case BlockKind::Sub: return "sub";
    case BlockKind::Div: return "div";
    case BlockKind::Mul: return "mul";
  }
  return "?";
}

BlockKind block_from_name(const std::string& name) {
  if (name == "add") return BlockKind::Add;
  if (name == "sub") return BlockKind::Sub;
  if (name == "div") return BlockKind::Div;
  if (name == "mul") return BlockKind::Mul;
  throw ConfigError("unknown block '" + name + "' (expected add, sub, div or mul)");
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepSample>& rows) {
  out << "t,x,M,i\n";
  for (const SweepSample& r : rows)
    out << format_full(r.t) << ',' << format_full(r.x) << ',' << format_full(r.m) << ','
        << format_full(r.i) << '\n';
}

void write_program_trace_csv(std::ostream& out, const ProgramTrace& trace) {
  out << "t,M,v_drop,comparator,drive_sign\n";
  for (const TraceSample& s : trace.samples)
    out << format_full(s.t) << ',' << format_full(s.m) << ',' << format_full(s.v_drop)
        << ',' << format_full(s.comparator) << ',' << s.drive_sign << '\n';
}

void write_block_csv_header(std::ostream& out) {
  out << "block,m1,m2,excitation,v_out,numeric,dM1,dM2\n";
}

void write_block_csv_row(std::ostream& out, BlockKind kind, double m1, double m2,
                         double excitation, const BlockResult& result) {
  out << block_name(kind) << ',' << format_full(m1) << ',' << format_full(m2) << ','
      << format_full(excitation) << ',' << format_full(result.v_out) << ','
      << format_full(result.numeric_value) << ',' << format_full(result.disturb[0])
      << ',' << format_full(result.disturb[1]) << '\n';
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void write_sweep_csv(const std::string& path, const std::vector<SweepSample>& rows) {
  auto out = open_out(path);
  write_sweep_csv(out, rows);
  if (!out.good()) throw ConfigError("write failed on '" + path + "'");
}

void write_program_trace_csv(const std::string& path, const ProgramTrace& trace) {
  auto out = open_out(path);
  write_program_trace_csv(out, trace);
  if (!out.good()) throw ConfigError("write failed on '" + path + "'");
}

}  // namespace memarith
