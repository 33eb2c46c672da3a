// End-to-end tests for the memarith command-line tool.  Each case shells out
// to the real binary (path injected by the build as MEMARITH_CLI_PATH) and
// checks printed values, exit codes, and emitted files.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// The harness must not inherit a config file from the environment.
[[maybe_unused]] const int kEnvScrub = (unsetenv("MEMARITH_CONFIG"), 0);

struct CmdResult {
  int status = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
  CmdResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int wait_status = pclose(pipe);
  r.status = WIFEXITED(wait_status) ? WEXITSTATUS(wait_status) : -1;
  return r;
}

// Captures stdout; stderr is discarded.
CmdResult cli(const std::string& args) {
  return run_cmd(std::string(MEMARITH_CLI_PATH) + " " + args + " 2>/dev/null");
}

// Captures stderr; stdout is discarded.
CmdResult cli_stderr(const std::string& args) {
  return run_cmd(std::string(MEMARITH_CLI_PATH) + " " + args + " 2>&1 1>/dev/null");
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("memarith_cli_" + std::to_string(getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

// Field `idx` (0-based) of a comma-separated row.
std::string field(const std::string& row, int idx) {
  std::stringstream ss(row);
  std::string cell;
  for (int i = 0; i <= idx; ++i) REQUIRE(std::getline(ss, cell, ','));
  return cell;
}

}  // namespace

// ===========================================================================
// block
// ===========================================================================

TEST_CASE("block reads print the numeric result") {
  CmdResult r = cli("block div --m1 416 --m2 520 --vi -1");
  CHECK(r.status == 0);
  CHECK(r.out == "1.25\n");

  r = cli("block add --m1 100 --m2 100 --iread 0.001");
  CHECK(r.status == 0);
  CHECK(r.out == "200\n");

  r = cli("block sub --m1 416 --m2 520");
  CHECK(r.status == 0);
  CHECK(r.out == "-104\n");

  r = cli("block mul --m1 520 --m2 416");
  CHECK(r.status == 0);
  CHECK(r.out == "2.163e+05\n");  // 4 significant digits on stdout
}

TEST_CASE("block --mode physical agrees with the frozen read") {
  const CmdResult frozen = cli("block div --m1 416 --m2 520 --vi -1");
  const CmdResult physical = cli("block div --m1 416 --m2 520 --vi -1 --mode physical");
  CHECK(physical.status == 0);
  CHECK(std::fabs(std::stod(physical.out) - std::stod(frozen.out)) < 1e-9);
}

TEST_CASE("block --csv writes a header plus one row") {
  const fs::path csv = scratch_dir() / "block.csv";
  const CmdResult r = cli("block div --m1 416 --m2 520 --vi -1 --csv " + csv.string());
  CHECK(r.status == 0);
  const auto lines = lines_of(read_file(csv));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "block,m1,m2,excitation,v_out,numeric,dM1,dM2");
  CHECK(field(lines[1], 0) == "div");
  CHECK(std::stod(field(lines[1], 5)) == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("block rejects --vi together with --iread") {
  const CmdResult r = cli("block add --m1 100 --m2 100 --vi -1 --iread 0.001");
  CHECK(r.status == 1);
}

// ===========================================================================
// program
// ===========================================================================

TEST_CASE("program converges and writes the trace CSV") {
  const fs::path csv = scratch_dir() / "trace520.csv";
  const CmdResult r = cli("program --target 520 -o " + csv.string());
  CHECK(r.status == 0);
  CHECK(std::fabs(std::stod(r.out) - 520.0) < 0.2);  // tol 0.1 + print rounding

  const auto lines = lines_of(read_file(csv));
  REQUIRE(lines.size() >= 3);
  CHECK(lines[0] == "t,M,v_drop,comparator,drive_sign");
  CHECK(std::stod(field(lines[1], 1)) == 8050.0);  // default start is midscale
  const double final_m = std::stod(field(lines.back(), 1));
  CHECK(std::fabs(final_m - 520.0) <= 0.1);
}

TEST_CASE("program honours --initial-m") {
  const fs::path csv = scratch_dir() / "trace_init.csv";
  const CmdResult r = cli("program --target 520 --initial-m 1000 -o " + csv.string());
  CHECK(r.status == 0);
  const auto lines = lines_of(read_file(csv));
  CHECK(std::stod(field(lines[1], 1)) == doctest::Approx(1000.0).epsilon(1e-9));
}

TEST_CASE("program rejects an unreachable target") {
  const CmdResult r = cli_stderr("program --target 50");
  CHECK(r.status == 2);
  CHECK(r.out.find("outside the programmable band") != std::string::npos);
}

TEST_CASE("program reports a timeout as an error") {
  const CmdResult r = cli_stderr("program --target 520 --max-time 1e-6");
  CHECK(r.status == 2);
  CHECK(r.out.find("error:") != std::string::npos);
}

TEST_CASE("an empty output path is an error, not an absent flag") {
  const CmdResult p = cli_stderr("program --target 520 -o ''");
  CHECK(p.status == 2);
  CHECK(p.out.find("empty path") != std::string::npos);

  const CmdResult s = cli_stderr("sweep --i 0 --t-end 1e-6 -o ''");
  CHECK(s.status == 2);
  CHECK(s.out.find("empty path") != std::string::npos);
}

// ===========================================================================
// sweep
// ===========================================================================

TEST_CASE("sweep prints a CSV trajectory to stdout") {
  const CmdResult r = cli("sweep --i 0 --t-end 1e-5 --dt 1e-6 --x0 0.37");
  CHECK(r.status == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 12);  // header + 11 samples
  CHECK(lines[0] == "t,x,M,i");
  for (std::size_t i = 1; i < lines.size(); ++i)
    CHECK(std::stod(field(lines[i], 1)) == 0.37);  // zero current freezes x
}

TEST_CASE("sweep output is deterministic") {
  const std::string cmd = "sweep --i 0.001 --t-end 1e-5 --dt 1e-7 --x0 0.2";
  const CmdResult a = cli(cmd);
  const CmdResult b = cli(cmd);
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.size() > 100);
}

// ===========================================================================
// compile + run
// ===========================================================================

TEST_CASE("compile then run reproduces the division example") {
  const fs::path plan = scratch_dir() / "plan_div.json";
  CmdResult r = cli("compile '5.2/4.16' -o " + plan.string());
  CHECK(r.status == 0);
  const std::string json = read_file(plan);
  CHECK(json.find("\"op\": \"div\"") != std::string::npos);

  r = cli("run " + plan.string());
  CHECK(r.status == 0);
  CHECK(std::fabs(std::stod(r.out) - 1.25) / 1.25 < 0.003);

  r = cli("run " + plan.string() + " --mode physical");
  CHECK(r.status == 0);
  CHECK(std::fabs(std::stod(r.out) - 1.25) / 1.25 < 0.01);
}

TEST_CASE("compile output is deterministic and run accepts it from stdout form") {
  const CmdResult a = cli("compile '(2+3)*4'");
  const CmdResult b = cli("compile '(2+3)*4'");
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\"registers\": 5") != std::string::npos);
}

TEST_CASE("a wider device band admits larger operands") {
  // At the default band 520/416 needs 52000 ohms and is rejected...
  CmdResult r = cli_stderr("compile '520/416'");
  CHECK(r.status == 2);
  CHECK(r.out.find("outside the storable band") != std::string::npos);

  // ...but a 100 kilo-ohm device takes it.
  const fs::path plan = scratch_dir() / "plan_wide.json";
  r = cli("compile '520/416' --r-off 1e5 -o " + plan.string());
  CHECK(r.status == 0);
  r = cli("run " + plan.string() + " --r-off 1e5");
  CHECK(r.status == 0);
  CHECK(std::fabs(std::stod(r.out) - 1.25) / 1.25 < 0.003);
}

TEST_CASE("run --outdir writes one trace per step plus the read log") {
  const fs::path plan = scratch_dir() / "plan_out.json";
  const fs::path outdir = scratch_dir() / "rundir";
  CmdResult r = cli("compile '5.2/4.16' -o " + plan.string());
  REQUIRE(r.status == 0);
  r = cli("run " + plan.string() + " -o " + outdir.string());
  CHECK(r.status == 0);

  CHECK(fs::exists(outdir / "step00_r0.csv"));
  CHECK(fs::exists(outdir / "step01_r1.csv"));
  CHECK(fs::exists(outdir / "step02_r2.csv"));
  // The divisor is programmed first (M1 role of the divider).
  const auto trace0 = lines_of(read_file(outdir / "step00_r0.csv"));
  CHECK(std::stod(field(trace0.back(), 1)) == doctest::Approx(416.0).epsilon(1e-3));

  const auto reads = lines_of(read_file(outdir / "reads.csv"));
  REQUIRE(reads.size() == 2);
  CHECK(reads[0] == "block,m1,m2,excitation,v_out,numeric,dM1,dM2");
  CHECK(field(reads[1], 0) == "div");
}

TEST_CASE("run rejects a plan file that cannot be opened") {
  const CmdResult r = cli_stderr("run /nonexistent/plan.json");
  CHECK(r.status == 2);
  CHECK(r.out.find("cannot open plan") != std::string::npos);
}

TEST_CASE("compile rejects bad expressions with exit code 2") {
  CmdResult r = cli_stderr("compile '1/0'");
  CHECK(r.status == 2);
  CHECK(r.out.find("division by zero") != std::string::npos);

  r = cli_stderr("compile '(('");
  CHECK(r.status == 2);
  CHECK(r.out.find("at byte") != std::string::npos);
}

// ===========================================================================
// configuration precedence
// ===========================================================================

TEST_CASE("MEMARITH_CONFIG supplies defaults and flags override it") {
  const fs::path cfg = scratch_dir() / "wide.cfg";
  std::ofstream(cfg) << "# wide storage band\nr_off = 1e5\n";

  // Env config widens the band, so the big operands fit...
  CmdResult r = run_cmd("MEMARITH_CONFIG=" + cfg.string() + " " + MEMARITH_CLI_PATH +
                        " compile '520/416' 2>/dev/null");
  CHECK(r.status == 0);

  // ...unless a flag narrows it back.
  r = run_cmd("MEMARITH_CONFIG=" + cfg.string() + " " + MEMARITH_CLI_PATH +
              " compile '520/416' --r-off 16000 2>&1 1>/dev/null");
  CHECK(r.status == 2);
  CHECK(r.out.find("outside the storable band") != std::string::npos);
}

TEST_CASE("--config with an unknown key is a configuration error") {
  const fs::path cfg = scratch_dir() / "bogus.cfg";
  std::ofstream(cfg) << "bogus = 1\n";
  const CmdResult r = cli_stderr("compile '2+2' --config " + cfg.string());
  CHECK(r.status == 2);
  CHECK(r.out.find("unknown key") != std::string::npos);
}

// ===========================================================================
// argument errors and help
// ===========================================================================

TEST_CASE("argument errors exit 1 with usage on stderr") {
  CmdResult r = cli_stderr("program");
  CHECK(r.status == 1);
  CHECK(r.out.find("--target") != std::string::npos);

  r = cli_stderr("frobnicate");
  CHECK(r.status == 1);

  r = cli_stderr("");
  CHECK(r.status == 1);
}

TEST_CASE("--help exits 0 and lists the subcommands") {
  const CmdResult r = cli("--help");
  CHECK(r.status == 0);
  CHECK(r.out.find("sweep") != std::string::npos);
  CHECK(r.out.find("compile") != std::string::npos);
  CHECK(r.out.find("run") != std::string::npos);
}
