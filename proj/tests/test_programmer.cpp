// Unit tests for the bang-bang feedback programmer: comparator rule, control
// step sizing, convergence behaviour, traces, and error handling.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "memarith/errors.hpp"
#include "memarith/programmer.hpp"

using namespace memarith;

namespace {

constexpr double kEps12 = 1e-12;

// Worst-case |dM|/dt under full drive: (r_off - r_on) * k_mob * a.
double slew(const DeviceParams& p, double a) {
  return (p.r_off - p.r_on) * p.k_mob() * a;
}

}  // namespace

// ===========================================================================
// Comparator and step sizing
// ===========================================================================

TEST_CASE("comparator picks the rail that pushes M back") {
  // sense below reference -> low rail (M-increasing source)
  CHECK(comparator(4.16, 5.20) == 0.0);
  // sense above reference -> high rail (M-decreasing source)
  CHECK(comparator(5.20, 4.16) == 5.0);
  // tie-break: high rail
  CHECK(comparator(1.0, 1.0) == 5.0);
  // custom rails pass through
  CHECK(comparator(1.0, 2.0, -3.0, 3.0) == -3.0);
}

TEST_CASE("choose_dt: defaults give tol / (2 * slew) of about 3.14e-8 s") {
  DeviceParams p;
  const double expected = 0.1 / (2.0 * slew(p, 0.01));
  CHECK(choose_dt(0.01, p, 0.1) == doctest::Approx(expected).epsilon(kEps12));
  CHECK(choose_dt(0.01, p, 0.1) == doctest::Approx(3.1446540880503145e-8).epsilon(1e-9));
  // linear in tol, inverse in a
  CHECK(choose_dt(0.01, p, 0.2) == doctest::Approx(2.0 * choose_dt(0.01, p, 0.1)).epsilon(kEps12));
  CHECK(choose_dt(0.02, p, 0.1) == doctest::Approx(0.5 * choose_dt(0.01, p, 0.1)).epsilon(kEps12));
  CHECK_THROWS_AS(choose_dt(0.0, p, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(choose_dt(0.01, p, 0.0), std::invalid_argument);
}

TEST_CASE("config validation rejects limit-cycling and nonsense values") {
  DeviceParams p;
  ProgrammerConfig cfg;
  CHECK_NOTHROW(cfg.validate(p));

  ProgrammerConfig bad = cfg;
  bad.dt = 1e-4;  // per-step |dM| = 159 ohms >> tol
  CHECK_THROWS_AS(bad.validate(p), std::invalid_argument);
  bad = cfg;
  bad.a = 0.0;
  CHECK_THROWS_AS(bad.validate(p), std::invalid_argument);
  bad = cfg;
  bad.tol = -0.1;
  CHECK_THROWS_AS(bad.validate(p), std::invalid_argument);
  bad = cfg;
  bad.rail_low = bad.rail_high;
  CHECK_THROWS_AS(bad.validate(p), std::invalid_argument);
  bad = cfg;
  bad.max_time = 0.0;
  CHECK_THROWS_AS(bad.validate(p), std::invalid_argument);
  // An explicit dt at the no-limit-cycle boundary is allowed.
  bad = cfg;
  bad.dt = cfg.tol / slew(p, cfg.a);
  CHECK_NOTHROW(bad.validate(p));
}

// ===========================================================================
// Single control step
// ===========================================================================

TEST_CASE("programmer_step from 8050 toward 520 drives M down by tol/2") {
  DeviceParams p;
  ProgrammerConfig cfg;
  const auto [next, sample] = programmer_step(cfg, p, {0.5}, 520.0, 0.0);
  CHECK(sample.t == 0.0);
  CHECK(sample.m == doctest::Approx(8050.0).epsilon(kEps12));
  CHECK(sample.v_drop == doctest::Approx(80.5).epsilon(kEps12));  // a * M
  CHECK(sample.comparator == 5.0);  // sense above reference
  CHECK(sample.drive_sign == -1);
  // One auto-sized step moves M by exactly half the tolerance band.
  CHECK(memristance(p, next) == doctest::Approx(8050.0 - 0.05).epsilon(1e-9));
}

TEST_CASE("programmer_step drives M up when below target") {
  DeviceParams p;
  ProgrammerConfig cfg;
  const DeviceState low = state_for_memristance(p, 416.0);
  const auto [next, sample] = programmer_step(cfg, p, low, 520.0, 1.5e-3);
  CHECK(sample.t == 1.5e-3);
  CHECK(sample.comparator == 0.0);  // low rail
  CHECK(sample.drive_sign == +1);
  CHECK(memristance(p, next) > sample.m);
}

// ===========================================================================
// Full programming runs
// ===========================================================================

TEST_CASE("program reaches 520 ohms from midscale and matches the slew model") {
  DeviceParams p;
  ProgrammerConfig cfg;
  const ProgramTrace t = program(cfg, p, {0.5}, 520.0);
  CHECK(t.converged);
  CHECK(std::fabs(t.final_m - 520.0) <= cfg.tol);
  REQUIRE(!t.samples.empty());
  CHECK(t.samples.front().m == doctest::Approx(8050.0).epsilon(kEps12));
  CHECK(t.samples.back().m == t.final_m);
  // constant-slew closed form: (8050 - 520) / 1.59e6 s
  const double closed_form = (8050.0 - 520.0) / slew(p, cfg.a);
  CHECK(t.elapsed == doctest::Approx(closed_form).epsilon(0.01));
  CHECK(memristance(p, t.final_state) == t.final_m);
}

TEST_CASE("trace identities: v_drop = a*m, direction correct, error monotone") {
  DeviceParams p;
  ProgrammerConfig cfg;
  for (const double target : {520.0, 12000.0}) {
    const ProgramTrace t = program(cfg, p, {0.5}, target);
    REQUIRE(t.converged);
    double prev_err = -1.0;
    for (const TraceSample& s : t.samples) {
      CHECK(s.v_drop == cfg.a * s.m);  // exact by construction
      const double err = std::fabs(s.m - target);
      if (err > cfg.tol) {
        // comparator never drives the wrong way outside the band
        CHECK(s.drive_sign == (target > s.m ? +1 : -1));
        if (prev_err >= 0.0) CHECK(err <= prev_err);
        prev_err = err;
      }
    }
  }
}

TEST_CASE("re-programming a converged device terminates immediately") {
  DeviceParams p;
  ProgrammerConfig cfg;
  const ProgramTrace first = program(cfg, p, {0.5}, 1234.0);
  REQUIRE(first.converged);
  const ProgramTrace again = program(cfg, p, first.final_state, 1234.0);
  CHECK(again.converged);
  CHECK(again.samples.size() == 1);
  CHECK(again.elapsed == 0.0);
  CHECK(again.final_m == first.final_m);  // drive never engaged
}

TEST_CASE("record_every thins the trace without changing the dynamics") {
  DeviceParams p;
  ProgrammerConfig cfg;
  const ProgramTrace full = program(cfg, p, {0.5}, 3000.0, 1);
  const ProgramTrace thin = program(cfg, p, {0.5}, 3000.0, 50);
  CHECK(thin.converged);
  CHECK(thin.final_m == full.final_m);
  CHECK(thin.elapsed == full.elapsed);
  CHECK(thin.samples.size() < full.samples.size());
  CHECK(thin.samples.back().m == thin.final_m);  // terminal sample always kept
  CHECK_THROWS_AS(program(cfg, p, {0.5}, 3000.0, 0), std::invalid_argument);
}

TEST_CASE("targets outside [r_on + tol, r_off - tol] are rejected") {
  DeviceParams p;
  ProgrammerConfig cfg;
  CHECK_THROWS_AS(program(cfg, p, {0.5}, 100.05, 1), TargetOutOfRangeError);
  CHECK_THROWS_AS(program(cfg, p, {0.5}, 15999.95, 1), TargetOutOfRangeError);
  CHECK_THROWS_AS(program(cfg, p, {0.5}, 50.0, 1), TargetOutOfRangeError);
  try {
    program(cfg, p, {0.5}, 50.0, 1);
    FAIL("expected TargetOutOfRangeError");
  } catch (const TargetOutOfRangeError& e) {
    CHECK(e.target_ohms() == 50.0);
  }
  // The band edges themselves are programmable.
  CHECK(program(cfg, p, {0.5}, p.r_on + cfg.tol, 1).converged);
  CHECK(program(cfg, p, {0.5}, p.r_off - cfg.tol, 1).converged);
}

TEST_CASE("running out of time reports converged = false without throwing") {
  DeviceParams p;
  ProgrammerConfig cfg;
  cfg.max_time = 1e-6;  // a handful of control steps; 520 is far away
  const ProgramTrace t = program(cfg, p, {0.5}, 520.0);
  CHECK(!t.converged);
  CHECK(std::fabs(t.final_m - 520.0) > cfg.tol);
  REQUIRE(!t.samples.empty());
  CHECK(t.samples.back().m == t.final_m);
  CHECK(t.elapsed <= cfg.max_time + choose_dt(cfg.a, p, cfg.tol));
}

TEST_CASE("convergence time tracks the constant-slew closed form") {
  DeviceParams p;
  ProgrammerConfig cfg;
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::uniform_real_distribution<double> ut(200.0, 15000.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double x0 = ux(rng);
    const double target = ut(rng);
    const double m0 = memristance(p, {x0});
    if (std::fabs(m0 - target) < 2.0) continue;  // closed form degenerates
    const ProgramTrace t = program(cfg, p, {x0}, target, 1000);
    REQUIRE(t.converged);
    CHECK(std::fabs(t.final_m - target) <= cfg.tol);
    const double closed_form = std::fabs(m0 - target) / slew(p, cfg.a);
    CHECK(std::fabs(t.elapsed - closed_form) <= 0.1 * closed_form);
  }
}

TEST_CASE("programming works with flipped device polarity") {
  DeviceParams p;
  p.polarity = -1;
  ProgrammerConfig cfg;
  const ProgramTrace t = program(cfg, p, {0.5}, 2000.0);
  CHECK(t.converged);
  CHECK(std::fabs(t.final_m - 2000.0) <= cfg.tol);
}
