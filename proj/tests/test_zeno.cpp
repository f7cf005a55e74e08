#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qtm/accounting.hpp"
#include "qtm/zeno.hpp"

using namespace qtm;

namespace {
constexpr double kLog2 = 0.6931471805599453;
}

TEST_CASE("free energy closed form") {
  const MachineSpec spec = build_spin_machine(2.0);

  // the splitting vanishes at t = 0, leaving the degenerate value
  CHECK(std::abs(free_energy(spec, 0.0, 1.7) + kLog2 / 1.7) < 1e-12);

  const double expected = -2.0 * std::log1p(std::exp(-0.5 * 2.0 * std::sin(2.0)));
  CHECK(std::abs(free_energy(spec, 2.0, 0.5) - expected) < 1e-12);

  // partition-function cross-check: F = -log(sum of Boltzmann weights)/beta
  const double beta = 1.3;
  const double delta = 2.0 * std::sin(1.1);
  const double z = 1.0 + std::exp(-beta * delta);
  CHECK(std::abs(free_energy(spec, 1.1, beta) + std::log(z) / beta) < 1e-12);

  CHECK(free_energy(spec, kDefaultTauTilde, 1.0) > free_energy(spec, kDefaultTauPrime, 1.0));
}

TEST_CASE("work rate on the reference orbit") {
  const MachineSpec spec = build_spin_machine(1.0);
  CHECK(std::abs(zeno_power(spec, 0.5 * kPi, 1.0)) < 1e-12);

  const double at_three_quarters = zeno_power(spec, 0.75 * kPi, 1.0);
  CHECK(std::abs(at_three_quarters - 0.2335138478796601) < 1e-10);

  // equals the negative free-energy rate everywhere in the window
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> time(0.5 * kPi, kPi);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const double t = time(rng);
    const double df_dt =
        (free_energy(spec, t + h, 1.0) - free_energy(spec, t - h, 1.0)) / (2.0 * h);
    CHECK(std::abs(zeno_power(spec, t, 1.0) + df_dt) < 1e-8);
  }
}

TEST_CASE("total work of the continuously stabilised cycle") {
  const MachineSpec spec = build_spin_machine(1.0);
  const double closed = zeno_total_work(spec, 1.0);
  CHECK(std::abs(closed - (kLog2 - std::log1p(std::exp(-1.0)))) < 1e-12);

  // independent quadrature of the work rate over the window
  const double integrated = oracle::adaptive_simpson(
      [&](double t) { return zeno_power(spec, t, 1.0); }, kDefaultTauTilde, kDefaultTauPrime,
      1e-10);
  CHECK(std::abs(closed - integrated) < 1e-9);

  // saturates the two-level bound once the peak splitting dwarfs kT
  const MachineSpec big = build_spin_machine(30.0);
  CHECK(std::abs(zeno_total_work(big, 1.0) - kLog2) < 1e-12);

  // a machine that induces no splitting extracts nothing
  const MachineSpec degenerate =
      make_machine(build_spin_machine(1.0).h_minus, Matrix::Zero(3, 3));
  CHECK(zeno_total_work(degenerate, 1.0) == 0.0);
}

TEST_CASE("report construction") {
  const MachineSpec spec = build_spin_machine(1.5);
  const ZenoReport report = zeno_report(spec, 0.7, 33);
  REQUIRE(report.work_rate_samples.size() == 33);
  REQUIRE(report.free_energy_samples.size() == 33);
  CHECK(report.work_rate_samples.front().first == kDefaultTauTilde);
  CHECK(report.work_rate_samples.back().first == doctest::Approx(kDefaultTauPrime));
  CHECK(report.w_zeno ==
        report.free_energy_samples.front().second - report.free_energy_samples.back().second);
  CHECK_THROWS_AS(zeno_report(spec, 0.7, 1), std::invalid_argument);
}

TEST_CASE("simulated ideal work converges to the continuous value") {
  for (double l : {1.0, 5.0}) {
    const MachineSpec spec = build_spin_machine(l);
    const double target = zeno_total_work(spec, 1.0);
    double previous = 1e9;
    for (double dt : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
      const CycleLedger ledger = selective_cycle_average(spec, 1.0, dt);
      const double error = std::abs(ledger.w_ideal - target) / target;
      CHECK(error < previous);
      previous = error;
    }
    CHECK(previous < 0.02);
  }
}

TEST_CASE("stabilisation record cost fades as the protocol refines") {
  const MachineSpec spec = build_spin_machine(1.0);
  double previous = 1e9;
  for (double dt : {0.1, 0.05, 0.025}) {
    const CycleLedger ledger = selective_cycle_average(spec, 1.0, dt);
    CHECK(ledger.reset_cost < previous);
    previous = ledger.reset_cost;
  }
}

TEST_CASE("reference-outcome deficit scales quadratically") {
  const MachineSpec spec = build_spin_machine(1.0);
  std::vector<double> dts{1e-1, 3e-2, 1e-2, 3e-3};
  std::vector<double> deficits;
  for (double dt : dts) {
    const TransitionMatrix gamma = transition_matrix(spec, 2.0, dt);
    const ThermalQubit q = thermal_qubit(std::sin(2.0), 1.0);
    deficits.push_back(1.0 - (q.p0 + q.p1 * gamma.entries(spec.d - 1, spec.d - 1)));
  }
  const double slope = oracle::loglog_slope(dts, deficits);
  CHECK(slope > 1.85);
  CHECK(slope < 2.15);
}
