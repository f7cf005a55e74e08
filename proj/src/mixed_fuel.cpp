#include "qtm/mixed_fuel.hpp"

#include <cmath>
#include <stdexcept>

namespace qtm {

namespace {

double gamma_dd_big_angle(const MachineSpec& spec, double tau_tilde) {
  const Vector v0 = spec.c_basis.col(spec.d - 1);
  const Vector v1 = clock_basis_state(spec, spec.d, tau_tilde);
  return std::norm((v1.adjoint() * propagator(spec, Branch::Plus, tau_tilde) * v0)(0, 0));
}

void check_mixedness(double q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("mixedness q must be in [0, 1]");
}

constexpr double kLog2 = 0.6931471805599453;

double binary_entropy(double p) {
  double s = 0.0;
  if (p > kProbabilityFloor) s -= p * std::log(p);
  if (1.0 - p > kProbabilityFloor) s -= (1.0 - p) * std::log(1.0 - p);
  return s;
}

} // namespace

double first_measurement_failure(const MachineSpec& spec, double q, double tau_tilde) {
  check_mixedness(q);
  return 0.5 * q * (1.0 - gamma_dd_big_angle(spec, tau_tilde));
}

double stationary_mixedness(const MachineSpec& spec, double beta, double dt, double tau_tilde,
                            double tau_prime) {
  double all_success = 1.0;
  for (double p : success_probabilities(spec, beta, dt, tau_tilde, tau_prime)) {
    all_success *= p;
  }
  const double alpha = 1.0 - gamma_dd_big_angle(spec, tau_tilde);
  return all_success / (1.0 + 0.5 * alpha * all_success);
}

double stationary_mixedness_classical() { return 1.0 / (1.0 + 0.5); }

double breakeven_mixedness() {
  // root of (1 - q/2) log 2 - S({q/2, 1 - q/2}) on (0, 1)
  auto f = [](double q) { return (1.0 - 0.5 * q) * kLog2 - binary_entropy(0.5 * q); };
  double lo = 1e-12, hi = 1.0 - 1e-12;
  for (int i = 0; i < 64 && hi - lo > 1e-8; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MixedFuelReport mixed_cycle_stats(const MachineSpec& spec, double beta, double dt, double q,
                                  FuelMode mode, double tau_tilde, double tau_prime) {
  check_mixedness(q);
  MixedFuelReport report;
  report.q = q;
  report.mode = mode;

  if (mode == FuelMode::ClassicalLimit) {
    report.p_fail_first = 0.5 * q;  // the clock never projects back by itself
    report.p_fail_rest = 0.0;
    report.p_out_pure = report.p_fail_first;
    report.p_out_mixed = 1.0 - report.p_fail_first;
    const double energy = (1.0 - 0.5 * q) * kLog2 / beta;
    const double reset = binary_entropy(0.5 * q) / beta;
    report.net_work = energy - reset;  // upper bound: reset is the Landauer minimum
    report.q_star = stationary_mixedness_classical();
    return report;
  }

  // state after free evolution to tau_tilde, before the stabilising measurement
  const Vector chi = clock_basis_state(spec, spec.d, tau_tilde);
  const Vector deviated =
      propagator(spec, Branch::Plus, tau_tilde) * spec.c_basis.col(spec.d - 1);
  BlockState state;
  state.block_psi = (1.0 - 0.5 * q) * (chi * chi.adjoint());
  state.block_psibar = 0.5 * q * (deviated * deviated.adjoint());

  const auto records = clock_measurement(spec, state, tau_tilde);
  double initial_energy = 0.0;
  double p_first_fail = 0.0;
  std::vector<double> dist;
  dist.reserve(records.size());
  for (const UnitOutcomeRecord& rec : records) {
    dist.push_back(rec.probability);
    initial_energy += rec.probability * rec.energy_to_apparatus;
    if (rec.is_misfire) p_first_fail += rec.probability;
  }
  const double initial_reset = landauer_reset(dist, beta);

  const CycleLedger cycle = selective_cycle_average(spec, beta, dt, ThermModel::instant(),
                                                    tau_tilde, tau_prime);
  double all_success = 1.0;
  for (double p : success_probabilities(spec, beta, dt, tau_tilde, tau_prime)) {
    all_success *= p;
  }

  report.p_fail_first = p_first_fail;
  report.p_fail_rest = 1.0 - all_success;
  report.p_out_pure = p_first_fail + (1.0 - p_first_fail) * report.p_fail_rest;
  report.p_out_mixed = (1.0 - p_first_fail) * all_success;
  report.net_work = initial_energy + (1.0 - p_first_fail) * cycle.energy_to_apparatus -
                    (initial_reset + (1.0 - p_first_fail) * cycle.reset_cost);
  report.q_star = stationary_mixedness(spec, beta, dt, tau_tilde, tau_prime);
  return report;
}

} // namespace qtm
