#pragma once

#include <utility>
#include <vector>

#include "qtm/engine_core.hpp"

namespace qtm {

/// Equilibrium free energy of the qubit at the reference-orbit splitting:
/// F(t) = -log(1 + exp(-beta delta(t)))/beta.
double free_energy(const MachineSpec& spec, double t, double beta);

/// Instantaneous work rate of the continuously stabilised engine on the
/// reference orbit: -p1(t) tr[chi(t) c_op], which equals -dF/dt.
double zeno_power(const MachineSpec& spec, double t, double beta);

/// Total work of the continuously stabilised cycle,
/// F(tau_tilde) - F(tau_prime) = (log 2 - log Z(tau_tilde))/beta when the
/// splitting closes at tau_prime.
double zeno_total_work(const MachineSpec& spec, double beta,
                       double tau_tilde = kDefaultTauTilde,
                       double tau_prime = kDefaultTauPrime);

/// Sampled work-rate and free-energy profiles over [tau_tilde, tau_prime].
/// w_zeno = -(F(tau_prime) - F(tau_tilde)) holds by construction.
struct ZenoReport {
  double w_zeno = 0.0;
  std::vector<std::pair<double, double>> work_rate_samples;
  std::vector<std::pair<double, double>> free_energy_samples;
};

ZenoReport zeno_report(const MachineSpec& spec, double beta, int n_samples,
                       double tau_tilde = kDefaultTauTilde,
                       double tau_prime = kDefaultTauPrime);

} // namespace qtm
