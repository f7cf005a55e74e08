#include "qtm/zeno.hpp"

#include <cmath>
#include <stdexcept>

namespace qtm {

namespace {

double reference_splitting(const MachineSpec& spec, double t) {
  const Vector chi = clock_basis_state(spec, spec.d, t);
  return (chi.adjoint() * spec.h_plus * chi)(0, 0).real();
}

} // namespace

double free_energy(const MachineSpec& spec, double t, double beta) {
  const double delta = reference_splitting(spec, t);
  return -std::log1p(std::exp(-beta * delta)) / beta;
}

double zeno_power(const MachineSpec& spec, double t, double beta) {
  const Vector chi = clock_basis_state(spec, spec.d, t);
  const double delta = (chi.adjoint() * spec.h_plus * chi)(0, 0).real();
  const double delta_rate = (chi.adjoint() * spec.c_op * chi)(0, 0).real();
  return -thermal_qubit(delta, beta).p1 * delta_rate;
}

double zeno_total_work(const MachineSpec& spec, double beta, double tau_tilde,
                       double tau_prime) {
  return free_energy(spec, tau_tilde, beta) - free_energy(spec, tau_prime, beta);
}

ZenoReport zeno_report(const MachineSpec& spec, double beta, int n_samples, double tau_tilde,
                       double tau_prime) {
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  ZenoReport report;
  report.w_zeno = zeno_total_work(spec, beta, tau_tilde, tau_prime);
  report.work_rate_samples.reserve(n_samples);
  report.free_energy_samples.reserve(n_samples);
  const double step = (tau_prime - tau_tilde) / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) {
    const double t = tau_tilde + i * step;
    report.work_rate_samples.emplace_back(t, zeno_power(spec, t, beta));
    report.free_energy_samples.emplace_back(t, free_energy(spec, t, beta));
  }
  return report;
}

} // namespace qtm
