#include "qtm/therm_models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qtm {

BosonicCoefficients bosonic_coefficients(double delta, double beta, double tau_beta,
                                         BosonicForm form) {
  if (tau_beta < 0.0) throw std::invalid_argument("tau_beta must be nonnegative");
  if (delta < -1e-12) throw std::invalid_argument("splitting must be nonnegative");
  delta = std::max(delta, 0.0);

  BosonicCoefficients c;
  c.tau_beta = tau_beta;
  const double g = std::expm1(beta * delta);  // exp(beta*delta) - 1
  c.n_bar = g > 0.0 ? 1.0 / g : std::numeric_limits<double>::infinity();

  double w_up, w_down, inv_rate;  // n/(2n+1), (n+1)/(2n+1), 1/(2n+1)
  if (beta * delta < 1e-8) {
    w_up = w_down = 0.5;
    inv_rate = 0.0;
  } else {
    w_up = c.n_bar / (2.0 * c.n_bar + 1.0);
    w_down = (c.n_bar + 1.0) / (2.0 * c.n_bar + 1.0);
    inv_rate = 1.0 / (2.0 * c.n_bar + 1.0);
  }
  double decay;
  if (tau_beta == 0.0) {
    decay = 1.0;
  } else if (inv_rate == 0.0) {
    decay = 0.0;
  } else {
    decay = std::exp(-tau_beta / inv_rate);
  }

  if (form == BosonicForm::Unnormalized) {
    c.c_psi_stay = w_up * decay + w_down;
    c.c_bar_to_psi = w_down * (1.0 - decay);
    c.c_psi_to_bar = -decay * (w_up - inv_rate);
    c.c_bar_stay = w_down * decay + w_up;
    return c;
  }
  c.c_psi_to_bar = w_up * (1.0 - decay);
  c.c_bar_to_psi = w_down * (1.0 - decay);
  c.c_psi_stay = 1.0 - c.c_psi_to_bar;
  c.c_bar_stay = 1.0 - c.c_bar_to_psi;
  return c;
}

BlockState bosonic_equilibrate(const MachineSpec& spec, const BlockState& state, double beta,
                               double tau_beta) {
  const Matrix marginal = state.clock_marginal();
  const double delta = (marginal * spec.h_plus).trace().real();
  const BosonicCoefficients c = bosonic_coefficients(delta, beta, tau_beta);
  BlockState out;
  out.block_psi = c.c_psi_stay * state.block_psi + c.c_bar_to_psi * state.block_psibar;
  out.block_psibar = c.c_psi_to_bar * state.block_psi + c.c_bar_stay * state.block_psibar;
  return out;
}

CycleLedger run_subunit_cycle(const MachineSpec& spec, double beta, double dt, int n_beta,
                              std::optional<double> tau_beta, double tau_tilde,
                              double tau_prime) {
  const ThermModel model = tau_beta.has_value() ? ThermModel::bosonic(n_beta, *tau_beta)
                                                : ThermModel::subunit(n_beta);
  return assemble_selective(simulated_up_records(spec, beta, dt, model, tau_tilde, tau_prime));
}

} // namespace qtm
