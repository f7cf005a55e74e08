#pragma once

#include "qtm/accounting.hpp"
#include "qtm/engine_core.hpp"

namespace qtm {

/// Evaluation regime for mixed-input analysis. ClassicalLimit is the
/// analytic infinite-clock, continuous-stabilisation path (extraction stage
/// never misfires, each success yields kT log 2); Finite evaluates the
/// actual machine at the given (l, dt).
enum class FuelMode { ClassicalLimit, Finite };

struct MixedFuelReport {
  double q = 0.0;             // input mixedness
  double p_fail_first = 0.0;  // the stabilising measurement misfires
  double p_fail_rest = 0.0;   // some later unit protocol misfires
  double p_out_pure = 0.0;
  double p_out_mixed = 0.0;
  double q_star = 0.0;        // stationary mixedness of this machine
  double net_work = 0.0;      // upper bound in the classical-limit mode
  FuelMode mode = FuelMode::Finite;
};

/// Probability that the extra stabilising measurement at tau_tilde fails to
/// project the clock back onto the reference orbit:
/// (q/2)(1 - G_dd(0, tau_tilde)).
double first_measurement_failure(const MachineSpec& spec, double q,
                                 double tau_tilde = kDefaultTauTilde);

/// Fixed point of the output-mixedness map, from the linear equation
/// q* = P / (1 + (alpha/2) P) with alpha = 1 - G_dd(0, tau_tilde) and
/// P the all-success probability of the extraction stage.
double stationary_mixedness(const MachineSpec& spec, double beta, double dt,
                            double tau_tilde = kDefaultTauTilde,
                            double tau_prime = kDefaultTauPrime);

/// The same fixed point in the classical limit (alpha -> 1, P -> 1): 2/3.
double stationary_mixedness_classical();

/// Input mixedness at which net work crosses zero in the classical limit;
/// bisection to 1e-8 of (1 - q/2) log 2 = S({q/2, 1 - q/2}).
double breakeven_mixedness();

/// Full single-cycle statistics for input mixedness q.
MixedFuelReport mixed_cycle_stats(const MachineSpec& spec, double beta, double dt, double q,
                                  FuelMode mode = FuelMode::Finite,
                                  double tau_tilde = kDefaultTauTilde,
                                  double tau_prime = kDefaultTauPrime);

} // namespace qtm
