#pragma once

#include <optional>

#include "qtm/accounting.hpp"
#include "qtm/engine_core.hpp"

namespace qtm {

/// Coefficient convention for the finite-rate qubit-bath map. The
/// trace-preserving form is the two-level rate-equation solution; the
/// unnormalised variant reproduces an alternative coefficient set that does
/// not conserve probability and is kept only for comparison runs.
enum class BosonicForm { TracePreserving, Unnormalized };

/// Transition coefficients for equilibration of the qubit with a resonant
/// bosonic mode over an effective contact tau_beta (dimensionless product
/// of rate and duration).
struct BosonicCoefficients {
  double n_bar = 0.0;     // mean occupation at the resonant frequency
  double tau_beta = 0.0;
  double c_psi_stay = 1.0;
  double c_bar_to_psi = 0.0;
  double c_psi_to_bar = 0.0;
  double c_bar_stay = 1.0;
};

/// delta >= 0 (tiny negatives from round-off are clamped); tau_beta >= 0.
/// tau_beta = 0 gives the identity channel; tau_beta -> infinity gives the
/// Gibbs fixed point (n_bar, n_bar+1)/(2 n_bar + 1). A degenerate splitting
/// is handled through the n_bar -> infinity limit using the combined
/// product (2 n_bar + 1) tau_beta.
BosonicCoefficients bosonic_coefficients(double delta, double beta, double tau_beta,
                                         BosonicForm form = BosonicForm::TracePreserving);

/// Applies the bosonic map to the qubit blocks; the splitting that selects
/// the resonant mode comes from the total clock marginal. Trace preserving
/// to round-off.
BlockState bosonic_equilibrate(const MachineSpec& spec, const BlockState& state, double beta,
                               double tau_beta);

/// Feedback-mode cycle with each unit protocol split into n_beta
/// (thermalise, evolve dt/n_beta) sub-steps and a single measurement at the
/// protocol's end. Thermalisation is instant Gibbs when tau_beta is absent,
/// otherwise the finite-rate bosonic map.
CycleLedger run_subunit_cycle(const MachineSpec& spec, double beta, double dt, int n_beta,
                              std::optional<double> tau_beta = std::nullopt,
                              double tau_tilde = kDefaultTauTilde,
                              double tau_prime = kDefaultTauPrime);

} // namespace qtm
