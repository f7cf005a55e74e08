#pragma once

#include <vector>

#include "qtm/engine_core.hpp"

namespace qtm {

enum class Mode { Selective, Unselective, Zeno };

/// Accumulated energy bookkeeping for one engine cycle.
/// net_work = energy_to_apparatus - reset_cost holds exactly.
struct CycleLedger {
  double energy_to_apparatus = 0.0;  // expected measurement energy over the cycle
  double reset_cost = 0.0;           // expected Landauer erasure charge
  double heat_in = 0.0;              // heat drawn from the bath
  double net_work = 0.0;             // the cycle-averaged work output
  double w_ideal = 0.0;              // energy flows of the all-success shot
  Mode mode = Mode::Selective;
};

/// Energy into the apparatus on the successful outcome of the unit protocol
/// starting at t with the qubit's raised weight p1:
/// p1 (<d(t)|h_plus|d(t)> - (G_dd/p_d) <d(t+dt)|h_plus|d(t+dt)>).
double success_energy(const MachineSpec& spec, double t, double dt, double p1);

/// Misfire energy, orbit m in 1..d-1. The measurement part can be negative
/// (backflow from the apparatus); the flip part is the system-energy change
/// of the feedback flip, -<m(t+dt)|h_plus|m(t+dt)>.
struct MisfireEnergy {
  double total = 0.0;
  double measurement = 0.0;
  double flip = 0.0;
};
MisfireEnergy misfire_energy(const MachineSpec& spec, double t, double dt, double p1, int m);

/// beta^-1 times the Shannon entropy (natural log) of an outcome
/// distribution. The distribution must sum to 1 within 1e-9; entries below
/// the probability floor contribute nothing.
double landauer_reset(const std::vector<double>& probabilities, double beta);

/// Heat drawn during the thermalisation that follows a successful unit
/// protocol over [t, t+dt], and the classical reference without the
/// measurement back-action ratio.
struct HeatFlow {
  double quantum = 0.0;
  double classical = 0.0;
};
HeatFlow heat_flow(const MachineSpec& spec, double t, double dt, double beta);

/// Cycle discretisation: n_steps = round((tau_prime - tau_tilde)/dt) and dt
/// re-derived so the cycle lands exactly on tau_prime.
struct CycleGrid {
  int n_steps = 0;
  double dt = 0.0;
  double tau_tilde = kDefaultTauTilde;
  double tau_prime = kDefaultTauPrime;
};
CycleGrid make_grid(double dt, double tau_tilde = kDefaultTauTilde,
                    double tau_prime = kDefaultTauPrime);

/// Everything accounting needs from one unit protocol on the success-
/// conditioned branch: outcome probabilities, outcome energies, the
/// Landauer charge of the record, and the heat drawn while thermalising.
/// Misfire arrays are indexed by orbit m = 1..d-1.
struct UpQuantities {
  double t_start = 0.0;
  double dt = 0.0;
  double p_d = 1.0;
  double energy_d = 0.0;
  double reset = 0.0;
  double heat = 0.0;
  std::vector<double> p_misfire;
  std::vector<double> energy_misfire;
};

/// Closed-form per-protocol records for instant Gibbs thermalisation on the
/// reference orbit.
std::vector<UpQuantities> analytic_up_records(const MachineSpec& spec, double beta, double dt,
                                              double tau_tilde = kDefaultTauTilde,
                                              double tau_prime = kDefaultTauPrime);

/// The same records produced by stepping the block state through the unit
/// protocols (success-conditioned), for any thermalisation model.
std::vector<UpQuantities> simulated_up_records(const MachineSpec& spec, double beta, double dt,
                                               const ThermModel& model,
                                               double tau_tilde = kDefaultTauTilde,
                                               double tau_prime = kDefaultTauPrime);

/// Success probabilities p_d per unit protocol (cheap path, no energies).
std::vector<double> success_probabilities(const MachineSpec& spec, double beta, double dt,
                                          double tau_tilde = kDefaultTauTilde,
                                          double tau_prime = kDefaultTauPrime);

/// Cycle average for the feedback mode: the all-success term, the partial
/// work collected up to an abort, and the misfire energies, weighted by the
/// survival prefix products. Per-protocol work is charged its Landauer
/// share, energy and reset are also reported separately, and w_ideal is the
/// plain energy sum of the all-success trajectory.
CycleLedger assemble_selective(const std::vector<UpQuantities>& records);

CycleLedger selective_cycle_average(const MachineSpec& spec, double beta, double dt,
                                    const ThermModel& model = ThermModel::instant(),
                                    double tau_tilde = kDefaultTauTilde,
                                    double tau_prime = kDefaultTauPrime);

/// Cycle average for the feedback-free mode: expected energy by forward
/// dynamic programming over the orbit Markov chain, trajectory entropy by
/// the chain rule, one erasure charged at cycle end. Requires instant Gibbs
/// thermalisation (anything else carries qubit memory across protocols and
/// breaks the orbit Markov chain); other models are rejected.
CycleLedger unselective_cycle_average(const MachineSpec& spec, double beta, double dt,
                                      const ThermModel& model = ThermModel::instant(),
                                      double tau_tilde = kDefaultTauTilde,
                                      double tau_prime = kDefaultTauPrime);

} // namespace qtm
