#pragma once

#include <utility>
#include <vector>

#include "qtm/spin_algebra.hpp"

namespace qtm {

inline constexpr double kDefaultTauTilde = 0.5 * kPi;
inline constexpr double kDefaultTauPrime = kPi;
inline constexpr double kProbabilityFloor = 1e-15;

/// Joint qubit (x) clock state in qubit-diagonal block form. Each block is a
/// d x d Hermitian PSD matrix holding the clock state conditioned on one
/// qubit level; the block's trace carries the qubit weight, and the two
/// traces sum to one. All protocol maps (controlled evolution, clock
/// measurements, thermalisation) preserve this form, so qubit-clock
/// cross-coherence is never represented.
struct BlockState {
  Matrix block_psi;     // conditioned on the qubit ground state
  Matrix block_psibar;  // conditioned on the raised state

  Matrix clock_marginal() const { return block_psi + block_psibar; }
  double weight_psi() const { return block_psi.trace().real(); }
  double weight_psibar() const { return block_psibar.trace().real(); }
};

/// Pure ground-state qubit with the clock on the reference orbit at time t.
BlockState reference_state(const MachineSpec& spec, double t);

/// tr[H_joint rho] for the block form:
/// tr[h_minus block_psi] + tr[h_plus block_psibar].
double joint_energy(const MachineSpec& spec, const BlockState& state);

/// System-energy change when the feedback flip swaps the two qubit levels.
double flip_energy_change(const MachineSpec& spec, const BlockState& state);

/// Thermal qubit for a level splitting delta at inverse temperature beta.
/// delta == 0 gives equal weights; beta may be +infinity (ground state).
struct ThermalQubit {
  double delta = 0.0;
  double p0 = 1.0;
  double p1 = 0.0;
  double z = 1.0;  // 1 + exp(-beta*delta)
};

ThermalQubit thermal_qubit(double delta, double beta);

/// Induced qubit level splitting tr[rho_m h_plus]. The clock state must be
/// Hermitian to 1e-10 with unit trace.
double level_splitting(const MachineSpec& spec, const Matrix& clock_state);

/// Mean-field thermalisation: the qubit is reset to the Gibbs state for the
/// splitting of the total clock marginal, and the marginal is attached to
/// both blocks with the Gibbs weights.
BlockState gibbs_thermalize(const MachineSpec& spec, const BlockState& state, double beta);

/// Controlled free evolution over dt: block_psi under U_minus, block_psibar
/// under U_plus. Block traces are unchanged.
BlockState conditional_evolve(const MachineSpec& spec, const BlockState& state, double dt);

/// Orbit transition probabilities
/// entries(m'-1, m-1) = |<m'(t+dt)|U_plus(dt)|m(t)>|^2, doubly stochastic.
struct TransitionMatrix {
  RealMatrix entries;
  double t = 0.0;
  double dt = 0.0;
};

TransitionMatrix transition_matrix(const MachineSpec& spec, double t, double dt);

/// Same matrix evaluated through rotation-block sums instead of
/// propagators; spin machines only.
TransitionMatrix transition_matrix_wigner(double l, double t, double dt);

/// One projective clock measurement outcome: its label, probability,
/// energy transferred to the apparatus, and the collapsed state. For a
/// misfire (m != d) the energy includes the feedback flip contribution,
/// booked as the system-energy change under the flip.
struct UnitOutcomeRecord {
  int m = 0;  // 1..d
  double probability = 0.0;
  double energy_to_apparatus = 0.0;
  bool is_misfire = false;
  BlockState post_state;
};

/// Projective measurement in the rotating clock basis at t_meas. Outcomes
/// below the probability floor are dropped.
std::vector<UnitOutcomeRecord> clock_measurement(const MachineSpec& spec,
                                                 const BlockState& state, double t_meas);

/// Thermalisation model for one unit protocol.
struct ThermModel {
  enum class Kind { InstantGibbs, Subunit, Bosonic };
  Kind kind = Kind::InstantGibbs;
  int n_beta = 1;        // thermalisation sub-steps per unit protocol
  double tau_beta = 0.0; // effective bath contact per sub-step (Bosonic)

  static ThermModel instant() { return {}; }
  static ThermModel subunit(int n_beta);
  static ThermModel bosonic(int n_beta, double tau_beta);
};

/// One unit protocol starting at time t: thermalisation (per the model),
/// conditional evolution over dt, then the harvesting measurement in the
/// basis at t+dt. Returns the outcome records and the pre-measurement state.
std::pair<std::vector<UnitOutcomeRecord>, BlockState> run_unit_protocol(
    const MachineSpec& spec, const BlockState& state, double t, double dt, double beta,
    const ThermModel& model = ThermModel::instant());

} // namespace qtm
