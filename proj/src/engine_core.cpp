#include "qtm/engine_core.hpp"

#include <cmath>
#include <stdexcept>

#include "qtm/therm_models.hpp"

namespace qtm {

BlockState reference_state(const MachineSpec& spec, double t) {
  const Vector chi = clock_basis_state(spec, spec.d, t);
  BlockState state;
  state.block_psi = chi * chi.adjoint();
  state.block_psibar = Matrix::Zero(spec.d, spec.d);
  return state;
}

double joint_energy(const MachineSpec& spec, const BlockState& state) {
  return ((spec.h_minus * state.block_psi).trace() +
          (spec.h_plus * state.block_psibar).trace())
      .real();
}

double flip_energy_change(const MachineSpec& spec, const BlockState& state) {
  // flip swaps the blocks: dE = 2 tr[h_int (block_psi - block_psibar)]
  return 2.0 * (spec.h_int * (state.block_psi - state.block_psibar)).trace().real();
}

ThermalQubit thermal_qubit(double delta, double beta) {
  ThermalQubit q;
  q.delta = delta;
  if (delta == 0.0) {
    q.z = 2.0;
    q.p0 = 0.5;
  } else {
    q.z = 1.0 + std::exp(-beta * delta);
    q.p0 = 1.0 / q.z;
  }
  q.p1 = 1.0 - q.p0;
  return q;
}

double level_splitting(const MachineSpec& spec, const Matrix& clock_state) {
  if (clock_state.rows() != spec.d || clock_state.cols() != spec.d) {
    throw std::invalid_argument("clock state has wrong dimension");
  }
  if (hermiticity_error(clock_state) > 1e-10 ||
      std::abs(clock_state.trace().real() - 1.0) > 1e-10) {
    throw std::invalid_argument("clock state must be Hermitian with unit trace");
  }
  return (clock_state * spec.h_plus).trace().real();
}

BlockState gibbs_thermalize(const MachineSpec& spec, const BlockState& state, double beta) {
  const Matrix marginal = state.clock_marginal();
  const double delta = (marginal * spec.h_plus).trace().real();
  const ThermalQubit q = thermal_qubit(delta, beta);
  BlockState out;
  out.block_psi = q.p0 * marginal;
  out.block_psibar = q.p1 * marginal;
  return out;
}

BlockState conditional_evolve(const MachineSpec& spec, const BlockState& state, double dt) {
  if (dt < 0.0) throw std::invalid_argument("evolution step must be nonnegative");
  const Matrix um = propagator(spec, Branch::Minus, dt);
  const Matrix up = propagator(spec, Branch::Plus, dt);
  BlockState out;
  out.block_psi = um * state.block_psi * um.adjoint();
  out.block_psibar = up * state.block_psibar * up.adjoint();
  return out;
}

TransitionMatrix transition_matrix(const MachineSpec& spec, double t, double dt) {
  // amplitudes <m'(t+dt)|U_plus(dt)|m(t)> for all orbit pairs at once
  const Matrix basis_from = propagator(spec, Branch::Minus, t) * spec.c_basis;
  const Matrix basis_to = propagator(spec, Branch::Minus, t + dt) * spec.c_basis;
  const Matrix amps = basis_to.adjoint() * propagator(spec, Branch::Plus, dt) * basis_from;
  return TransitionMatrix{amps.cwiseAbs2(), t, dt};
}

TransitionMatrix transition_matrix_wigner(double l, double t, double dt) {
  const int t2l = twice_spin(l);
  const int d = t2l + 1;
  const WignerBlock d_dt = wigner_small_d(l, dt);
  const WignerBlock d_mhalf = wigner_small_d(l, -0.5 * kPi);
  const WignerBlock d_phalf = wigner_small_d(l, 0.5 * kPi);
  // orbit index 1..d corresponds to magnetic number mv = index - 1 - l
  TransitionMatrix gamma{RealMatrix::Zero(d, d), t, dt};
  for (int mp_i = 0; mp_i < d; ++mp_i) {
    const double mp = mp_i - l;
    for (int m_i = 0; m_i < d; ++m_i) {
      const double m = m_i - l;
      Complex amp = 0.0;
      for (int kp_i = 0; kp_i < d; ++kp_i) {
        const double kp = kp_i - l;
        const double dm = d_mhalf.at(mp, kp);
        if (dm == 0.0) continue;
        for (int k_i = 0; k_i < d; ++k_i) {
          const double k = k_i - l;
          const double phase = -(k * t - kp * (t + dt));
          amp += std::polar(1.0, phase) * d_dt.at(kp, k) * dm * d_phalf.at(k, m);
        }
      }
      gamma.entries(mp_i, m_i) = std::norm(amp);
    }
  }
  return gamma;
}

std::vector<UnitOutcomeRecord> clock_measurement(const MachineSpec& spec,
                                                 const BlockState& state, double t_meas) {
  const Matrix basis = propagator(spec, Branch::Minus, t_meas) * spec.c_basis;
  const double pre_energy = joint_energy(spec, state);
  std::vector<UnitOutcomeRecord> records;
  records.reserve(spec.d);
  for (int m = 1; m <= spec.d; ++m) {
    const Vector v = basis.col(m - 1);
    const double w_psi = std::max(0.0, (v.adjoint() * state.block_psi * v)(0, 0).real());
    const double w_psibar = std::max(0.0, (v.adjoint() * state.block_psibar * v)(0, 0).real());
    const double prob = w_psi + w_psibar;
    if (prob < kProbabilityFloor) continue;
    UnitOutcomeRecord rec;
    rec.m = m;
    rec.probability = prob;
    rec.is_misfire = m != spec.d;
    const Matrix projector = v * v.adjoint();
    rec.post_state.block_psi = (w_psi / prob) * projector;
    rec.post_state.block_psibar = (w_psibar / prob) * projector;
    rec.energy_to_apparatus = pre_energy - joint_energy(spec, rec.post_state);
    if (rec.is_misfire) {
      rec.energy_to_apparatus += flip_energy_change(spec, rec.post_state);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

ThermModel ThermModel::subunit(int n_beta) {
  if (n_beta < 1) throw std::invalid_argument("n_beta must be >= 1");
  ThermModel m;
  m.kind = Kind::Subunit;
  m.n_beta = n_beta;
  return m;
}

ThermModel ThermModel::bosonic(int n_beta, double tau_beta) {
  if (n_beta < 1) throw std::invalid_argument("n_beta must be >= 1");
  if (tau_beta < 0.0) throw std::invalid_argument("tau_beta must be nonnegative");
  ThermModel m;
  m.kind = Kind::Bosonic;
  m.n_beta = n_beta;
  m.tau_beta = tau_beta;
  return m;
}

std::pair<std::vector<UnitOutcomeRecord>, BlockState> run_unit_protocol(
    const MachineSpec& spec, const BlockState& state, double t, double dt, double beta,
    const ThermModel& model) {
  if (dt < 0.0) throw std::invalid_argument("unit protocol duration must be nonnegative");
  BlockState current = state;
  const int steps = model.kind == ThermModel::Kind::InstantGibbs ? 1 : model.n_beta;
  const double sub_dt = dt / steps;
  for (int j = 0; j < steps; ++j) {
    current = model.kind == ThermModel::Kind::Bosonic
                  ? bosonic_equilibrate(spec, current, beta, model.tau_beta)
                  : gibbs_thermalize(spec, current, beta);
    current = conditional_evolve(spec, current, sub_dt);
  }
  return {clock_measurement(spec, current, t + dt), current};
}

} // namespace qtm
