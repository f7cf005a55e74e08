#include "qtm/accounting.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qtm/therm_models.hpp"

namespace qtm {

namespace {

// Rotating-frame cache: the clock basis at time t is
// v_minus * diag(exp(-i*lam*t)) * p_frame, evaluated fresh per step so no
// drift accumulates over long cycles.
struct FrameCache {
  Matrix v_minus;
  RealVector lam;
  Matrix p_frame;  // v_minus^dagger c_basis
  Matrix u_plus_dt;

  FrameCache(const MachineSpec& spec, double dt)
      : v_minus(spec.eig_minus.vectors),
        lam(spec.eig_minus.values),
        p_frame(spec.eig_minus.vectors.adjoint() * spec.c_basis),
        u_plus_dt(propagator(spec, Branch::Plus, dt)) {}

  Vector phases(double t) const {
    return (Complex(0.0, -1.0) * t * lam.cast<Complex>().array()).exp().matrix();
  }
  Matrix basis_at(double t) const { return v_minus * (phases(t).asDiagonal() * p_frame); }
  Vector reference_at(double t) const {
    return v_minus * (phases(t).asDiagonal() * p_frame.col(p_frame.cols() - 1));
  }
};

double expectation(const Matrix& op, const Vector& v) {
  return (v.adjoint() * op * v)(0, 0).real();
}

double shannon_nat(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p) {
    if (x > kProbabilityFloor) s -= x * std::log(x);
  }
  return s;
}

} // namespace

double success_energy(const MachineSpec& spec, double t, double dt, double p1) {
  if (p1 < 0.0 || p1 > 1.0) throw std::invalid_argument("p1 must be in [0, 1]");
  const Vector v0 = clock_basis_state(spec, spec.d, t);
  const Vector v1 = clock_basis_state(spec, spec.d, t + dt);
  const Complex amp = (v1.adjoint() * propagator(spec, Branch::Plus, dt) * v0)(0, 0);
  const double gamma_dd = std::norm(amp);
  const double p_d = (1.0 - p1) + p1 * gamma_dd;
  const double delta_t = expectation(spec.h_plus, v0);
  const double delta_td = expectation(spec.h_plus, v1);
  return p1 * (delta_t - (gamma_dd / p_d) * delta_td);
}

MisfireEnergy misfire_energy(const MachineSpec& spec, double t, double dt, double p1, int m) {
  if (p1 < 0.0 || p1 > 1.0) throw std::invalid_argument("p1 must be in [0, 1]");
  if (m < 1 || m >= spec.d) {
    throw std::invalid_argument("misfire orbit must be in 1..d-1");
  }
  const Vector v0 = clock_basis_state(spec, spec.d, t);
  const Vector vm = clock_basis_state(spec, m, t + dt);
  const double delta_t = expectation(spec.h_plus, v0);
  const double e_m = expectation(spec.h_plus, vm);
  MisfireEnergy e;
  e.measurement = p1 * delta_t - e_m;
  e.flip = -e_m;
  e.total = e.measurement + e.flip;
  return e;
}

double landauer_reset(const std::vector<double>& probabilities, double beta) {
  double sum = 0.0;
  for (double p : probabilities) {
    if (p < 0.0) throw std::invalid_argument("negative probability in outcome distribution");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("outcome distribution must sum to 1 within 1e-9");
  }
  return shannon_nat(probabilities) / beta;
}

HeatFlow heat_flow(const MachineSpec& spec, double t, double dt, double beta) {
  const Vector v0 = clock_basis_state(spec, spec.d, t);
  const Vector v1 = clock_basis_state(spec, spec.d, t + dt);
  const Complex amp = (v1.adjoint() * propagator(spec, Branch::Plus, dt) * v0)(0, 0);
  const double gamma_dd = std::norm(amp);
  const double delta_t = expectation(spec.h_plus, v0);
  const double delta_td = expectation(spec.h_plus, v1);
  const ThermalQubit before = thermal_qubit(delta_t, beta);
  const ThermalQubit after = thermal_qubit(delta_td, beta);
  const double p_d = before.p0 + before.p1 * gamma_dd;
  HeatFlow q;
  q.quantum = (after.p1 - before.p1 * gamma_dd / p_d) * delta_td;
  q.classical = (after.p1 - before.p1) * delta_td;
  return q;
}

CycleGrid make_grid(double dt, double tau_tilde, double tau_prime) {
  if (!(tau_tilde < tau_prime)) throw std::invalid_argument("tau_tilde must precede tau_prime");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double span = tau_prime - tau_tilde;
  const int n = std::max(1, static_cast<int>(std::lround(span / dt)));
  return CycleGrid{n, span / n, tau_tilde, tau_prime};
}

std::vector<UpQuantities> analytic_up_records(const MachineSpec& spec, double beta, double dt,
                                              double tau_tilde, double tau_prime) {
  const CycleGrid grid = make_grid(dt, tau_tilde, tau_prime);
  const FrameCache frame(spec, grid.dt);
  const int d = spec.d;

  std::vector<UpQuantities> records;
  records.reserve(grid.n_steps);
  Matrix basis_prev = frame.basis_at(tau_tilde);
  double weight_in = 0.0;  // raised weight entering the thermalisation
  for (int n = 1; n <= grid.n_steps; ++n) {
    const double t0 = tau_tilde + (n - 1) * grid.dt;
    const double t1 = tau_tilde + n * grid.dt;
    const Matrix basis_cur = frame.basis_at(t1);

    UpQuantities up;
    up.t_start = t0;
    up.dt = grid.dt;
    const double delta_t0 = expectation(spec.h_plus, basis_prev.col(d - 1));
    const ThermalQubit q = thermal_qubit(delta_t0, beta);
    up.heat = (q.p1 - weight_in) * delta_t0;

    // outcome amplitudes <m(t1)|U_plus|d(t0)>
    const Vector amps = basis_cur.adjoint() * (frame.u_plus_dt * basis_prev.col(d - 1));
    const double gamma_dd = std::norm(amps(d - 1));
    up.p_d = q.p0 + q.p1 * gamma_dd;
    const Matrix h_plus_basis = spec.h_plus * basis_cur;
    const double delta_t1 =
        (basis_cur.col(d - 1).adjoint() * h_plus_basis.col(d - 1))(0, 0).real();
    up.energy_d = q.p1 * (delta_t0 - (gamma_dd / up.p_d) * delta_t1);

    up.p_misfire.resize(d - 1);
    up.energy_misfire.resize(d - 1);
    std::vector<double> dist(d);
    dist[d - 1] = up.p_d;
    for (int m = 0; m < d - 1; ++m) {
      up.p_misfire[m] = q.p1 * std::norm(amps(m));
      const double e_m = (basis_cur.col(m).adjoint() * h_plus_basis.col(m))(0, 0).real();
      up.energy_misfire[m] = q.p1 * delta_t0 - 2.0 * e_m;
      dist[m] = up.p_misfire[m];
    }
    up.reset = landauer_reset(dist, beta);
    records.push_back(std::move(up));

    weight_in = q.p1 * gamma_dd / up.p_d;
    basis_prev = basis_cur;
  }
  return records;
}

std::vector<double> success_probabilities(const MachineSpec& spec, double beta, double dt,
                                          double tau_tilde, double tau_prime) {
  const CycleGrid grid = make_grid(dt, tau_tilde, tau_prime);
  const FrameCache frame(spec, grid.dt);
  std::vector<double> out;
  out.reserve(grid.n_steps);
  Vector ref_prev = frame.reference_at(tau_tilde);
  for (int n = 1; n <= grid.n_steps; ++n) {
    const Vector ref_cur = frame.reference_at(tau_tilde + n * grid.dt);
    const double delta_t0 = expectation(spec.h_plus, ref_prev);
    const ThermalQubit q = thermal_qubit(delta_t0, beta);
    const double gamma_dd = std::norm((ref_cur.adjoint() * (frame.u_plus_dt * ref_prev))(0, 0));
    out.push_back(q.p0 + q.p1 * gamma_dd);
    ref_prev = ref_cur;
  }
  return out;
}

std::vector<UpQuantities> simulated_up_records(const MachineSpec& spec, double beta, double dt,
                                               const ThermModel& model, double tau_tilde,
                                               double tau_prime) {
  const CycleGrid grid = make_grid(dt, tau_tilde, tau_prime);
  const int d = spec.d;
  const int steps = model.kind == ThermModel::Kind::InstantGibbs ? 1 : model.n_beta;
  const double sub_dt = grid.dt / steps;
  const Matrix u_minus = propagator(spec, Branch::Minus, sub_dt);
  const Matrix u_plus = propagator(spec, Branch::Plus, sub_dt);
  const FrameCache frame(spec, grid.dt);

  std::vector<UpQuantities> records;
  records.reserve(grid.n_steps);
  BlockState state = reference_state(spec, tau_tilde);
  for (int n = 1; n <= grid.n_steps; ++n) {
    UpQuantities up;
    up.t_start = tau_tilde + (n - 1) * grid.dt;
    up.dt = grid.dt;
    for (int j = 0; j < steps; ++j) {
      const double e0 = joint_energy(spec, state);
      state = model.kind == ThermModel::Kind::Bosonic
                  ? bosonic_equilibrate(spec, state, beta, model.tau_beta)
                  : gibbs_thermalize(spec, state, beta);
      up.heat += joint_energy(spec, state) - e0;
      state.block_psi = u_minus * state.block_psi * u_minus.adjoint();
      state.block_psibar = u_plus * state.block_psibar * u_plus.adjoint();
    }
    const double pre_energy = joint_energy(spec, state);
    const Matrix basis = frame.basis_at(tau_tilde + n * grid.dt);
    up.p_misfire.resize(d - 1);
    up.energy_misfire.resize(d - 1);
    std::vector<double> dist(d);
    BlockState post_d;
    for (int m = 0; m < d; ++m) {
      const Vector v = basis.col(m);
      const double w_psi = std::max(0.0, (v.adjoint() * state.block_psi * v)(0, 0).real());
      const double w_bar = std::max(0.0, (v.adjoint() * state.block_psibar * v)(0, 0).real());
      const double prob = w_psi + w_bar;
      dist[m] = prob;
      const double e_minus = expectation(spec.h_minus, v);
      const double e_plus = expectation(spec.h_plus, v);
      const double post_energy =
          prob > kProbabilityFloor ? (w_psi * e_minus + w_bar * e_plus) / prob : 0.0;
      if (m == d - 1) {
        if (prob < kProbabilityFloor) {
          throw std::runtime_error("reference-orbit outcome starved; cannot condition on it");
        }
        up.p_d = prob;
        up.energy_d = pre_energy - post_energy;
        const Matrix proj = v * v.adjoint();
        post_d.block_psi = (w_psi / prob) * proj;
        post_d.block_psibar = (w_bar / prob) * proj;
      } else {
        up.p_misfire[m] = prob;
        // measurement part plus the feedback flip's system-energy change
        const double flip = prob > kProbabilityFloor
                                ? (w_psi * e_plus + w_bar * e_minus) / prob - post_energy
                                : 0.0;
        up.energy_misfire[m] = (pre_energy - post_energy) + flip;
      }
    }
    up.reset = landauer_reset(dist, beta);
    records.push_back(std::move(up));
    state = post_d;
  }
  return records;
}

CycleLedger assemble_selective(const std::vector<UpQuantities>& records) {
  const int n_steps = static_cast<int>(records.size());
  CycleLedger ledger;
  ledger.mode = Mode::Selective;

  // survival prefixes: prefix[k] = prod_{n<=k} p_d(n)
  std::vector<double> prefix(n_steps + 1, 1.0);
  std::vector<double> work_d(n_steps + 1, 0.0);  // cumulative per-protocol work on success
  for (int n = 1; n <= n_steps; ++n) {
    const UpQuantities& up = records[n - 1];
    prefix[n] = prefix[n - 1] * up.p_d;
    work_d[n] = work_d[n - 1] + (up.energy_d - up.reset);
    ledger.w_ideal += up.energy_d;
    ledger.heat_in += up.heat;
  }

  // all-success term + abort-at-k partial work + misfire terms
  double w_avg = prefix[n_steps] * work_d[n_steps];
  for (int k = 1; k <= n_steps; ++k) {
    const UpQuantities& up = records[k - 1];
    const double reach = prefix[k - 1];
    const double p_fail = std::accumulate(up.p_misfire.begin(), up.p_misfire.end(), 0.0);
    w_avg += reach * p_fail * work_d[k - 1];
    double misfire_work = 0.0;
    for (size_t m = 0; m < up.p_misfire.size(); ++m) {
      misfire_work += up.p_misfire[m] * (up.energy_misfire[m] - up.reset);
    }
    w_avg += reach * misfire_work;
    ledger.reset_cost += reach * up.reset;
  }
  ledger.net_work = w_avg;
  ledger.energy_to_apparatus = w_avg + ledger.reset_cost;
  return ledger;
}

CycleLedger selective_cycle_average(const MachineSpec& spec, double beta, double dt,
                                    const ThermModel& model, double tau_tilde,
                                    double tau_prime) {
  const auto records = model.kind == ThermModel::Kind::InstantGibbs
                           ? analytic_up_records(spec, beta, dt, tau_tilde, tau_prime)
                           : simulated_up_records(spec, beta, dt, model, tau_tilde, tau_prime);
  return assemble_selective(records);
}

CycleLedger unselective_cycle_average(const MachineSpec& spec, double beta, double dt,
                                      const ThermModel& model, double tau_tilde,
                                      double tau_prime) {
  if (model.kind != ThermModel::Kind::InstantGibbs) {
    throw std::invalid_argument(
        "feedback-free cycle requires thermalisation that erases qubit memory each "
        "protocol; only instant Gibbs thermalisation is supported");
  }
  const CycleGrid grid = make_grid(dt, tau_tilde, tau_prime);
  const int d = spec.d;
  const FrameCache frame(spec, grid.dt);

  CycleLedger ledger;
  ledger.mode = Mode::Unselective;

  RealVector occupancy = RealVector::Zero(d);
  occupancy(d - 1) = 1.0;
  double energy = 0.0;
  double entropy = 0.0;
  double heat = 0.0;
  // raised qubit weight entering each step's thermalisation, per orbit
  RealVector weight_in = RealVector::Zero(d);

  Matrix basis_prev = frame.basis_at(tau_tilde);
  for (int n = 1; n <= grid.n_steps; ++n) {
    const Matrix basis_cur = frame.basis_at(tau_tilde + n * grid.dt);
    const Matrix amps = basis_cur.adjoint() * (frame.u_plus_dt * basis_prev);

    const Matrix h_prev = spec.h_plus * basis_prev;
    const Matrix h_cur = spec.h_plus * basis_cur;
    RealVector e_prev(d), e_cur(d);
    for (int m = 0; m < d; ++m) {
      e_prev(m) = (basis_prev.col(m).adjoint() * h_prev.col(m))(0, 0).real();
      e_cur(m) = (basis_cur.col(m).adjoint() * h_cur.col(m))(0, 0).real();
    }

    RealVector occupancy_next = RealVector::Zero(d);
    RealVector weight_next = RealVector::Zero(d);
    for (int m = 0; m < d; ++m) {
      if (occupancy(m) < kProbabilityFloor) continue;
      const ThermalQubit q = thermal_qubit(e_prev(m), beta);
      heat += occupancy(m) * (q.p1 - weight_in(m)) * e_prev(m);
      std::vector<double> column(d, 0.0);
      for (int mp = 0; mp < d; ++mp) {
        column[mp] = q.p1 * std::norm(amps(mp, m)) + (mp == m ? q.p0 : 0.0);
      }
      entropy += occupancy(m) * shannon_nat(column);
      for (int mp = 0; mp < d; ++mp) {
        const double p_step = column[mp];
        const double joint = occupancy(m) * p_step;
        if (joint < kProbabilityFloor) continue;
        const double gamma = std::norm(amps(mp, m));
        energy += joint * q.p1 * (e_prev(m) - (gamma / p_step) * e_cur(mp));
        occupancy_next(mp) += joint;
        const double w_out = mp == m ? q.p1 * gamma / p_step : 1.0;
        weight_next(mp) += joint * w_out;
      }
    }
    for (int mp = 0; mp < d; ++mp) {
      weight_next(mp) =
          occupancy_next(mp) > kProbabilityFloor ? weight_next(mp) / occupancy_next(mp) : 0.0;
    }
    occupancy = occupancy_next;
    weight_in = weight_next;
    basis_prev = basis_cur;
  }

  ledger.energy_to_apparatus = energy;
  ledger.reset_cost = entropy / beta;
  ledger.net_work = energy - ledger.reset_cost;
  ledger.heat_in = heat;

  // the all-success shot is the same trajectory in either mode
  for (const UpQuantities& up : analytic_up_records(spec, beta, dt, tau_tilde, tau_prime)) {
    ledger.w_ideal += up.energy_d;
  }
  return ledger;
}

} // namespace qtm
