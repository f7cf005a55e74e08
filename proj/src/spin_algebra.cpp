#include "qtm/spin_algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qtm {

double hermiticity_error(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

int twice_spin(double l) {
  const long t = std::lround(2.0 * l);
  if (t <= 0 || std::abs(2.0 * l - static_cast<double>(t)) > 1e-9) {
    throw std::invalid_argument("spin label must be a positive half-integer, got " +
                                std::to_string(l));
  }
  return static_cast<int>(t);
}

Matrix angular_momentum(double l, Axis axis) {
  const int d = twice_spin(l) + 1;
  if (axis == Axis::Z) {
    Matrix lz = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) lz(i, i) = l - i;
    return lz;
  }
  // ladder operator: <m+1|L_+|m> = sqrt(l(l+1) - m(m+1)), m = l - j
  Matrix lp = Matrix::Zero(d, d);
  for (int j = 1; j < d; ++j) {
    const double m = l - j;
    lp(j - 1, j) = std::sqrt(l * (l + 1.0) - m * (m + 1.0));
  }
  const Matrix lm = lp.adjoint();
  if (axis == Axis::X) return 0.5 * (lp + lm);
  return Complex(0.0, -0.5) * (lp - lm);  // Axis::Y
}

namespace {

Eigensystem decompose(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  return Eigensystem{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix evolve_from(const Eigensystem& eig, double t) {
  const auto phases =
      (Complex(0.0, -1.0) * t * eig.values.cast<Complex>().array()).exp().matrix();
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

} // namespace

MachineSpec make_machine(const Matrix& h_minus, const Matrix& h_plus) {
  if (h_minus.rows() != h_minus.cols() || h_plus.rows() != h_plus.cols() ||
      h_minus.rows() != h_plus.rows() || h_minus.rows() < 2) {
    throw std::invalid_argument("conditional Hamiltonians must be square, equal size, d >= 2");
  }
  if (hermiticity_error(h_minus) > kHermitianTol || hermiticity_error(h_plus) > kHermitianTol) {
    throw std::invalid_argument("conditional Hamiltonians must be Hermitian to 1e-12");
  }
  MachineSpec spec;
  spec.d = static_cast<int>(h_minus.rows());
  spec.l = 0.5 * (spec.d - 1);
  spec.h_minus = h_minus;
  spec.h_plus = h_plus;
  spec.h_int = 0.5 * (h_plus - h_minus);
  spec.h_free = 0.5 * (h_plus + h_minus);
  spec.c_op = Complex(0.0, 1.0) * (h_minus * h_plus - h_plus * h_minus);
  const Eigensystem c_eig = decompose(spec.c_op);
  spec.c_basis = c_eig.vectors;
  spec.c_values = c_eig.values;
  spec.eig_minus = decompose(h_minus);
  spec.eig_plus = decompose(h_plus);
  return spec;
}

MachineSpec build_spin_machine(double l) {
  const Matrix ly = angular_momentum(l, Axis::Y);
  const Matrix lz = angular_momentum(l, Axis::Z);
  const double s = 1.0 / std::sqrt(2.0);
  MachineSpec spec = make_machine(s * (ly - lz), s * (ly + lz));
  spec.l = l;
  spec.spin = true;
  return spec;
}

Matrix propagator(const MachineSpec& spec, Branch branch, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("propagator time must be finite");
  return evolve_from(branch == Branch::Minus ? spec.eig_minus : spec.eig_plus, t);
}

Vector clock_basis_state(const MachineSpec& spec, int m, double t) {
  if (m < 1 || m > spec.d) {
    throw std::out_of_range("clock basis index must be in 1..d, got " + std::to_string(m));
  }
  return propagator(spec, Branch::Minus, t) * spec.c_basis.col(m - 1);
}

double WignerBlock::at(double m_prime, double m) const {
  const long i = std::lround(l - m_prime);
  const long j = std::lround(l - m);
  return entries(i, j);
}

WignerBlock wigner_small_d(double l, double beta_angle) {
  const int t2l = twice_spin(l);
  const int d = t2l + 1;
  WignerBlock block{l, beta_angle, RealMatrix::Zero(d, d)};
  if (beta_angle == 0.0) {
    block.entries.setIdentity();
    return block;
  }
  // The alternating factorial sum cancels heavily at large l, so magnitudes
  // are kept in log space and everything is accumulated in extended
  // precision. Signs are tracked separately, 0^0 = 1.
  const long double c = cosl(0.5L * static_cast<long double>(beta_angle));
  const long double s = sinl(0.5L * static_cast<long double>(beta_angle));
  const long double log_c = c != 0.0L ? logl(fabsl(c)) : 0.0L;
  const long double log_s = s != 0.0L ? logl(fabsl(s)) : 0.0L;
  auto lfact = [](int n) { return lgammal(n + 1.0L); };
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      // m' = l - i, m = l - j
      const int jp_mp = t2l - i;  // l + m'
      const int jm_mp = i;        // l - m'
      const int jp_m = t2l - j;   // l + m
      const int jm_m = j;         // l - m
      const long double log_pref =
          0.5L * ((lfact(jp_m) + lfact(jm_m)) + (lfact(jp_mp) + lfact(jm_mp)));
      // summation index k: all four factorial arguments must stay >= 0
      const int lo = std::max(0, jm_mp - jm_m);  // k >= m - m'
      const int hi = std::min(jp_m, jm_mp);
      long double total = 0.0L;
      for (int k = lo; k <= hi; ++k) {
        const int pw_c = t2l - 2 * k + jm_mp - jm_m;  // 2l - 2k + m - m'
        const int pw_s = 2 * k + jm_m - jm_mp;        // 2k - m + m'
        if ((c == 0.0L && pw_c > 0) || (s == 0.0L && pw_s > 0)) continue;
        const long double log_den =
            lfact(jp_m - k) + lfact(k) + lfact(jm_mp - k) + lfact(pw_s - k);
        long double sign = (pw_s - k) % 2 == 0 ? 1.0L : -1.0L;  // (-1)^(k - m + m')
        sign *= (c < 0.0L && pw_c % 2 != 0) ? -1.0L : 1.0L;
        sign *= (s < 0.0L && pw_s % 2 != 0) ? -1.0L : 1.0L;
        total += sign * expl(log_pref - log_den + pw_c * log_c + pw_s * log_s);
      }
      block.entries(i, j) = static_cast<double>(total);
    }
  }
  return block;
}

namespace {

void validate_density_matrix(const Matrix& rho, int d) {
  if (rho.rows() != d || rho.cols() != d) {
    throw std::invalid_argument("density matrix has wrong dimension");
  }
  if (hermiticity_error(rho) > 1e-10) {
    throw std::invalid_argument("density matrix is not Hermitian to 1e-10");
  }
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10) {
    throw std::invalid_argument("density matrix trace is not 1 to 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("density matrix is not positive semidefinite to 1e-10");
  }
}

} // namespace

ConditionReport verify_design_conditions(const MachineSpec& spec, const Matrix& rho_m) {
  validate_density_matrix(rho_m, spec.d);
  ConditionReport report;
  report.h_int_expectation = (rho_m * spec.h_int).trace().real();
  report.h_minus_expectation = (rho_m * spec.h_minus).trace().real();
  const double c_max = spec.c_values(spec.d - 1);
  report.coherence_score = (rho_m * spec.c_op).trace().real() / c_max;
  report.degeneracy_ok = std::abs(report.h_int_expectation) < 1e-9;
  report.zero_ground_ok = std::abs(report.h_minus_expectation) < 1e-9;
  return report;
}

} // namespace qtm
