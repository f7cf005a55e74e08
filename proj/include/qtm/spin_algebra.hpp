#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qtm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kHermitianTol = 1e-12;

enum class Axis { X, Y, Z };
enum class Branch { Minus, Plus };

struct Eigensystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns, orthonormal
};

/// The machine "hardware": the two conditional clock Hamiltonians, the
/// operators derived from them, and cached spectral data. Everything is
/// immutable after construction and safe to share across threads.
///
/// Conventions: the clock basis |m>, m = 1..d, is the eigenbasis of
/// c_op = i[h_minus, h_plus] with eigenvalues ascending, stored as the
/// columns of c_basis. Orbit d is the reference orbit. Time is measured
/// in radians of clock phase, tau = 2*pi, hbar = 1.
struct MachineSpec {
  double l = 0.0;  // spin label, (d-1)/2
  int d = 0;
  Matrix h_minus;  // clock Hamiltonian conditioned on the qubit ground state
  Matrix h_plus;   // ... on the raised state
  Matrix h_int;    // (h_plus - h_minus)/2, the level-splitting generator
  Matrix h_free;   // (h_plus + h_minus)/2
  Matrix c_op;     // i[h_minus, h_plus]
  Matrix c_basis;  // eigenvectors of c_op, ascending eigenvalues
  RealVector c_values;
  Eigensystem eig_minus;
  Eigensystem eig_plus;
  double tau = 2.0 * kPi;
  bool spin = false;  // true when built by build_spin_machine
};

/// Standard spin-l angular momentum operator, d = 2l+1. Basis ordering is
/// conventional: row/column i corresponds to magnetic number m = l - i, so
/// the z operator is diag(l, l-1, ..., -l).
/// Throws std::invalid_argument unless 2l is a positive integer.
Matrix angular_momentum(double l, Axis axis);

/// Builds a machine from arbitrary conditional Hamiltonians. Both must be
/// Hermitian to 1e-12 (max element deviation) and of equal size.
MachineSpec make_machine(const Matrix& h_minus, const Matrix& h_plus);

/// The SU(2) machine: h_pm = (L_y +- L_z)/sqrt(2), for which
/// c_op = -L_x and all three operators have spectrum {-l, ..., l}.
MachineSpec build_spin_machine(double l);

/// U_pm(t) = exp(-i h_pm t), evaluated from the cached eigendecomposition.
Matrix propagator(const MachineSpec& spec, Branch branch, double t);

/// Rotating clock basis state |m(t)> = U_minus(t)|m>, m in 1..d.
Vector clock_basis_state(const MachineSpec& spec, int m, double t);

/// One rotation block d^l_{m'm}(beta). entries(i, j) = d^l_{m'm} with
/// m' = l - i and m = l - j (conventional descending ordering), equal to
/// <m'|exp(-i L_y beta)|m>.
struct WignerBlock {
  double l = 0.0;
  double beta_angle = 0.0;
  RealMatrix entries;

  double at(double m_prime, double m) const;
};

/// Wigner small-d block from the explicit factorial sum, evaluated with
/// log-gamma arithmetic and sign tracking so large l does not overflow.
/// Terms whose factorial arguments go negative are skipped.
WignerBlock wigner_small_d(double l, double beta_angle);

/// Numbers behind the three machine design conditions for a candidate
/// initial clock state: <h_int>, <h_minus>, and the normalised coherence
/// score tr[rho c_op]/lambda_max(c_op) in [-1, 1]. The first two pass when
/// they vanish to 1e-9; the score is reported raw and the caller sets the
/// bar for "large".
struct ConditionReport {
  double h_int_expectation = 0.0;
  double h_minus_expectation = 0.0;
  double coherence_score = 0.0;
  bool degeneracy_ok = false;   // |<h_int>| < 1e-9
  bool zero_ground_ok = false;  // |<h_minus>| < 1e-9
};

/// rho_m must be a valid density matrix (Hermitian, PSD, unit trace, all to
/// 1e-10); throws std::invalid_argument otherwise.
ConditionReport verify_design_conditions(const MachineSpec& spec, const Matrix& rho_m);

// -- small shared helpers ----------------------------------------------------

/// Max element deviation from Hermiticity.
double hermiticity_error(const Matrix& m);

/// Rounds 2l and validates it is a positive integer; returns 2l.
int twice_spin(double l);

} // namespace qtm
