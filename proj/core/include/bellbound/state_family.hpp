#pragma once

// Symmetric, PT-invariant family of 3-qubit states
//
//   rho = p1 |psi1><psi1| + p2 (|psi2><psi2| + |psi3><psi3|) + p4 |psi4><psi4|
//
// parametrized by three angles (alpha, beta, gamma). The mixing angle omega and
// the weights are fixed by requiring rho = PT_C(rho); permutation symmetry then
// extends PT-invariance to every cut.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellbound/linalg.hpp"

namespace bellbound {

struct FamilyAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

struct Coefficients {
  double a1 = 0, b1 = 0, c1 = 0;
  double a2 = 0, b2 = 0;
  double a3 = 0, b3 = 0;
  double a4 = 0, b4 = 0, c4 = 0;
};

/// Coefficients of 2 a2 b2 A + a2^2 B + b2^2 C = 0, the condition left on
/// omega once the weights are eliminated.
struct AbcCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double discriminant() const { return a * a - b * c; }
};

struct OmegaSolutions {
  AbcCoefficients coeffs;
  double discriminant = 0.0;
  /// Index 0/1: arctan((-A + sqrt(D))/C) and arctan((-A - sqrt(D))/C);
  /// index 2/3: the same shifted by pi. All normalized to (-pi, pi].
  std::vector<double> branches;
};

struct Weights {
  double p1 = 0.0;
  double p2 = 0.0;  // also the weight of psi3
  double p4 = 0.0;
  double q = 0.0;   // 1 / det(M)

  bool nonnegative(double tol = 1e-10) const { return p1 >= -tol && p2 >= -tol && p4 >= -tol; }
  double normalization() const { return p1 + 2.0 * p2 + p4; }
};

/// 8x8 Hermitian unit-trace operator. Construction checks dimension,
/// Hermiticity and trace; positivity is left to certify().
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, const Tolerances& tol = kDefaultTolerances);

  static DensityMatrix maximally_mixed();
  static DensityMatrix pure(const Ket& ket);

  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

 private:
  ComplexMatrix m_;
};

enum class FamilyErrorKind { Infeasible, SingularSystem, InvalidWeights };

const char* to_string(FamilyErrorKind kind);

class FamilyError : public std::runtime_error {
 public:
  FamilyError(FamilyErrorKind kind, const std::string& what, std::optional<Weights> weights = std::nullopt)
      : std::runtime_error(what), kind_(kind), weights_(weights) {}

  FamilyErrorKind kind() const { return kind_; }
  /// Offending weights for InvalidWeights.
  const std::optional<Weights>& weights() const { return weights_; }

 private:
  FamilyErrorKind kind_;
  std::optional<Weights> weights_;
};

struct FamilyState {
  FamilyAngles angles;
  double omega = 0.0;
  Coefficients coefficients;
  Weights weights;
  std::array<Ket, 4> psi;
  DensityMatrix rho;
};

Coefficients coefficients_from_angles(const FamilyAngles& angles, double omega);

/// psi1..psi4 in the |xyz> -> 4x+2y+z basis.
std::array<Ket, 4> basis_states(const Coefficients& c);

/// A = b1 b4 (a4 c1 - b1 b4), B = -c1 (a1 b4^2 + a4 b1 c4), C = a4 (a1 b4 c1 + b1^2 c4).
AbcCoefficients abc_coefficients(const FamilyAngles& angles);

/// Residual of 2 a2 b2 A + a2^2 B + b2^2 C at a given omega.
double omega_residual(const AbcCoefficients& abc, double omega);

/// All omega branches for the angle triple. Throws FamilyError(Infeasible)
/// when A^2 - BC <= 0.
OmegaSolutions solve_omega(const FamilyAngles& angles);

inline constexpr double kSingularDeterminant = 1e-12;
inline constexpr double kNegativeWeightTolerance = 1e-10;

/// Closed-form weights q * adj(M) e3 without the positivity check.
/// Throws FamilyError(SingularSystem) when |det M| < 1e-12.
Weights closed_form_weights(const Coefficients& c);

/// The 3x3 system M (p1, p2, p4)^T = (0, 0, 1)^T.
std::array<std::array<double, 3>, 3> weight_system_matrix(const Coefficients& c);

/// Closed-form weights, rejecting any weight below -1e-10 with
/// FamilyError(InvalidWeights).
Weights solve_weights(const FamilyAngles& angles, double omega);

/// Residuals of the three PT-invariance equations for given weights.
std::array<double, 3> invariance_equation_residuals(const Coefficients& c, const Weights& w);

inline constexpr double kTanPoleWindow = 1e-9;

/// Inequality form of weight positivity. Returns nullopt when an angle sits
/// within 1e-9 of a point where the form divides by zero (tan poles of beta,
/// gamma, omega; tan(omega) = 0; cos(alpha) = 0).
std::optional<bool> positivity_from_inequalities(const FamilyAngles& angles, double omega, double q_sign);

/// positivity_from_inequalities with the pole cells decided directly from the
/// closed-form weights.
bool check_positivity_inequalities(const FamilyAngles& angles, double omega, double q_sign);

/// Builds the state at a given omega. Propagates FamilyError.
FamilyState assemble_state(const FamilyAngles& angles, double omega);

/// One state per omega branch with nonnegative weights. Throws
/// FamilyError(Infeasible) if there is no such branch.
std::vector<FamilyState> assemble_valid_states(const FamilyAngles& angles);

struct CertificationChecks {
  bool hermitian = false;
  bool unit_trace = false;
  bool positive = false;
  bool ppt = false;             // every partial transpose PSD
  bool pt_invariant = false;    // rho == PT_X(rho) for X = A, B, C
  bool symmetric = false;       // invariant under all six party permutations
  bool relations = false;       // the three imposed matrix-element relations
  bool orthonormal = true;      // only meaningful when kets are known

  bool biseparable_premise() const {
    return hermitian && unit_trace && positive && ppt && pt_invariant && symmetric && relations && orthonormal;
  }
};

struct CertificationRecord {
  double hermiticity_residual = 0.0;
  double trace_residual = 0.0;
  std::vector<double> spectrum;                        // rho
  std::array<std::vector<double>, 3> pt_spectra;       // PT_A, PT_B, PT_C
  double min_eigenvalue = 0.0;
  std::array<double, 3> pt_min_eigenvalues{};
  std::array<double, 3> pt_residuals{};                // max |rho - PT_X(rho)|
  double symmetry_residual = 0.0;                      // max over six permutations
  std::array<double, 3> relation_residuals{};
  std::optional<double> orthonormality_residual;
  CertificationChecks checks;

  bool passed() const { return checks.biseparable_premise(); }
};

/// Element relations rho_{000,011} = rho_{001,010}, rho_{010,111} = rho_{011,110},
/// rho_{000,111} = rho_{001,110}, returned as absolute differences.
std::array<double, 3> imposed_relation_residuals(const ComplexMatrix& rho);

CertificationRecord certify(const ComplexMatrix& rho, const Tolerances& tol = kDefaultTolerances);
CertificationRecord certify(const FamilyState& state, const Tolerances& tol = kDefaultTolerances);

/// max |<psi_j|psi_k> - delta_jk|
double orthonormality_residual(const std::array<Ket, 4>& psi);

}  // namespace bellbound
