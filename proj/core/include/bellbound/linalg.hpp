#pragma once

// Dense complex linear algebra for 1-3 qubit operators.
//
// Basis convention: the computational basis state |xyz> of three qubits maps
// to index 4x + 2y + z, so party A is the most significant bit.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellbound {

using Complex = std::complex<double>;

/// Certification thresholds shared by every module. One record so the CLI can
/// override them (--tol-herm, --tol-psd) in a single place.
struct Tolerances {
  double hermiticity = 1e-10;   // max |m - m^dagger| accepted as Hermitian
  double psd = -1e-10;          // smallest eigenvalue still counted as >= 0
  double structure = 1e-12;     // PT-invariance, symmetry and trace residuals
  double orthonormality = 1e-10;
};

inline constexpr Tolerances kDefaultTolerances{};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  /// Row-major initializer; size must be a perfect square.
  ComplexMatrix(std::initializer_list<Complex> row_major);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  Complex trace() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

class Ket {
 public:
  Ket() = default;
  explicit Ket(std::size_t dim) : amplitudes_(dim) {}
  Ket(std::initializer_list<Complex> amplitudes) : amplitudes_(amplitudes) {}

  /// Basis vector |bits> for a bit string such as "011".
  static Ket basis(const std::string& bits);

  std::size_t dim() const { return amplitudes_.size(); }
  Complex& operator[](std::size_t i) { return amplitudes_[i]; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }

  double norm2() const;

  Ket& operator+=(const Ket& other);
  Ket& operator-=(const Ket& other);
  Ket& operator*=(Complex scale);
  friend Ket operator+(Ket a, const Ket& b) { return a += b; }
  friend Ket operator-(Ket a, const Ket& b) { return a -= b; }
  friend Ket operator*(Complex s, Ket a) { return a *= s; }

 private:
  std::vector<Complex> amplitudes_;
};

/// <bra|ket>, conjugate-linear in the first argument.
Complex inner(const Ket& bra, const Ket& ket);
/// |ket><ket|
ComplexMatrix projector(const Ket& ket);
Ket apply(const ComplexMatrix& m, const Ket& ket);

enum class Party { A = 0, B = 1, C = 2 };

/// perm[i] is the tensor slot that party i is moved to.
using PartyPermutation = std::array<int, 3>;

/// All six permutations of three parties, identity first.
const std::array<PartyPermutation, 6>& all_party_permutations();

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix dagger(const ComplexMatrix& m);

/// Transposes the indices of one qubit of a 3-qubit operator.
/// Throws DimensionError unless rho is 8x8.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, Party party);

/// U rho U^dagger where U sends |x_A x_B x_C> to the state whose slot perm[i]
/// holds x_i. Throws DimensionError unless rho is 8x8.
ComplexMatrix permute_parties(const ComplexMatrix& rho, const PartyPermutation& perm);

/// max_{r,c} |a(r,c) - b(r,c)|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double hermiticity_residual(const ComplexMatrix& m);

struct HermitianEigen {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k belongs to values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi diagonalization. Stops once the off-diagonal Frobenius norm
/// drops below 1e-13 or after 100 sweeps. Throws ContractViolation when the
/// input is not Hermitian within tol.hermiticity.
HermitianEigen eig_hermitian(const ComplexMatrix& m, const Tolerances& tol = kDefaultTolerances);

inline constexpr double kJacobiOffDiagonalThreshold = 1e-13;
inline constexpr int kJacobiMaxSweeps = 100;

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

}  // namespace bellbound
