#include "bellbound/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bellbound {

namespace {

void require_three_qubits(const ComplexMatrix& m, const char* what) {
  if (m.dim() != 8) {
    throw DimensionError(std::string(what) + ": expected an 8x8 operator, got " +
                         std::to_string(m.dim()) + "x" + std::to_string(m.dim()));
  }
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

// Bit of qubit `slot` (0 = A = most significant) in a 3-qubit index.
constexpr unsigned bit_of(unsigned index, int slot) { return (index >> (2 - slot)) & 1u; }

double off_diagonal_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c)
      if (r != c) sum += std::norm(a(r, c));
  return std::sqrt(sum);
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::initializer_list<Complex> row_major) : data_(row_major) {
  auto dim = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(data_.size()))));
  if (dim * dim != data_.size()) throw DimensionError("initializer is not a square matrix");
  dim_ = dim;
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(dim_, other.dim_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(dim_, other.dim_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : data_) z *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.dim(), b.dim());
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex ark = a(r, k);
      if (ark == Complex{}) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

Ket Ket::basis(const std::string& bits) {
  Ket k(std::size_t{1} << bits.size());
  std::size_t index = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("basis label must be a bit string: " + bits);
    index = 2 * index + static_cast<std::size_t>(ch - '0');
  }
  k[index] = 1.0;
  return k;
}

double Ket::norm2() const {
  return std::accumulate(amplitudes_.begin(), amplitudes_.end(), 0.0,
                         [](double acc, const Complex& z) { return acc + std::norm(z); });
}

Ket& Ket::operator+=(const Ket& other) {
  require_same_dim(dim(), other.dim());
  for (std::size_t i = 0; i < dim(); ++i) amplitudes_[i] += other.amplitudes_[i];
  return *this;
}

Ket& Ket::operator-=(const Ket& other) {
  require_same_dim(dim(), other.dim());
  for (std::size_t i = 0; i < dim(); ++i) amplitudes_[i] -= other.amplitudes_[i];
  return *this;
}

Ket& Ket::operator*=(Complex scale) {
  for (auto& z : amplitudes_) z *= scale;
  return *this;
}

Complex inner(const Ket& bra, const Ket& ket) {
  require_same_dim(bra.dim(), ket.dim());
  Complex sum = 0.0;
  for (std::size_t i = 0; i < ket.dim(); ++i) sum += std::conj(bra[i]) * ket[i];
  return sum;
}

ComplexMatrix projector(const Ket& ket) {
  ComplexMatrix m(ket.dim());
  for (std::size_t r = 0; r < ket.dim(); ++r)
    for (std::size_t c = 0; c < ket.dim(); ++c) m(r, c) = ket[r] * std::conj(ket[c]);
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim(), m = b.dim();
  ComplexMatrix out(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) out(i * m + k, j * m + l) = a(i, j) * b(k, l);
  return out;
}

Ket apply(const ComplexMatrix& m, const Ket& ket) {
  require_same_dim(m.dim(), ket.dim());
  Ket out(ket.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) out[r] += m(r, c) * ket[c];
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& m) {
  ComplexMatrix out(m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) out(c, r) = std::conj(m(r, c));
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, Party party) {
  require_three_qubits(rho, "partial_transpose");
  const unsigned mask = 1u << (2 - static_cast<int>(party));
  ComplexMatrix out(8);
  for (unsigned r = 0; r < 8; ++r)
    for (unsigned c = 0; c < 8; ++c) {
      // Swap the chosen party's bit between the row and column labels.
      const unsigned r2 = (r & ~mask) | (c & mask);
      const unsigned c2 = (c & ~mask) | (r & mask);
      out(r, c) = rho(r2, c2);
    }
  return out;
}

const std::array<PartyPermutation, 6>& all_party_permutations() {
  static const std::array<PartyPermutation, 6> perms{{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
  }};
  return perms;
}

ComplexMatrix permute_parties(const ComplexMatrix& rho, const PartyPermutation& perm) {
  require_three_qubits(rho, "permute_parties");
  auto sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != PartyPermutation{0, 1, 2}) throw std::invalid_argument("permute_parties: not a permutation of {0,1,2}");

  std::array<unsigned, 8> image{};
  for (unsigned x = 0; x < 8; ++x) {
    unsigned y = 0;
    for (int party = 0; party < 3; ++party) y |= bit_of(x, party) << (2 - perm[party]);
    image[x] = y;
  }
  ComplexMatrix out(8);
  for (unsigned r = 0; r < 8; ++r)
    for (unsigned c = 0; c < 8; ++c) out(image[r], image[c]) = rho(r, c);
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.dim(), b.dim());
  double worst = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  return worst;
}

double hermiticity_residual(const ComplexMatrix& m) {
  double worst = 0.0;
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = r; c < m.dim(); ++c) worst = std::max(worst, std::abs(m(r, c) - std::conj(m(c, r))));
  return worst;
}

HermitianEigen eig_hermitian(const ComplexMatrix& m, const Tolerances& tol) {
  if (!m.all_finite()) throw ContractViolation("eig_hermitian: non-finite entries");
  const double herm = hermiticity_residual(m);
  if (herm > tol.hermiticity) {
    throw ContractViolation("eig_hermitian: input is not Hermitian (residual " + std::to_string(herm) + ")");
  }

  const std::size_t n = m.dim();
  // Work on the exactly Hermitian part.
  ComplexMatrix a = 0.5 * (m + dagger(m));
  ComplexMatrix v = ComplexMatrix::identity(n);

  int sweep = 0;
  while (sweep < kJacobiMaxSweeps && off_diagonal_norm(a) >= kJacobiOffDiagonalThreshold) {
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        // Phase-rotate the pair to make a(p,q) real, then apply a real rotation
        // with tan(2t) = 2r / (a_qq - a_pp).
        const Complex phase = a(p, q) / r;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double t = 0.5 * std::atan2(2.0 * r, aqq - app);
        const double cs = std::cos(t), sn = std::sin(t);
        const Complex gpp = cs, gpq = sn;
        const Complex gqp = -sn * std::conj(phase), gqq = cs * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  HermitianEigen out;
  out.sweeps = sweep;
  out.values.reserve(n);
  out.vectors = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values.push_back(a(order[k], order[k]).real());
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

namespace pauli {
ComplexMatrix identity() { return ComplexMatrix::identity(2); }
ComplexMatrix x() { return ComplexMatrix{0.0, 1.0, 1.0, 0.0}; }
ComplexMatrix y() { return ComplexMatrix{0.0, Complex(0, -1), Complex(0, 1), 0.0}; }
ComplexMatrix z() { return ComplexMatrix{1.0, 0.0, 0.0, -1.0}; }
}  // namespace pauli

}  // namespace bellbound
