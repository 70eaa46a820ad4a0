#pragma once

// Three parties, two dichotomic settings each, correlator (+-1) form.

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bellbound/linalg.hpp"
#include "bellbound/state_family.hpp"

namespace bellbound {

/// Per-party setting of a correlator monomial: 0 = party absent, 1 or 2 = setting.
using Monomial = std::array<std::uint8_t, 3>;

inline constexpr std::size_t kMonomialCount = 27;  // 3^3, index 0 is the identity

constexpr std::size_t monomial_index(const Monomial& m) { return 9u * m[0] + 3u * m[1] + m[2]; }
constexpr Monomial monomial_at(std::size_t index) {
  return {static_cast<std::uint8_t>(index / 9), static_cast<std::uint8_t>((index / 3) % 3),
          static_cast<std::uint8_t>(index % 3)};
}

/// e.g. "A1B2", "C1", "1" for the identity.
std::string monomial_name(const Monomial& m);

struct MeasurementAngles {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

/// cos(theta) sigma_z + sin(theta) sigma_x
ComplexMatrix observable(double theta);

class CorrelationTensor {
 public:
  CorrelationTensor() { values_.fill(0.0); values_[0] = 1.0; }

  double operator[](const Monomial& m) const { return values_[monomial_index(m)]; }
  double& operator[](const Monomial& m) { return values_[monomial_index(m)]; }
  const std::array<double, kMonomialCount>& values() const { return values_; }

 private:
  std::array<double, kMonomialCount> values_;
};

class BellExpression {
 public:
  BellExpression() = default;

  /// The symmetric inequality S = sym[A1 + A1B2 - A2B2 - A1B1C1 - A2B1C1 + A2B2C2]
  /// with local bound 3.
  static BellExpression sliwa5();

  /// Adds coefficient to every distinct monomial obtained by permuting parties
  /// (duplicates counted once, so sym[A1B1] = A1B1 + A1C1 + B1C1).
  void add_symmetrized(const Monomial& m, int coefficient);
  void add(const Monomial& m, int coefficient);

  const std::map<Monomial, int>& terms() const { return terms_; }
  BellExpression negated() const;
  /// Sum of |coefficients|, an upper bound for any no-signalling value.
  int algebraic_maximum() const;

  bool operator==(const BellExpression&) const = default;

 private:
  std::map<Monomial, int> terms_;
};

/// Expectation values tr(rho O1 (x) O2 (x) O3) with identical settings for all parties.
CorrelationTensor correlation_tensor(const DensityMatrix& rho, const MeasurementAngles& angles);

double evaluate(const BellExpression& expr, const CorrelationTensor& tensor);

/// outcome[party][setting - 1] in {+1, -1}
using DeterministicStrategy = std::array<std::array<int, 2>, 3>;

struct LocalBound {
  double bound = 0.0;
  std::vector<DeterministicStrategy> maximizers;
};

/// Exhaustive maximum over the 64 deterministic strategies.
LocalBound local_bound(const BellExpression& expr);

double evaluate_strategy(const BellExpression& expr, const DeterministicStrategy& strategy);

/// p(abc|xyz) indexed [x][y][z][a][b][c]; settings 0/1, outcome 0 = +1, 1 = -1.
class ProbabilityTable {
 public:
  double& operator()(int x, int y, int z, int a, int b, int c) { return p_[offset(x, y, z, a, b, c)]; }
  double operator()(int x, int y, int z, int a, int b, int c) const { return p_[offset(x, y, z, a, b, c)]; }

 private:
  static std::size_t offset(int x, int y, int z, int a, int b, int c) {
    return static_cast<std::size_t>(((((x * 2 + y) * 2 + z) * 2 + a) * 2 + b) * 2 + c);
  }
  std::array<double, 64> p_{};
};

ProbabilityTable probability_distribution(const DensityMatrix& rho, const MeasurementAngles& angles);

/// Correlators rebuilt from outcome statistics. Monomials with absent parties
/// read the marginal at setting 1 for those parties.
CorrelationTensor correlators_from_probabilities(const ProbabilityTable& p);

/// Largest deviation of any conditional distribution's total from 1.
double normalization_residual(const ProbabilityTable& p);
/// Largest change of any one- or two-party marginal when an absent party's setting changes.
double no_signaling_residual(const ProbabilityTable& p);

class ExpressionParseError : public std::runtime_error {
 public:
  ExpressionParseError(int line, int column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// One term per line: "coef party:setting [party:setting ...]", parties A|B|C,
/// settings 1|2, '#' starts a comment.
BellExpression parse_expression(std::string_view text);

/// Inverse of parse_expression, terms in monomial order.
std::string format_expression(const BellExpression& expr);

}  // namespace bellbound
