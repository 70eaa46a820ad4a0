#include "bellbound/bell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>

namespace bellbound {

namespace {

// Projector (I + sign * O) / 2 for outcome index 0 (+1) or 1 (-1).
ComplexMatrix outcome_projector(const ComplexMatrix& obs, int outcome) {
  const double sign = outcome == 0 ? 1.0 : -1.0;
  return (ComplexMatrix::identity(2) + obs * Complex(sign)) * Complex(0.5);
}

double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // tr(a b) without forming the product.
  Complex sum = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t k = 0; k < a.dim(); ++k) sum += a(r, k) * b(k, r);
  if (std::abs(sum.imag()) > 1e-10) throw ContractViolation("expectation value has an imaginary part");
  return sum.real();
}

int outcome_sign(int outcome) { return outcome == 0 ? 1 : -1; }

}  // namespace

std::string monomial_name(const Monomial& m) {
  static constexpr char kParties[] = {'A', 'B', 'C'};
  std::string out;
  for (int party = 0; party < 3; ++party) {
    if (m[party] == 0) continue;
    out += kParties[party];
    out += static_cast<char>('0' + m[party]);
  }
  return out.empty() ? "1" : out;
}

ComplexMatrix observable(double theta) {
  return pauli::z() * Complex(std::cos(theta)) + pauli::x() * Complex(std::sin(theta));
}

BellExpression BellExpression::sliwa5() {
  BellExpression e;
  e.add_symmetrized({1, 0, 0}, +1);
  e.add_symmetrized({1, 2, 0}, +1);
  e.add_symmetrized({2, 2, 0}, -1);
  e.add_symmetrized({1, 1, 1}, -1);
  e.add_symmetrized({2, 1, 1}, -1);
  e.add_symmetrized({2, 2, 2}, +1);
  return e;
}

void BellExpression::add(const Monomial& m, int coefficient) {
  if (monomial_index(m) == 0) throw std::invalid_argument("the identity monomial is not a correlator");
  for (auto s : m)
    if (s > 2) throw std::invalid_argument("setting must be 0, 1 or 2");
  const int total = (terms_[m] += coefficient);
  if (total == 0) terms_.erase(m);
}

void BellExpression::add_symmetrized(const Monomial& m, int coefficient) {
  std::set<Monomial> images;
  for (const auto& perm : all_party_permutations()) {
    Monomial image{};
    for (int party = 0; party < 3; ++party) image[perm[party]] = m[party];
    images.insert(image);
  }
  for (const auto& image : images) add(image, coefficient);
}

BellExpression BellExpression::negated() const {
  BellExpression out;
  for (const auto& [m, coef] : terms_) out.terms_[m] = -coef;
  return out;
}

int BellExpression::algebraic_maximum() const {
  int sum = 0;
  for (const auto& [m, coef] : terms_) sum += std::abs(coef);
  return sum;
}

CorrelationTensor correlation_tensor(const DensityMatrix& rho, const MeasurementAngles& angles) {
  const std::array<ComplexMatrix, 3> ops{pauli::identity(), observable(angles.theta1), observable(angles.theta2)};
  CorrelationTensor tensor;
  for (std::size_t idx = 1; idx < kMonomialCount; ++idx) {
    const Monomial m = monomial_at(idx);
    const ComplexMatrix op = kron(kron(ops[m[0]], ops[m[1]]), ops[m[2]]);
    tensor[m] = real_trace_product(rho.matrix(), op);
  }
  return tensor;
}

double evaluate(const BellExpression& expr, const CorrelationTensor& tensor) {
  double s = 0.0;
  for (const auto& [m, coef] : expr.terms()) s += coef * tensor[m];
  return s;
}

double evaluate_strategy(const BellExpression& expr, const DeterministicStrategy& strategy) {
  double s = 0.0;
  for (const auto& [m, coef] : expr.terms()) {
    int product = 1;
    for (int party = 0; party < 3; ++party)
      if (m[party] != 0) product *= strategy[party][m[party] - 1];
    s += coef * product;
  }
  return s;
}

LocalBound local_bound(const BellExpression& expr) {
  LocalBound out;
  out.bound = -std::numeric_limits<double>::infinity();
  for (unsigned bits = 0; bits < 64; ++bits) {
    DeterministicStrategy strategy{};
    for (int party = 0; party < 3; ++party)
      for (int setting = 0; setting < 2; ++setting)
        strategy[party][setting] = (bits >> (2 * party + setting)) & 1u ? -1 : 1;
    const double value = evaluate_strategy(expr, strategy);
    if (value > out.bound) {
      out.bound = value;
      out.maximizers.clear();
    }
    if (value == out.bound) out.maximizers.push_back(strategy);
  }
  return out;
}

ProbabilityTable probability_distribution(const DensityMatrix& rho, const MeasurementAngles& angles) {
  const std::array<ComplexMatrix, 2> obs{observable(angles.theta1), observable(angles.theta2)};
  std::array<std::array<ComplexMatrix, 2>, 2> proj;  // [setting][outcome]
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) proj[x][a] = outcome_projector(obs[x], a);

  ProbabilityTable table;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
              const ComplexMatrix op = kron(kron(proj[x][a], proj[y][b]), proj[z][c]);
              table(x, y, z, a, b, c) = real_trace_product(rho.matrix(), op);
            }
  return table;
}

CorrelationTensor correlators_from_probabilities(const ProbabilityTable& p) {
  CorrelationTensor tensor;
  for (std::size_t idx = 1; idx < kMonomialCount; ++idx) {
    const Monomial m = monomial_at(idx);
    const int x = m[0] == 2 ? 1 : 0, y = m[1] == 2 ? 1 : 0, z = m[2] == 2 ? 1 : 0;
    double value = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          int sign = 1;
          if (m[0] != 0) sign *= outcome_sign(a);
          if (m[1] != 0) sign *= outcome_sign(b);
          if (m[2] != 0) sign *= outcome_sign(c);
          value += sign * p(x, y, z, a, b, c);
        }
    tensor[m] = value;
  }
  return tensor;
}

double normalization_residual(const ProbabilityTable& p) {
  double worst = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        double total = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) total += p(x, y, z, a, b, c);
        worst = std::max(worst, std::abs(total - 1.0));
      }
  return worst;
}

double no_signaling_residual(const ProbabilityTable& p) {
  // For each party k, the marginal of the other two parties must not depend
  // on k's setting.
  double worst = 0.0;
  for (int party = 0; party < 3; ++party) {
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2)
        for (int o1 = 0; o1 < 2; ++o1)
          for (int o2 = 0; o2 < 2; ++o2) {
            std::array<double, 2> marginal{};
            for (int s = 0; s < 2; ++s)
              for (int o = 0; o < 2; ++o) {
                std::array<int, 3> set{}, out{};
                int k = 0;
                for (int q = 0; q < 3; ++q) {
                  if (q == party) {
                    set[q] = s;
                    out[q] = o;
                  } else {
                    set[q] = k == 0 ? s1 : s2;
                    out[q] = k == 0 ? o1 : o2;
                    ++k;
                  }
                }
                marginal[s] += p(set[0], set[1], set[2], out[0], out[1], out[2]);
              }
            worst = std::max(worst, std::abs(marginal[0] - marginal[1]));
          }
  }
  return worst;
}

BellExpression parse_expression(std::string_view text) {
  BellExpression expr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::size_t col = 0;
    auto skip_ws = [&] {
      while (col < line.size() && (line[col] == ' ' || line[col] == '\t' || line[col] == '\r')) ++col;
    };
    skip_ws();
    if (col == line.size()) {
      if (end == text.size()) break;
      continue;
    }

    // coefficient
    const std::size_t coef_start = col;
    if (col < line.size() && (line[col] == '+' || line[col] == '-')) ++col;
    const std::size_t digits_start = col;
    while (col < line.size() && line[col] >= '0' && line[col] <= '9') ++col;
    if (col == digits_start) {
      throw ExpressionParseError(line_no, static_cast<int>(coef_start) + 1, "expected an integer coefficient");
    }
    int coef = 0;
    try {
      coef = std::stoi(std::string(line.substr(coef_start, col - coef_start)));
    } catch (const std::out_of_range&) {
      throw ExpressionParseError(line_no, static_cast<int>(coef_start) + 1, "coefficient out of range");
    }
    if (col < line.size() && line[col] != ' ' && line[col] != '\t' && line[col] != '\r') {
      throw ExpressionParseError(line_no, static_cast<int>(col) + 1, "expected whitespace after coefficient");
    }

    Monomial m{0, 0, 0};
    int factors = 0;
    for (skip_ws(); col < line.size(); skip_ws()) {
      const int factor_col = static_cast<int>(col) + 1;
      const char party = line[col];
      if (party != 'A' && party != 'B' && party != 'C') {
        throw ExpressionParseError(line_no, factor_col, std::string("expected party A, B or C, got '") + party + "'");
      }
      if (col + 2 >= line.size()) {
        throw ExpressionParseError(line_no, factor_col, "truncated factor, expected party:setting");
      }
      if (line[col + 1] != ':') throw ExpressionParseError(line_no, factor_col + 1, "expected ':'");
      const char setting = line[col + 2];
      if (setting != '1' && setting != '2') {
        throw ExpressionParseError(line_no, factor_col + 2, "setting must be 1 or 2");
      }
      const int idx = party - 'A';
      if (m[idx] != 0) throw ExpressionParseError(line_no, factor_col, std::string("party ") + party + " repeated");
      m[idx] = static_cast<std::uint8_t>(setting - '0');
      ++factors;
      col += 3;
      if (col < line.size() && line[col] != ' ' && line[col] != '\t' && line[col] != '\r') {
        throw ExpressionParseError(line_no, static_cast<int>(col) + 1, "expected whitespace between factors");
      }
    }
    if (factors == 0) throw ExpressionParseError(line_no, static_cast<int>(col) + 1, "term has no factors");
    expr.add(m, coef);
    if (end == text.size()) break;
  }
  return expr;
}

std::string format_expression(const BellExpression& expr) {
  std::ostringstream os;
  for (const auto& [m, coef] : expr.terms()) {
    os << coef;
    for (int party = 0; party < 3; ++party)
      if (m[party] != 0) os << ' ' << static_cast<char>('A' + party) << ':' << int(m[party]);
    os << '\n';
  }
  return os.str();
}

}  // namespace bellbound
