#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "bellbound/bell.hpp"
#include "test_support.hpp"

using namespace bellbound;
using namespace bellbound::testing;

namespace {

// The 17-term symmetric expression written out by hand, as a function of the
// correlators <X_i Y_j ...>. E(a, b, c) returns the correlator with settings
// a, b, c for A, B, C (0 = absent).
template <class E>
double sliwa5_by_hand(E e) {
  double s = 0;
  s += e(1, 0, 0) + e(0, 1, 0) + e(0, 0, 1);
  s += e(1, 2, 0) + e(1, 0, 2) + e(2, 1, 0) + e(0, 1, 2) + e(2, 0, 1) + e(0, 2, 1);
  s -= e(2, 2, 0) + e(2, 0, 2) + e(0, 2, 2);
  s -= e(1, 1, 1);
  s -= e(2, 1, 1) + e(1, 2, 1) + e(1, 1, 2);
  s += e(2, 2, 2);
  return s;
}

// Brute-force local maximum of the hand-written form, outcomes as nested loops.
double hand_local_bound(int sign) {
  double best = -1e300;
  for (int a1 : {1, -1})
    for (int a2 : {1, -1})
      for (int b1 : {1, -1})
        for (int b2 : {1, -1})
          for (int c1 : {1, -1})
            for (int c2 : {1, -1}) {
              auto e = [&](int x, int y, int z) {
                const int va = x == 0 ? 1 : (x == 1 ? a1 : a2);
                const int vb = y == 0 ? 1 : (y == 1 ? b1 : b2);
                const int vc = z == 0 ? 1 : (z == 1 ? c1 : c2);
                return static_cast<double>(va * vb * vc);
              };
              best = std::max(best, sign * sliwa5_by_hand(e));
            }
  return best;
}

// Plain-loop tr(rho O_x (x) O_y (x) O_z), independent of the library's kron path.
double correlator_by_loops(const ComplexMatrix& rho, const std::array<ComplexMatrix, 3>& ops, int x, int y,
                           int z) {
  const std::array<int, 3> s{x, y, z};
  std::array<ComplexMatrix, 3> o{ComplexMatrix::identity(2), ComplexMatrix::identity(2), ComplexMatrix::identity(2)};
  for (int p = 0; p < 3; ++p)
    if (s[p] != 0) o[p] = ops[s[p]];
  Complex sum = 0;
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c)
      sum += rho(r, c) * o[0](c >> 2, r >> 2) * o[1]((c >> 1) & 1, (r >> 1) & 1) * o[2](c & 1, r & 1);
  return sum.real();
}

double s_by_hand(const ComplexMatrix& rho, const MeasurementAngles& t) {
  const double c1 = std::cos(t.theta1), s1 = std::sin(t.theta1), c2 = std::cos(t.theta2), s2 = std::sin(t.theta2);
  const std::array<ComplexMatrix, 3> ops{ComplexMatrix::identity(2), ComplexMatrix{c1, s1, s1, -c1},
                                         ComplexMatrix{c2, s2, s2, -c2}};
  return sliwa5_by_hand([&](int x, int y, int z) { return correlator_by_loops(rho, ops, x, y, z); });
}

}  // namespace

TEST_CASE("observable") {
  CHECK(max_abs_diff(observable(0), pauli::z()) <= 1e-16);
  CHECK(max_abs_diff(observable(kPi / 2), pauli::x()) <= 1e-15);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const auto o = observable(u(rng));
    CHECK(max_abs_diff(o * o, ComplexMatrix::identity(2)) <= 1e-14);
    CHECK(hermiticity_residual(o) == 0.0);
  }
}

TEST_CASE("monomials") {
  CHECK(monomial_name({1, 2, 0}) == "A1B2");
  CHECK(monomial_name({0, 0, 2}) == "C2");
  for (std::size_t i = 0; i < kMonomialCount; ++i) CHECK(monomial_index(monomial_at(i)) == i);
}

TEST_CASE("sliwa5 expression") {
  const auto s = BellExpression::sliwa5();
  CHECK(s.terms().size() == 17);
  CHECK(s.algebraic_maximum() == 17);
  CHECK(s.terms().at({1, 2, 0}) == 1);
  CHECK(s.terms().at({0, 2, 2}) == -1);
  CHECK(s.terms().at({1, 1, 2}) == -1);
  CHECK(s.terms().at({2, 2, 2}) == 1);

  SUBCASE("symmetrization counts distinct images once") {
    BellExpression e;
    e.add_symmetrized({1, 1, 1}, 1);
    CHECK(e.terms().size() == 1);
    BellExpression f;
    f.add_symmetrized({1, 1, 0}, 1);
    CHECK(f.terms().size() == 3);
    BellExpression g;
    g.add_symmetrized({1, 2, 0}, 1);
    CHECK(g.terms().size() == 6);
  }

  CHECK(s.negated().negated() == s);
  CHECK_THROWS(BellExpression().add({0, 0, 0}, 1));
}

TEST_CASE("correlation_tensor") {
  const auto mixed = correlation_tensor(DensityMatrix::maximally_mixed(), {0.3, 1.1});
  for (std::size_t i = 1; i < kMonomialCount; ++i) CHECK(std::abs(mixed.values()[i]) <= 1e-15);
  CHECK(evaluate(BellExpression::sliwa5(), mixed) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  // |000> with theta1 = 0: every setting-1 observable is sigma_z with outcome +1.
  const auto up = correlation_tensor(DensityMatrix::pure(Ket::basis("000")), {0.0, kPi / 2});
  for (std::size_t i = 1; i < kMonomialCount; ++i) {
    const auto m = monomial_at(i);
    const bool only_setting1 = std::none_of(m.begin(), m.end(), [](auto s) { return s == 2; });
    if (only_setting1) CHECK(up[m] == doctest::Approx(1.0));
    else CHECK(std::abs(up[m]) <= 1e-15);  // sigma_x on a z eigenstate
  }

  SUBCASE("matches plain-loop traces") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 20; ++i) {
      const DensityMatrix rho(random_density(rng, 8));
      const MeasurementAngles t{u(rng), u(rng)};
      CHECK(std::abs(evaluate(BellExpression::sliwa5(), correlation_tensor(rho, t)) - s_by_hand(rho.matrix(), t)) <=
            1e-12);
    }
  }
}

TEST_CASE("Bell value at the reported points") {
  const double main = evaluate(BellExpression::sliwa5(), correlation_tensor(main_state().rho, kMainTheta));
  CHECK(std::abs(main - 3.0069) <= 1e-3);
  CHECK(std::abs(main - s_by_hand(main_state().rho.matrix(), kMainTheta)) <= 1e-12);

  const double app = evaluate(BellExpression::sliwa5(), correlation_tensor(appendix_state().rho, kAppendixTheta));
  CHECK(std::abs(app - 3.0187) <= 1e-3);

  SUBCASE("never exceeds the algebraic maximum") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 200; ++i) {
      const DensityMatrix rho(random_density(rng, 8));
      CHECK(std::abs(evaluate(BellExpression::sliwa5(), correlation_tensor(rho, {u(rng), u(rng)}))) <= 17.0);
    }
  }

  SUBCASE("product states stay within the local bound") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    for (int i = 0; i < 200; ++i) {
      auto qubit = [&] {
        const double t = u(rng), p = u(rng);
        Ket k(2);
        k[0] = std::cos(t / 2);
        k[1] = std::polar(std::sin(t / 2), p);
        return projector(k);
      };
      const DensityMatrix rho(kron(kron(qubit(), qubit()), qubit()));
      CHECK(evaluate(BellExpression::sliwa5(), correlation_tensor(rho, {u(rng), u(rng)})) <= 3.0 + 1e-12);
    }
  }
}

TEST_CASE("local_bound") {
  const auto lb = local_bound(BellExpression::sliwa5());
  CHECK(lb.bound == 3.0);
  CHECK(lb.bound == hand_local_bound(1));
  CHECK_FALSE(lb.maximizers.empty());
  for (const auto& s : lb.maximizers) CHECK(evaluate_strategy(BellExpression::sliwa5(), s) == 3.0);

  const auto neg = local_bound(BellExpression::sliwa5().negated());
  CHECK(neg.bound == hand_local_bound(-1));

  BellExpression single;
  single.add({1, 0, 0}, 1);
  CHECK(local_bound(single).bound == 1.0);
  CHECK(local_bound(single).maximizers.size() == 32);

  BellExpression ghz_like;
  ghz_like.add({1, 1, 1}, 1);
  CHECK(local_bound(ghz_like).bound == 1.0);

  CHECK(local_bound(BellExpression()).bound == 0.0);
}

TEST_CASE("probability tables") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<DensityMatrix> states{main_state().rho, appendix_state().rho, DensityMatrix::maximally_mixed()};
  for (int i = 0; i < 20; ++i) states.emplace_back(random_density(rng, 8));
  for (const auto& rho : states) {
    const MeasurementAngles t{u(rng), u(rng)};
    const auto p = probability_distribution(rho, t);
    const auto rebuilt = correlators_from_probabilities(p);
    const auto direct = correlation_tensor(rho, t);
    for (std::size_t k = 0; k < kMonomialCount; ++k) CHECK(std::abs(rebuilt.values()[k] - direct.values()[k]) <= 1e-10);
    CHECK(normalization_residual(p) <= 1e-10);
    CHECK(no_signaling_residual(p) <= 1e-10);
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 2; ++a) CHECK(p(x, 0, 1, a, 1, 0) >= -1e-12);
  }

  SUBCASE("residuals detect a signalling table") {
    ProbabilityTable p = probability_distribution(DensityMatrix::maximally_mixed(), {0, 0});
    CHECK(no_signaling_residual(p) <= 1e-15);
    // Shift weight within A's outcome for x=1 depending on B's setting only.
    p(1, 1, 0, 0, 0, 0) += 0.1;
    p(1, 1, 0, 1, 0, 0) -= 0.1;
    CHECK(no_signaling_residual(p) >= 0.09);
    CHECK(normalization_residual(p) <= 1e-15);
    p(0, 0, 0, 0, 0, 0) += 0.2;
    CHECK(normalization_residual(p) == doctest::Approx(0.2));
  }
}

TEST_CASE("parse_expression") {
  const auto e = parse_expression("# single term\n1 A:1\n");
  CHECK(e.terms().size() == 1);
  CHECK(e.terms().at({1, 0, 0}) == 1);

  const auto roundtrip = parse_expression(format_expression(BellExpression::sliwa5()));
  CHECK(roundtrip == BellExpression::sliwa5());

  const auto merged = parse_expression("2 A:1 B:2\n-2 B:2 A:1\n3 C:2   # trailing comment\n");
  CHECK(merged.terms().size() == 1);
  CHECK(merged.terms().at({0, 0, 2}) == 3);

  auto error_at = [](std::string_view text) -> std::pair<int, int> {
    try {
      parse_expression(text);
    } catch (const ExpressionParseError& err) {
      return {err.line(), err.column()};
    }
    return {0, 0};
  };
  CHECK(error_at("1 A:1\nx A:1\n") == std::pair{2, 1});
  CHECK(error_at("1 D:1") == std::pair{1, 3});
  CHECK(error_at("1 A:3") == std::pair{1, 5});
  CHECK(error_at("1 A-1") == std::pair{1, 4});
  CHECK(error_at("1 A:1 A:2") == std::pair{1, 7});
  CHECK(error_at("1 A") == std::pair{1, 3});
  CHECK(error_at("\n\n  1") == std::pair{3, 4});
  CHECK(error_at("99999999999999999999 A:1") == std::pair{1, 1});
}
