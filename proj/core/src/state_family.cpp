#include "bellbound/state_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bellbound {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt6 = std::sqrt(6.0);

double normalize_angle(double x) {
  double r = std::remainder(x, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Ket ket(const char* bits) { return Ket::basis(bits); }

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

const char* to_string(FamilyErrorKind kind) {
  switch (kind) {
    case FamilyErrorKind::Infeasible: return "infeasible";
    case FamilyErrorKind::SingularSystem: return "singular-system";
    case FamilyErrorKind::InvalidWeights: return "invalid-weights";
  }
  return "unknown";
}

DensityMatrix::DensityMatrix(ComplexMatrix m, const Tolerances& tol) : m_(std::move(m)) {
  if (m_.dim() != 8) throw DimensionError("DensityMatrix: expected 8x8, got dim " + std::to_string(m_.dim()));
  if (!m_.all_finite()) throw ContractViolation("DensityMatrix: non-finite entries");
  if (hermiticity_residual(m_) > tol.hermiticity) throw ContractViolation("DensityMatrix: not Hermitian");
  if (std::abs(m_.trace() - Complex(1.0)) > tol.hermiticity) throw ContractViolation("DensityMatrix: trace is not 1");
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(ComplexMatrix::identity(8) * Complex(0.125)); }

DensityMatrix DensityMatrix::pure(const Ket& k) {
  const double n2 = k.norm2();
  if (!(n2 > 0.0)) throw ContractViolation("DensityMatrix::pure: zero vector");
  return DensityMatrix(projector(k) * Complex(1.0 / n2));
}

Coefficients coefficients_from_angles(const FamilyAngles& angles, double omega) {
  const double sa = std::sin(angles.alpha), ca = std::cos(angles.alpha);
  const double sb = std::sin(angles.beta), cb = std::cos(angles.beta);
  const double sg = std::sin(angles.gamma), cg = std::cos(angles.gamma);
  const double sw = std::sin(omega), cw = std::cos(omega);

  Coefficients c;
  c.a1 = sa * sb;
  c.b1 = cb / kSqrt3;
  c.c1 = ca * sb;
  c.a4 = ca * sg;
  c.b4 = cg / kSqrt3;
  c.c4 = sa * sg;
  c.a2 = cw / kSqrt6;
  c.b2 = sw / kSqrt6;
  c.a3 = cw / kSqrt2;
  c.b3 = sw / kSqrt2;
  return c;
}

std::array<Ket, 4> basis_states(const Coefficients& c) {
  Ket psi1 = c.a1 * ket("000") - c.b1 * (ket("001") + ket("010") + ket("100")) + c.c1 * ket("111");
  Ket psi2 = -c.a2 * (ket("001") - 2.0 * ket("010") + ket("100")) + c.b2 * (ket("011") - 2.0 * ket("101") + ket("110"));
  Ket psi3 = c.a3 * (ket("100") - ket("001")) + c.b3 * (ket("110") - ket("011"));
  Ket psi4 = -c.a4 * ket("000") + c.b4 * (ket("011") + ket("101") + ket("110")) + c.c4 * ket("111");
  return {std::move(psi1), std::move(psi2), std::move(psi3), std::move(psi4)};
}

AbcCoefficients abc_coefficients(const FamilyAngles& angles) {
  // A, B, C only involve the omega-independent coefficients.
  const Coefficients c = coefficients_from_angles(angles, 0.0);
  AbcCoefficients abc;
  abc.a = c.b1 * c.b4 * (c.a4 * c.c1 - c.b1 * c.b4);
  abc.b = -c.c1 * (c.a1 * c.b4 * c.b4 + c.a4 * c.b1 * c.c4);
  abc.c = c.a4 * (c.a1 * c.b4 * c.c1 + c.b1 * c.b1 * c.c4);
  return abc;
}

double omega_residual(const AbcCoefficients& abc, double omega) {
  const double a2 = std::cos(omega) / kSqrt6, b2 = std::sin(omega) / kSqrt6;
  return 2.0 * a2 * b2 * abc.a + a2 * a2 * abc.b + b2 * b2 * abc.c;
}

OmegaSolutions solve_omega(const FamilyAngles& angles) {
  OmegaSolutions out;
  out.coeffs = abc_coefficients(angles);
  out.discriminant = out.coeffs.discriminant();
  if (!(out.discriminant > 0.0)) {
    throw FamilyError(FamilyErrorKind::Infeasible,
                      "A^2 - BC = " + std::to_string(out.discriminant) + " is not positive; no real omega");
  }

  // Roots of C t^2 + 2A t + B = 0 in t = tan(omega), written without
  // cancellation: t_big = s / C and t_small = B / s with s = -A - sign(A) sqrt(D).
  // When C vanishes t_big runs off to infinity, i.e. omega = pi/2 (a2 = 0).
  const auto& [a, b, c] = out.coeffs;
  const double root = std::sqrt(out.discriminant);
  const double s = -a - sign_of(a) * root;
  const double omega_big = std::atan2(s, c);           // arctan(s / C), up to pi
  const double omega_small = std::atan(b / s);

  // The "+" root of (-A +- sqrt(D)) / C is the cancellation-prone one when A >= 0.
  double omega_plus = a >= 0.0 ? omega_small : omega_big;
  double omega_minus = a >= 0.0 ? omega_big : omega_small;
  omega_plus = normalize_angle(omega_plus);
  omega_minus = normalize_angle(omega_minus);

  // atan2 may land in either half-plane; canonicalize the first pair to
  // (-pi/2, pi/2] so index 0/1 match the principal arctan.
  auto principal = [](double w) {
    if (w > kPi / 2.0) return w - kPi;
    if (w <= -kPi / 2.0) return w + kPi;
    return w;
  };
  omega_plus = principal(omega_plus);
  omega_minus = principal(omega_minus);

  out.branches = {omega_plus, omega_minus, normalize_angle(omega_plus + kPi), normalize_angle(omega_minus + kPi)};
  return out;
}

std::array<std::array<double, 3>, 3> weight_system_matrix(const Coefficients& c) {
  return {{
      {c.b1 * c.b1, -2.0 * c.a2 * c.a2, c.a4 * c.b4},
      {c.b1 * c.c1, -2.0 * c.b2 * c.b2, c.b4 * c.b4},
      {1.0, 2.0, 1.0},
  }};
}

Weights closed_form_weights(const Coefficients& c) {
  const auto m = weight_system_matrix(c);
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (!(std::abs(det) >= kSingularDeterminant)) {
    throw FamilyError(FamilyErrorKind::SingularSystem, "det(M) = " + std::to_string(det) + " is numerically zero");
  }
  Weights w;
  w.q = 1.0 / det;
  w.p1 = w.q * (2.0 * c.a4 * c.b2 * c.b2 * c.b4 - 2.0 * c.a2 * c.a2 * c.b4 * c.b4);
  w.p2 = w.q * (-c.b1 * c.b1 * c.b4 * c.b4 + c.a4 * c.b1 * c.b4 * c.c1);
  w.p4 = w.q * (-2.0 * c.b1 * c.b1 * c.b2 * c.b2 + 2.0 * c.a2 * c.a2 * c.b1 * c.c1);
  return w;
}

Weights solve_weights(const FamilyAngles& angles, double omega) {
  const Weights w = closed_form_weights(coefficients_from_angles(angles, omega));
  if (!w.nonnegative(kNegativeWeightTolerance)) {
    throw FamilyError(FamilyErrorKind::InvalidWeights,
                      "negative weight: p1=" + std::to_string(w.p1) + " p2=" + std::to_string(w.p2) +
                          " p4=" + std::to_string(w.p4),
                      w);
  }
  return w;
}

std::array<double, 3> invariance_equation_residuals(const Coefficients& c, const Weights& w) {
  return {
      std::abs(-c.a4 * c.b4 * w.p4 - (c.b1 * c.b1 * w.p1 - 2.0 * c.a2 * c.a2 * w.p2)),
      std::abs(-c.b1 * c.c1 * w.p1 - (-2.0 * c.b2 * c.b2 * w.p2 + c.b4 * c.b4 * w.p4)),
      std::abs(-4.0 * c.a2 * c.b2 * w.p2 - (c.a1 * c.c1 * w.p1 - c.a4 * c.c4 * w.p4)),
  };
}

std::optional<bool> positivity_from_inequalities(const FamilyAngles& angles, double omega, double q_sign) {
  const double cos_alpha = std::cos(angles.alpha);
  const bool near_pole = std::abs(std::cos(angles.beta)) < kTanPoleWindow ||
                         std::abs(std::cos(angles.gamma)) < kTanPoleWindow ||
                         std::abs(std::cos(omega)) < kTanPoleWindow ||
                         std::abs(std::sin(omega)) < kTanPoleWindow || std::abs(cos_alpha) < kTanPoleWindow;
  if (near_pole) return std::nullopt;

  const double tan2_omega = std::pow(std::tan(omega), 2);
  // p1 >= 0 and p4 >= 0 reduce to these two inequalities, with the direction
  // set by sign(q * cos(alpha)).
  const double lhs_gamma = std::tan(angles.gamma) - 1.0 / (kSqrt3 * cos_alpha * tan2_omega);
  const double lhs_beta = std::tan(angles.beta) - tan2_omega / (kSqrt3 * cos_alpha);
  const double direction = sign_of(q_sign) * sign_of(cos_alpha);
  const bool p1_ok = direction * lhs_gamma >= 0.0;
  const bool p4_ok = direction * lhs_beta >= 0.0;
  // p2 = q * A exactly.
  const bool p2_ok = sign_of(q_sign) * abc_coefficients(angles).a >= 0.0;
  return p1_ok && p4_ok && p2_ok;
}

bool check_positivity_inequalities(const FamilyAngles& angles, double omega, double q_sign) {
  if (auto verdict = positivity_from_inequalities(angles, omega, q_sign)) return *verdict;
  try {
    return closed_form_weights(coefficients_from_angles(angles, omega)).nonnegative(0.0);
  } catch (const FamilyError&) {
    return false;
  }
}

FamilyState assemble_state(const FamilyAngles& angles, double omega) {
  const Coefficients c = coefficients_from_angles(angles, omega);
  const Weights w = solve_weights(angles, omega);
  auto psi = basis_states(c);

  ComplexMatrix rho = projector(psi[0]) * Complex(w.p1);
  rho += projector(psi[1]) * Complex(w.p2);
  rho += projector(psi[2]) * Complex(w.p2);
  rho += projector(psi[3]) * Complex(w.p4);

  return FamilyState{angles, omega, c, w, std::move(psi), DensityMatrix(std::move(rho))};
}

std::vector<FamilyState> assemble_valid_states(const FamilyAngles& angles) {
  const OmegaSolutions solutions = solve_omega(angles);
  std::vector<FamilyState> states;
  std::string last_reason = "no omega branch";
  for (double omega : solutions.branches) {
    try {
      states.push_back(assemble_state(angles, omega));
    } catch (const FamilyError& e) {
      last_reason = e.what();
    }
  }
  if (states.empty()) throw FamilyError(FamilyErrorKind::Infeasible, "no valid omega branch: " + last_reason);
  return states;
}

double orthonormality_residual(const std::array<Ket, 4>& psi) {
  double worst = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j)
    for (std::size_t k = 0; k < psi.size(); ++k) {
      const double expected = j == k ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(inner(psi[j], psi[k]) - expected));
    }
  return worst;
}

std::array<double, 3> imposed_relation_residuals(const ComplexMatrix& rho) {
  if (rho.dim() != 8) throw DimensionError("imposed_relation_residuals: expected 8x8");
  return {
      std::abs(rho(0b000, 0b011) - rho(0b001, 0b010)),
      std::abs(rho(0b010, 0b111) - rho(0b011, 0b110)),
      std::abs(rho(0b000, 0b111) - rho(0b001, 0b110)),
  };
}

CertificationRecord certify(const ComplexMatrix& rho, const Tolerances& tol) {
  if (rho.dim() != 8) throw DimensionError("certify: expected 8x8");
  CertificationRecord rec;

  // Hermiticity is reported as a residual, so the eigensolver must not refuse.
  Tolerances lenient = tol;
  lenient.hermiticity = std::numeric_limits<double>::infinity();

  rec.hermiticity_residual = hermiticity_residual(rho);
  rec.trace_residual = std::abs(rho.trace() - Complex(1.0));
  rec.spectrum = eig_hermitian(rho, lenient).values;
  rec.min_eigenvalue = rec.spectrum.front();

  constexpr std::array<Party, 3> parties{Party::A, Party::B, Party::C};
  for (std::size_t i = 0; i < parties.size(); ++i) {
    const ComplexMatrix pt = partial_transpose(rho, parties[i]);
    rec.pt_spectra[i] = eig_hermitian(pt, lenient).values;
    rec.pt_min_eigenvalues[i] = rec.pt_spectra[i].front();
    rec.pt_residuals[i] = max_abs_diff(rho, pt);
  }
  for (const auto& perm : all_party_permutations())
    rec.symmetry_residual = std::max(rec.symmetry_residual, max_abs_diff(rho, permute_parties(rho, perm)));
  rec.relation_residuals = imposed_relation_residuals(rho);

  auto& ch = rec.checks;
  ch.hermitian = rec.hermiticity_residual <= tol.hermiticity;
  ch.unit_trace = rec.trace_residual <= tol.structure;
  ch.positive = rec.min_eigenvalue >= tol.psd;
  ch.ppt = std::all_of(rec.pt_min_eigenvalues.begin(), rec.pt_min_eigenvalues.end(),
                       [&](double v) { return v >= tol.psd; });
  ch.pt_invariant = std::all_of(rec.pt_residuals.begin(), rec.pt_residuals.end(),
                                [&](double r) { return r <= tol.structure; });
  ch.symmetric = rec.symmetry_residual <= tol.structure;
  ch.relations = std::all_of(rec.relation_residuals.begin(), rec.relation_residuals.end(),
                             [&](double r) { return r <= tol.structure; });
  return rec;
}

CertificationRecord certify(const FamilyState& state, const Tolerances& tol) {
  CertificationRecord rec = certify(state.rho.matrix(), tol);
  rec.orthonormality_residual = orthonormality_residual(state.psi);
  rec.checks.orthonormal = *rec.orthonormality_residual <= tol.orthonormality;
  return rec;
}

}  // namespace bellbound
